#pragma once

#include <map>
#include <string>
#include <vector>

#include "kolmodamp/dynamics.hpp"
#include "kolmodamp/forcing.hpp"

namespace kolmodamp {

// Long-time averaging policy. The limsup over T -> infinity is realized
// as the maximum of trailing-window means taken after burn_in; all three
// fields are in time units (stride counts rows).
struct AveragingPolicy {
    double burn_in = 0.0;
    double window = 0.0;
    int stride = 1;
    double envelope_c_max = 10.0; // pass threshold for the decay-envelope constant

    void validate(double beta) const {
        if (!(window > 0.0)) fail(ErrorCode::invalid_argument, "averaging window must be positive");
        if (burn_in < 0.0) fail(ErrorCode::invalid_argument, "burn_in must be >= 0");
        if (stride < 1) fail(ErrorCode::invalid_argument, "stride must be >= 1");
        if (!(envelope_c_max > 0.0)) fail(ErrorCode::invalid_argument, "envelope_c_max must be positive");
        if (beta > 0.0 && burn_in * beta < 5.0 - 1e-9)
            fail(ErrorCode::config, "burn_in must be >= 5/beta = " + std::to_string(5.0 / beta) +
                                        " so the initial-data term of the decay envelope is negligible");
    }
};

struct Verdict {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0; // pass iff measured <= tolerance
    bool gating = true;     // false: hypothesis-dependent, reported but not aggregated
    std::string detail;
};

// Long-time averages and derived numbers for one run.
struct DiagnosticsReport {
    double epsilon = 0.0;    // nu * avg ||u||_H1^2 / ell0^3
    double U = 0.0;          // sqrt(avg ||u||_L2^2 / ell0^3)
    double Re = 0.0;         // U L / nu
    double lT = 0.0;         // sqrt(nu U^2 / epsilon)
    double kolmogorov_ratio = 0.0; // eps L / U^3
    double gr_re_ratio = 0.0;      // Gr / Re^2
    double taylor_ratio = 0.0;     // lT / ell0
    double k41_taylor = 0.0;       // lT sqrt(Re) / ell0
    double envelope_c = 0.0;
    double u2_drift = 0.0;         // window-to-window relative drift of U^2
    bool insufficient_horizon = false;
    std::vector<Verdict> verdicts;
};

// Closed-form constants of the Gr/Re and dissipation-law estimates.
struct TheoreticalConstants {
    double a1 = 0.0; // c0 / (400^2 theta^4 G0)
    double a2 = 0.0; // ((1/2c1)(-c3 sqrt(c0/G0) + sqrt(c3^2 c0/G0 + 4 c1)))^-2
    double b1 = 0.0; // a1 / (20 theta)^2
    double b2 = 0.0; // a2
    bool g0_condition = false; // 4 a2 G0 / c0 <= 1
    bool compat = false;       // c0 (1 + sqrt(c3))^2 / c1 < G0
};

struct SweepVerdicts {
    double slope_gr = 0.0, slope_u = 0.0, slope_eps = 0.0;
    double band_gr_re2 = 0.0, band_fl_u2 = 0.0, band_kolmogorov = 0.0, band_taylor = 0.0;
    double gr_span = 0.0, re_span = 0.0;
    std::vector<Verdict> verdicts;
};

namespace diag {

// (epsilon, U) and the drift indicator from a ledger-row sequence.
// Requires rows to cover burn_in + 3*window of time; throws
// InsufficientHorizon otherwise.
void accumulate(const std::vector<EnergyLedgerRow>& rows, const AveragingPolicy& policy,
                const ModelParams& params, DiagnosticsReport& report);

// Minimal c such that ||u(t)||^2 <= exp(-beta t) ||u0||^2
//                       + c ||f||_Hm1^2 / (nu beta) (1 - exp(-beta t))
// over the whole run (beta > 0). For classical runs (beta = 0) returns
// instead the max of (||u(t)||^2 - ||u0||^2) nu / (t ||f||_Hm1^2), the
// linear-growth control ratio.
double envelope_check(const std::vector<EnergyLedgerRow>& rows, double kinetic0,
                      const ModelParams& params, const NormSet& force_norms);

// Appendix-style dissipation bounds with tolerance factor 1.05 on the
// passing side; box_len enters through the Poincare constant.
std::vector<Verdict> dissipation_bounds_check(const DiagnosticsReport& report,
                                              const ForceNumbers& numbers, const ModelParams& params,
                                              const NormSet& force_norms, double box_len);

// Fills the ratio fields (kolmogorov, taylor, k41) of the report.
// Throws DegenerateRun when U or epsilon is below the machine floor.
void kolmogorov_and_taylor(DiagnosticsReport& report, const ForceNumbers& numbers,
                           const ModelParams& params);

TheoreticalConstants theoretical_constants(const ForceNumbers& numbers, double theta, double G0);

// Per-run scalar bundle consumed by sweep_analysis.
struct SweepPoint {
    double ell = 0.0;
    ForceNumbers numbers;
    DiagnosticsReport report;
};

// Pass thresholds: slopes (6, 3/2, 3) +/- slope_tol (fractional),
// band-widths max/min below band_max (taylor band below taylor_band_max),
// Gr span >= 100 and sqrt(Re) span >= 10.
struct SweepThresholds {
    double slope_tol = 0.2;
    double band_max = 5.0;
    double taylor_band_max = 3.0;
    double gr_span_min = 100.0;
    double sqrt_re_span_min = 10.0;
};

SweepVerdicts sweep_analysis(const std::vector<SweepPoint>& points,
                             const SweepThresholds& thresholds = {});

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace diag
} // namespace kolmodamp
