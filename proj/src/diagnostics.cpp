#include "kolmodamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kolmodamp::diag {

namespace {

Verdict make_verdict(const std::string& name, double measured_over_bound, double tolerance,
                     const std::string& detail = "") {
    Verdict v;
    v.name = name;
    v.measured = measured_over_bound;
    v.tolerance = tolerance;
    v.pass = measured_over_bound <= tolerance;
    v.detail = detail;
    return v;
}

} // namespace

void accumulate(const std::vector<EnergyLedgerRow>& rows, const AveragingPolicy& policy,
                const ModelParams& params, DiagnosticsReport& report) {
    policy.validate(params.beta());
    const double horizon = rows.empty() ? 0.0 : rows.back().t;
    if (horizon < policy.burn_in + 3.0 * policy.window)
        fail(ErrorCode::insufficient_horizon,
             "run horizon " + std::to_string(horizon) + " < burn_in + 3*window = " +
                 std::to_string(policy.burn_in + 3.0 * policy.window));

    // Sampled rows after burn-in. Each row's rate columns already average
    // the step that produced it, so a window mean is a stride-thinned
    // Riemann sum.
    std::vector<double> t, kin, h1sq;
    t.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); i += static_cast<std::size_t>(policy.stride)) {
        const auto& r = rows[i];
        if (r.t < policy.burn_in) continue;
        t.push_back(r.t);
        kin.push_back(r.kinetic);
        h1sq.push_back(r.dissipation / (2.0 * params.nu)); // step-mean ||u||_H1^2
    }
    if (t.size() < 4) fail(ErrorCode::insufficient_horizon, "too few post-burn-in samples");

    // Max over trailing windows (limsup surrogate) for both averages.
    const double ell0_3 = params.ell0 * params.ell0 * params.ell0;
    double best_kin = -1.0, best_h1 = -1.0;
    double first_kin = -1.0, last_kin = -1.0;
    std::size_t lo = 0;
    double sum_kin = 0.0, sum_h1 = 0.0;
    std::vector<double> wmean_kin;
    for (std::size_t hi = 0; hi < t.size(); ++hi) {
        sum_kin += kin[hi];
        sum_h1 += h1sq[hi];
        while (t[hi] - t[lo] > policy.window) {
            sum_kin -= kin[lo];
            sum_h1 -= h1sq[lo];
            ++lo;
        }
        if (t[hi] - t[0] < policy.window) continue; // window not yet filled
        double count = static_cast<double>(hi - lo + 1);
        double mk = sum_kin / count, mh = sum_h1 / count;
        wmean_kin.push_back(mk);
        if (first_kin < 0.0) first_kin = mk;
        last_kin = mk;
        best_kin = std::max(best_kin, mk);
        best_h1 = std::max(best_h1, mh);
    }
    if (best_kin < 0.0) fail(ErrorCode::insufficient_horizon, "no complete trailing window");

    report.U = std::sqrt(best_kin / ell0_3);
    report.epsilon = params.nu * best_h1 / ell0_3;
    report.u2_drift = (first_kin > 0.0) ? std::abs(last_kin - first_kin) / first_kin : 0.0;
}

double envelope_check(const std::vector<EnergyLedgerRow>& rows, double kinetic0,
                      const ModelParams& params, const NormSet& force_norms) {
    const double fh2 = force_norms.hm1 * force_norms.hm1;
    const double beta = params.beta();
    double c_min = 0.0;
    if (beta > 0.0) {
        const double scale = fh2 / (params.nu * beta);
        for (const auto& r : rows) {
            if (!(r.t > 0.0)) continue;
            double decay = std::exp(-beta * r.t) * kinetic0;
            double excess = r.kinetic - decay;
            if (excess <= 0.0) continue;
            double denom = scale * (1.0 - std::exp(-beta * r.t));
            if (denom <= 0.0) return std::numeric_limits<double>::infinity();
            c_min = std::max(c_min, excess / denom);
        }
    } else {
        // classical mode: linear-growth control ratio
        for (const auto& r : rows) {
            if (!(r.t > 0.0)) continue;
            double excess = r.kinetic - kinetic0;
            if (excess <= 0.0) continue;
            if (fh2 <= 0.0) return std::numeric_limits<double>::infinity();
            c_min = std::max(c_min, excess * params.nu / (r.t * fh2));
        }
    }
    return c_min;
}

std::vector<Verdict> dissipation_bounds_check(const DiagnosticsReport& report,
                                              const ForceNumbers& numbers, const ModelParams& params,
                                              const NormSet& force_norms, double box_len) {
    const double tol = 1.05;
    const double ell0_3 = params.ell0 * params.ell0 * params.ell0;
    const double fh2 = force_norms.hm1 * force_norms.hm1;
    std::vector<Verdict> out;

    double bound_a = fh2 / (params.nu * ell0_3);
    out.push_back(make_verdict("eps_le_force_hm1", report.epsilon / bound_a, tol,
                               "eps <= ||f||_Hm1^2/(nu ell0^3)"));

    double fu = numbers.F * report.U;
    out.push_back(make_verdict("eps_le_FU", report.epsilon / fu, tol, "eps <= F U"));

    double poincare_lhs = params.nu * (4.0 * M_PI * M_PI / (box_len * box_len)) * report.U * report.U * ell0_3;
    out.push_back(make_verdict("poincare_U", poincare_lhs / (fh2 / params.nu), tol,
                               "nu (2pi/box)^2 U^2 ell0^3 <= ||f||_Hm1^2/nu"));

    double sq = 20.0 * params.theta;
    Verdict v4 = make_verdict("FU_le_400theta2_eps", fu / (sq * sq * report.epsilon), tol,
                              "F U <= (20 theta)^2 eps (requires the Grashof condition)");
    v4.gating = false;
    out.push_back(v4);

    double lhs5 = params.nu / (params.ell0 * params.ell0) * report.U * report.U;
    Verdict v5 = make_verdict("nuU2_le_FU_plus_400theta2_eps",
                              lhs5 / (fu + sq * sq * report.epsilon), tol,
                              "(nu/ell0^2) U^2 <= F U + (20 theta)^2 eps");
    v5.gating = false;
    out.push_back(v5);
    return out;
}

void kolmogorov_and_taylor(DiagnosticsReport& report, const ForceNumbers& numbers,
                           const ModelParams& params) {
    const double floor = 1e-300;
    if (report.U < floor || report.epsilon < floor)
        fail(ErrorCode::degenerate_run, "U or epsilon below machine floor");
    report.lT = std::sqrt(params.nu * report.U * report.U / report.epsilon);
    report.Re = report.U * numbers.L / params.nu;
    report.kolmogorov_ratio = report.epsilon * numbers.L / (report.U * report.U * report.U);
    report.gr_re_ratio = numbers.Gr / (report.Re * report.Re);
    report.taylor_ratio = report.lT / params.ell0;
    report.k41_taylor = report.lT * std::sqrt(report.Re) / params.ell0;
}

TheoreticalConstants theoretical_constants(const ForceNumbers& numbers, double theta, double G0) {
    TheoreticalConstants out;
    const double c0 = numbers.c0, c1 = numbers.c1, c3 = numbers.c3;
    out.a1 = c0 / (400.0 * 400.0 * theta * theta * theta * theta * G0);
    double z = std::sqrt(c0 / G0);
    double root = (-c3 * z + std::sqrt(c3 * c3 * z * z + 4.0 * c1)) / (2.0 * c1);
    out.a2 = 1.0 / (root * root);
    out.b1 = out.a1 / ((20.0 * theta) * (20.0 * theta));
    out.b2 = out.a2;
    out.g0_condition = 4.0 * out.a2 * G0 / c0 <= 1.0;
    out.compat = c0 * (1.0 + std::sqrt(c3)) * (1.0 + std::sqrt(c3)) / c1 < G0;
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::invalid_argument, "loglog_slope: bad input");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepVerdicts sweep_analysis(const std::vector<SweepPoint>& points, const SweepThresholds& th) {
    if (points.size() < 4)
        fail(ErrorCode::insufficient_sweep,
             "sweep needs >= 4 points, got " + std::to_string(points.size()));

    std::vector<double> ell, gr, u, eps, re;
    std::vector<double> band_gr_re2, band_fl_u2, band_kol, band_taylor;
    for (const auto& p : points) {
        ell.push_back(p.ell);
        gr.push_back(p.numbers.Gr);
        u.push_back(p.report.U);
        eps.push_back(p.report.epsilon);
        re.push_back(p.report.Re);
        band_gr_re2.push_back(p.report.gr_re_ratio);
        band_fl_u2.push_back(p.numbers.F * p.numbers.L / (p.report.U * p.report.U));
        band_kol.push_back(p.report.kolmogorov_ratio);
        band_taylor.push_back(p.report.taylor_ratio);
    }
    auto span = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    };

    SweepVerdicts out;
    out.slope_gr = loglog_slope(ell, gr);
    out.slope_u = loglog_slope(ell, u);
    out.slope_eps = loglog_slope(ell, eps);
    out.band_gr_re2 = span(band_gr_re2);
    out.band_fl_u2 = span(band_fl_u2);
    out.band_kolmogorov = span(band_kol);
    out.band_taylor = span(band_taylor);
    out.gr_span = span(gr);
    out.re_span = span(re);

    auto slope_verdict = [&](const std::string& name, double slope, double target) {
        return make_verdict(name, std::abs(slope - target) / target, th.slope_tol,
                            "slope = " + std::to_string(slope) + ", target " + std::to_string(target));
    };
    out.verdicts.push_back(slope_verdict("slope_gr_vs_ell_6", out.slope_gr, 6.0));
    out.verdicts.push_back(slope_verdict("slope_u_vs_ell_1.5", out.slope_u, 1.5));
    out.verdicts.push_back(slope_verdict("slope_eps_vs_ell_3", out.slope_eps, 3.0));
    out.verdicts.push_back(make_verdict("band_gr_re2", out.band_gr_re2, th.band_max));
    out.verdicts.push_back(make_verdict("band_fl_u2", out.band_fl_u2, th.band_max));
    out.verdicts.push_back(make_verdict("band_kolmogorov", out.band_kolmogorov, th.band_max));
    out.verdicts.push_back(make_verdict("band_taylor", out.band_taylor, th.taylor_band_max));
    out.verdicts.push_back(make_verdict("gr_span_ge_100", th.gr_span_min / out.gr_span, 1.0,
                                        "Gr span = " + std::to_string(out.gr_span)));
    out.verdicts.push_back(make_verdict("sqrt_re_span_ge_10",
                                        th.sqrt_re_span_min / std::sqrt(out.re_span), 1.0,
                                        "sqrt(Re) span = " + std::to_string(std::sqrt(out.re_span))));
    return out;
}

} // namespace kolmodamp::diag
