#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "kolmodamp/spectral.hpp"

namespace kolmodamp {

enum class RunMode { damped_default, damped_custom, classical, mollified };

const char* run_mode_name(RunMode m);
std::optional<RunMode> run_mode_from_name(const std::string& s);

// Physical and scheme parameters. Paper-default mode pins
// alpha = nu/ell0^2 and kappa = 1/(20 theta ell0); classical mode is
// alpha = 0; mollified mode adds the Gaussian advection filter of width
// delta on top of the paper-default damping.
struct ModelParams {
    double nu = 1.0;
    double ell0 = 1.0;
    double theta = 1.0;
    double alpha = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double dt = 0.0;
    double t_end = 0.0;
    double cfl_limit = 0.25;
    RunMode mode = RunMode::damped_default;

    static ModelParams paper_default(double nu, double ell0, double theta) {
        ModelParams p;
        p.nu = nu;
        p.ell0 = ell0;
        p.theta = theta;
        p.alpha = nu / (ell0 * ell0);
        p.kappa = 1.0 / (20.0 * theta * ell0);
        return p;
    }

    // Decay-envelope rate of the L2 control; min(2 alpha, nu kappa^2).
    double beta() const {
        if (alpha <= 0.0) return 0.0;
        return std::min(2.0 * alpha, nu * kappa * kappa);
    }

    void validate() const;
};

struct SimState {
    double t = 0.0;
    std::uint64_t step_index = 0;
    SpectralField u;
};

/* Per-step energy budget. kinetic is ||u||_L2^2 at the row time; the
   rate columns are averaged over the step that produced the row:
     dissipation ~ 2 nu ||u||_H1^2,  injection ~ 2 <f, u>,
     damping ~ 2 alpha ||P_kappa u||_L2^2,
   residual = d/dt kinetic - (injection - dissipation - damping).
   Dissipation and damping carry the exact per-mode decay weight
   tanh(g dt)/(g dt) (g = nu |xi|^2 + alpha 1_{|xi|<kappa}), which makes
   the row exact for pure semigroup decay and reduces to the plain
   endpoint trapezoid as dt -> 0; injection is endpoint-trapezoidal. The
   residual therefore measures the scheme's nonlinear/forcing truncation
   error, which shrinks as dt^2. */
struct EnergyLedgerRow {
    double t = 0.0;
    double kinetic = 0.0;
    double dissipation = 0.0;
    double injection = 0.0;
    double damping = 0.0;
    double residual = 0.0;
};

namespace dynamics {

/* One step of the integrating-factor Heun scheme. The diagonal operator
   G = nu |xi|^2 + alpha 1_{|xi|<kappa} is applied in closed form
   (exp(-G dt)); the projected advection term and the stationary force
   are advanced with the two-stage explicit rule

     u*      = E (u_n + dt R(u_n)),     R(u) = f - P((u_adv . grad) u)
     u_{n+1} = E u_n + dt/2 (E R(u_n) + R(u*)),   E = exp(-G dt).

   With R = 0 the scheme is exact per mode. */
class Stepper {
  public:
    Stepper(const GridSpec& grid, ModelParams params, const SpectralField& force);

    // Advances state by params.dt, returns the ledger row for the step.
    // Throws CflViolation if a stage velocity exceeds the CFL budget and
    // NonFinite if the new state is not finite.
    EnergyLedgerRow step(SimState& state);

    EnergyLedgerRow step_mollified(SimState& state, double delta);

    const ModelParams& params() const { return params_; }

  private:
    EnergyLedgerRow advance(SimState& state, double delta);

    GridSpec grid_;
    ModelParams params_;
    SpectralField force_;
    std::vector<double> gfactor_; // per-mode G = nu |xi|^2 + alpha 1_{|xi|<kappa}
    std::vector<double> efactor_; // per-mode exp(-G dt)
    std::vector<double> wdiss_;   // ledger weights (rate * tanh-ratio * pair weight)
    std::vector<double> wdamp_;
    std::vector<double> whw_;     // hermitian pair weight
    spectral::NonlinearWorkspace nlws_;
    SpectralField stage_, rhs0_, rhs1_, prev_;
    std::vector<double> scratch_kin0_, scratch_kin1_, scratch_diss_, scratch_damp_, scratch_inj_;
};

struct RunSinks {
    std::function<void(const EnergyLedgerRow&)> on_row;
    std::function<void(const SimState&)> on_snapshot;
    std::function<void(const SimState&)> on_checkpoint;
    std::uint64_t snapshot_every = 0;   // steps; 0 disables
    std::uint64_t checkpoint_every = 0; // steps; 0 disables
};

// Steps from the given state until t_end (floor(t_end/dt) steps from
// t = 0). Deterministic for a fixed config; sinks fire in step order.
SimState run(SimState initial, const SpectralField& force, const ModelParams& params,
             const RunSinks& sinks);

} // namespace dynamics
} // namespace kolmodamp
