#include "kolmodamp/dynamics.hpp"

#include <cmath>

#include "kolmodamp/reduction.hpp"

namespace kolmodamp {

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::damped_default: return "damped-default";
        case RunMode::damped_custom: return "damped-custom";
        case RunMode::classical: return "classical";
        case RunMode::mollified: return "mollified";
    }
    return "?";
}

std::optional<RunMode> run_mode_from_name(const std::string& s) {
    if (s == "damped-default") return RunMode::damped_default;
    if (s == "damped-custom") return RunMode::damped_custom;
    if (s == "classical") return RunMode::classical;
    if (s == "mollified") return RunMode::mollified;
    return std::nullopt;
}

void ModelParams::validate() const {
    if (!(nu > 0.0)) fail(ErrorCode::invalid_argument, "nu must be positive");
    if (!(ell0 > 0.0)) fail(ErrorCode::invalid_argument, "ell0 must be positive");
    if (!(theta >= 1.0)) fail(ErrorCode::invalid_argument, "theta must be >= 1");
    if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "dt must be positive");
    if (t_end < 0.0) fail(ErrorCode::invalid_argument, "t_end must be >= 0");
    if (!(cfl_limit > 0.0 && cfl_limit <= 0.5))
        fail(ErrorCode::invalid_argument, "cfl_limit must lie in (0, 0.5]");
    if (mode == RunMode::classical) {
        if (alpha != 0.0) fail(ErrorCode::config, "classical mode requires alpha = 0");
    } else {
        if (!(alpha >= 0.0) || !(kappa > 0.0))
            fail(ErrorCode::invalid_argument, "damped modes need alpha >= 0 and kappa > 0");
    }
    if (mode == RunMode::mollified && !(delta > 0.0))
        fail(ErrorCode::config, "mollified mode requires delta > 0");
    if (mode != RunMode::mollified && delta != 0.0)
        fail(ErrorCode::config, "delta > 0 is only valid in mollified mode");
}

namespace dynamics {

namespace {

// tanh(x)/x with the small-x branch; the exact average decay rate per
// unit energy of the trapezoid pairing (see EnergyLedgerRow).
double tanh_ratio(double x) {
    if (x < 1e-5) return 1.0 - x * x / 3.0;
    return std::tanh(x) / x;
}

} // namespace

Stepper::Stepper(const GridSpec& grid, ModelParams params, const SpectralField& force)
    : grid_(grid), params_(params), force_(force), nlws_(grid), stage_(grid), rhs0_(grid),
      rhs1_(grid), prev_(grid) {
    params_.validate();
    if (force.grid() != grid) fail(ErrorCode::invalid_argument, "stepper: force grid mismatch");
    double fdiv = spectral::divergence_ratio(force_);
    if (fdiv > spectral::tol_div)
        fail(ErrorCode::invalid_argument, "stepper: force is not divergence-free");

    const std::size_t count = static_cast<std::size_t>(grid.coeff_count());
    gfactor_.resize(count);
    efactor_.resize(count);
    wdiss_.resize(count);
    wdamp_.resize(count);
    whw_.resize(count);
    const double dk = grid.dk();
    const double k2cut = params_.kappa * params_.kappa;
    for_each_mode(grid, [&](std::size_t idx, int mx, int my, int mz) {
        double k2 = dk * dk * (static_cast<double>(mx) * mx + static_cast<double>(my) * my +
                               static_cast<double>(mz) * mz);
        double visc = params_.nu * k2;
        double damp = (params_.alpha > 0.0 && k2 < k2cut) ? params_.alpha : 0.0;
        double g = visc + damp;
        gfactor_[idx] = g;
        efactor_[idx] = std::exp(-g * params_.dt);
        double hw = hermitian_weight(grid, mz);
        double tr = tanh_ratio(g * params_.dt);
        whw_[idx] = hw;
        wdiss_[idx] = 2.0 * visc * tr * hw;
        wdamp_[idx] = 2.0 * damp * tr * hw;
    });
}

EnergyLedgerRow Stepper::advance(SimState& state, double delta) {
    const double dt = params_.dt;
    const std::size_t count = static_cast<std::size_t>(grid_.coeff_count());
    const double dx = grid_.dx();
    // The state is divergence-free by construction (projected advection,
    // diagonal semigroup); re-validate the invariant periodically.
    const bool check_div = state.step_index % 512 == 0;

    double umax0 = 0.0;
    nlws_.eval_into(state.u, delta, &umax0, rhs0_, check_div);
    if (umax0 * dt / dx > params_.cfl_limit)
        fail(ErrorCode::cfl_violation, "CFL budget exceeded: u_max dt/dx = " +
                                           std::to_string(umax0 * dt / dx) + " > " +
                                           std::to_string(params_.cfl_limit));

    // R(u) = f - P((u.grad)u); stage_ = E (u + dt R(u))
    for (int c = 0; c < 3; ++c) {
        const complexd* u = state.u.component(c);
        const complexd* f = force_.component(c);
        complexd* r = rhs0_.component(c);
        complexd* st = stage_.component(c);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            complexd rk = f[k] - r[k];
            r[k] = rk;
            st[k] = efactor_[k] * (u[k] + dt * rk);
        }
    }

    double umax1 = 0.0;
    nlws_.eval_into(stage_, delta, &umax1, rhs1_, false);
    if (umax1 * dt / dx > params_.cfl_limit)
        fail(ErrorCode::cfl_violation, "CFL budget exceeded at stage velocity");

    // write u_{n+1} into the spare buffer, then swap so prev_ keeps u_n
    if (prev_.grid() != grid_) prev_ = SpectralField(grid_);
    for (int c = 0; c < 3; ++c) {
        const complexd* u = state.u.component(c);
        const complexd* f = force_.component(c);
        const complexd* r0 = rhs0_.component(c);
        const complexd* nl1 = rhs1_.component(c);
        complexd* nu = prev_.component(c);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            complexd r1 = f[k] - nl1[k];
            nu[k] = efactor_[k] * (u[k] + 0.5 * dt * r0[k]) + 0.5 * dt * r1;
        }
    }
    std::swap(state.u, prev_);
    state.t += dt;
    state.step_index += 1;

    // Ledger columns in one fused pass per component: weighted endpoint
    // trapezoid for dissipation/damping, plain trapezoid for kinetic and
    // injection (see EnergyLedgerRow).
    const double vol = grid_.box_len * grid_.box_len * grid_.box_len;
    double kin_before = 0.0, kin_after = 0.0, diss = 0.0, damp = 0.0, injection = 0.0;
    const bool damped = params_.alpha > 0.0;
    scratch_kin0_.resize(count);
    scratch_kin1_.resize(count);
    scratch_diss_.resize(count);
    scratch_damp_.resize(count);
    scratch_inj_.resize(count);
    for (int c = 0; c < 3; ++c) {
        const complexd* u0 = prev_.component(c);
        const complexd* u1 = state.u.component(c);
        const complexd* f = force_.component(c);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            double n0 = std::norm(u0[k]), n1 = std::norm(u1[k]);
            double pair = 0.5 * (n0 + n1);
            scratch_kin0_[k] = whw_[k] * n0;
            scratch_kin1_[k] = whw_[k] * n1;
            scratch_diss_[k] = wdiss_[k] * pair;
            if (damped) scratch_damp_[k] = wdamp_[k] * pair;
            const complexd& fk = f[k];
            scratch_inj_[k] = (fk.real() != 0.0 || fk.imag() != 0.0)
                                  ? whw_[k] * (fk.real() * (u0[k].real() + u1[k].real()) +
                                               fk.imag() * (u0[k].imag() + u1[k].imag()))
                                  : 0.0;
        }
        kin_before += pairwise_sum(scratch_kin0_);
        kin_after += pairwise_sum(scratch_kin1_);
        diss += pairwise_sum(scratch_diss_);
        if (damped) damp += pairwise_sum(scratch_damp_);
        injection += pairwise_sum(scratch_inj_);
    }
    kin_before *= vol;
    kin_after *= vol;
    diss *= vol;
    damp *= vol;
    injection *= vol;

    if (!std::isfinite(kin_after))
        fail(ErrorCode::non_finite, "solution became non-finite at t = " + std::to_string(state.t));

    EnergyLedgerRow row;
    row.t = state.t;
    row.kinetic = kin_after;
    row.dissipation = diss;
    row.injection = injection;
    row.damping = damp;
    row.residual = (kin_after - kin_before) / dt - (injection - diss - damp);
    return row;
}

EnergyLedgerRow Stepper::step(SimState& state) { return advance(state, 0.0); }

EnergyLedgerRow Stepper::step_mollified(SimState& state, double delta) {
    if (!(delta > 0.0)) fail(ErrorCode::invalid_argument, "step_mollified requires delta > 0");
    return advance(state, delta);
}

SimState run(SimState initial, const SpectralField& force, const ModelParams& params,
             const RunSinks& sinks) {
    Stepper stepper(initial.u.grid(), params, force);
    SimState state = std::move(initial);
    std::uint64_t nsteps = static_cast<std::uint64_t>(std::floor(params.t_end / params.dt + 1e-9));
    for (std::uint64_t s = state.step_index; s < nsteps; ++s) {
        EnergyLedgerRow row = params.mode == RunMode::mollified
                                  ? stepper.step_mollified(state, params.delta)
                                  : stepper.step(state);
        if (sinks.on_row) sinks.on_row(row);
        if (sinks.snapshot_every && state.step_index % sinks.snapshot_every == 0 && sinks.on_snapshot)
            sinks.on_snapshot(state);
        if (sinks.checkpoint_every && state.step_index % sinks.checkpoint_every == 0 &&
            sinks.on_checkpoint)
            sinks.on_checkpoint(state);
    }
    return state;
}

} // namespace dynamics
} // namespace kolmodamp
