#include <doctest.h>

#include <cmath>

#include "kolmodamp/dynamics.hpp"
#include "kolmodamp/forcing.hpp"

using namespace kolmodamp;

namespace {

// Small box with a populated damping band: kappa = 1.2 with fundamental
// wavenumber 2 pi / 16 ~ 0.39, so modes |m| <= 3 are damped.
ModelParams custom_params(double dt, double t_end) {
    ModelParams p;
    p.nu = 1.0;
    p.ell0 = 1.0;
    p.theta = 1.0;
    p.mode = RunMode::damped_custom;
    p.alpha = 0.8;
    p.kappa = 1.2;
    p.dt = dt;
    p.t_end = t_end;
    p.cfl_limit = 0.5;
    return p;
}

SpectralField single_mode(const GridSpec& g, int comp, int mx, int my, int mz, complexd a) {
    SpectralField u(g);
    int ix = mx >= 0 ? mx : mx + g.n;
    int iy = my >= 0 ? my : my + g.n;
    u.at(comp, ix, iy, mz) = a;
    spectral::hermitian_symmetrize(u);
    return u;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero force, zero data stays exactly zero") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(0.05, 1.0);
    SimState st;
    st.u = SpectralField(g);
    dynamics::Stepper stepper(g, p, SpectralField(g));
    for (int i = 0; i < 20; ++i) {
        auto row = stepper.step(st);
        CHECK(row.kinetic == 0.0);
        CHECK(row.residual == 0.0);
    }
    for (const auto& z : st.u.raw()) CHECK(z == complexd(0.0, 0.0));
}

TEST_CASE("single mode above kappa decays at exactly nu |k|^2") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(0.02, 10.0);
    // k = (4, 0, 0): |k| = 4 * 2pi/16 = 1.571 >= kappa = 1.2, transverse a
    SimState st;
    st.u = single_mode(g, 1, 4, 0, 0, complexd(0.3, 0.1));
    double k2 = std::pow(g.dk() * 4, 2);
    double e0 = spectral::l2_norm_sq(st.u);
    dynamics::Stepper stepper(g, p, SpectralField(g));
    for (int i = 0; i < 100; ++i) stepper.step(st);
    double expect = e0 * std::exp(-2.0 * p.nu * k2 * st.t);
    CHECK(spectral::l2_norm_sq(st.u) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("single mode below kappa decays at nu |k|^2 + alpha, ledger agrees") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(0.02, 10.0);
    // k = (2, 0, 0): |k| = 0.785 < kappa = 1.2, damped
    SimState st;
    st.u = single_mode(g, 2, 2, 0, 0, complexd(0.0, 0.5));
    double k2 = std::pow(g.dk() * 2, 2);
    double rate = p.nu * k2 + p.alpha;
    double e0 = spectral::l2_norm_sq(st.u);
    dynamics::Stepper stepper(g, p, SpectralField(g));
    double resid_max = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto row = stepper.step(st);
        double denom = std::abs(row.injection) + row.dissipation + row.damping + 1e-30;
        resid_max = std::max(resid_max, std::abs(row.residual) / denom);
        // decay rate recovered from the ledger columns
        double ledger_rate = (row.dissipation + row.damping) / (2.0 * 0.5 *
                             (row.kinetic + row.kinetic / std::exp(-2.0 * rate * p.dt)));
        CHECK(ledger_rate == doctest::Approx(rate * std::tanh(rate * p.dt) / (rate * p.dt))
                                 .epsilon(1e-10));
    }
    double expect = e0 * std::exp(-2.0 * rate * st.t);
    CHECK(spectral::l2_norm_sq(st.u) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(resid_max < 1e-10); // exact linear case
}

TEST_CASE("damping column is zero for fields above kappa and in classical mode") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(0.02, 1.0);
    SimState st;
    st.u = single_mode(g, 1, 5, 0, 0, complexd(0.2, 0.0)); // above kappa
    dynamics::Stepper stepper(g, p, SpectralField(g));
    auto row = stepper.step(st);
    CHECK(row.damping == 0.0);
    CHECK(row.dissipation > 0.0);

    ModelParams classical;
    classical.nu = 1.0;
    classical.ell0 = 1.0;
    classical.theta = 1.0;
    classical.mode = RunMode::classical;
    classical.alpha = 0.0;
    classical.dt = 0.02;
    classical.t_end = 1.0;
    SimState st2;
    st2.u = single_mode(g, 2, 1, 1, 0, complexd(0.1, 0.2));
    st2.u = spectral::leray_project(st2.u);
    dynamics::Stepper s2(g, classical, SpectralField(g));
    auto row2 = s2.step(st2);
    CHECK(row2.damping == 0.0);
    CHECK(classical.beta() == 0.0);
}

TEST_CASE("beta arithmetic: paper-default gives nu/(400 theta^2 ell0^2)") {
    ModelParams p = ModelParams::paper_default(0.01, 1.0, 1.0);
    CHECK(p.beta() == doctest::Approx(2.5e-5).epsilon(1e-12));
    CHECK(p.beta() == doctest::Approx(std::min(2.0 * p.alpha, p.nu * p.kappa * p.kappa)).epsilon(1e-14));
    ModelParams p2 = ModelParams::paper_default(2.0, 0.5, 3.0);
    CHECK(p2.beta() == doctest::Approx(2.0 / (400.0 * 9.0 * 0.25)).epsilon(1e-12));
}

TEST_CASE("forced nonlinear run: ledger residual is second order in dt") {
    GridSpec g{16, 16.0};
    ProfileSpec prof;
    ForceSpec fs = ForceSpec::paper_default(prof, 1.0, 2.0, 1.0);
    SpectralField force = forcing::assemble_force(fs, g);
    SpectralField u0 = spectral::random_divergence_free(g, 17, 5.0);

    auto max_resid = [&](double dt, double horizon) {
        ModelParams p = custom_params(dt, horizon);
        SimState st;
        st.u = u0;
        dynamics::Stepper stepper(g, p, force);
        double worst = 0.0;
        std::uint64_t nsteps = static_cast<std::uint64_t>(horizon / dt + 0.5);
        for (std::uint64_t i = 0; i < nsteps; ++i) {
            auto row = stepper.step(st);
            if (row.t < horizon * 0.5) continue; // compare over matched late times
            double denom = std::abs(row.injection) + row.dissipation + row.damping + 1e-30;
            worst = std::max(worst, std::abs(row.residual) / denom);
        }
        return worst;
    };

    double r1 = max_resid(0.04, 2.0);
    double r2 = max_resid(0.02, 2.0);
    double r4 = max_resid(0.01, 2.0);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.5);
    CHECK(r2 / r4 > 3.0);
    CHECK(r2 / r4 < 5.5);
}

TEST_CASE("mollified step: transverse mode unaffected, delta halving is monotone") {
    GridSpec g{16, 16.0};
    ProfileSpec prof;
    ForceSpec fs = ForceSpec::paper_default(prof, 1.0, 2.0, 1.0);
    SpectralField force = forcing::assemble_force(fs, g);
    SpectralField u0 = spectral::random_divergence_free(g, 5, 4.0);

    ModelParams p = custom_params(0.02, 0.1);
    dynamics::Stepper ref(g, p, force);
    SimState base;
    base.u = u0;
    ref.step(base);

    double prev = 1e300;
    for (double delta : {0.8, 0.4, 0.2, 0.1}) {
        dynamics::Stepper s(g, p, force);
        SimState st;
        st.u = u0;
        s.step_mollified(st, delta);
        double diff = 0.0;
        for (std::size_t i = 0; i < st.u.raw().size(); ++i)
            diff += std::norm(st.u.raw()[i] - base.u.raw()[i]);
        diff = std::sqrt(diff);
        CHECK(diff < prev);
        prev = diff;
    }

    // ledger residual tolerance matches the unmollified path
    ModelParams pm = custom_params(0.02, 1.0);
    pm.mode = RunMode::mollified;
    pm.delta = 0.3;
    dynamics::Stepper sm(g, pm, force);
    SimState st;
    st.u = u0;
    for (int i = 0; i < 20; ++i) {
        auto row = sm.step_mollified(st, pm.delta);
        double denom = std::abs(row.injection) + row.dissipation + row.damping + 1e-30;
        CHECK(std::abs(row.residual) / denom < 5e-3);
    }
}

TEST_CASE("divergence is preserved over a forced nonlinear run") {
    GridSpec g{16, 16.0};
    ProfileSpec prof;
    ForceSpec fs = ForceSpec::paper_default(prof, 1.0, 2.0, 1.0);
    SpectralField force = forcing::assemble_force(fs, g);
    ModelParams p = custom_params(0.03, 3.0);
    SimState st;
    st.u = spectral::random_divergence_free(g, 23, 3.0);
    dynamics::Stepper stepper(g, p, force);
    for (int i = 0; i < 100; ++i) stepper.step(st);
    CHECK(spectral::divergence_ratio(st.u) < spectral::tol_div);
}

TEST_CASE("CFL violation and non-finite states raise typed errors") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(5.0, 50.0); // dt far beyond the budget
    ProfileSpec prof;
    ForceSpec fs = ForceSpec::paper_default(prof, 1.0, 2.0, 1.0);
    fs.amplitude = 50.0;
    SpectralField force = forcing::assemble_force(fs, g);
    SimState st;
    st.u = spectral::random_divergence_free(g, 3, 30.0);
    dynamics::Stepper stepper(g, p, force);
    bool threw = false;
    try {
        for (int i = 0; i < 50; ++i) stepper.step(st);
    } catch (const Error& e) {
        threw = true;
        CHECK((e.code() == ErrorCode::cfl_violation || e.code() == ErrorCode::non_finite));
    }
    CHECK(threw);
}

TEST_CASE("run: t_end = 0 returns initial state with no rows") {
    GridSpec g{16, 16.0};
    ModelParams p = custom_params(0.05, 0.0);
    SpectralField u0 = spectral::random_divergence_free(g, 9, 2.0);
    int rows = 0;
    dynamics::RunSinks sinks;
    sinks.on_row = [&](const EnergyLedgerRow&) { ++rows; };
    SimState st;
    st.u = u0;
    SimState out = dynamics::run(std::move(st), SpectralField(g), p, sinks);
    CHECK(rows == 0);
    CHECK(out.t == 0.0);
    CHECK(out.u == u0);
}

TEST_CASE("cumulative energy inequality holds with the accumulated residual") {
    GridSpec g{16, 16.0};
    ProfileSpec prof;
    ForceSpec fs = ForceSpec::paper_default(prof, 1.0, 2.0, 1.0);
    SpectralField force = forcing::assemble_force(fs, g);
    ModelParams p = custom_params(0.025, 5.0);
    SimState st;
    st.u = spectral::random_divergence_free(g, 31, 3.0);
    double kin0 = spectral::l2_norm_sq(st.u);
    dynamics::Stepper stepper(g, p, force);
    double acc_dd = 0.0, acc_inj = 0.0, acc_res = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto row = stepper.step(st);
        acc_dd += (row.dissipation + row.damping) * p.dt;
        acc_inj += row.injection * p.dt;
        acc_res += std::abs(row.residual) * p.dt;
        double lhs = row.kinetic + acc_dd;
        double rhs = kin0 + acc_inj + acc_res;
        CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
}

} // TEST_SUITE
