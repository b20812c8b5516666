#include <doctest.h>

#include <cmath>

#include "kolmodamp/diagnostics.hpp"
#include "kolmodamp/forcing.hpp"

using namespace kolmodamp;

namespace {

const GridSpec kGrid{48, 84.0};

ForceSpec spec_for(double ell, double sharp = 0.3) {
    ProfileSpec prof;
    prof.bump_sharpness = sharp;
    return ForceSpec::paper_default(prof, 1.0, ell, 1.0);
}

} // namespace

TEST_SUITE("forcing") {

TEST_CASE("profile: annulus support, polarization, reality, normalization") {
    ProfileSpec prof;
    SpectralField phi = forcing::build_profile(prof, kGrid, 1.0);

    const double dk = kGrid.dk();
    bool mid_nonzero = false;
    for_each_mode(kGrid, [&](std::size_t idx, int mx, int my, int mz) {
        double r = dk * std::sqrt(double(mx) * mx + double(my) * my + double(mz) * mz);
        double mag = std::abs(phi.component(0)[idx]) + std::abs(phi.component(1)[idx]) +
                     std::abs(phi.component(2)[idx]);
        if (r < 0.1 - 1e-12 || r > 1.0 + 1e-12) CHECK(mag == 0.0);
        if (std::abs(r - 0.5) < 0.5 * dk && mag > 0.0) mid_nonzero = true;
    });
    CHECK(mid_nonzero); // modes near |xi| = 1/(2 theta ell0) are populated

    CHECK(spectral::divergence_ratio(phi) < 1e-12);
    CHECK(spectral::linf_norm(phi) == doctest::Approx(1.0).epsilon(1e-12));

    int shells = forcing::annulus_shell_count(kGrid, 0.1, 1.0);
    CHECK(shells >= 3);
}

TEST_CASE("profile: unresolved annulus raises") {
    GridSpec tiny{8, 4.0}; // fundamental 1.57 > annulus top
    ProfileSpec prof;
    CHECK_THROWS_AS((void)forcing::build_profile(prof, tiny, 1.0), Error);
}

TEST_CASE("profile seed twists phases but keeps support and reality") {
    ProfileSpec prof;
    prof.seed = 1234;
    SpectralField phi = forcing::build_profile(prof, kGrid, 1.0);
    CHECK(spectral::divergence_ratio(phi) < 1e-12);
    CHECK(spectral::linf_norm(phi) == doctest::Approx(1.0).epsilon(1e-12));
    // physical reality: imaginary part of inverse transform is implicit in
    // r2c storage; Hermitian symmetry is what we can check directly
    const GridSpec& g = phi.grid();
    for (int c = 0; c < 3; ++c) {
        const complexd* data = phi.component(c);
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy) {
                std::size_t a = phi.index(c, ix, iy, 0) - phi.index(c, 0, 0, 0);
                std::size_t b = phi.index(c, (g.n - ix) % g.n, (g.n - iy) % g.n, 0) -
                                phi.index(c, 0, 0, 0);
                CHECK(std::abs(data[a] - std::conj(data[b])) < 1e-14);
            }
    }
}

TEST_CASE("single translate: f = A phi exactly, lattice counts") {
    ForceSpec fs = spec_for(0.5); // ell < theta ell0
    SpectralField f = forcing::assemble_force(fs, kGrid);
    SpectralField phi = forcing::build_profile(fs.profile, kGrid, fs.ell0);
    for (std::size_t i = 0; i < f.raw().size(); ++i)
        CHECK(f.raw()[i] == fs.amplitude * phi.raw()[i]);

    CHECK(forcing::lattice_point_count(0.5) == 1);
    CHECK(forcing::lattice_point_count(1.0) == 7);
    CHECK(forcing::lattice_point_count(2.0) == 33);
    CHECK(forcing::lattice_point_count(3.0) == 123);
}

TEST_CASE("assembled force: support, divergence, overflow error") {
    ForceSpec fs = spec_for(6.0);
    SpectralField f = forcing::assemble_force(fs, kGrid);
    const double dk = kGrid.dk();
    for_each_mode(kGrid, [&](std::size_t idx, int mx, int my, int mz) {
        double r = dk * std::sqrt(double(mx) * mx + double(my) * my + double(mz) * mz);
        double mag = std::abs(f.component(0)[idx]) + std::abs(f.component(1)[idx]) +
                     std::abs(f.component(2)[idx]);
        if (r < 0.1 - 1e-12 || r > 1.0 + 1e-12) CHECK(mag == 0.0);
    });
    CHECK(spectral::divergence_ratio(f) < spectral::tol_div);

    ForceSpec big = spec_for(42.0); // 2*42 + 1 > 84
    CHECK_THROWS_AS((void)forcing::assemble_force(big, kGrid), Error);
}

TEST_CASE("L2 norm grows exactly like sqrt(lattice count)") {
    ForceSpec base = spec_for(3.0);
    SpectralField phi = forcing::build_profile(base.profile, kGrid, base.ell0);
    double l2phi = std::sqrt(spectral::l2_norm_sq(phi));
    for (double ell : {3.0, 6.0, 14.0, 21.0}) {
        ForceSpec fs = spec_for(ell);
        SpectralField f = forcing::assemble_force(fs, kGrid);
        double expect = fs.amplitude * std::sqrt(double(forcing::lattice_point_count(ell))) * l2phi;
        CHECK(std::sqrt(spectral::l2_norm_sq(f)) == doctest::Approx(expect).epsilon(1e-10));
    }
    // doubling ell multiplies the L2 norm by 2^{3/2} within 15%
    double l2a = std::sqrt(spectral::l2_norm_sq(forcing::assemble_force(spec_for(6.0), kGrid)));
    double l2b = std::sqrt(spectral::l2_norm_sq(forcing::assemble_force(spec_for(12.0), kGrid)));
    CHECK(l2b / l2a == doctest::Approx(std::pow(2.0, 1.5)).epsilon(0.15));
}

TEST_CASE("sup norm stays in a factor-2 band across doublings in the spread regime") {
    double s1 = spectral::linf_norm(forcing::assemble_force(spec_for(6.0), kGrid));
    double s2 = spectral::linf_norm(forcing::assemble_force(spec_for(14.0), kGrid));
    double s3 = spectral::linf_norm(forcing::assemble_force(spec_for(21.0), kGrid));
    double lo = std::min({s1, s2, s3}), hi = std::max({s1, s2, s3});
    CHECK(hi / lo < 2.0);
}

TEST_CASE("calibration: gamma = 1 at the single translate, amplitude invariance") {
    ForceSpec fs = spec_for(0.5);
    SpectralField phi = forcing::build_profile(fs.profile, kGrid, fs.ell0);
    auto consts = forcing::calibrate_bernstein(phi, fs);
    SpectralField f = forcing::assemble_force(fs, kGrid);
    auto numbers = forcing::derive_numbers(f, fs, consts);
    CHECK(numbers.gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(numbers.L == doctest::Approx(fs.ell0).epsilon(1e-12));

    // c1, c2 are homogeneous of degree zero: doubling the amplitude is a no-op
    ForceSpec doubled = fs;
    doubled.amplitude *= 2.0;
    auto consts2 = forcing::calibrate_bernstein(phi, doubled);
    CHECK(consts2.c1 == doctest::Approx(consts.c1).epsilon(1e-12));
    CHECK(consts2.c2 == doctest::Approx(consts.c2).epsilon(1e-12));
    CHECK(consts2.c3 == doctest::Approx(consts.c3).epsilon(1e-12));

    // c3 = c2/theta^2 flips below 1/2 as theta grows past sqrt(2 c2)
    double theta_star = std::sqrt(2.0 * consts.c2);
    CHECK(consts.c2 / (theta_star * theta_star * 1.21) < 0.5);  // theta 10% above threshold
    CHECK(consts.c2 / (theta_star * theta_star * 0.81) > 0.5);  // theta 10% below
}

TEST_CASE("gamma <= 1 across the lattice sweep and Gr identity holds") {
    ForceSpec base = spec_for(0.5);
    SpectralField phi = forcing::build_profile(base.profile, kGrid, base.ell0);
    auto consts = forcing::calibrate_bernstein(phi, base);
    double prev_gamma = 2.0;
    for (double ell : {1.5, 3.0, 6.0, 10.5, 14.0, 21.0}) {
        ForceSpec fs = spec_for(ell);
        SpectralField f = forcing::assemble_force(fs, kGrid);
        auto numbers = forcing::derive_numbers(f, fs, consts);
        CHECK(numbers.gamma <= 1.0);
        CHECK(numbers.gamma < prev_gamma + 0.05); // near-monotone decrease
        prev_gamma = numbers.gamma;
        CHECK(numbers.L == doctest::Approx(fs.ell0 / numbers.gamma).epsilon(1e-12));
        double identity = numbers.Gr * numbers.c0 * std::pow(numbers.gamma, 4) / numbers.G0;
        CHECK(std::abs(identity - 1.0) < 1e-10);
    }
}

TEST_CASE("Gr arithmetic from the identity") {
    // G0 = 2, c0 = 1.5, gamma = 0.1 -> Gr = 2 / (1.5e-4)
    double gr = 2.0 / (1.5 * std::pow(0.1, 4));
    CHECK(gr == doctest::Approx(13333.3333333).epsilon(1e-9));
}

TEST_CASE("Gr grows like ell^6 over the sweep window") {
    ForceSpec base = spec_for(0.5);
    SpectralField phi = forcing::build_profile(base.profile, kGrid, base.ell0);
    auto consts = forcing::calibrate_bernstein(phi, base);
    std::vector<double> ells = {3.0, 6.0, 14.0, 21.0}, grs;
    for (double ell : ells) {
        ForceSpec fs = spec_for(ell);
        auto numbers = forcing::derive_numbers(forcing::assemble_force(fs, kGrid), fs, consts);
        grs.push_back(numbers.Gr);
    }
    double slope = diag::loglog_slope(ells, grs);
    CHECK(slope == doctest::Approx(6.0).epsilon(0.3));
}

} // TEST_SUITE
