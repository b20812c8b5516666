#pragma once

#include <array>
#include <cstdint>

#include "kolmodamp/spectral.hpp"

namespace kolmodamp {

// Shape of the band-limited profile the force is built from. theta >= 1
// is the scale-separation parameter; the profile spectrum is confined to
// the annulus [1/(10 theta ell0), 1/(theta ell0)].
struct ProfileSpec {
    double theta = 1.0;
    double bump_sharpness = 0.3;
    std::array<double, 3> orientation = {1.0, 0.55, 0.35};
    std::uint64_t seed = 0;

    void validate() const {
        if (!(theta >= 1.0)) fail(ErrorCode::invalid_argument, "profile theta must be >= 1");
        if (!(bump_sharpness > 0.0)) fail(ErrorCode::invalid_argument, "bump_sharpness must be positive");
        double m2 = orientation[0] * orientation[0] + orientation[1] * orientation[1] +
                    orientation[2] * orientation[2];
        if (!(m2 > 0.0)) fail(ErrorCode::invalid_argument, "orientation must be nonzero");
    }
};

// Force construction inputs: lattice half-width ell (Euclidean radius of
// the translate set, in physical length), energy input scale ell0,
// amplitude A and viscosity nu. Paper-default amplitude is nu^2/ell0^3.
struct ForceSpec {
    ProfileSpec profile;
    double ell0 = 1.0;
    double ell = 1.0;
    double amplitude = 1.0;
    double nu = 1.0;

    static ForceSpec paper_default(ProfileSpec profile, double ell0, double ell, double nu) {
        ForceSpec s;
        s.profile = profile;
        s.ell0 = ell0;
        s.ell = ell;
        s.nu = nu;
        s.amplitude = nu * nu / (ell0 * ell0 * ell0);
        return s;
    }

    void validate() const {
        profile.validate();
        if (!(ell0 > 0.0) || !(ell > 0.0)) fail(ErrorCode::invalid_argument, "ell0 and ell must be positive");
        if (!(amplitude > 0.0)) fail(ErrorCode::invalid_argument, "amplitude must be positive");
        if (!(nu > 0.0)) fail(ErrorCode::invalid_argument, "nu must be positive");
    }
};

// Empirical Bernstein-type constants measured on the single-translate
// reference force. c0 is normalized so the single translate has gamma = 1.
struct BernsteinConstants {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    bool c3_below_half = false; // theta chosen large enough
    bool g0_compat = false;     // G0 > c0 (1 + sqrt(c3))^2 / c1 at reference amplitude
};

// Force-derived scalars. Invariants: gamma <= 1, L = ell0/gamma,
// Gr * c0 * gamma^4 = G0 (algebraic identity).
struct ForceNumbers {
    double c0 = 0.0;
    double gamma = 0.0;
    double L = 0.0;
    double F = 0.0;
    double G0 = 0.0;
    double Gr = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

namespace forcing {

// Divergence-free annulus bump: chi(|xi| theta ell0) times the per-mode
// Leray polarization of the orientation vector, normalized to unit
// grid-sampled sup norm. Throws UnresolvedAnnulus (ErrorCode) if fewer
// than 3 spectral shells of the grid fall inside the annulus.
SpectralField build_profile(const ProfileSpec& profile, const GridSpec& grid, double ell0);

// Number of distinct |m|^2 shells with at least one retained lattice mode
// inside [lo, hi].
int annulus_shell_count(const GridSpec& grid, double lo, double hi);

/* Band-limited force over a ball of radius ~ell: a windowed radial
   chirp carrier, annulus-masked by the profile bump, Leray-polarized,
   with ||f||_L2 pinned to A sqrt(count) ||phi||_L2 (count = lattice
   points |k| <= ell/(theta ell0)). Reproduces the translate sum's
   ell^{3/p} norm laws deterministically; see assemble_force in
   forcing.cpp for why a literal lattice phase sum cannot. A single
   translate (ell < theta ell0) returns A phi exactly. Throws
   LatticeOverflow when 2 ell + theta ell0 > box_len. */
SpectralField assemble_force(const ForceSpec& spec, const GridSpec& grid);

BernsteinConstants calibrate_bernstein(const SpectralField& profile, const ForceSpec& spec);

// gamma, L, F, G0, Gr from the assembled force plus calibrated constants.
// Throws GammaExceedsOne when the measured gamma exceeds 1.
ForceNumbers derive_numbers(const SpectralField& force, const ForceSpec& spec,
                            const BernsteinConstants& consts);

// Lattice points |k| <= radius (integer ball), origin first; exposed for
// tests.
std::size_t lattice_point_count(double radius);

} // namespace forcing
} // namespace kolmodamp
