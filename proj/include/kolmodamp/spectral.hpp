#pragma once

#include <cstdint>

#include "kolmodamp/field.hpp"

namespace kolmodamp {

// L2 / H1-seminorm / H-1 / Linf of a vector field. Spectral norms follow
// the Plancherel convention with the box volume factor:
//   l2^2  = sum_xi |c(xi)|^2        * box_len^3
//   h1^2  = sum_xi |xi|^2 |c(xi)|^2 * box_len^3
//   hm1^2 = sum_xi |xi|^-2 |c(xi)|^2 * box_len^3   (mean mode excluded)
// linf is the max over grid points of the Euclidean vector magnitude.
struct NormSet {
    double l2 = 0.0;
    double h1 = 0.0;
    double hm1 = 0.0;
    double linf = 0.0;
};

namespace spectral {

inline constexpr double tol_div = 1e-10;
inline constexpr double tol_energy = 1e-8;

// Per-mode Leray projection c <- c - xi (xi.c)/|xi|^2. Idempotent,
// self-adjoint, energy non-increasing; output is divergence-free.
SpectralField leray_project(const SpectralField& v);
void leray_project_inplace(SpectralField& v);

// Sharp low-pass P_kappa: keeps |xi| < kappa, zeroes |xi| >= kappa.
SpectralField low_pass(const SpectralField& v, double kappa);

// Sharp annulus restriction: keeps lo <= |xi| <= hi.
SpectralField band_pass(const SpectralField& v, double lo, double hi);

NormSet norms(const SpectralField& v);

double l2_norm_sq(const SpectralField& v);
double h1_norm_sq(const SpectralField& v);
double hm1_norm_sq(const SpectralField& v);
double linf_norm(const SpectralField& v);

// L2 inner product <a, b> with the box volume factor.
double inner_product(const SpectralField& a, const SpectralField& b);

// max_xi |xi . c(xi)| / |c(xi)| over retained modes with |c| above
// round-off; 0 for the zero field.
double divergence_ratio(const SpectralField& v);

// Grid-sampled sup norm of the 3x3 gradient tensor (Frobenius) and the
// L2 norm of the vector Laplacian; both used by the Bernstein-constant
// calibration.
double grad_linf_norm(const SpectralField& v);
double laplacian_l2_norm(const SpectralField& v);

/* P((u_adv . grad) u) in divergence form: transform to physical space,
   form the nine products u_adv_i u_j, transform back, differentiate,
   dealias and Leray-project. With the 2/3 mask the products are
   alias-free, so this equals the Galerkin-truncated convolution and the
   result is exactly energy-neutral in exact arithmetic.

   mollify_delta > 0 replaces the advecting velocity by the Gaussian
   low-pass exp(-delta^2 |xi|^2 / 2) of u (the advected field is left
   unfiltered). Rejects input whose divergence ratio exceeds tol_div. */
SpectralField nonlinear_term(const SpectralField& u, double mollify_delta = 0.0);

// Scratch-reusing variant for steppers; also reports the max pointwise
// advecting-velocity magnitude seen during evaluation (CFL monitoring).
// check_input toggles the divergence precondition (the stepper validates
// its state once and keeps the invariant by construction).
class NonlinearWorkspace {
  public:
    explicit NonlinearWorkspace(const GridSpec& grid);
    SpectralField eval(const SpectralField& u, double mollify_delta, double* u_linf_out);
    void eval_into(const SpectralField& u, double mollify_delta, double* u_linf_out,
                   SpectralField& out, bool check_input = true);

  private:
    GridSpec grid_;
    std::vector<double> phys_u_[3];
    std::vector<double> phys_adv_[3];
    std::vector<double> prod_;
    std::vector<complexd> spec_prod_[3][3];
    std::vector<complexd> mollified_;
};

// Random divergence-free, Hermitian, mean-free field with unit-scale
// coefficients on retained modes below |xi| <= xi_max, rescaled to the
// requested L2 norm. Deterministic in (seed, grid).
SpectralField random_divergence_free(const GridSpec& grid, std::uint64_t seed, double l2_target,
                                     double xi_max = 0.0);

// Enforces c(-xi) = conj(c(xi)) on the stored self-conjugate planes.
void hermitian_symmetrize(SpectralField& v);

} // namespace spectral
} // namespace kolmodamp
