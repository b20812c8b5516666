#pragma once

#include <vector>

#include "kolmodamp/field.hpp"

namespace kolmodamp::fft {

/* Thin wrapper over FFTW (double precision, FFTW_ESTIMATE planning so the
   chosen algorithm is deterministic across processes — required for
   byte-exact checkpoint restarts). Plans are cached per grid size and
   shared; new-array execution is thread-safe.

   Conventions: coefficients are "velocity units per mode", i.e.
   u(x_j) = sum_m c(m) exp(i (2*pi/box_len) m . x_j). The backward c2r
   transform realizes that sum directly; the forward r2c transform is
   normalized by 1/n^3. */

// physical buffer: n^3 doubles, x-major, z fastest (matches r2c layout).
using PhysicalBuffer = std::vector<double>;

// coeffs (one component, r2c layout) -> physical samples. Input preserved.
void to_physical(const GridSpec& grid, const complexd* coeffs, double* out);

// physical samples -> coefficients (normalized, dealias mask applied,
// mean removed).
void to_spectral(const GridSpec& grid, const double* values, complexd* out);

// Applies the retained-mode mask and zeroes the mean mode in place.
void apply_mask(const GridSpec& grid, complexd* coeffs);

} // namespace kolmodamp::fft
