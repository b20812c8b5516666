#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "kolmodamp/grid.hpp"

namespace kolmodamp {

using complexd = std::complex<double>;

/* Three-component vector field stored as Fourier coefficients in r2c
   layout (z axis truncated to [0, n/2]). Invariants maintained by every
   constructor and operation in this library:
     - coefficients vanish outside the retained (dealiased) mode set,
     - the mean mode m = 0 is zero,
     - the stored z = 0 plane is Hermitian-consistent, so the physical
       field is real.
   Layout: component-major, then x, y, z with z fastest. */
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& grid)
        : grid_(grid), coeffs_(3 * static_cast<std::size_t>(grid.coeff_count()), complexd(0.0, 0.0)) {
        grid.validate();
    }

    const GridSpec& grid() const { return grid_; }

    std::size_t index(int c, int ix, int iy, int iz) const {
        return ((static_cast<std::size_t>(c) * grid_.n + ix) * grid_.n + iy) * grid_.nz_c() + iz;
    }
    complexd& at(int c, int ix, int iy, int iz) { return coeffs_[index(c, ix, iy, iz)]; }
    const complexd& at(int c, int ix, int iy, int iz) const { return coeffs_[index(c, ix, iy, iz)]; }

    complexd* component(int c) { return coeffs_.data() + static_cast<std::size_t>(c) * grid_.coeff_count(); }
    const complexd* component(int c) const {
        return coeffs_.data() + static_cast<std::size_t>(c) * grid_.coeff_count();
    }

    std::vector<complexd>& raw() { return coeffs_; }
    const std::vector<complexd>& raw() const { return coeffs_; }

    bool empty() const { return coeffs_.empty(); }

    friend bool operator==(const SpectralField& a, const SpectralField& b) {
        return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
    }

  private:
    GridSpec grid_;
    std::vector<complexd> coeffs_;
};

// Visits every stored coefficient index once. F is called as
// f(flat_index_within_component, mx, my, mz) where flat index is the
// r2c offset (shared by all three components).
template <typename F>
void for_each_mode(const GridSpec& g, F&& f) {
    const int n = g.n;
    const int nzc = g.nz_c();
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n; ++ix) {
        int mx = g.signed_index(ix);
        for (int iy = 0; iy < n; ++iy) {
            int my = g.signed_index(iy);
            std::size_t base = (static_cast<std::size_t>(ix) * n + iy) * nzc;
            for (int iz = 0; iz < nzc; ++iz) f(base + iz, mx, my, iz);
        }
    }
}

// Conjugate-pair weight of a stored mode: modes with 0 < mz < n/2
// represent themselves and their conjugate partner.
inline double hermitian_weight(const GridSpec& g, int mz) { return (mz == 0 || mz == g.n / 2) ? 1.0 : 2.0; }

} // namespace kolmodamp
