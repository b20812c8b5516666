#include "kolmodamp/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace kolmodamp::fft {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// Plans are created once per grid size on aligned scratch and reused via
// the new-array execute interface. FFTW_UNALIGNED keeps execution valid
// for arbitrary caller buffers (std::vector storage is not guaranteed to
// match FFTW's SIMD alignment).
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::size_t real_count = static_cast<std::size_t>(n) * n * n;
    std::size_t cplx_count = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    double* real_buf = fftw_alloc_real(real_count);
    fftw_complex* cplx_buf = fftw_alloc_complex(cplx_count);

    PlanPair pair;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    pair.r2c = fftw_plan_dft_r2c_3d(n, n, n, real_buf, cplx_buf, flags);
    pair.c2r = fftw_plan_dft_c2r_3d(n, n, n, cplx_buf, real_buf, flags);

    fftw_free(real_buf);
    fftw_free(cplx_buf);
    auto [pos, inserted] = cache.emplace(n, pair);
    (void)inserted;
    return pos->second;
}

} // namespace

void apply_mask(const GridSpec& grid, complexd* coeffs) {
    const int keep = grid.keep_max();
    const int n = grid.n;
    const int nzc = grid.nz_c();
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n; ++ix) {
        int mx = grid.signed_index(ix);
        bool kill_x = std::abs(mx) > keep;
        for (int iy = 0; iy < n; ++iy) {
            int my = grid.signed_index(iy);
            bool kill_xy = kill_x || std::abs(my) > keep;
            complexd* row = coeffs + (static_cast<std::size_t>(ix) * n + iy) * nzc;
            for (int iz = 0; iz < nzc; ++iz) {
                if (kill_xy || iz > keep) row[iz] = complexd(0.0, 0.0);
            }
        }
    }
    coeffs[0] = complexd(0.0, 0.0);
}

void to_physical(const GridSpec& grid, const complexd* coeffs, double* out) {
    PlanPair& plans = plans_for(grid.n);
    // c2r destroys its input; transform a scratch copy.
    std::vector<complexd> scratch(coeffs, coeffs + grid.coeff_count());
    fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

void to_spectral(const GridSpec& grid, const double* values, complexd* out) {
    PlanPair& plans = plans_for(grid.n);
    fftw_execute_dft_r2c(plans.r2c, const_cast<double*>(values), reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / static_cast<double>(grid.point_count());
    const std::size_t count = static_cast<std::size_t>(grid.coeff_count());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) out[i] *= scale;
    apply_mask(grid, out);
}

} // namespace kolmodamp::fft
