#pragma once

#include <cmath>
#include <cstdint>

#include "kolmodamp/errors.hpp"

namespace kolmodamp {

// Cubic periodic grid with n modes per axis and an isotropic per-axis
// dealias mask. Wavenumber of signed index m is (2*pi/box_len)*m with
// m in {-n/2+1, ..., n/2}. Coefficients are stored in r2c layout:
// full range on x and y, z truncated to [0, n/2].
struct GridSpec {
    int n = 0;
    double box_len = 0.0;
    double dealias_fraction = 2.0 / 3.0;

    void validate() const {
        if (n < 4 || n % 2 != 0) fail(ErrorCode::invalid_argument, "grid n must be even and >= 4");
        if (!(box_len > 0.0)) fail(ErrorCode::invalid_argument, "grid box_len must be positive");
        if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
            fail(ErrorCode::invalid_argument, "dealias_fraction must lie in (0,1]");
    }

    // Largest retained |m| per axis. Retained modes satisfy
    // |m| <= dealias_fraction*n/2; when that bound is an exact integer and
    // dealiasing is active the tie is dropped so quadratic products are
    // alias-free on the retained set (3*keep < n for the 2/3 rule).
    // The self-conjugate Nyquist plane m = n/2 is never retained.
    int keep_max() const {
        double bound = dealias_fraction * n / 2.0;
        double rounded = std::nearbyint(bound);
        int keep;
        if (dealias_fraction < 1.0 && std::abs(bound - rounded) < 1e-9 * n)
            keep = static_cast<int>(rounded) - 1;
        else
            keep = static_cast<int>(std::floor(bound + 1e-9 * n));
        if (keep > n / 2 - 1) keep = n / 2 - 1;
        return keep;
    }

    int nz_c() const { return n / 2 + 1; }
    std::int64_t coeff_count() const { return static_cast<std::int64_t>(n) * n * nz_c(); }
    std::int64_t point_count() const { return static_cast<std::int64_t>(n) * n * n; }
    double dx() const { return box_len / n; }
    double dk() const { return 2.0 * M_PI / box_len; }

    // Signed mode index of storage index i along a full (non-truncated) axis.
    int signed_index(int i) const { return i <= n / 2 ? i : i - n; }

    bool retained(int mx, int my, int mz) const {
        int keep = keep_max();
        return std::abs(mx) <= keep && std::abs(my) <= keep && std::abs(mz) <= keep;
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.n == b.n && a.box_len == b.box_len && a.dealias_fraction == b.dealias_fraction;
    }
    friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }
};

} // namespace kolmodamp
