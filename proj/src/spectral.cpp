#include "kolmodamp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kolmodamp/fft.hpp"
#include "kolmodamp/reduction.hpp"
#include "kolmodamp/rng.hpp"

namespace kolmodamp::spectral {

namespace {

// Applies f(modes...) to each stored mode of all three components at once.
// F receives (flat index, wavenumber vector, |xi|^2).
template <typename F>
void per_mode(const GridSpec& g, F&& f) {
    const double dk = g.dk();
    for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
        double kx = dk * mx, ky = dk * my, kz = dk * mz;
        f(idx, kx, ky, kz, kx * kx + ky * ky + kz * kz);
    });
}

double weighted_mode_sum(const SpectralField& v, double expo) {
    const GridSpec& g = v.grid();
    const std::size_t count = static_cast<std::size_t>(g.coeff_count());
    const double dk2 = g.dk() * g.dk();
    const int n = g.n, nzc = g.nz_c();
    const complexd* c0 = v.component(0);
    const complexd* c1 = v.component(1);
    const complexd* c2 = v.component(2);
    double total = indexed_sum(count, [&](std::size_t idx) {
        int iz = static_cast<int>(idx % nzc);
        std::size_t rest = idx / nzc;
        int iy = static_cast<int>(rest % n);
        int ix = static_cast<int>(rest / n);
        int mx = g.signed_index(ix), my = g.signed_index(iy);
        double k2 = dk2 * (static_cast<double>(mx) * mx + static_cast<double>(my) * my +
                           static_cast<double>(iz) * iz);
        double mag2 = std::norm(c0[idx]) + std::norm(c1[idx]) + std::norm(c2[idx]);
        if (mag2 == 0.0) return 0.0;
        double w = hermitian_weight(g, iz);
        if (expo == 0.0) return w * mag2;
        if (k2 == 0.0) return 0.0; // mean mode: zero by invariant
        return w * mag2 * std::pow(k2, expo);
    });
    return total * g.box_len * g.box_len * g.box_len;
}

} // namespace

void leray_project_inplace(SpectralField& v) {
    const GridSpec& g = v.grid();
    complexd* cx = v.component(0);
    complexd* cy = v.component(1);
    complexd* cz = v.component(2);
    per_mode(g, [&](std::size_t i, double kx, double ky, double kz, double k2) {
        if (k2 == 0.0) return;
        complexd dot = kx * cx[i] + ky * cy[i] + kz * cz[i];
        complexd s = dot / k2;
        cx[i] -= kx * s;
        cy[i] -= ky * s;
        cz[i] -= kz * s;
    });
}

SpectralField leray_project(const SpectralField& v) {
    SpectralField out = v;
    leray_project_inplace(out);
    return out;
}

SpectralField low_pass(const SpectralField& v, double kappa) {
    if (!(kappa > 0.0)) fail(ErrorCode::invalid_argument, "low_pass: kappa must be positive");
    SpectralField out = v;
    const double k2max = kappa * kappa;
    for (int c = 0; c < 3; ++c) {
        complexd* data = out.component(c);
        per_mode(v.grid(), [&](std::size_t i, double, double, double, double k2) {
            if (!(k2 < k2max)) data[i] = complexd(0.0, 0.0);
        });
    }
    return out;
}

SpectralField band_pass(const SpectralField& v, double lo, double hi) {
    if (!(0.0 < lo && lo < hi)) fail(ErrorCode::invalid_argument, "band_pass: need 0 < lo < hi");
    SpectralField out = v;
    const double lo2 = lo * lo, hi2 = hi * hi;
    for (int c = 0; c < 3; ++c) {
        complexd* data = out.component(c);
        per_mode(v.grid(), [&](std::size_t i, double, double, double, double k2) {
            if (k2 < lo2 || k2 > hi2) data[i] = complexd(0.0, 0.0);
        });
    }
    return out;
}

double l2_norm_sq(const SpectralField& v) { return weighted_mode_sum(v, 0.0); }
double h1_norm_sq(const SpectralField& v) { return weighted_mode_sum(v, 1.0); }
double hm1_norm_sq(const SpectralField& v) { return weighted_mode_sum(v, -1.0); }

double linf_norm(const SpectralField& v) {
    const GridSpec& g = v.grid();
    const std::size_t npts = static_cast<std::size_t>(g.point_count());
    std::vector<double> phys[3];
    for (int c = 0; c < 3; ++c) {
        phys[c].resize(npts);
        fft::to_physical(g, v.component(c), phys[c].data());
    }
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(npts); ++i) {
        double m2 = phys[0][i] * phys[0][i] + phys[1][i] * phys[1][i] + phys[2][i] * phys[2][i];
        best = std::max(best, m2);
    }
    return std::sqrt(best);
}

NormSet norms(const SpectralField& v) {
    NormSet out;
    out.l2 = std::sqrt(l2_norm_sq(v));
    out.h1 = std::sqrt(h1_norm_sq(v));
    out.hm1 = std::sqrt(hm1_norm_sq(v));
    out.linf = linf_norm(v);
    return out;
}

double inner_product(const SpectralField& a, const SpectralField& b) {
    if (a.grid() != b.grid()) fail(ErrorCode::invalid_argument, "inner_product: grid mismatch");
    const GridSpec& g = a.grid();
    const std::size_t count = static_cast<std::size_t>(g.coeff_count());
    const int nzc = g.nz_c();
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        const complexd* pa = a.component(c);
        const complexd* pb = b.component(c);
        total += indexed_sum(count, [&](std::size_t idx) {
            int iz = static_cast<int>(idx % nzc);
            double re = pa[idx].real() * pb[idx].real() + pa[idx].imag() * pb[idx].imag();
            return hermitian_weight(g, iz) * re;
        });
    }
    return total * g.box_len * g.box_len * g.box_len;
}

double divergence_ratio(const SpectralField& v) {
    const GridSpec& g = v.grid();
    const complexd* cx = v.component(0);
    const complexd* cy = v.component(1);
    const complexd* cz = v.component(2);
    double worst = 0.0;
    const double dk = g.dk();
    const int n = g.n, nzc = g.nz_c();
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int ix = 0; ix < n; ++ix) {
        int mx = g.signed_index(ix);
        for (int iy = 0; iy < n; ++iy) {
            int my = g.signed_index(iy);
            for (int iz = 0; iz < nzc; ++iz) {
                std::size_t i = (static_cast<std::size_t>(ix) * n + iy) * nzc + iz;
                double mag2 = std::norm(cx[i]) + std::norm(cy[i]) + std::norm(cz[i]);
                if (mag2 <= 0.0) continue;
                double kx = dk * mx, ky = dk * my, kz = dk * iz;
                double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) continue;
                complexd dot = kx * cx[i] + ky * cy[i] + kz * cz[i];
                worst = std::max(worst, std::abs(dot) / std::sqrt(k2 * mag2));
            }
        }
    }
    return worst;
}

double grad_linf_norm(const SpectralField& v) {
    const GridSpec& g = v.grid();
    const std::size_t npts = static_cast<std::size_t>(g.point_count());
    std::vector<double> frob2(npts, 0.0);
    std::vector<complexd> deriv(static_cast<std::size_t>(g.coeff_count()));
    std::vector<double> phys(npts);
    for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
            const complexd* src = v.component(c);
            per_mode(g, [&](std::size_t i, double kx, double ky, double kz, double) {
                double k = d == 0 ? kx : (d == 1 ? ky : kz);
                deriv[i] = complexd(0.0, 1.0) * k * src[i];
            });
            fft::to_physical(g, deriv.data(), phys.data());
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(npts); ++i)
                frob2[static_cast<std::size_t>(i)] += phys[static_cast<std::size_t>(i)] * phys[static_cast<std::size_t>(i)];
        }
    }
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(npts); ++i)
        best = std::max(best, frob2[static_cast<std::size_t>(i)]);
    return std::sqrt(best);
}

double laplacian_l2_norm(const SpectralField& v) {
    // ||Delta v||_L2^2 = sum |xi|^4 |c|^2 * vol
    return std::sqrt(weighted_mode_sum(v, 2.0));
}

NonlinearWorkspace::NonlinearWorkspace(const GridSpec& grid) : grid_(grid) {
    const std::size_t npts = static_cast<std::size_t>(grid.point_count());
    const std::size_t ncoef = static_cast<std::size_t>(grid.coeff_count());
    for (int c = 0; c < 3; ++c) {
        phys_u_[c].resize(npts);
        phys_adv_[c].resize(npts);
    }
    prod_.resize(npts);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) spec_prod_[i][j].resize(ncoef);
    mollified_.resize(ncoef);
}

SpectralField NonlinearWorkspace::eval(const SpectralField& u, double mollify_delta, double* u_linf_out) {
    SpectralField out(grid_);
    eval_into(u, mollify_delta, u_linf_out, out, true);
    return out;
}

void NonlinearWorkspace::eval_into(const SpectralField& u, double mollify_delta, double* u_linf_out,
                                   SpectralField& out, bool check_input) {
    if (u.grid() != grid_) fail(ErrorCode::invalid_argument, "nonlinear_term: grid mismatch");
    if (out.grid() != grid_) out = SpectralField(grid_);
    if (check_input) {
        double div = divergence_ratio(u);
        if (div > tol_div)
            fail(ErrorCode::invalid_argument, "nonlinear_term: input not divergence-free (ratio " +
                                                  std::to_string(div) + ")");
    }

    const GridSpec& g = grid_;
    const std::size_t npts = static_cast<std::size_t>(g.point_count());
    const bool mollified = mollify_delta > 0.0;

    for (int c = 0; c < 3; ++c) {
        fft::to_physical(g, u.component(c), phys_u_[c].data());
        if (mollified) {
            const complexd* src = u.component(c);
            const double half_d2 = 0.5 * mollify_delta * mollify_delta;
            per_mode(g, [&](std::size_t i, double, double, double, double k2) {
                mollified_[i] = src[i] * std::exp(-half_d2 * k2);
            });
            fft::to_physical(g, mollified_.data(), phys_adv_[c].data());
        }
    }
    const std::vector<double>* adv = mollified ? phys_adv_ : phys_u_;

    if (u_linf_out) {
        double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(npts); ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            double m2 = adv[0][k] * adv[0][k] + adv[1][k] * adv[1][k] + adv[2][k] * adv[2][k];
            best = std::max(best, m2);
        }
        *u_linf_out = std::sqrt(best);
    }

    // products T_ij = u_adv_i u_j; symmetric when not mollified
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (!mollified && j < i) continue;
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(npts); ++p) {
                std::size_t k = static_cast<std::size_t>(p);
                prod_[k] = adv[i][k] * phys_u_[j][k];
            }
            fft::to_spectral(g, prod_.data(), spec_prod_[i][j].data());
        }
    }

    // N_j = i sum_i xi_i T_ij, then project
    for (int j = 0; j < 3; ++j) {
        complexd* dst = out.component(j);
        auto tij = [&](int i) -> const complexd* {
            if (!mollified && i > j) return spec_prod_[j][i].data();
            return spec_prod_[i][j].data();
        };
        const complexd* t0 = tij(0);
        const complexd* t1 = tij(1);
        const complexd* t2 = tij(2);
        per_mode(g, [&](std::size_t idx, double kx, double ky, double kz, double) {
            dst[idx] = complexd(0.0, 1.0) * (kx * t0[idx] + ky * t1[idx] + kz * t2[idx]);
        });
    }
    leray_project_inplace(out);
}

SpectralField nonlinear_term(const SpectralField& u, double mollify_delta) {
    NonlinearWorkspace ws(u.grid());
    return ws.eval(u, mollify_delta, nullptr);
}

void hermitian_symmetrize(SpectralField& v) {
    const GridSpec& g = v.grid();
    const int n = g.n;
    for (int c = 0; c < 3; ++c) {
        complexd* data = v.component(c);
        for (int plane = 0; plane < 2; ++plane) {
            int iz = plane == 0 ? 0 : n / 2;
            if (iz >= g.nz_c()) continue;
            for (int ix = 0; ix < n; ++ix) {
                int jx = (n - ix) % n;
                for (int iy = 0; iy < n; ++iy) {
                    int jy = (n - iy) % n;
                    std::size_t a = (static_cast<std::size_t>(ix) * n + iy) * g.nz_c() + iz;
                    std::size_t b = (static_cast<std::size_t>(jx) * n + jy) * g.nz_c() + iz;
                    if (b < a) continue;
                    complexd avg = 0.5 * (data[a] + std::conj(data[b]));
                    data[a] = avg;
                    data[b] = std::conj(avg);
                }
            }
        }
    }
    fft::apply_mask(g, v.component(0));
    fft::apply_mask(g, v.component(1));
    fft::apply_mask(g, v.component(2));
}

SpectralField random_divergence_free(const GridSpec& grid, std::uint64_t seed, double l2_target,
                                     double xi_max) {
    SpectralField v(grid);
    const double dk = grid.dk();
    const double k2cap = xi_max > 0.0 ? xi_max * xi_max : std::numeric_limits<double>::infinity();
    const int keep = grid.keep_max();
    for (int c = 0; c < 3; ++c) {
        complexd* data = v.component(c);
        for_each_mode(grid, [&](std::size_t idx, int mx, int my, int mz) {
            if (std::abs(mx) > keep || std::abs(my) > keep || mz > keep) return;
            if (mx == 0 && my == 0 && mz == 0) return;
            double k2 = dk * dk * (static_cast<double>(mx) * mx + static_cast<double>(my) * my +
                                   static_cast<double>(mz) * mz);
            if (k2 > k2cap) return;
            std::uint64_t h = hash_combine(seed, (static_cast<std::uint64_t>(c) << 48) ^
                                                     (static_cast<std::uint64_t>(mx & 0xffff) << 32) ^
                                                     (static_cast<std::uint64_t>(my & 0xffff) << 16) ^
                                                     static_cast<std::uint64_t>(mz & 0xffff));
            double re = 2.0 * uniform01(h) - 1.0;
            double im = 2.0 * uniform01(splitmix64(h)) - 1.0;
            data[idx] = complexd(re, im);
        });
    }
    hermitian_symmetrize(v);
    v = leray_project(v);
    double norm = std::sqrt(l2_norm_sq(v));
    if (norm > 0.0 && l2_target > 0.0) {
        double s = l2_target / norm;
        for (auto& z : v.raw()) z *= s;
    }
    return v;
}

} // namespace kolmodamp::spectral
