#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kolmodamp {

/* Deterministic summation. Sums are evaluated over a fixed binary tree
   (blocks of 256 leaves, pairwise recursion inside each block, then a
   pairwise combine of the block partials in index order). The tree shape
   depends only on the element count, so the result is bit-identical for
   any thread count; the single-threaded sum is the same value. */

namespace detail {

inline double pairwise_raw(const double* x, std::size_t count) {
    if (count <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += x[i];
        return s;
    }
    std::size_t half = count / 2;
    return pairwise_raw(x, half) + pairwise_raw(x + half, count - half);
}

} // namespace detail

inline double pairwise_sum(std::span<const double> x) {
    constexpr std::size_t block = 256;
    std::size_t count = x.size();
    if (count <= block) return detail::pairwise_raw(x.data(), count);
    std::size_t nblocks = (count + block - 1) / block;
    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        std::size_t lo = static_cast<std::size_t>(b) * block;
        std::size_t len = std::min(block, count - lo);
        partial[static_cast<std::size_t>(b)] = detail::pairwise_raw(x.data() + lo, len);
    }
    return detail::pairwise_raw(partial.data(), partial.size());
}

// Deterministic sum of f(i) for i in [0, count): contributions are
// materialized into a reused scratch vector and reduced with the fixed
// tree.
template <typename F>
double indexed_sum(std::size_t count, F&& f) {
    static thread_local std::vector<double> contrib;
    contrib.resize(count);
    double* buf = contrib.data(); // hoisted: workers must hit the caller's buffer
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
        buf[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    return pairwise_sum(contrib);
}

} // namespace kolmodamp
