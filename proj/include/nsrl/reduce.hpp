#pragma once

#include <cstddef>
#include <span>

namespace nsrl {

/// Fixed-order pairwise (tree) summation. The reduction tree depends only on
/// the element count, never on thread count or chunking, so results are
/// bit-reproducible run to run. Also far more accurate than left-to-right
/// accumulation for large n.
template <class F>
double pairwise_sum(std::size_t begin, std::size_t end, F&& value) {
    const std::size_t n = end - begin;
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += value(i);
        return s;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise_sum(begin, mid, value) + pairwise_sum(mid, end, value);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_sum(std::size_t{0}, v.size(), [&](std::size_t i) { return v[i]; });
}

} // namespace nsrl
