#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pbn {

// Pairwise (tree) summation. Fixed reduction order, so results are identical
// no matter how callers split the work, and rounding error grows like
// O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline double sample_mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Unbiased sample variance (n-1 denominator), two-pass for stability.
inline double sample_variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double mean = sample_mean(xs);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(n - 1);
}

// Standard error of the sample mean.
inline double mean_stderr(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    return std::sqrt(sample_variance(xs) / static_cast<double>(n));
}

}  // namespace pbn
