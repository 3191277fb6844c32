#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "outsideview/errors.hpp"

namespace outsideview {

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw Error(ErrorCode::InsufficientData, "mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation with the n-1 denominator; 0 by convention for n < 2.
inline double sample_sd(const std::vector<double>& xs) {
    if (xs.empty()) throw Error(ErrorCode::InsufficientData, "sd of empty sample");
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - m;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Empirical quantile at position h = (n-1)p, linearly interpolated between
// order statistics. Input must already be sorted ascending. Reproduces the
// minimum at p=0 and the maximum at p=1.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw Error(ErrorCode::InsufficientData, "quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfDomain, "quantile p must be in [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return sorted[lo];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double median_sorted(const std::vector<double>& sorted) {
    return quantile_sorted(sorted, 0.5);
}

// Median of an unsorted sample (copies and sorts).
inline double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return median_sorted(xs);
}

// Median absolute deviation about the median, unscaled.
inline double mad_of(const std::vector<double>& xs) {
    const double med = median_of(xs);
    std::vector<double> dev;
    dev.reserve(xs.size());
    for (double x : xs) dev.push_back(std::fabs(x - med));
    return median_of(std::move(dev));
}

// splitmix64 output function applied to seed + (ordinal+1)*gamma. Gives every
// bootstrap resample an independent engine seed as a pure function of
// (seed, ordinal), so resampling is schedule-independent and reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t ordinal) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (ordinal + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Maps a uniform 64-bit word to an index in [0, n) without modulo bias.
inline std::size_t bounded_index(std::uint64_t word, std::size_t n) {
    return static_cast<std::size_t>((static_cast<__uint128_t>(word) * n) >> 64);
}

}  // namespace outsideview
