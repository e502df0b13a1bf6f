// stats.hpp
#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace tvbound {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/**
 * Sample mean and its standard error (n-1 variance), summed in index order.
 * Sums are shifted by the first value, so constant data gives that value
 * exactly with se = 0.
 */
inline MeanSe mean_se(std::span<const double> xs) {
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return {};
    const double shift = xs.front();
    double s = 0.0;
    for (double x : xs) s += x - shift;
    const double offset = s / n;
    if (xs.size() < 2) return {shift, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - shift - offset) * (x - shift - offset);
    return {shift + offset, std::sqrt(ss / (n - 1.0) / n)};
}

/// Proportion estimate with se = sqrt(p(1-p)/n).
inline MeanSe proportion(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {};
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace tvbound
