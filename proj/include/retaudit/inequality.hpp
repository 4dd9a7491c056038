#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace retaudit {

/// Distribution summary of a per-document score table. Two geometric means
/// are reported because zeros annihilate the plain geometric mean:
/// `geometric_mean_positive` covers only the strictly positive scores, and
/// `geometric_mean_shifted` is exp(mean(log(1+v))) - 1 over all scores.
struct DistributionStats {
    double mean = 0.0;
    double geometric_mean_positive = 0.0;
    double geometric_mean_shifted = 0.0;
    double variance = 0.0;  // population variance
    double std_dev = 0.0;
    std::size_t n = 0;
    std::size_t zero_count = 0;
};

namespace detail {

inline void require_non_negative(std::span<const double> values, const char* op) {
    for (const double v : values) {
        if (v < 0.0 || std::isnan(v)) {
            throw std::invalid_argument(std::string(op) + ": values must be non-negative");
        }
    }
}

}  // namespace detail

inline DistributionStats distribution_stats(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("distribution_stats: empty input");
    }
    detail::require_non_negative(values, "distribution_stats");
    DistributionStats stats;
    stats.n = values.size();

    double sum = 0.0;
    double log_positive = 0.0;
    double log_shifted = 0.0;
    std::size_t positive = 0;
    for (const double v : values) {
        sum += v;
        log_shifted += std::log1p(v);
        if (v > 0.0) {
            log_positive += std::log(v);
            ++positive;
        } else {
            ++stats.zero_count;
        }
    }
    const double n = static_cast<double>(stats.n);
    stats.mean = sum / n;
    stats.geometric_mean_positive =
        positive == 0 ? 0.0 : std::exp(log_positive / static_cast<double>(positive));
    stats.geometric_mean_shifted = std::exp(log_shifted / n) - 1.0;

    double sq = 0.0;
    for (const double v : values) {
        const double d = v - stats.mean;
        sq += d * d;
    }
    stats.variance = sq / n;
    stats.std_dev = std::sqrt(stats.variance);
    return stats;
}

/// Gini coefficient: sort ascending, then
///   G = sum_i (2i - N - 1) v(i) / (N sum_j v(j)),  i = 1..N.
/// Result lies in [0, 1 - 1/N]. All-zero input has no defined concentration
/// and is a hard error.
inline double gini(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("gini: empty input");
    }
    detail::require_non_negative(values, "gini");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        total += sorted[i];
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
    }
    if (total == 0.0) {
        throw std::runtime_error("gini: undefined for all-zero input (no value mass to distribute)");
    }
    return weighted / (n * total);
}

struct LorenzPoint {
    double population_fraction;
    double value_fraction;
};

/// Cumulative-share curve over ascending-sorted values, from (0,0) to (1,1).
struct LorenzCurve {
    std::vector<LorenzPoint> points;
};

/// Samples the Lorenz curve at `resolution` evenly spaced population
/// fractions plus both endpoints. Use resolution = values.size() for the
/// full-resolution curve.
inline LorenzCurve lorenz(std::span<const double> values, std::size_t resolution) {
    if (values.empty()) {
        throw std::invalid_argument("lorenz: empty input");
    }
    if (resolution < 2) {
        throw std::invalid_argument("lorenz: resolution must be >= 2");
    }
    detail::require_non_negative(values, "lorenz");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + sorted[i];
    }
    const double total = prefix[n];
    if (total == 0.0) {
        throw std::runtime_error("lorenz: undefined for all-zero input (no value mass to distribute)");
    }

    LorenzCurve curve;
    curve.points.reserve(resolution + 1);
    curve.points.push_back(LorenzPoint{0.0, 0.0});
    for (std::size_t j = 1; j < resolution; ++j) {
        // Integer arithmetic keeps the sampled count exact.
        const std::size_t k = j * n / resolution;
        curve.points.push_back(LorenzPoint{static_cast<double>(j) / static_cast<double>(resolution),
                                           prefix[k] / total});
    }
    curve.points.push_back(LorenzPoint{1.0, 1.0});
    return curve;
}

}  // namespace retaudit
