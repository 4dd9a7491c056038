#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace retaudit::detail {

// Seeded generator with explicit draw arithmetic. mt19937_64 output is
// pinned by the standard, and the bounded/unit draws below avoid
// libstdc++ distribution internals, so sequences are identical across
// compilers and platforms for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Derives an independent stream, e.g. one per generator stage.
    Rng(std::uint64_t seed, std::uint64_t stream)
        : eng_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

    std::uint64_t next() { return eng_(); }

    // Unbiased draw in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) {
            throw std::invalid_argument("Rng::below: bound must be positive");
        }
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        while (true) {
            const std::uint64_t v = next();
            if (v < limit) {
                return v % n;
            }
        }
    }

    // Uniform draw in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    std::mt19937_64 eng_;
};

// Cumulative distribution over ranks 1..n with P(rank) proportional to
// rank^-s. s = 0 degenerates to the uniform distribution.
class ZipfCdf {
public:
    ZipfCdf(std::size_t n, double s) {
        if (n == 0) {
            throw std::invalid_argument("ZipfCdf: empty support");
        }
        if (s < 0.0) {
            throw std::invalid_argument("ZipfCdf: exponent must be >= 0");
        }
        cdf_.resize(n);
        double total = 0.0;
        for (std::size_t r = 1; r <= n; ++r) {
            total += std::pow(static_cast<double>(r), -s);
            cdf_[r - 1] = total;
        }
        for (auto& v : cdf_) {
            v /= total;
        }
        cdf_.back() = 1.0;
    }

    // Returns a 0-based rank index.
    std::size_t sample(Rng& rng) const {
        const double u = rng.unit();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    }

    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

}  // namespace retaudit::detail
