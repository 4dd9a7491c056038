#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "retaudit/detail/format.hpp"
#include "retaudit/detail/rng.hpp"
#include "retaudit/detail/text.hpp"
#include "retaudit/engine.hpp"

namespace retaudit {

enum class WeightingMode { uniform, multiplicity };

inline std::string_view to_string(WeightingMode mode) {
    return mode == WeightingMode::uniform ? "uniform" : "multiplicity";
}

inline WeightingMode weighting_mode_from_string(std::string_view s) {
    if (s == "uniform") {
        return WeightingMode::uniform;
    }
    if (s == "multiplicity") {
        return WeightingMode::multiplicity;
    }
    throw std::invalid_argument("unknown weighting mode: '" + std::string(s) + "'");
}

struct Query {
    std::string text;                 // canonical: trimmed and lowercased
    std::uint32_t multiplicity = 1;   // occurrences in the source log
    double weight = 1.0;              // w_q
    double difficulty = 1.0;          // h(q)

    bool operator==(const Query&) const = default;
};

struct QuerySet {
    std::vector<Query> queries;  // texts unique, first-seen order
    WeightingMode weighting = WeightingMode::uniform;

    std::size_t size() const { return queries.size(); }
    bool empty() const { return queries.empty(); }

    double total_weight() const {
        double total = 0.0;
        for (const Query& q : queries) {
            total += q.weight;
        }
        return total;
    }

    bool operator==(const QuerySet&) const = default;
};

/// Difficulty hook, h(q). Loaders and samplers pin difficulty to 1, so this
/// returns 1.0 throughout this release; a difficulty estimator plugs in by
/// populating Query::difficulty.
inline double query_difficulty(const Query& q) {
    return q.difficulty;
}

struct QueryLogReport {
    std::size_t lines = 0;
    std::size_t blank = 0;
    std::size_t malformed = 0;
    bool counted_format = false;
};

namespace detail {

inline void apply_weighting(QuerySet& qs) {
    for (Query& q : qs.queries) {
        q.weight = qs.weighting == WeightingMode::uniform
                       ? 1.0
                       : static_cast<double>(q.multiplicity);
    }
}

}  // namespace detail

/// Loads a query log: one query per line, optional tab-separated count
/// column (all lines must agree on the format). Queries are deduplicated by
/// exact match after whitespace trim and Unicode lowercasing; multiplicity
/// accumulates occurrences.
inline QuerySet load_query_log(const std::filesystem::path& path, WeightingMode mode,
                               QueryLogReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open query log: " + path.string());
    }
    QueryLogReport local;
    QueryLogReport& rep = report != nullptr ? *report : local;
    rep = QueryLogReport{};

    QuerySet qs;
    qs.weighting = mode;
    std::unordered_map<std::string, std::size_t> position;
    bool counts_decided = false;
    bool with_counts = false;

    std::string line;
    while (std::getline(in, line)) {
        ++rep.lines;
        if (detail::trim(line).empty()) {
            ++rep.blank;
            continue;
        }
        const std::size_t tab = line.find('\t');
        const bool has_count = tab != std::string::npos;
        if (!counts_decided) {
            counts_decided = true;
            with_counts = has_count;
            rep.counted_format = with_counts;
        } else if (has_count != with_counts) {
            throw std::runtime_error("query log mixes counted and uncounted lines (line " +
                                     std::to_string(rep.lines) + "): " + path.string());
        }
        std::uint64_t count = 1;
        std::string_view text_part = line;
        if (has_count) {
            text_part = std::string_view(line).substr(0, tab);
            const auto count_part = detail::trim(std::string_view(line).substr(tab + 1));
            try {
                count = detail::parse_uint(count_part);
            } catch (const std::exception&) {
                ++rep.malformed;
                continue;
            }
            if (count == 0) {
                ++rep.malformed;
                continue;
            }
        }
        const std::string key = detail::lowercase(detail::trim(text_part));
        if (key.empty()) {
            ++rep.malformed;
            continue;
        }
        const auto it = position.find(key);
        if (it == position.end()) {
            position.emplace(key, qs.queries.size());
            Query q;
            q.text = key;
            q.multiplicity = static_cast<std::uint32_t>(count);
            qs.queries.push_back(std::move(q));
        } else {
            qs.queries[it->second].multiplicity += static_cast<std::uint32_t>(count);
        }
    }
    if (qs.empty()) {
        throw std::runtime_error("query log contains zero queries: " + path.string());
    }
    detail::apply_weighting(qs);
    return qs;
}

/// Writes one line per unique query: `text<TAB>multiplicity`.
inline void save_query_log(const QuerySet& qs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write query log: " + path.string());
    }
    for (const Query& q : qs.queries) {
        out << q.text << '\t' << q.multiplicity << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

enum class SampleStrategy { unigram, bigram };

inline SampleStrategy sample_strategy_from_string(std::string_view s) {
    if (s == "unigram") {
        return SampleStrategy::unigram;
    }
    if (s == "bigram") {
        return SampleStrategy::bigram;
    }
    throw std::invalid_argument("unknown sampling strategy: '" + std::string(s) + "'");
}

namespace detail {

// Fenwick tree over non-negative weights; supports prefix sums and
// find-by-cumulative-weight, which is what sampling without replacement needs.
class WeightedSampler {
public:
    explicit WeightedSampler(const std::vector<double>& weights)
        : n_(weights.size()), tree_(weights.size() + 1, 0.0), values_(weights) {
        for (std::size_t i = 0; i < n_; ++i) {
            add(i, weights[i]);
        }
    }

    double total() const { return prefix(n_); }

    // Index with the smallest prefix sum exceeding u; skips zeroed entries.
    std::size_t find(double u) const {
        std::size_t idx = 0;
        std::size_t mask = highest_bit(n_);
        double rest = u;
        while (mask != 0) {
            const std::size_t next = idx + mask;
            if (next <= n_ && tree_[next] <= rest) {
                idx = next;
                rest -= tree_[next];
            }
            mask >>= 1;
        }
        // idx entries lie strictly below u; the draw is the next one. Guard
        // against landing on an exhausted entry through rounding.
        std::size_t result = idx;
        while (result < n_ && values_[result] == 0.0) {
            ++result;
        }
        if (result >= n_) {
            result = n_ - 1;
            while (result > 0 && values_[result] == 0.0) {
                --result;
            }
        }
        return result;
    }

    void remove(std::size_t i) {
        add(i, -values_[i]);
        values_[i] = 0.0;
    }

private:
    static std::size_t highest_bit(std::size_t n) {
        std::size_t mask = 1;
        while (mask * 2 <= n) {
            mask *= 2;
        }
        return n == 0 ? 0 : mask;
    }

    void add(std::size_t i, double delta) {
        for (std::size_t pos = i + 1; pos <= n_; pos += pos & (~pos + 1)) {
            tree_[pos] += delta;
        }
    }

    double prefix(std::size_t count) const {
        double sum = 0.0;
        for (std::size_t pos = count; pos > 0; pos -= pos & (~pos + 1)) {
            sum += tree_[pos];
        }
        return sum;
    }

    std::size_t n_;
    std::vector<double> tree_;
    std::vector<double> values_;
};

}  // namespace detail

/// Draws queries from the index vocabulary, proportional to collection term
/// frequency. Unigram queries are single terms sampled without replacement;
/// bigram queries join two distinct terms. Deterministic for a fixed seed.
inline QuerySet sample_queries(const Index& idx, std::size_t n, SampleStrategy strategy,
                               std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("sample_queries: n must be >= 1");
    }
    const std::size_t vocab = idx.terms.size();
    if (vocab == 0) {
        throw std::invalid_argument("sample_queries: index has no terms");
    }
    detail::Rng rng(seed);
    QuerySet qs;
    qs.weighting = WeightingMode::uniform;
    qs.queries.reserve(n);

    if (strategy == SampleStrategy::unigram) {
        if (n > vocab) {
            throw std::runtime_error("sample_queries: requested " + std::to_string(n) +
                                     " unigram queries but the index has only " +
                                     std::to_string(vocab) + " distinct terms");
        }
        std::vector<double> weights(vocab);
        for (std::size_t t = 0; t < vocab; ++t) {
            weights[t] = static_cast<double>(idx.term_frequency[t]);
        }
        detail::WeightedSampler sampler(weights);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = sampler.find(rng.unit() * sampler.total());
            qs.queries.push_back(Query{idx.terms[t], 1, 1.0, 1.0});
            sampler.remove(t);
        }
    } else {
        if (vocab < 2) {
            throw std::runtime_error("sample_queries: bigram sampling needs at least 2 distinct terms");
        }
        std::vector<double> cdf(vocab);
        double total = 0.0;
        for (std::size_t t = 0; t < vocab; ++t) {
            total += static_cast<double>(idx.term_frequency[t]);
            cdf[t] = total;
        }
        const auto draw = [&]() -> std::size_t {
            const double u = rng.unit() * total;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            return static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(it - cdf.begin(),
                                         static_cast<std::ptrdiff_t>(vocab) - 1));
        };
        std::unordered_set<std::string> seen;
        std::size_t attempts_left = 100 * n + 1000;
        while (qs.queries.size() < n) {
            if (attempts_left-- == 0) {
                throw std::runtime_error("sample_queries: unable to draw " + std::to_string(n) +
                                         " unique bigram queries from this vocabulary");
            }
            const std::size_t t1 = draw();
            std::size_t t2 = draw();
            while (t2 == t1) {
                t2 = draw();
            }
            std::string text = idx.terms[t1] + ' ' + idx.terms[t2];
            if (seen.insert(text).second) {
                qs.queries.push_back(Query{std::move(text), 1, 1.0, 1.0});
            }
        }
    }
    return qs;
}

/// Mean query length over log occurrences (weighted by multiplicity),
/// reported in both units since "length" is ambiguous: code points and
/// analyzer terms.
struct QueryLengthStats {
    double avg_chars = 0.0;
    double avg_terms = 0.0;
};

inline QueryLengthStats query_length_stats(const QuerySet& qs) {
    if (qs.empty()) {
        return {};
    }
    double chars = 0.0;
    double terms = 0.0;
    double occurrences = 0.0;
    for (const Query& q : qs.queries) {
        std::size_t cp_count = 0;
        std::size_t i = 0;
        while (i < q.text.size()) {
            detail::decode_utf8(q.text, i);
            ++cp_count;
        }
        const double mult = static_cast<double>(q.multiplicity);
        chars += mult * static_cast<double>(cp_count);
        terms += mult * static_cast<double>(tokenize(q.text).size());
        occurrences += mult;
    }
    return QueryLengthStats{chars / occurrences, terms / occurrences};
}

}  // namespace retaudit
