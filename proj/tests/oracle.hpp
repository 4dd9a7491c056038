#pragma once

// Independent reference implementations the test suites check the library
// against. Everything here recomputes its answer from raw tokens with its
// own arithmetic; nothing routes through the engine's index, scorer, or
// accumulation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Doc {
    std::string id;
    std::vector<std::string> tokens;
};

inline double avg_length(const std::vector<Doc>& docs) {
    double total = 0.0;
    for (const auto& d : docs) {
        total += static_cast<double>(d.tokens.size());
    }
    return total / static_cast<double>(docs.size());
}

inline std::size_t doc_frequency(const std::vector<Doc>& docs, const std::string& term) {
    std::size_t df = 0;
    for (const auto& d : docs) {
        if (std::find(d.tokens.begin(), d.tokens.end(), term) != d.tokens.end()) {
            ++df;
        }
    }
    return df;
}

inline std::size_t term_frequency(const Doc& doc, const std::string& term) {
    return static_cast<std::size_t>(std::count(doc.tokens.begin(), doc.tokens.end(), term));
}

// Exhaustive BM25: score(D,Q) = sum_t ln(1 + (N - df + 0.5)/(df + 0.5))
//                               * tf (k1 + 1) / (tf + k1 (1 - b + b |D|/avgdl)).
inline double bm25_score(const std::vector<Doc>& docs, const std::vector<std::string>& query,
                         std::size_t doc, double k1, double b) {
    const double n = static_cast<double>(docs.size());
    const double avgdl = avg_length(docs);
    const double dl = static_cast<double>(docs[doc].tokens.size());
    double score = 0.0;
    for (const auto& term : query) {
        const auto tf = static_cast<double>(term_frequency(docs[doc], term));
        if (tf == 0.0) {
            continue;
        }
        const auto df = static_cast<double>(doc_frequency(docs, term));
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
    }
    return score;
}

struct Ranked {
    std::string id;
    double score;
};

// Scores every document and sorts by (score desc, id asc); only positive
// scores qualify. Truncate to k for a top-k reference.
inline std::vector<Ranked> rank_all(const std::vector<Doc>& docs,
                                    const std::vector<std::string>& query, double k1, double b) {
    std::vector<Ranked> out;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const double s = bm25_score(docs, query, d, k1, b);
        if (s > 0.0) {
            out.push_back(Ranked{docs[d].id, s});
        }
    }
    std::sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b2) {
        if (a.score != b2.score) {
            return a.score > b2.score;
        }
        return a.id < b2.id;
    });
    return out;
}

// Direct Gini evaluation used to cross-check the library: mean absolute
// difference route, G = sum_ij |v_i - v_j| / (2 N^2 mu). Algebraically equal
// to the sorted-index formula but computed along a different path.
inline double gini_mean_difference(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double total = 0.0;
    for (const double v : values) {
        total += v;
    }
    double abs_diff = 0.0;
    for (const double a : values) {
        for (const double b : values) {
            abs_diff += std::abs(a - b);
        }
    }
    return abs_diff / (2.0 * n * n * (total / n));
}

}  // namespace oracle
