#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "retaudit/corpus.hpp"
#include "retaudit/detail/format.hpp"
#include "retaudit/detail/rng.hpp"
#include "retaudit/detail/text.hpp"
#include "retaudit/engine.hpp"
#include "retaudit/queryset.hpp"
#include "retaudit/usefulness.hpp"

namespace retaudit {

/// Deterministic corpus/query/interaction generator. The Zipf exponent
/// `popularity_skew` is the single bias knob: 0 gives uniform term usage,
/// larger values concentrate both documents and queries on head terms.
struct SynthSpec {
    std::vector<std::pair<std::string, std::size_t>> type_counts;
    std::size_t vocabulary_size = 0;
    std::uint32_t doc_length_min = 0;
    std::uint32_t doc_length_max = 0;
    double popularity_skew = 0.0;
    std::uint64_t seed = 0;

    // CLI-driven extras consumed by the synth command.
    std::size_t query_count = 0;
    double export_rate = 0.0;

    void validate() const {
        if (type_counts.empty()) {
            throw std::invalid_argument("synth spec: at least one type is required");
        }
        for (const auto& [label, count] : type_counts) {
            if (label.empty()) {
                throw std::invalid_argument("synth spec: empty type label");
            }
            if (count == 0) {
                throw std::invalid_argument("synth spec: type '" + label +
                                            "' must have at least one document");
            }
        }
        if (vocabulary_size < 2) {
            throw std::invalid_argument("synth spec: vocabulary size must be >= 2");
        }
        if (doc_length_min == 0 || doc_length_min > doc_length_max) {
            throw std::invalid_argument("synth spec: document length range is invalid");
        }
        if (popularity_skew < 0.0) {
            throw std::invalid_argument("synth spec: popularity skew must be >= 0");
        }
        if (export_rate < 0.0 || export_rate > 1.0) {
            throw std::invalid_argument("synth spec: export rate must lie in [0, 1]");
        }
    }
};

namespace detail {

inline std::string zero_padded(std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return digits;
}

inline std::size_t digit_width(std::size_t max_value) {
    std::size_t width = 1;
    while (max_value >= 10) {
        max_value /= 10;
        ++width;
    }
    return width;
}

// Vocabulary term for a 0-based Zipf rank; zero padding keeps ids aligned
// with rank order lexicographically.
inline std::string synth_term(std::size_t rank, std::size_t vocabulary_size) {
    return "t" + zero_padded(rank, digit_width(vocabulary_size - 1));
}

}  // namespace detail

inline Corpus generate_corpus(const SynthSpec& spec) {
    spec.validate();
    detail::Rng rng(spec.seed, 1);
    const detail::ZipfCdf term_dist(spec.vocabulary_size, spec.popularity_skew);
    const std::uint64_t length_span =
        static_cast<std::uint64_t>(spec.doc_length_max) - spec.doc_length_min + 1;

    std::vector<Record> records;
    for (const auto& [label, count] : spec.type_counts) {
        const std::size_t width = detail::digit_width(count - 1);
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint32_t length =
                spec.doc_length_min + static_cast<std::uint32_t>(rng.below(length_span));
            std::string text;
            for (std::uint32_t t = 0; t < length; ++t) {
                if (!text.empty()) {
                    text.push_back(' ');
                }
                text += detail::synth_term(term_dist.sample(rng), spec.vocabulary_size);
            }
            Record rec;
            rec.id = label + "-" + detail::zero_padded(i, width);
            rec.type_label = label;
            rec.fields.emplace_back("text", std::move(text));
            records.push_back(std::move(rec));
        }
    }
    return make_corpus(std::move(records));
}

/// n single-term query draws from the same Zipf vocabulary; duplicates are
/// absorbed into multiplicity, so the returned set has unique texts and its
/// multiplicities sum to n.
inline QuerySet generate_queries(const SynthSpec& spec, std::size_t n) {
    spec.validate();
    if (n == 0) {
        throw std::invalid_argument("generate_queries: n must be >= 1");
    }
    detail::Rng rng(spec.seed, 2);
    const detail::ZipfCdf term_dist(spec.vocabulary_size, spec.popularity_skew);

    QuerySet qs;
    qs.weighting = WeightingMode::uniform;
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text = detail::synth_term(term_dist.sample(rng), spec.vocabulary_size);
        const auto it = position.find(text);
        if (it == position.end()) {
            position.emplace(text, qs.queries.size());
            qs.queries.push_back(Query{std::move(text), 1, 1.0, 1.0});
        } else {
            ++qs.queries[it->second].multiplicity;
        }
    }
    return qs;
}

/// One event per logged query occurrence, aimed at a random document that
/// contains every token of the query; the event is an export with
/// probability export_rate, otherwise a view. Queries matching no document
/// produce no events.
inline std::vector<InteractionEvent> generate_interactions(const Corpus& corpus,
                                                           const QuerySet& queries,
                                                           double export_rate,
                                                           std::uint64_t seed) {
    if (export_rate < 0.0 || export_rate > 1.0) {
        throw std::invalid_argument("generate_interactions: export rate must lie in [0, 1]");
    }
    detail::Rng rng(seed, 3);

    std::map<std::string, std::vector<std::size_t>> docs_with_term;
    for (std::size_t d = 0; d < corpus.records.size(); ++d) {
        std::map<std::string, bool> seen;
        for (const auto& term : tokenize(corpus.records[d].joined_text())) {
            if (!seen.emplace(term, true).second) {
                continue;
            }
            docs_with_term[term].push_back(d);
        }
    }
    const auto candidates = [&](const std::vector<std::string>& terms) {
        std::vector<std::size_t> result;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const auto it = docs_with_term.find(terms[t]);
            if (it == docs_with_term.end()) {
                return std::vector<std::size_t>{};
            }
            if (t == 0) {
                result = it->second;
            } else {
                std::vector<std::size_t> merged;
                std::set_intersection(result.begin(), result.end(), it->second.begin(),
                                      it->second.end(), std::back_inserter(merged));
                result = std::move(merged);
            }
            if (result.empty()) {
                return result;
            }
        }
        return result;
    };

    std::vector<InteractionEvent> events;
    for (const Query& q : queries.queries) {
        const auto terms = tokenize(q.text);
        if (terms.empty()) {
            continue;
        }
        const auto docs = candidates(terms);
        if (docs.empty()) {
            continue;
        }
        for (std::uint32_t occurrence = 0; occurrence < q.multiplicity; ++occurrence) {
            const std::size_t doc = docs[rng.below(docs.size())];
            InteractionEvent ev;
            ev.query_text = q.text;
            ev.doc_id = corpus.records[doc].id;
            ev.kind = rng.unit() < export_rate ? EventKind::Export : EventKind::View;
            events.push_back(std::move(ev));
        }
    }
    return events;
}

/// Parses a line-oriented key=value spec file. Keys: `type=<label>:<count>`
/// (repeatable), `vocabulary`, `doc_length_min`, `doc_length_max`, `skew`,
/// `seed`, `queries`, `export_rate`. Blank lines and `#` comments are
/// ignored.
inline SynthSpec parse_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open synth spec: " + path.string());
    }
    SynthSpec spec;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string_view::npos) {
            throw std::runtime_error("synth spec " + path.string() + ": line " +
                                     std::to_string(line_number) + " is not key=value");
        }
        const auto key = detail::trim(trimmed.substr(0, eq));
        const auto value = detail::trim(trimmed.substr(eq + 1));
        try {
            if (key == "type") {
                const std::size_t colon = value.rfind(':');
                if (colon == std::string_view::npos) {
                    throw std::runtime_error("expected <label>:<count>");
                }
                const auto label = detail::trim(value.substr(0, colon));
                const auto count = detail::parse_uint(detail::trim(value.substr(colon + 1)));
                spec.type_counts.emplace_back(std::string(label), count);
            } else if (key == "vocabulary") {
                spec.vocabulary_size = detail::parse_uint(value);
            } else if (key == "doc_length_min") {
                spec.doc_length_min = static_cast<std::uint32_t>(detail::parse_uint(value));
            } else if (key == "doc_length_max") {
                spec.doc_length_max = static_cast<std::uint32_t>(detail::parse_uint(value));
            } else if (key == "skew") {
                spec.popularity_skew = detail::parse_double(value);
            } else if (key == "seed") {
                spec.seed = detail::parse_uint(value);
            } else if (key == "queries") {
                spec.query_count = detail::parse_uint(value);
            } else if (key == "export_rate") {
                spec.export_rate = detail::parse_double(value);
            } else {
                throw std::runtime_error("unknown key");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("synth spec " + path.string() + ": line " +
                                     std::to_string(line_number) + " ('" + std::string(key) +
                                     "'): " + e.what());
        }
    }
    spec.validate();
    return spec;
}

}  // namespace retaudit
