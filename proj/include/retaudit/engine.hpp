#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "retaudit/corpus.hpp"
#include "retaudit/detail/format.hpp"
#include "retaudit/detail/text.hpp"

namespace retaudit {

// Analyzer contract identifier, written into every snapshot and report so a
// table can be traced back to the rules that produced it.
inline constexpr std::string_view kAnalyzerId = "unicode-alnum-lower/1";

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    bool operator==(const Bm25Params&) const = default;
};

/// Lowercased alphanumeric tokens; any non-alphanumeric code point splits.
/// No stemming, no stopwords.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = detail::decode_utf8(text, i);
        if (detail::is_word_cp(cp)) {
            detail::append_utf8(current, detail::lower_cp(cp));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;

    bool operator==(const Posting&) const = default;
};

/// Immutable inverted index over one type partition. Document positions
/// follow corpus order; `terms` is sorted ascending and `postings[t]` is
/// sorted by document position.
struct Index {
    std::string type_label;
    Bm25Params params;

    std::vector<std::string> terms;
    std::vector<std::vector<Posting>> postings;
    std::vector<std::uint64_t> term_frequency;  // collection frequency per term

    std::vector<std::string> doc_ids;
    std::vector<std::uint32_t> doc_lengths;
    double avg_doc_length = 0.0;

    // doc position -> rank of its id in ascending id order; the score
    // tie-break below compares these instead of the id strings.
    std::vector<std::uint32_t> tie_order;

    std::unordered_map<std::string, std::uint32_t> term_ids;
    std::unordered_map<std::string, std::uint32_t> doc_positions;

    std::size_t doc_count() const { return doc_ids.size(); }

    const std::vector<Posting>* find_postings(const std::string& term) const {
        const auto it = term_ids.find(term);
        return it == term_ids.end() ? nullptr : &postings[it->second];
    }

    std::optional<std::uint32_t> find_doc(const std::string& id) const {
        const auto it = doc_positions.find(id);
        if (it == doc_positions.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void rebuild_lookups() {
        term_ids.clear();
        term_ids.reserve(terms.size());
        for (std::uint32_t t = 0; t < terms.size(); ++t) {
            term_ids.emplace(terms[t], t);
        }
        doc_positions.clear();
        doc_positions.reserve(doc_ids.size());
        for (std::uint32_t d = 0; d < doc_ids.size(); ++d) {
            doc_positions.emplace(doc_ids[d], d);
        }
        tie_order.assign(doc_ids.size(), 0);
        std::vector<std::uint32_t> order(doc_ids.size());
        for (std::uint32_t d = 0; d < order.size(); ++d) {
            order[d] = d;
        }
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return doc_ids[a] < doc_ids[b];
        });
        for (std::uint32_t r = 0; r < order.size(); ++r) {
            tie_order[order[r]] = r;
        }
    }
};

inline Index build_index(const Corpus& corpus, Bm25Params params = {}) {
    if (corpus.empty()) {
        throw std::invalid_argument("build_index: corpus is empty");
    }
    Index idx;
    idx.params = params;
    idx.type_label = corpus.by_type.size() == 1 ? corpus.by_type.begin()->first : "mixed";

    std::map<std::string, std::vector<Posting>> acc;
    std::uint64_t total_tokens = 0;
    idx.doc_ids.reserve(corpus.size());
    idx.doc_lengths.reserve(corpus.size());
    for (std::uint32_t d = 0; d < corpus.records.size(); ++d) {
        const Record& rec = corpus.records[d];
        const auto tokens = tokenize(rec.joined_text());
        idx.doc_ids.push_back(rec.id);
        idx.doc_lengths.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_tokens += tokens.size();
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) {
            ++tf[t];
        }
        for (const auto& [term, count] : tf) {
            acc[term].push_back(Posting{d, count});
        }
    }
    if (total_tokens == 0) {
        throw std::runtime_error("build_index: every record tokenized to zero tokens");
    }
    idx.avg_doc_length = static_cast<double>(total_tokens) / static_cast<double>(corpus.size());

    idx.terms.reserve(acc.size());
    idx.postings.reserve(acc.size());
    idx.term_frequency.reserve(acc.size());
    for (auto& [term, plist] : acc) {
        std::uint64_t cf = 0;
        for (const Posting& p : plist) {
            cf += p.tf;
        }
        idx.terms.push_back(term);
        idx.postings.push_back(std::move(plist));
        idx.term_frequency.push_back(cf);
    }
    idx.rebuild_lookups();
    return idx;
}

namespace detail {

// Non-negative idf variant: ln(1 + (N - df + 0.5) / (df + 0.5)).
inline double bm25_idf(std::size_t doc_count, std::size_t df) {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

inline double bm25_tf_weight(const Bm25Params& p, double tf, double doc_len, double avg_len) {
    return tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * doc_len / avg_len));
}

}  // namespace detail

/// BM25 score of one document for the given term sequence. Repeated query
/// terms contribute once per occurrence.
inline double score(const Index& idx, std::span<const std::string> query_terms, std::uint32_t doc) {
    if (doc >= idx.doc_count()) {
        throw std::out_of_range("score: document position out of range");
    }
    double total = 0.0;
    for (const auto& term : query_terms) {
        const auto* plist = idx.find_postings(term);
        if (plist == nullptr) {
            continue;
        }
        const auto it = std::lower_bound(
            plist->begin(), plist->end(), doc,
            [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (it == plist->end() || it->doc != doc) {
            continue;
        }
        total += detail::bm25_idf(idx.doc_count(), plist->size()) *
                 detail::bm25_tf_weight(idx.params, it->tf, idx.doc_lengths[doc],
                                        idx.avg_doc_length);
    }
    return total;
}

struct ScoredDoc {
    std::uint32_t doc;
    double score;
};

/// Top-k by (score desc, id asc); only documents with a positive score are
/// candidates. k is capped at the number of matching documents.
inline std::vector<ScoredDoc> retrieve_top_docs(const Index& idx,
                                                std::span<const std::string> query_terms,
                                                std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("retrieve_top_docs: k must be >= 1");
    }
    std::vector<double> acc(idx.doc_count(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& term : query_terms) {
        const auto* plist = idx.find_postings(term);
        if (plist == nullptr) {
            continue;
        }
        const double idf = detail::bm25_idf(idx.doc_count(), plist->size());
        for (const Posting& p : *plist) {
            // Every contribution is strictly positive, so a zero slot means
            // the document has not been touched yet.
            if (acc[p.doc] == 0.0) {
                touched.push_back(p.doc);
            }
            acc[p.doc] += idf * detail::bm25_tf_weight(idx.params, p.tf,
                                                       idx.doc_lengths[p.doc],
                                                       idx.avg_doc_length);
        }
    }
    k = std::min(k, touched.size());
    const auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (acc[a] != acc[b]) {
            return acc[a] > acc[b];
        }
        return idx.tie_order[a] < idx.tie_order[b];
    };
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(k),
                      touched.end(), better);
    std::vector<ScoredDoc> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(ScoredDoc{touched[i], acc[touched[i]]});
    }
    return out;
}

struct RankedEntry {
    std::string doc_id;
    double score;
    std::uint32_t rank;  // 1-based

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    std::vector<RankedEntry> entries;

    bool operator==(const RankedList&) const = default;
};

inline RankedList retrieve_top_k(const Index& idx, std::string_view query_text, std::size_t k) {
    const auto terms = tokenize(query_text);
    const auto docs = retrieve_top_docs(idx, terms, k);
    RankedList out;
    out.entries.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out.entries.push_back(RankedEntry{idx.doc_ids[docs[i].doc], docs[i].score,
                                          static_cast<std::uint32_t>(i + 1)});
    }
    return out;
}

// --- snapshot persistence ---------------------------------------------------
//
// Line-delimited JSON: a header object, one object per document, then one
// object per term. Loading verifies structure, analyzer, and the per-document
// length invariant; parameter expectations are checked when supplied.

inline constexpr std::string_view kIndexFormatName = "retaudit.index";
inline constexpr int kIndexFormatVersion = 1;

inline std::string index_snapshot_string(const Index& idx) {
    std::ostringstream out;
    nlohmann::ordered_json header;
    header["format"] = std::string(kIndexFormatName);
    header["version"] = kIndexFormatVersion;
    header["analyzer"] = std::string(kAnalyzerId);
    header["type"] = idx.type_label;
    header["k1"] = idx.params.k1;
    header["b"] = idx.params.b;
    header["doc_count"] = idx.doc_count();
    header["term_count"] = idx.terms.size();
    out << header.dump() << '\n';
    for (std::size_t d = 0; d < idx.doc_count(); ++d) {
        nlohmann::ordered_json doc;
        doc["id"] = idx.doc_ids[d];
        doc["len"] = idx.doc_lengths[d];
        out << doc.dump() << '\n';
    }
    for (std::size_t t = 0; t < idx.terms.size(); ++t) {
        nlohmann::ordered_json term;
        term["t"] = idx.terms[t];
        auto& plist = term["p"] = nlohmann::ordered_json::array();
        for (const Posting& p : idx.postings[t]) {
            plist.push_back({p.doc, p.tf});
        }
        out << term.dump() << '\n';
    }
    return std::move(out).str();
}

inline void save_index(const Index& idx, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write index snapshot: " + path.string());
    }
    out << index_snapshot_string(idx);
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline Index load_index(const std::filesystem::path& path,
                        std::optional<Bm25Params> expected_params = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open index snapshot: " + path.string());
    }
    const std::string context = "index snapshot " + path.string();
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(context + ": empty file");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw std::runtime_error(context + ": bad header: " + e.what());
    }
    if (header.value("format", "") != kIndexFormatName) {
        throw std::runtime_error(context + ": not an index snapshot");
    }
    if (header.value("version", -1) != kIndexFormatVersion) {
        throw std::runtime_error(context + ": unsupported snapshot version");
    }
    if (header.value("analyzer", "") != kAnalyzerId) {
        throw std::runtime_error(context + ": analyzer mismatch: snapshot has '" +
                                 header.value("analyzer", "") + "', this build uses '" +
                                 std::string(kAnalyzerId) + "'");
    }
    Index idx;
    idx.type_label = header.at("type").get<std::string>();
    idx.params.k1 = header.at("k1").get<double>();
    idx.params.b = header.at("b").get<double>();
    if (expected_params && !(idx.params == *expected_params)) {
        throw std::runtime_error(
            context + ": BM25 parameter mismatch: snapshot has k1=" +
            detail::format_double(idx.params.k1) + " b=" + detail::format_double(idx.params.b) +
            ", requested k1=" + detail::format_double(expected_params->k1) +
            " b=" + detail::format_double(expected_params->b));
    }
    const auto doc_count = header.at("doc_count").get<std::size_t>();
    const auto term_count = header.at("term_count").get<std::size_t>();

    std::uint64_t total_tokens = 0;
    for (std::size_t d = 0; d < doc_count; ++d) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(context + ": truncated document section");
        }
        const auto doc = nlohmann::json::parse(line);
        idx.doc_ids.push_back(doc.at("id").get<std::string>());
        idx.doc_lengths.push_back(doc.at("len").get<std::uint32_t>());
        total_tokens += idx.doc_lengths.back();
    }
    std::vector<std::uint64_t> length_check(doc_count, 0);
    for (std::size_t t = 0; t < term_count; ++t) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(context + ": truncated term section");
        }
        const auto term = nlohmann::json::parse(line);
        idx.terms.push_back(term.at("t").get<std::string>());
        if (t > 0 && !(idx.terms[t - 1] < idx.terms[t])) {
            throw std::runtime_error(context + ": terms out of order");
        }
        std::vector<Posting> plist;
        std::uint64_t cf = 0;
        for (const auto& entry : term.at("p")) {
            const Posting p{entry.at(0).get<std::uint32_t>(), entry.at(1).get<std::uint32_t>()};
            if (p.doc >= doc_count) {
                throw std::runtime_error(context + ": posting references unknown document");
            }
            if (!plist.empty() && plist.back().doc >= p.doc) {
                throw std::runtime_error(context + ": postings out of order");
            }
            length_check[p.doc] += p.tf;
            cf += p.tf;
            plist.push_back(p);
        }
        idx.postings.push_back(std::move(plist));
        idx.term_frequency.push_back(cf);
    }
    for (std::size_t d = 0; d < doc_count; ++d) {
        if (length_check[d] != idx.doc_lengths[d]) {
            throw std::runtime_error(context + ": document length does not match postings");
        }
    }
    if (total_tokens == 0) {
        throw std::runtime_error(context + ": index has no tokens");
    }
    idx.avg_doc_length = static_cast<double>(total_tokens) / static_cast<double>(doc_count);
    idx.rebuild_lookups();
    return idx;
}

}  // namespace retaudit
