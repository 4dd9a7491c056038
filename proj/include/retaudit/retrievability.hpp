#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retaudit/detail/format.hpp"
#include "retaudit/detail/parallel.hpp"
#include "retaudit/engine.hpp"
#include "retaudit/queryset.hpp"

namespace retaudit {

/// Strictly increasing rank cutoffs for the sweep.
struct CutoffGrid {
    std::vector<std::uint32_t> cutoffs;

    static CutoffGrid default_grid() { return CutoffGrid{{10, 20, 30, 40, 50, 100}}; }

    void validate() const {
        if (cutoffs.empty()) {
            throw std::invalid_argument("cutoff grid is empty");
        }
        for (std::size_t i = 0; i < cutoffs.size(); ++i) {
            if (cutoffs[i] == 0) {
                throw std::invalid_argument("cutoffs must be positive");
            }
            if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
                throw std::invalid_argument("cutoffs must be strictly increasing");
            }
        }
    }

    std::uint32_t max_cutoff() const { return cutoffs.back(); }

    std::optional<std::size_t> index_of(std::uint32_t c) const {
        const auto it = std::find(cutoffs.begin(), cutoffs.end(), c);
        if (it == cutoffs.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - cutoffs.begin());
    }

    bool operator==(const CutoffGrid&) const = default;
};

/// Per-document r(d) accumulated for every cutoff in the grid. Score vectors
/// are non-decreasing across cutoffs by construction.
struct RetrievabilityTable {
    std::string type_label;
    CutoffGrid grid;
    std::vector<std::string> doc_ids;  // corpus order
    std::vector<double> scores;        // doc-major: scores[doc * grid.size() + cutoff_idx]
    std::size_t query_count = 0;
    WeightingMode weighting = WeightingMode::uniform;
    std::size_t zero_hit_queries = 0;
    double total_query_weight = 0.0;

    std::size_t doc_count() const { return doc_ids.size(); }

    double at(std::size_t doc, std::size_t cutoff_idx) const {
        return scores[doc * grid.cutoffs.size() + cutoff_idx];
    }

    /// One cutoff's score column in document order.
    std::vector<double> column(std::size_t cutoff_idx) const {
        std::vector<double> out(doc_count());
        const std::size_t g = grid.cutoffs.size();
        for (std::size_t d = 0; d < out.size(); ++d) {
            out[d] = scores[d * g + cutoff_idx];
        }
        return out;
    }
};

struct RetrievabilityOptions {
    std::uint32_t max_cutoff_cap = 1000;
    unsigned threads = 0;          // 0 = number of available processors
    std::size_t chunk_size = 256;  // queries per work chunk; fixed so results
                                   // do not depend on the thread count
};

/// Runs every query once at k = max cutoff and counts each hit at rank r
/// into all cutoffs >= r, weighted by w_q. The prefix property of
/// retrieve_top_docs makes this equivalent to retrieving per cutoff.
inline RetrievabilityTable compute_retrievability(const Index& idx, const QuerySet& queries,
                                                  const CutoffGrid& grid,
                                                  const RetrievabilityOptions& options = {}) {
    grid.validate();
    if (queries.empty()) {
        throw std::invalid_argument("compute_retrievability: empty query set");
    }
    if (grid.max_cutoff() > options.max_cutoff_cap) {
        throw std::invalid_argument("compute_retrievability: max cutoff " +
                                    std::to_string(grid.max_cutoff()) + " exceeds the cap of " +
                                    std::to_string(options.max_cutoff_cap));
    }
    const std::size_t g = grid.cutoffs.size();
    const std::size_t nd = idx.doc_count();
    const std::size_t nq = queries.size();
    const std::size_t kmax = std::min<std::size_t>(grid.max_cutoff(), nd);

    // rank -> first grid slot whose cutoff admits it
    std::vector<std::size_t> first_slot(kmax + 1, 0);
    for (std::size_t rank = 1; rank <= kmax; ++rank) {
        const auto it = std::lower_bound(grid.cutoffs.begin(), grid.cutoffs.end(), rank);
        first_slot[rank] = static_cast<std::size_t>(it - grid.cutoffs.begin());
    }

    const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
    const std::size_t chunks = detail::chunk_count(nq, chunk);
    std::vector<std::vector<double>> partials(chunks);
    std::vector<std::size_t> zero_hits(chunks, 0);

    const unsigned threads = options.threads != 0 ? options.threads : detail::default_threads();
    detail::for_each_chunk(nq, chunk, threads, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        auto& part = partials[ci];
        part.assign(nd * g, 0.0);
        for (std::size_t qi = begin; qi < end; ++qi) {
            const Query& q = queries.queries[qi];
            const auto terms = tokenize(q.text);
            const auto hits = retrieve_top_docs(idx, terms, kmax);
            if (hits.empty()) {
                ++zero_hits[ci];
                continue;
            }
            for (std::size_t r = 0; r < hits.size(); ++r) {
                double* row = part.data() + static_cast<std::size_t>(hits[r].doc) * g;
                for (std::size_t slot = first_slot[r + 1]; slot < g; ++slot) {
                    row[slot] += q.weight;
                }
            }
        }
    });

    RetrievabilityTable table;
    table.type_label = idx.type_label;
    table.grid = grid;
    table.doc_ids = idx.doc_ids;
    table.scores.assign(nd * g, 0.0);
    table.query_count = nq;
    table.weighting = queries.weighting;
    table.total_query_weight = queries.total_weight();
    // Partials are folded in chunk order, so the floating-point sums are
    // identical for every thread count.
    for (std::size_t ci = 0; ci < chunks; ++ci) {
        const auto& part = partials[ci];
        for (std::size_t i = 0; i < table.scores.size(); ++i) {
            table.scores[i] += part[i];
        }
        table.zero_hit_queries += zero_hits[ci];
        partials[ci] = {};
    }
    return table;
}

/// Documents with r(d) > 0 at cutoff c: absolute count and fraction of the
/// partition.
inline std::pair<std::size_t, double> percent_retrieved(const RetrievabilityTable& table,
                                                        std::uint32_t c) {
    const auto slot = table.grid.index_of(c);
    if (!slot) {
        throw std::invalid_argument("percent_retrieved: cutoff " + std::to_string(c) +
                                    " is not in the grid");
    }
    std::size_t count = 0;
    for (std::size_t d = 0; d < table.doc_count(); ++d) {
        if (table.at(d, *slot) > 0.0) {
            ++count;
        }
    }
    return {count, static_cast<double>(count) / static_cast<double>(table.doc_count())};
}

inline void write_retrievability_csv(const RetrievabilityTable& table,
                                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write table: " + path.string());
    }
    out << "doc_id,type";
    for (const std::uint32_t c : table.grid.cutoffs) {
        out << ",r@" << c;
    }
    out << '\n';
    const std::size_t g = table.grid.cutoffs.size();
    for (std::size_t d = 0; d < table.doc_count(); ++d) {
        out << detail::csv_escape(table.doc_ids[d]) << ',' << detail::csv_escape(table.type_label);
        for (std::size_t slot = 0; slot < g; ++slot) {
            out << ',' << detail::format_double(table.scores[d * g + slot]);
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

/// Reads a table written by write_retrievability_csv. Run metadata
/// (query_count, weighting) lives in the side metadata file, not the CSV.
inline RetrievabilityTable read_retrievability_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open table: " + path.string());
    }
    const std::string context = "retrievability table " + path.string();
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(context + ": empty file");
    }
    const auto header = detail::csv_split(line);
    if (header.size() < 3 || header[0] != "doc_id" || header[1] != "type") {
        throw std::runtime_error(context + ": unexpected header");
    }
    RetrievabilityTable table;
    for (std::size_t i = 2; i < header.size(); ++i) {
        const std::string& col = header[i];
        if (col.rfind("r@", 0) != 0) {
            throw std::runtime_error(context + ": unexpected column '" + col + "'");
        }
        table.grid.cutoffs.push_back(
            static_cast<std::uint32_t>(detail::parse_uint(std::string_view(col).substr(2))));
    }
    table.grid.validate();
    const std::size_t g = table.grid.cutoffs.size();
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = detail::csv_split(line);
        if (fields.size() != g + 2) {
            throw std::runtime_error(context + ": wrong field count in row " +
                                     std::to_string(table.doc_count() + 2));
        }
        table.doc_ids.push_back(fields[0]);
        if (table.type_label.empty()) {
            table.type_label = fields[1];
        }
        for (std::size_t slot = 0; slot < g; ++slot) {
            table.scores.push_back(detail::parse_double(fields[2 + slot]));
        }
    }
    if (table.doc_ids.empty()) {
        throw std::runtime_error(context + ": no rows");
    }
    return table;
}

}  // namespace retaudit
