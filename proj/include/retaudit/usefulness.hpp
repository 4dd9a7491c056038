#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "retaudit/detail/format.hpp"
#include "retaudit/detail/parallel.hpp"
#include "retaudit/detail/text.hpp"
#include "retaudit/engine.hpp"
#include "retaudit/queryset.hpp"

namespace retaudit {

enum class EventKind { View, Export };

inline std::string_view to_string(EventKind kind) {
    return kind == EventKind::View ? "view" : "export";
}

/// One logged interaction. Export events (bookmark/download/cite) are the
/// implicit relevance signal; views are retained for reporting only.
struct InteractionEvent {
    std::string query_text;
    std::string doc_id;
    EventKind kind = EventKind::View;
    std::string timestamp;  // optional ISO-8601 instant, kept opaque

    bool operator==(const InteractionEvent&) const = default;
};

struct InteractionLoadReport {
    std::size_t lines = 0;
    std::size_t malformed = 0;
    std::size_t views = 0;
    std::size_t exports = 0;
};

/// Parses `query<TAB>doc_id<TAB>kind[<TAB>timestamp]` lines in file order.
/// Malformed lines are counted and skipped; zero valid events is a hard
/// error.
inline std::vector<InteractionEvent> load_interactions(const std::filesystem::path& path,
                                                       InteractionLoadReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open interaction log: " + path.string());
    }
    InteractionLoadReport local;
    InteractionLoadReport& rep = report != nullptr ? *report : local;
    rep = InteractionLoadReport{};

    std::vector<InteractionEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        ++rep.lines;
        if (line.empty()) {
            continue;
        }
        const auto cols = detail::split(line, '\t');
        if (cols.size() < 3 || cols.size() > 4) {
            ++rep.malformed;
            continue;
        }
        InteractionEvent ev;
        ev.query_text = std::string(cols[0]);
        ev.doc_id = std::string(cols[1]);
        if (cols[2] == "view") {
            ev.kind = EventKind::View;
        } else if (cols[2] == "export") {
            ev.kind = EventKind::Export;
        } else {
            ++rep.malformed;
            continue;
        }
        if (cols.size() == 4) {
            ev.timestamp = std::string(cols[3]);
        }
        if (ev.query_text.empty() || ev.doc_id.empty()) {
            ++rep.malformed;
            continue;
        }
        (ev.kind == EventKind::View ? rep.views : rep.exports)++;
        events.push_back(std::move(ev));
    }
    if (events.empty()) {
        throw std::runtime_error("interaction log contains zero valid events: " + path.string());
    }
    return events;
}

inline void save_interactions(std::span<const InteractionEvent> events,
                              const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write interaction log: " + path.string());
    }
    for (const InteractionEvent& ev : events) {
        out << ev.query_text << '\t' << ev.doc_id << '\t' << to_string(ev.kind);
        if (!ev.timestamp.empty()) {
            out << '\t' << ev.timestamp;
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

/// Per-document u(d) with the event tallies needed for auditing.
struct UsefulnessTable {
    std::string type_label;
    std::uint32_t cutoff = 0;
    std::vector<std::string> doc_ids;  // corpus order
    std::vector<double> scores;

    std::size_t exports_consumed = 0;   // contributed to u(d)
    std::size_t exports_ignored = 0;    // document outside top-c for its query
    std::size_t unknown_documents = 0;  // doc_id not in this partition's index
    std::size_t non_export_events = 0;

    std::size_t doc_count() const { return doc_ids.size(); }
};

struct UsefulnessOptions {
    unsigned threads = 0;
    std::size_t chunk_size = 64;  // unique queries per retrieval chunk
};

/// Replays each export event's query and credits w_q * h(q) / rank when the
/// exported document sits within the top c. Events whose document is absent
/// or ranked deeper contribute nothing and are tallied.
inline UsefulnessTable compute_usefulness(const Index& idx,
                                          std::span<const InteractionEvent> events,
                                          const QuerySet& queries, std::uint32_t cutoff,
                                          const UsefulnessOptions& options = {}) {
    if (cutoff == 0) {
        throw std::invalid_argument("compute_usefulness: cutoff must be >= 1");
    }
    UsefulnessTable table;
    table.type_label = idx.type_label;
    table.cutoff = cutoff;
    table.doc_ids = idx.doc_ids;
    table.scores.assign(idx.doc_count(), 0.0);

    std::unordered_map<std::string, std::pair<double, double>> query_weights;
    query_weights.reserve(queries.size());
    for (const Query& q : queries.queries) {
        query_weights.emplace(detail::lowercase(detail::trim(q.text)),
                              std::make_pair(q.weight, query_difficulty(q)));
    }

    // Ranked lists are computed once per distinct export query and shared.
    std::vector<std::string> unique_texts;
    std::unordered_map<std::string, std::size_t> text_slot;
    for (const InteractionEvent& ev : events) {
        if (ev.kind != EventKind::Export) {
            ++table.non_export_events;
            continue;
        }
        const std::string key = detail::lowercase(detail::trim(ev.query_text));
        if (text_slot.emplace(key, unique_texts.size()).second) {
            unique_texts.push_back(key);
        }
    }

    std::vector<std::vector<ScoredDoc>> ranked(unique_texts.size());
    const unsigned threads = options.threads != 0 ? options.threads : detail::default_threads();
    detail::for_each_chunk(unique_texts.size(), std::max<std::size_t>(1, options.chunk_size),
                           threads, [&](std::size_t, std::size_t begin, std::size_t end) {
                               for (std::size_t i = begin; i < end; ++i) {
                                   const auto terms = tokenize(unique_texts[i]);
                                   ranked[i] = retrieve_top_docs(idx, terms, cutoff);
                               }
                           });

    // Contributions are summed in sorted (document, value) order, so neither
    // the event order nor the thread count can perturb the totals.
    std::vector<std::pair<std::uint32_t, double>> contributions;
    for (const InteractionEvent& ev : events) {
        if (ev.kind != EventKind::Export) {
            continue;
        }
        const auto doc = idx.find_doc(ev.doc_id);
        if (!doc) {
            ++table.unknown_documents;
            continue;
        }
        const std::string key = detail::lowercase(detail::trim(ev.query_text));
        const auto& list = ranked[text_slot.at(key)];
        std::uint32_t rank = 0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].doc == *doc) {
                rank = static_cast<std::uint32_t>(i + 1);
                break;
            }
        }
        if (rank == 0) {
            ++table.exports_ignored;
            continue;
        }
        double weight = 1.0;
        double difficulty = 1.0;
        if (const auto it = query_weights.find(key); it != query_weights.end()) {
            weight = it->second.first;
            difficulty = it->second.second;
        }
        contributions.emplace_back(*doc, weight * difficulty / static_cast<double>(rank));
        ++table.exports_consumed;
    }
    std::sort(contributions.begin(), contributions.end());
    for (const auto& [doc, value] : contributions) {
        table.scores[doc] += value;
    }
    return table;
}

inline void write_usefulness_csv(const UsefulnessTable& table,
                                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write table: " + path.string());
    }
    out << "doc_id,type,u\n";
    for (std::size_t d = 0; d < table.doc_count(); ++d) {
        out << detail::csv_escape(table.doc_ids[d]) << ',' << detail::csv_escape(table.type_label)
            << ',' << detail::format_double(table.scores[d]) << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline UsefulnessTable read_usefulness_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open table: " + path.string());
    }
    const std::string context = "usefulness table " + path.string();
    std::string line;
    if (!std::getline(in, line) || line != "doc_id,type,u") {
        throw std::runtime_error(context + ": unexpected header");
    }
    UsefulnessTable table;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = detail::csv_split(line);
        if (fields.size() != 3) {
            throw std::runtime_error(context + ": wrong field count");
        }
        table.doc_ids.push_back(fields[0]);
        if (table.type_label.empty()) {
            table.type_label = fields[1];
        }
        table.scores.push_back(detail::parse_double(fields[2]));
    }
    if (table.doc_ids.empty()) {
        throw std::runtime_error(context + ": no rows");
    }
    return table;
}

}  // namespace retaudit
