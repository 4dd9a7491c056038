#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

namespace retaudit {

/// One indexed item: a unique id, a type label, and ordered named text
/// fields. Field order is the file order and is preserved because the
/// indexed text is the space-joined concatenation of all field values.
struct Record {
    std::string id;
    std::string type_label;
    std::vector<std::pair<std::string, std::string>> fields;

    std::string joined_text() const {
        std::string out;
        for (const auto& [name, value] : fields) {
            if (!out.empty()) {
                out.push_back(' ');
            }
            out += value;
        }
        return out;
    }

    bool operator==(const Record&) const = default;
};

struct Corpus {
    std::vector<Record> records;
    // type label -> ascending record positions; every record appears in
    // exactly one bucket.
    std::map<std::string, std::vector<std::size_t>> by_type;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    bool operator==(const Corpus&) const = default;
};

struct CorpusLoadReport {
    std::size_t lines = 0;
    std::size_t loaded = 0;
    std::size_t malformed = 0;
    std::size_t duplicates = 0;
    std::size_t empty_text = 0;
    std::vector<std::size_t> malformed_line_numbers;  // 1-based

    std::size_t warnings() const { return malformed + duplicates + empty_text; }
};

namespace detail {

inline bool record_has_text(const Record& r) {
    for (const auto& [name, value] : r.fields) {
        if (!value.empty()) {
            return true;
        }
    }
    return false;
}

// One corpus line is a flat JSON object. `id` and `type` are required;
// every other scalar member becomes a text field in member order. Numbers
// and booleans are stringified; nested values make the line malformed.
inline Record parse_corpus_line(std::string_view line) {
    const auto obj = nlohmann::ordered_json::parse(line);
    if (!obj.is_object()) {
        throw std::runtime_error("line is not an object");
    }
    Record rec;
    for (const auto& [key, value] : obj.items()) {
        if (key == "id") {
            if (!value.is_string()) {
                throw std::runtime_error("'id' must be a string");
            }
            rec.id = value.get<std::string>();
        } else if (key == "type") {
            if (!value.is_string()) {
                throw std::runtime_error("'type' must be a string");
            }
            rec.type_label = value.get<std::string>();
        } else if (value.is_string()) {
            rec.fields.emplace_back(key, value.get<std::string>());
        } else if (value.is_number() || value.is_boolean()) {
            rec.fields.emplace_back(key, value.dump());
        } else {
            throw std::runtime_error("field '" + key + "' is not a scalar");
        }
    }
    if (rec.id.empty()) {
        throw std::runtime_error("missing or empty 'id'");
    }
    if (rec.type_label.empty()) {
        throw std::runtime_error("missing or empty 'type'");
    }
    return rec;
}

}  // namespace detail

/// Builds a Corpus from validated records. Throws if an id repeats, an id
/// or type label is empty, or a record has no text at all; use load_corpus
/// for the tolerant file path.
inline Corpus make_corpus(std::vector<Record> records) {
    Corpus corpus;
    corpus.records = std::move(records);
    std::unordered_set<std::string_view> seen;
    seen.reserve(corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const Record& r = corpus.records[i];
        if (r.id.empty()) {
            throw std::invalid_argument("record " + std::to_string(i) + " has an empty id");
        }
        if (r.type_label.empty()) {
            throw std::invalid_argument("record '" + r.id + "' has an empty type label");
        }
        if (!detail::record_has_text(r)) {
            throw std::invalid_argument("record '" + r.id + "' has no text");
        }
        if (!seen.insert(r.id).second) {
            throw std::invalid_argument("duplicate record id '" + r.id + "'");
        }
        corpus.by_type[r.type_label].push_back(i);
    }
    return corpus;
}

/// Loads a line-delimited corpus file. Malformed lines, duplicate ids
/// (first occurrence wins) and empty-text records are skipped and counted;
/// an unreadable file or zero valid records is a hard error.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusLoadReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus file: " + path.string());
    }
    CorpusLoadReport local;
    CorpusLoadReport& rep = report != nullptr ? *report : local;
    rep = CorpusLoadReport{};

    std::vector<Record> records;
    std::unordered_set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        ++rep.lines;
        if (line.empty()) {
            continue;
        }
        Record rec;
        try {
            rec = detail::parse_corpus_line(line);
        } catch (const std::exception&) {
            ++rep.malformed;
            rep.malformed_line_numbers.push_back(rep.lines);
            continue;
        }
        if (!detail::record_has_text(rec)) {
            ++rep.empty_text;
            continue;
        }
        if (!seen.insert(rec.id).second) {
            ++rep.duplicates;
            continue;
        }
        records.push_back(std::move(rec));
    }
    rep.loaded = records.size();
    if (records.empty()) {
        throw std::runtime_error("corpus file contains zero valid records: " + path.string());
    }
    return make_corpus(std::move(records));
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write corpus file: " + path.string());
    }
    for (const Record& r : corpus.records) {
        nlohmann::ordered_json obj;
        obj["id"] = r.id;
        obj["type"] = r.type_label;
        for (const auto& [name, value] : r.fields) {
            obj[name] = value;
        }
        out << obj.dump() << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

/// Splits a corpus into one sub-corpus per type label. Partitions are
/// disjoint and their union is the input.
inline std::map<std::string, Corpus> partition_by_type(const Corpus& corpus) {
    if (corpus.empty()) {
        throw std::invalid_argument("partition_by_type: corpus is empty");
    }
    std::map<std::string, Corpus> out;
    for (const auto& [label, positions] : corpus.by_type) {
        std::vector<Record> records;
        records.reserve(positions.size());
        for (const std::size_t pos : positions) {
            records.push_back(corpus.records[pos]);
        }
        out.emplace(label, make_corpus(std::move(records)));
    }
    return out;
}

}  // namespace retaudit
