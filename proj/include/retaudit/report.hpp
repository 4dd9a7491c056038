#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retaudit/detail/format.hpp"
#include "retaudit/inequality.hpp"
#include "retaudit/retrievability.hpp"
#include "retaudit/usefulness.hpp"

namespace retaudit {

inline constexpr std::string_view kUndefinedMarker = "undefined";

/// One (type, cutoff) row of the inequality report. gini_value is empty when
/// the score column is all-zero (the coefficient is undefined there).
struct ReportRow {
    std::string type_label;
    std::uint32_t cutoff = 0;
    DistributionStats stats;
    std::optional<double> gini_value;
    std::size_t retrieved_count = 0;
    double retrieved_fraction = 0.0;
};

inline std::vector<ReportRow> build_report_rows(const RetrievabilityTable& table) {
    std::vector<ReportRow> rows;
    rows.reserve(table.grid.cutoffs.size());
    for (std::size_t slot = 0; slot < table.grid.cutoffs.size(); ++slot) {
        const auto column = table.column(slot);
        ReportRow row;
        row.type_label = table.type_label;
        row.cutoff = table.grid.cutoffs[slot];
        row.stats = distribution_stats(column);
        if (row.stats.zero_count < row.stats.n) {
            row.gini_value = gini(column);
        }
        const auto [count, fraction] = percent_retrieved(table, row.cutoff);
        row.retrieved_count = count;
        row.retrieved_fraction = fraction;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_report_csv(std::span<const ReportRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write report: " + path.string());
    }
    out << "type,cutoff,n,zero_count,mean,geo_mean_positive,geo_mean_shifted,"
           "variance,std,gini,retrieved_count,retrieved_fraction\n";
    for (const ReportRow& row : rows) {
        out << detail::csv_escape(row.type_label) << ',' << row.cutoff << ',' << row.stats.n << ','
            << row.stats.zero_count << ',' << detail::format_double(row.stats.mean) << ','
            << detail::format_double(row.stats.geometric_mean_positive) << ','
            << detail::format_double(row.stats.geometric_mean_shifted) << ','
            << detail::format_double(row.stats.variance) << ','
            << detail::format_double(row.stats.std_dev) << ','
            << (row.gini_value ? detail::format_double(*row.gini_value)
                               : std::string(kUndefinedMarker))
            << ',' << row.retrieved_count << ',' << detail::format_double(row.retrieved_fraction)
            << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

struct UsefulnessReportRow {
    std::string type_label;
    std::uint32_t cutoff = 0;
    DistributionStats stats;
    std::optional<double> gini_value;
};

inline UsefulnessReportRow build_usefulness_report_row(const UsefulnessTable& table) {
    UsefulnessReportRow row;
    row.type_label = table.type_label;
    row.cutoff = table.cutoff;
    row.stats = distribution_stats(table.scores);
    if (row.stats.zero_count < row.stats.n) {
        row.gini_value = gini(table.scores);
    }
    return row;
}

inline void write_usefulness_report_csv(std::span<const UsefulnessReportRow> rows,
                                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write report: " + path.string());
    }
    out << "type,cutoff,n,zero_count,mean,gini\n";
    for (const UsefulnessReportRow& row : rows) {
        out << detail::csv_escape(row.type_label) << ',' << row.cutoff << ',' << row.stats.n << ','
            << row.stats.zero_count << ',' << detail::format_double(row.stats.mean) << ','
            << (row.gini_value ? detail::format_double(*row.gini_value)
                               : std::string(kUndefinedMarker))
            << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline void write_lorenz_csv(const LorenzCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write lorenz curve: " + path.string());
    }
    out << "pop_fraction,value_fraction\n";
    for (const LorenzPoint& p : curve.points) {
        out << detail::format_double(p.population_fraction) << ','
            << detail::format_double(p.value_fraction) << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

// --- run manifests -----------------------------------------------------------
//
// Line-oriented `key=value`, UTF-8, written in the order given. Values must
// not contain newlines; keys must not contain '='.

inline void write_manifest(const std::vector<std::pair<std::string, std::string>>& entries,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest: " + path.string());
    }
    for (const auto& [key, value] : entries) {
        if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
            value.find('\n') != std::string::npos) {
            throw std::invalid_argument("manifest entry '" + key + "' is not representable");
        }
        out << key << '=' << value << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + path.string());
    }
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("manifest " + path.string() + ": line without '='");
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

}  // namespace retaudit
