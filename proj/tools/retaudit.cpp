// Command-line front end for the corpus-audit toolkit: generates synthetic
// collections, builds per-type index snapshots, sweeps retrievability over a
// cutoff grid, scores usefulness from interaction logs, and emits CSV
// reports with run manifests. All outputs are deterministic for fixed inputs
// and seed; wall-clock timings go to the console only.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <retaudit/retaudit.hpp>

namespace fs = std::filesystem;
using namespace retaudit;

namespace {

std::string sanitize_label(const std::string& label) {
    std::string out;
    out.reserve(label.size());
    for (const char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("_") : out;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct LoadedIndex {
    std::string file_stem;  // sanitized label, from the snapshot file name
    Index index;
};

// Snapshots are discovered by name (index-<label>.idx) and loaded in sorted
// order so every run visits types identically.
std::vector<LoadedIndex> load_snapshots(const fs::path& dir,
                                        std::optional<Bm25Params> expected) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("output directory does not exist: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("index-", 0) == 0 && entry.path().extension() == ".idx") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw std::runtime_error("no index snapshots (index-*.idx) in " + dir.string() +
                                 "; run build-index first");
    }
    std::sort(files.begin(), files.end());
    std::vector<LoadedIndex> out;
    out.reserve(files.size());
    for (const auto& file : files) {
        LoadedIndex li;
        li.file_stem = file.stem().string().substr(std::string("index-").size());
        li.index = load_index(file, expected);
        if (!out.empty() && !(out.front().index.params == li.index.params)) {
            throw std::runtime_error("index snapshots disagree on BM25 parameters: " +
                                     file.string());
        }
        out.push_back(std::move(li));
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) {
            out.push_back(sep);
        }
        out += p;
    }
    return out;
}

std::string format_cutoffs(const CutoffGrid& grid) {
    std::vector<std::string> parts;
    parts.reserve(grid.cutoffs.size());
    for (const auto c : grid.cutoffs) {
        parts.push_back(std::to_string(c));
    }
    return join(parts, ',');
}

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

// --- synth -------------------------------------------------------------------

struct SynthArgs {
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
};

void cmd_synth(const SynthArgs& args) {
    SynthSpec spec = parse_synth_spec(args.spec_path);
    if (args.seed_override) {
        spec.seed = *args.seed_override;
    }
    if (spec.query_count == 0) {
        throw std::runtime_error("synth spec must set queries=<n> (n >= 1)");
    }
    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);

    Stopwatch timer;
    const Corpus corpus = generate_corpus(spec);
    const QuerySet queries = generate_queries(spec, spec.query_count);
    const auto events = generate_interactions(corpus, queries, spec.export_rate, spec.seed);

    save_corpus(corpus, out / "corpus.jsonl");
    save_query_log(queries, out / "queries.log");
    save_interactions(events, out / "interactions.tsv");

    std::size_t exports = 0;
    for (const auto& ev : events) {
        if (ev.kind == EventKind::Export) {
            ++exports;
        }
    }

    ManifestEntries manifest;
    manifest.emplace_back("command", "synth");
    manifest.emplace_back("spec", args.spec_path);
    manifest.emplace_back("seed", std::to_string(spec.seed));
    for (const auto& [label, count] : spec.type_counts) {
        manifest.emplace_back("type." + sanitize_label(label), std::to_string(count));
    }
    manifest.emplace_back("vocabulary", std::to_string(spec.vocabulary_size));
    manifest.emplace_back("doc_length_min", std::to_string(spec.doc_length_min));
    manifest.emplace_back("doc_length_max", std::to_string(spec.doc_length_max));
    manifest.emplace_back("skew", detail::format_double(spec.popularity_skew));
    manifest.emplace_back("queries", std::to_string(spec.query_count));
    manifest.emplace_back("export_rate", detail::format_double(spec.export_rate));
    manifest.emplace_back("records", std::to_string(corpus.size()));
    manifest.emplace_back("unique_queries", std::to_string(queries.size()));
    manifest.emplace_back("events", std::to_string(events.size()));
    manifest.emplace_back("exports", std::to_string(exports));
    manifest.emplace_back("views", std::to_string(events.size() - exports));
    write_manifest(manifest, out / "synth.manifest");

    std::printf("synth: %zu records, %zu unique queries, %zu events (%zu exports) in %.2fs\n",
                corpus.size(), queries.size(), events.size(), exports, timer.seconds());
}

// --- build-index -------------------------------------------------------------

struct BuildIndexArgs {
    std::string corpus_path;
    std::string out_dir;
    Bm25Params params;
};

void cmd_build_index(const BuildIndexArgs& args) {
    Stopwatch timer;
    CorpusLoadReport load_report;
    const Corpus corpus = load_corpus(args.corpus_path, &load_report);
    if (load_report.warnings() != 0) {
        std::printf("build-index: %zu warnings (%zu malformed, %zu duplicate ids, %zu empty-text)\n",
                    load_report.warnings(), load_report.malformed, load_report.duplicates,
                    load_report.empty_text);
        for (const std::size_t line : load_report.malformed_line_numbers) {
            std::printf("build-index: malformed line %zu skipped\n", line);
        }
    }
    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);

    const auto partitions = partition_by_type(corpus);
    std::set<std::string> used_names;
    ManifestEntries manifest;
    manifest.emplace_back("command", "build-index");
    manifest.emplace_back("corpus", args.corpus_path);
    manifest.emplace_back("analyzer", std::string(kAnalyzerId));
    manifest.emplace_back("k1", detail::format_double(args.params.k1));
    manifest.emplace_back("b", detail::format_double(args.params.b));
    manifest.emplace_back("records_loaded", std::to_string(load_report.loaded));
    manifest.emplace_back("warnings_malformed", std::to_string(load_report.malformed));
    manifest.emplace_back("warnings_duplicate_id", std::to_string(load_report.duplicates));
    manifest.emplace_back("warnings_empty_text", std::to_string(load_report.empty_text));

    std::vector<std::string> type_names;
    for (const auto& [label, partition] : partitions) {
        const std::string san = sanitize_label(label);
        if (!used_names.insert(san).second) {
            throw std::runtime_error("type labels collide after sanitization: '" + label + "'");
        }
        type_names.push_back(san);
    }
    manifest.emplace_back("types", join(type_names, ','));

    for (const auto& [label, partition] : partitions) {
        const std::string san = sanitize_label(label);
        const Index idx = build_index(partition, args.params);
        const std::string file_name = "index-" + san + ".idx";
        save_index(idx, out / file_name);
        manifest.emplace_back("index." + san + ".label", label);
        manifest.emplace_back("index." + san + ".file", file_name);
        manifest.emplace_back("index." + san + ".docs", std::to_string(idx.doc_count()));
        manifest.emplace_back("index." + san + ".terms", std::to_string(idx.terms.size()));
        std::printf("build-index: %s -> %s (%zu docs, %zu terms)\n", label.c_str(),
                    file_name.c_str(), idx.doc_count(), idx.terms.size());
    }
    write_manifest(manifest, out / "build-index.manifest");
    std::printf("build-index: done in %.2fs\n", timer.seconds());
}

// --- retrievability ----------------------------------------------------------

struct RetrievabilityArgs {
    std::string out_dir;
    std::string queries_path;        // empty when sampling
    std::size_t sample_count = 0;    // 0 when using a log
    std::string sample_strategy = "unigram";
    std::string weighting = "uniform";
    std::vector<std::uint32_t> cutoffs;
    std::optional<Bm25Params> expected_params;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t lorenz_resolution = 200;
};

void cmd_retrievability(const RetrievabilityArgs& args) {
    const fs::path out(args.out_dir);
    const auto snapshots = load_snapshots(out, args.expected_params);
    const Bm25Params params = snapshots.front().index.params;

    CutoffGrid grid = args.cutoffs.empty() ? CutoffGrid::default_grid() : CutoffGrid{args.cutoffs};
    grid.validate();
    const WeightingMode weighting = weighting_mode_from_string(args.weighting);
    const bool from_log = !args.queries_path.empty();
    const SampleStrategy strategy = sample_strategy_from_string(args.sample_strategy);

    std::optional<QuerySet> log_queries;
    if (from_log) {
        QueryLogReport log_report;
        log_queries = load_query_log(args.queries_path, weighting, &log_report);
        if (log_report.malformed != 0) {
            std::printf("retrievability: %zu malformed query-log lines skipped\n",
                        log_report.malformed);
        }
    }

    ManifestEntries manifest;
    manifest.emplace_back("command", "retrievability");
    if (from_log) {
        manifest.emplace_back("queries", args.queries_path);
    } else {
        manifest.emplace_back("queries", "sample:" + std::to_string(args.sample_count) + ":" +
                                             args.sample_strategy);
        manifest.emplace_back("seed", std::to_string(args.seed));
    }
    manifest.emplace_back("weighting", std::string(to_string(weighting)));
    manifest.emplace_back("cutoffs", format_cutoffs(grid));
    manifest.emplace_back("k1", detail::format_double(params.k1));
    manifest.emplace_back("b", detail::format_double(params.b));
    manifest.emplace_back("analyzer", std::string(kAnalyzerId));
    manifest.emplace_back("lorenz_resolution", std::to_string(args.lorenz_resolution));

    RetrievabilityOptions options;
    options.threads = args.threads;

    std::vector<ReportRow> rows;
    for (const auto& [stem, idx] : snapshots) {
        Stopwatch timer;
        QuerySet queries;
        if (from_log) {
            queries = *log_queries;
        } else {
            queries = sample_queries(idx, args.sample_count, strategy, args.seed);
        }
        const RetrievabilityTable table = compute_retrievability(idx, queries, grid, options);
        write_retrievability_csv(table, out / ("retrievability-" + stem + ".csv"));

        const auto lengths = query_length_stats(queries);
        ManifestEntries meta;
        meta.emplace_back("type", table.type_label);
        meta.emplace_back("doc_count", std::to_string(table.doc_count()));
        meta.emplace_back("query_count", std::to_string(table.query_count));
        meta.emplace_back("weighting_mode", std::string(to_string(table.weighting)));
        meta.emplace_back("k1", detail::format_double(params.k1));
        meta.emplace_back("b", detail::format_double(params.b));
        meta.emplace_back("analyzer", std::string(kAnalyzerId));
        meta.emplace_back("cutoffs", format_cutoffs(grid));
        meta.emplace_back("zero_hit_queries", std::to_string(table.zero_hit_queries));
        meta.emplace_back("total_query_weight", detail::format_double(table.total_query_weight));
        meta.emplace_back("avg_query_chars", detail::format_double(lengths.avg_chars));
        meta.emplace_back("avg_query_terms", detail::format_double(lengths.avg_terms));
        write_manifest(meta, out / ("retrievability-" + stem + ".meta"));

        const auto max_column = table.column(grid.cutoffs.size() - 1);
        const bool has_mass = std::any_of(max_column.begin(), max_column.end(),
                                          [](double v) { return v > 0.0; });
        if (has_mass) {
            write_lorenz_csv(lorenz(max_column, args.lorenz_resolution),
                             out / ("lorenz-retrievability-" + stem + ".csv"));
        }
        manifest.emplace_back(stem + ".query_count", std::to_string(table.query_count));
        manifest.emplace_back(stem + ".zero_hit_queries", std::to_string(table.zero_hit_queries));
        manifest.emplace_back(stem + ".lorenz",
                              has_mass ? "lorenz-retrievability-" + stem + ".csv"
                                       : std::string(kUndefinedMarker));
        const auto type_rows = build_report_rows(table);
        rows.insert(rows.end(), type_rows.begin(), type_rows.end());
        std::printf("retrievability: %s (%zu docs, %zu queries) in %.2fs\n",
                    table.type_label.c_str(), table.doc_count(), table.query_count,
                    timer.seconds());
    }
    write_report_csv(rows, out / "report.csv");
    write_manifest(manifest, out / "retrievability.manifest");
}

// --- usefulness ----------------------------------------------------------------

struct UsefulnessArgs {
    std::string out_dir;
    std::string interactions_path;
    std::string queries_path;  // optional, for per-query weights
    std::string weighting = "uniform";
    std::uint32_t rank_cutoff = 10;
    std::optional<Bm25Params> expected_params;
    unsigned threads = 0;
    std::size_t lorenz_resolution = 200;
};

void cmd_usefulness(const UsefulnessArgs& args) {
    const fs::path out(args.out_dir);
    const auto snapshots = load_snapshots(out, args.expected_params);
    const Bm25Params params = snapshots.front().index.params;

    InteractionLoadReport events_report;
    const auto events = load_interactions(args.interactions_path, &events_report);
    if (events_report.malformed != 0) {
        std::printf("usefulness: %zu malformed interaction lines skipped\n",
                    events_report.malformed);
    }
    QuerySet queries;
    if (!args.queries_path.empty()) {
        queries = load_query_log(args.queries_path, weighting_mode_from_string(args.weighting));
    }

    ManifestEntries manifest;
    manifest.emplace_back("command", "usefulness");
    manifest.emplace_back("interactions", args.interactions_path);
    manifest.emplace_back("queries", args.queries_path.empty() ? "none" : args.queries_path);
    manifest.emplace_back("weighting", args.queries_path.empty() ? "uniform" : args.weighting);
    manifest.emplace_back("rank_cutoff", std::to_string(args.rank_cutoff));
    manifest.emplace_back("k1", detail::format_double(params.k1));
    manifest.emplace_back("b", detail::format_double(params.b));
    manifest.emplace_back("analyzer", std::string(kAnalyzerId));
    manifest.emplace_back("lorenz_resolution", std::to_string(args.lorenz_resolution));
    manifest.emplace_back("events_total", std::to_string(events.size()));
    manifest.emplace_back("events_views", std::to_string(events_report.views));
    manifest.emplace_back("events_exports", std::to_string(events_report.exports));
    manifest.emplace_back("events_malformed", std::to_string(events_report.malformed));

    UsefulnessOptions options;
    options.threads = args.threads;

    std::vector<UsefulnessReportRow> rows;
    for (const auto& [stem, idx] : snapshots) {
        Stopwatch timer;
        const UsefulnessTable table =
            compute_usefulness(idx, events, queries, args.rank_cutoff, options);
        write_usefulness_csv(table, out / ("usefulness-" + stem + ".csv"));

        ManifestEntries meta;
        meta.emplace_back("type", table.type_label);
        meta.emplace_back("doc_count", std::to_string(table.doc_count()));
        meta.emplace_back("rank_cutoff", std::to_string(table.cutoff));
        meta.emplace_back("k1", detail::format_double(params.k1));
        meta.emplace_back("b", detail::format_double(params.b));
        meta.emplace_back("analyzer", std::string(kAnalyzerId));
        meta.emplace_back("exports_consumed", std::to_string(table.exports_consumed));
        meta.emplace_back("exports_ignored", std::to_string(table.exports_ignored));
        meta.emplace_back("unknown_documents", std::to_string(table.unknown_documents));
        meta.emplace_back("non_export_events", std::to_string(table.non_export_events));
        write_manifest(meta, out / ("usefulness-" + stem + ".meta"));

        const UsefulnessReportRow row = build_usefulness_report_row(table);
        manifest.emplace_back("gini_" + stem,
                              row.gini_value ? detail::format_double(*row.gini_value)
                                             : std::string(kUndefinedMarker));
        manifest.emplace_back(stem + ".exports_consumed",
                              std::to_string(table.exports_consumed));
        manifest.emplace_back(stem + ".exports_ignored", std::to_string(table.exports_ignored));
        manifest.emplace_back(stem + ".unknown_documents",
                              std::to_string(table.unknown_documents));
        if (row.gini_value) {
            write_lorenz_csv(lorenz(table.scores, args.lorenz_resolution),
                             out / ("lorenz-usefulness-" + stem + ".csv"));
        }
        rows.push_back(row);
        std::printf("usefulness: %s (%zu consumed, %zu ignored, %zu unknown) in %.2fs\n",
                    table.type_label.c_str(), table.exports_consumed, table.exports_ignored,
                    table.unknown_documents, timer.seconds());
    }
    write_usefulness_report_csv(rows, out / "report-usefulness.csv");
    write_manifest(manifest, out / "usefulness.manifest");
}

// --- report --------------------------------------------------------------------

struct ReportArgs {
    std::string out_dir;
    std::size_t lorenz_resolution = 200;
};

// Regenerates report.csv, report-usefulness.csv, and the Lorenz exports from
// previously written score tables, so reports can be rebuilt without
// re-running retrieval.
void cmd_report(const ReportArgs& args) {
    const fs::path out(args.out_dir);
    if (!fs::is_directory(out)) {
        throw std::runtime_error("output directory does not exist: " + out.string());
    }
    std::vector<fs::path> ret_files;
    std::vector<fs::path> use_files;
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".csv") {
            continue;
        }
        if (name.rfind("retrievability-", 0) == 0) {
            ret_files.push_back(entry.path());
        } else if (name.rfind("usefulness-", 0) == 0) {
            use_files.push_back(entry.path());
        }
    }
    std::sort(ret_files.begin(), ret_files.end());
    std::sort(use_files.begin(), use_files.end());
    if (ret_files.empty() && use_files.empty()) {
        throw std::runtime_error("no score tables (retrievability-*.csv, usefulness-*.csv) in " +
                                 out.string());
    }

    ManifestEntries manifest;
    manifest.emplace_back("command", "report");
    manifest.emplace_back("lorenz_resolution", std::to_string(args.lorenz_resolution));
    std::vector<std::string> inputs;

    std::vector<ReportRow> rows;
    for (const auto& file : ret_files) {
        const RetrievabilityTable table = read_retrievability_csv(file);
        const auto type_rows = build_report_rows(table);
        rows.insert(rows.end(), type_rows.begin(), type_rows.end());
        const std::string stem =
            file.stem().string().substr(std::string("retrievability-").size());
        const auto max_column = table.column(table.grid.cutoffs.size() - 1);
        if (std::any_of(max_column.begin(), max_column.end(), [](double v) { return v > 0.0; })) {
            write_lorenz_csv(lorenz(max_column, args.lorenz_resolution),
                             out / ("lorenz-retrievability-" + stem + ".csv"));
        }
        inputs.push_back(file.filename().string());
    }
    if (!rows.empty()) {
        write_report_csv(rows, out / "report.csv");
    }

    std::vector<UsefulnessReportRow> use_rows;
    for (const auto& file : use_files) {
        UsefulnessTable table = read_usefulness_csv(file);
        const std::string stem = file.stem().string().substr(std::string("usefulness-").size());
        const auto meta = read_manifest(out / ("usefulness-" + stem + ".meta"));
        const auto cutoff_it = meta.find("rank_cutoff");
        if (cutoff_it == meta.end()) {
            throw std::runtime_error("usefulness metadata for '" + stem +
                                     "' does not record rank_cutoff");
        }
        table.cutoff = static_cast<std::uint32_t>(detail::parse_uint(cutoff_it->second));
        const UsefulnessReportRow row = build_usefulness_report_row(table);
        manifest.emplace_back("gini_" + stem,
                              row.gini_value ? detail::format_double(*row.gini_value)
                                             : std::string(kUndefinedMarker));
        if (row.gini_value) {
            write_lorenz_csv(lorenz(table.scores, args.lorenz_resolution),
                             out / ("lorenz-usefulness-" + stem + ".csv"));
        }
        use_rows.push_back(row);
        inputs.push_back(file.filename().string());
    }
    if (!use_rows.empty()) {
        write_usefulness_report_csv(use_rows, out / "report-usefulness.csv");
    }

    manifest.emplace_back("inputs", join(inputs, ','));
    write_manifest(manifest, out / "report.manifest");
    std::printf("report: rebuilt from %zu tables\n", inputs.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"retaudit: retrievability and usefulness audit toolkit"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    std::uint64_t synth_seed = 0;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic corpus, query log, and interaction log");
    synth_cmd->add_option("--spec", synth_args.spec_path, "Synth spec file (key=value lines)")
        ->required();
    synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();
    auto* seed_opt = synth_cmd->add_option("--seed", synth_seed, "Override the spec seed");

    BuildIndexArgs build_args;
    auto* build_cmd =
        app.add_subcommand("build-index", "Build one index snapshot per type partition");
    build_cmd->add_option("--corpus", build_args.corpus_path, "Corpus file (one JSON object per line)")
        ->required();
    build_cmd->add_option("--out", build_args.out_dir, "Output directory")->required();
    build_cmd->add_option("--k1", build_args.params.k1, "BM25 k1")->capture_default_str();
    build_cmd->add_option("--b", build_args.params.b, "BM25 b")->capture_default_str();

    RetrievabilityArgs ret_args;
    Bm25Params ret_params;
    auto* ret_cmd = app.add_subcommand(
        "retrievability", "Sweep r(d) over the cutoff grid for every index snapshot");
    ret_cmd->add_option("--out", ret_args.out_dir, "Directory holding the index snapshots; reports are written here")
        ->required();
    auto* ret_queries = ret_cmd->add_option("--queries", ret_args.queries_path, "Query log file");
    auto* ret_sample =
        ret_cmd->add_option("--sample", ret_args.sample_count,
                            "Sample this many queries from each index instead of using a log");
    ret_queries->excludes(ret_sample);
    ret_sample->excludes(ret_queries);
    ret_cmd->add_option("--strategy", ret_args.sample_strategy, "Sampling strategy: unigram or bigram")
        ->capture_default_str();
    ret_cmd->add_option("--weighting", ret_args.weighting, "Query weighting: uniform or multiplicity")
        ->capture_default_str();
    ret_cmd->add_option("--cutoffs", ret_args.cutoffs, "Rank cutoffs (default 10,20,30,40,50,100)")
        ->delimiter(',');
    auto* ret_k1 = ret_cmd->add_option("--k1", ret_params.k1, "Expected BM25 k1 (checked against snapshots)");
    auto* ret_b = ret_cmd->add_option("--b", ret_params.b, "Expected BM25 b (checked against snapshots)");
    ret_cmd->add_option("--seed", ret_args.seed, "Sampling seed")->capture_default_str();
    ret_cmd->add_option("--threads", ret_args.threads,
                        "Worker threads (default: number of available processors)");
    ret_cmd->add_option("--lorenz-resolution", ret_args.lorenz_resolution, "Lorenz curve points")
        ->capture_default_str();

    UsefulnessArgs use_args;
    Bm25Params use_params;
    auto* use_cmd =
        app.add_subcommand("usefulness", "Score u(d) from an interaction log for every index snapshot");
    use_cmd->add_option("--out", use_args.out_dir, "Directory holding the index snapshots; reports are written here")
        ->required();
    use_cmd->add_option("--interactions", use_args.interactions_path,
                        "Interaction log (query<TAB>doc_id<TAB>kind[<TAB>timestamp])")
        ->required();
    use_cmd->add_option("--queries", use_args.queries_path,
                        "Optional query log supplying per-query weights");
    use_cmd->add_option("--weighting", use_args.weighting, "Query weighting: uniform or multiplicity")
        ->capture_default_str();
    use_cmd->add_option("--rank-cutoff", use_args.rank_cutoff, "Consumption rank cutoff")
        ->capture_default_str();
    auto* use_k1 = use_cmd->add_option("--k1", use_params.k1, "Expected BM25 k1 (checked against snapshots)");
    auto* use_b = use_cmd->add_option("--b", use_params.b, "Expected BM25 b (checked against snapshots)");
    use_cmd->add_option("--threads", use_args.threads,
                        "Worker threads (default: number of available processors)");
    use_cmd->add_option("--lorenz-resolution", use_args.lorenz_resolution, "Lorenz curve points")
        ->capture_default_str();

    ReportArgs report_args;
    auto* report_cmd =
        app.add_subcommand("report", "Rebuild reports from previously written score tables");
    report_cmd->add_option("--out", report_args.out_dir, "Directory holding the score tables")
        ->required();
    report_cmd->add_option("--lorenz-resolution", report_args.lorenz_resolution,
                           "Lorenz curve points")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            if (seed_opt->count() > 0) {
                synth_args.seed_override = synth_seed;
            }
            cmd_synth(synth_args);
        } else if (build_cmd->parsed()) {
            cmd_build_index(build_args);
        } else if (ret_cmd->parsed()) {
            if (ret_queries->count() == 0 && ret_sample->count() == 0) {
                throw std::runtime_error("retrievability needs --queries or --sample");
            }
            if (ret_k1->count() > 0 || ret_b->count() > 0) {
                if (ret_k1->count() == 0 || ret_b->count() == 0) {
                    throw std::runtime_error("--k1 and --b must be given together");
                }
                ret_args.expected_params = ret_params;
            }
            cmd_retrievability(ret_args);
        } else if (use_cmd->parsed()) {
            if (use_k1->count() > 0 || use_b->count() > 0) {
                if (use_k1->count() == 0 || use_b->count() == 0) {
                    throw std::runtime_error("--k1 and --b must be given together");
                }
                use_args.expected_params = use_params;
            }
            cmd_usefulness(use_args);
        } else if (report_cmd->parsed()) {
            cmd_report(report_args);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
