#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include <retaudit/synth.hpp>

#include "testutil.hpp"

using namespace retaudit;
using testutil::TempDir;
using testutil::write_file;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.type_counts = {{"pub", 10}};
    spec.vocabulary_size = 20;
    spec.doc_length_min = 4;
    spec.doc_length_max = 10;
    spec.popularity_skew = 0.0;
    spec.seed = 81;
    return spec;
}

}  // namespace

TEST_CASE("generate_corpus honors per-type counts with unique ids") {
    SynthSpec spec = small_spec();
    spec.type_counts = {{"pub", 10}, {"data", 4}};
    const Corpus corpus = generate_corpus(spec);
    CHECK(corpus.size() == 14);
    CHECK(corpus.by_type.at("pub").size() == 10);
    CHECK(corpus.by_type.at("data").size() == 4);
    std::set<std::string> ids;
    for (const auto& rec : corpus.records) {
        CHECK(ids.insert(rec.id).second);
        const std::size_t tokens = tokenize(rec.joined_text()).size();
        CHECK(tokens >= spec.doc_length_min);
        CHECK(tokens <= spec.doc_length_max);
    }
}

TEST_CASE("generators are deterministic under a fixed seed") {
    const SynthSpec spec = small_spec();
    CHECK(generate_corpus(spec) == generate_corpus(spec));
    CHECK(generate_queries(spec, 15) == generate_queries(spec, 15));
    const Corpus corpus = generate_corpus(spec);
    const QuerySet queries = generate_queries(spec, 15);
    CHECK(generate_interactions(corpus, queries, 0.5, spec.seed) ==
          generate_interactions(corpus, queries, 0.5, spec.seed));

    SynthSpec other = spec;
    other.seed = 82;
    CHECK_FALSE(generate_corpus(other) == generate_corpus(spec));
}

TEST_CASE("skew zero gives approximately uniform term usage") {
    SynthSpec spec = small_spec();
    spec.type_counts = {{"doc", 200}};
    spec.vocabulary_size = 50;
    spec.doc_length_min = 40;
    spec.doc_length_max = 60;
    const Corpus corpus = generate_corpus(spec);

    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& rec : corpus.records) {
        for (const auto& term : tokenize(rec.joined_text())) {
            ++counts[term];
            ++total;
        }
    }
    // ~10000 draws over 50 terms: expected 200 per term, sd ~14. A +-40%
    // band is ~5.7 sigma, stable for the pinned seed.
    const double expected = static_cast<double>(total) / 50.0;
    CHECK(counts.size() == 50);
    for (const auto& [term, count] : counts) {
        CHECK(static_cast<double>(count) > 0.6 * expected);
        CHECK(static_cast<double>(count) < 1.4 * expected);
    }
}

TEST_CASE("large skew concentrates queries on the head term") {
    SynthSpec spec = small_spec();
    spec.vocabulary_size = 100;
    spec.popularity_skew = 2.0;
    const QuerySet queries = generate_queries(spec, 500);
    std::size_t head = 0;
    for (const Query& q : queries.queries) {
        if (q.text == detail::synth_term(0, 100)) {
            head = q.multiplicity;
        }
    }
    // Zipf(2) over 100 ranks puts ~0.61 of the mass on rank 1.
    CHECK(head > 150);
}

TEST_CASE("generated queries stay within the vocabulary and sum to n") {
    const SynthSpec spec = small_spec();
    const QuerySet queries = generate_queries(spec, 25);
    std::size_t total = 0;
    std::set<std::string> seen;
    for (const Query& q : queries.queries) {
        CHECK(seen.insert(q.text).second);
        CHECK(q.text.rfind("t", 0) == 0);
        total += q.multiplicity;
    }
    CHECK(total == 25);
}

TEST_CASE("export rate 0 and 1 are sharp boundaries") {
    const SynthSpec spec = small_spec();
    const Corpus corpus = generate_corpus(spec);
    const QuerySet queries = generate_queries(spec, 30);

    for (const auto& ev : generate_interactions(corpus, queries, 0.0, 5)) {
        CHECK(ev.kind == EventKind::View);
    }
    const auto exports = generate_interactions(corpus, queries, 1.0, 5);
    CHECK_FALSE(exports.empty());
    for (const auto& ev : exports) {
        CHECK(ev.kind == EventKind::Export);
    }
}

TEST_CASE("every event's document contains the query term") {
    SynthSpec spec = small_spec();
    spec.type_counts = {{"doc", 50}};
    spec.popularity_skew = 1.0;
    const Corpus corpus = generate_corpus(spec);
    const QuerySet queries = generate_queries(spec, 40);
    const auto events = generate_interactions(corpus, queries, 0.5, 6);
    REQUIRE_FALSE(events.empty());

    std::map<std::string, std::set<std::string>> doc_terms;
    for (const auto& rec : corpus.records) {
        for (const auto& term : tokenize(rec.joined_text())) {
            doc_terms[rec.id].insert(term);
        }
    }
    for (const auto& ev : events) {
        for (const auto& term : tokenize(ev.query_text)) {
            CHECK(doc_terms.at(ev.doc_id).count(term) == 1);
        }
    }
}

TEST_CASE("generated files pass the loaders unchanged") {
    TempDir dir;
    SynthSpec spec = small_spec();
    spec.type_counts = {{"pub", 12}, {"data", 6}};
    const Corpus corpus = generate_corpus(spec);
    const QuerySet queries = generate_queries(spec, 20);
    const auto events = generate_interactions(corpus, queries, 0.5, spec.seed);
    REQUIRE_FALSE(events.empty());

    save_corpus(corpus, dir.file("corpus.jsonl"));
    save_query_log(queries, dir.file("queries.log"));
    save_interactions(events, dir.file("interactions.tsv"));

    CorpusLoadReport corpus_report;
    CHECK(load_corpus(dir.file("corpus.jsonl"), &corpus_report) == corpus);
    CHECK(corpus_report.warnings() == 0);

    QueryLogReport log_report;
    const QuerySet reloaded = load_query_log(dir.file("queries.log"),
                                             WeightingMode::uniform, &log_report);
    CHECK(log_report.malformed == 0);
    CHECK(reloaded == queries);

    InteractionLoadReport events_report;
    CHECK(load_interactions(dir.file("interactions.tsv"), &events_report) == events);
    CHECK(events_report.malformed == 0);
}

TEST_CASE("invalid specs are rejected") {
    SynthSpec spec = small_spec();
    spec.vocabulary_size = 1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = small_spec();
    spec.doc_length_min = 12;
    spec.doc_length_max = 4;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = small_spec();
    spec.type_counts = {{"pub", 0}};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = small_spec();
    spec.type_counts.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = small_spec();
    spec.export_rate = 1.5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    CHECK_THROWS_AS(generate_queries(small_spec(), 0), std::invalid_argument);
    CHECK_THROWS_AS(
        generate_interactions(generate_corpus(small_spec()), QuerySet{}, -0.1, 1),
        std::invalid_argument);
}

TEST_CASE("synth spec files parse") {
    TempDir dir;
    write_file(dir.file("spec.txt"),
               "# demo spec\n"
               "type=pub:12\n"
               "type=data:6\n"
               "vocabulary=40\n"
               "doc_length_min=5\n"
               "doc_length_max=15\n"
               "skew=1.2\n"
               "seed=99\n"
               "queries=30\n"
               "export_rate=0.25\n");
    const SynthSpec spec = parse_synth_spec(dir.file("spec.txt"));
    CHECK(spec.type_counts ==
          std::vector<std::pair<std::string, std::size_t>>{{"pub", 12}, {"data", 6}});
    CHECK(spec.vocabulary_size == 40);
    CHECK(spec.doc_length_min == 5);
    CHECK(spec.doc_length_max == 15);
    CHECK(spec.popularity_skew == 1.2);
    CHECK(spec.seed == 99);
    CHECK(spec.query_count == 30);
    CHECK(spec.export_rate == 0.25);

    write_file(dir.file("bad.txt"), "vocabulary\n");
    CHECK_THROWS_WITH(parse_synth_spec(dir.file("bad.txt")),
                      Catch::Matchers::ContainsSubstring("key=value"));
    write_file(dir.file("unknown.txt"), "wibble=3\n");
    CHECK_THROWS_WITH(parse_synth_spec(dir.file("unknown.txt")),
                      Catch::Matchers::ContainsSubstring("unknown key"));
}
