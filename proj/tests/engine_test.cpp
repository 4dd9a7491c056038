#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include <retaudit/engine.hpp>

#include "oracle.hpp"
#include "testutil.hpp"

using namespace retaudit;
using testutil::TempDir;

namespace {

Corpus corpus_from_texts(const std::vector<std::pair<std::string, std::string>>& docs,
                         const std::string& type = "doc") {
    std::vector<Record> records;
    for (const auto& [id, text] : docs) {
        Record rec;
        rec.id = id;
        rec.type_label = type;
        rec.fields.emplace_back("text", text);
        records.push_back(std::move(rec));
    }
    return make_corpus(std::move(records));
}

std::vector<oracle::Doc> oracle_docs(const Corpus& corpus) {
    std::vector<oracle::Doc> out;
    for (const auto& rec : corpus.records) {
        out.push_back(oracle::Doc{rec.id, tokenize(rec.joined_text())});
    }
    return out;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Social Survey 2018!") ==
          std::vector<std::string>{"social", "survey", "2018"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("ALLBUS–Daten") == std::vector<std::string>{"allbus", "daten"});
    CHECK(tokenize("  ...  ").empty());
    CHECK(tokenize("Bevölkerung, KÖLN") ==
          std::vector<std::string>{"bevölkerung", "köln"});
    CHECK(tokenize("a-b_c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("build_index counts terms and lengths") {
    const Corpus corpus = corpus_from_texts({{"d1", "a a b"}, {"d2", "b c"}, {"d3", "d e a"}});
    const Index idx = build_index(corpus);
    CHECK(idx.terms == std::vector<std::string>{"a", "b", "c", "d", "e"});
    CHECK(idx.doc_lengths == std::vector<std::uint32_t>{3, 2, 3});
    CHECK(idx.avg_doc_length == Catch::Approx(8.0 / 3.0));

    const auto* postings_a = idx.find_postings("a");
    REQUIRE(postings_a != nullptr);
    REQUIRE(postings_a->size() == 2);
    CHECK((*postings_a)[0] == Posting{0, 2});
    CHECK((*postings_a)[1] == Posting{2, 1});
    const auto* postings_b = idx.find_postings("b");
    REQUIRE(postings_b != nullptr);
    CHECK((*postings_b)[0] == Posting{0, 1});

    // doc_lengths equal the sum of term frequencies per document
    std::vector<std::uint64_t> sums(idx.doc_count(), 0);
    for (const auto& plist : idx.postings) {
        for (const auto& p : plist) {
            sums[p.doc] += p.tf;
        }
    }
    for (std::size_t d = 0; d < idx.doc_count(); ++d) {
        CHECK(sums[d] == idx.doc_lengths[d]);
    }
}

TEST_CASE("build_index is deterministic") {
    std::mt19937_64 rng(31);
    const Corpus corpus = testutil::random_corpus(rng, 25, 30, 2, 15);
    const Index a = build_index(corpus);
    const Index b = build_index(corpus);
    CHECK(index_snapshot_string(a) == index_snapshot_string(b));
}

TEST_CASE("build_index rejects empty and token-free corpora") {
    CHECK_THROWS_AS(build_index(Corpus{}), std::invalid_argument);
    const Corpus no_tokens = corpus_from_texts({{"d1", "..."}, {"d2", "!!"}});
    CHECK_THROWS_WITH(build_index(no_tokens),
                      Catch::Matchers::ContainsSubstring("zero tokens"));
}

TEST_CASE("score of a term absent from the document is zero") {
    const Corpus corpus = corpus_from_texts({{"d1", "apple"}, {"d2", "banana"}});
    const Index idx = build_index(corpus);
    const std::vector<std::string> query{"banana"};
    CHECK(score(idx, query, 0) == 0.0);
    CHECK(score(idx, query, 1) > 0.0);
}

TEST_CASE("single-document single-term score equals the hand evaluation") {
    const Corpus corpus = corpus_from_texts({{"d1", "apple"}});
    const Index idx = build_index(corpus);
    const std::vector<std::string> query{"apple"};
    // idf = ln(1 + (1-1+0.5)/(1+0.5)) = ln(4/3); tf part = 2.2/2.2 = 1
    CHECK(score(idx, query, 0) == Catch::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    CHECK(score(idx, query, 0) == Catch::Approx(0.2877).margin(1e-4));
}

TEST_CASE("score matches the brute-force oracle") {
    const Corpus corpus = corpus_from_texts(
        {{"d1", "apple banana apple"}, {"d2", "banana cherry"}, {"d3", "apple cherry date"}});
    const Index idx = build_index(corpus);
    const auto docs = oracle_docs(corpus);
    const std::vector<std::string> query{"apple", "cherry"};
    for (std::uint32_t d = 0; d < 3; ++d) {
        CHECK(score(idx, query, d) ==
              Catch::Approx(oracle::bm25_score(docs, query, d, 1.2, 0.75)).margin(1e-9));
    }
}

TEST_CASE("score respects custom BM25 parameters") {
    const Corpus corpus = corpus_from_texts({{"d1", "x x y"}, {"d2", "y z"}});
    const Bm25Params params{0.9, 0.4};
    const Index idx = build_index(corpus, params);
    const auto docs = oracle_docs(corpus);
    const std::vector<std::string> query{"x", "z"};
    for (std::uint32_t d = 0; d < 2; ++d) {
        CHECK(score(idx, query, d) ==
              Catch::Approx(oracle::bm25_score(docs, query, d, 0.9, 0.4)).margin(1e-12));
    }
}

TEST_CASE("repeated query terms contribute once per occurrence") {
    const Corpus corpus = corpus_from_texts({{"d1", "x y"}, {"d2", "y z"}});
    const Index idx = build_index(corpus);
    const std::vector<std::string> once{"x"};
    const std::vector<std::string> twice{"x", "x"};
    CHECK(score(idx, twice, 0) == Catch::Approx(2.0 * score(idx, once, 0)).epsilon(1e-12));
}

TEST_CASE("retrieve_top_k on no match returns an empty list") {
    const Corpus corpus = corpus_from_texts({{"d1", "apple"}});
    const Index idx = build_index(corpus);
    CHECK(retrieve_top_k(idx, "zebra", 5).entries.empty());
    CHECK(retrieve_top_k(idx, "", 5).entries.empty());
}

TEST_CASE("ties are broken by ascending doc id") {
    const Corpus corpus = corpus_from_texts({{"zz", "apple"}, {"aa", "apple"}});
    const Index idx = build_index(corpus);
    const auto list = retrieve_top_k(idx, "apple", 2);
    REQUIRE(list.entries.size() == 2);
    CHECK(list.entries[0].doc_id == "aa");
    CHECK(list.entries[1].doc_id == "zz");
    CHECK(list.entries[0].score == list.entries[1].score);
    CHECK(list.entries[0].rank == 1);
    CHECK(list.entries[1].rank == 2);
}

TEST_CASE("top-3 of a 10-doc corpus matches exhaustive scoring") {
    std::mt19937_64 rng(32);
    const Corpus corpus = testutil::random_corpus(rng, 10, 8, 3, 9);
    const Index idx = build_index(corpus);
    const auto docs = oracle_docs(corpus);
    const std::vector<std::string> query{"w1", "w3"};
    const auto expected = oracle::rank_all(docs, query, 1.2, 0.75);
    const auto got = retrieve_top_docs(idx, query, 3);
    REQUIRE(got.size() == std::min<std::size_t>(3, expected.size()));
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(idx.doc_ids[got[i].doc] == expected[i].id);
        CHECK(got[i].score == Catch::Approx(expected[i].score).margin(1e-9));
    }
}

TEST_CASE("retrieve_top_k equals the oracle on random corpora") {
    std::mt19937_64 rng(33);
    for (int round = 0; round < 25; ++round) {
        const std::size_t docs_n = 2 + rng() % 19;
        const std::size_t vocab = 2 + rng() % 29;
        const Corpus corpus = testutil::random_corpus(rng, docs_n, vocab, 1, 12);
        const Index idx = build_index(corpus);
        const auto docs = oracle_docs(corpus);
        std::vector<std::string> query;
        const std::size_t qlen = 1 + rng() % 3;
        for (std::size_t i = 0; i < qlen; ++i) {
            query.push_back("w" + std::to_string(rng() % (vocab + 2)));  // sometimes unseen
        }
        const auto expected = oracle::rank_all(docs, query, 1.2, 0.75);
        const auto got = retrieve_top_docs(idx, query, docs_n);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(idx.doc_ids[got[i].doc] == expected[i].id);
            CHECK(got[i].score == Catch::Approx(expected[i].score).margin(1e-9));
        }
    }
}

TEST_CASE("retrieve_top_k(k) is a prefix of retrieve_top_k(k')") {
    std::mt19937_64 rng(34);
    const Corpus corpus = testutil::random_corpus(rng, 30, 10, 2, 10);
    const Index idx = build_index(corpus);
    for (int round = 0; round < 10; ++round) {
        const std::string query = "w" + std::to_string(rng() % 10);
        const std::size_t k1 = 1 + rng() % 10;
        const std::size_t k2 = k1 + 1 + rng() % 10;
        const auto small = retrieve_top_k(idx, query, k1);
        const auto large = retrieve_top_k(idx, query, k2);
        REQUIRE(small.entries.size() <= large.entries.size());
        for (std::size_t i = 0; i < small.entries.size(); ++i) {
            CHECK(small.entries[i] == large.entries[i]);
        }
    }
}

TEST_CASE("retrieval is deterministic and scores are non-negative and sorted") {
    std::mt19937_64 rng(35);
    const Corpus corpus = testutil::random_corpus(rng, 40, 12, 2, 10);
    const Index idx = build_index(corpus);
    const auto a = retrieve_top_k(idx, "w2 w7", 20);
    const auto b = retrieve_top_k(idx, "w2 w7", 20);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].score > 0.0);
        CHECK(a.entries[i].rank == i + 1);
        if (i > 0) {
            CHECK(a.entries[i].score <= a.entries[i - 1].score);
        }
    }
}

TEST_CASE("k is capped at the matching document count; k=0 is an error") {
    const Corpus corpus = corpus_from_texts({{"d1", "apple"}, {"d2", "apple"}});
    const Index idx = build_index(corpus);
    CHECK(retrieve_top_k(idx, "apple", 100).entries.size() == 2);
    CHECK_THROWS_AS(retrieve_top_k(idx, "apple", 0), std::invalid_argument);
}

TEST_CASE("index snapshot round-trips") {
    std::mt19937_64 rng(36);
    TempDir dir;
    const Corpus corpus = testutil::random_corpus(rng, 20, 15, 2, 10, "pub");
    const Index idx = build_index(corpus, Bm25Params{1.5, 0.6});
    save_index(idx, dir.file("x.idx"));
    const Index loaded = load_index(dir.file("x.idx"));
    CHECK(loaded.type_label == idx.type_label);
    CHECK(loaded.params == idx.params);
    CHECK(loaded.terms == idx.terms);
    CHECK(loaded.doc_ids == idx.doc_ids);
    CHECK(loaded.doc_lengths == idx.doc_lengths);
    CHECK(loaded.avg_doc_length == idx.avg_doc_length);
    CHECK(index_snapshot_string(loaded) == index_snapshot_string(idx));

    // retrieval through the reloaded index is identical
    const auto before = retrieve_top_k(idx, "w1 w2", 10);
    const auto after = retrieve_top_k(loaded, "w1 w2", 10);
    CHECK(before == after);
}

TEST_CASE("loading a snapshot with mismatched parameters is a hard error") {
    std::mt19937_64 rng(37);
    TempDir dir;
    const Corpus corpus = testutil::random_corpus(rng, 5, 8, 2, 6);
    save_index(build_index(corpus, Bm25Params{1.2, 0.75}), dir.file("x.idx"));
    CHECK_NOTHROW(load_index(dir.file("x.idx"), Bm25Params{1.2, 0.75}));
    CHECK_THROWS_WITH(load_index(dir.file("x.idx"), Bm25Params{0.9, 0.75}),
                      Catch::Matchers::ContainsSubstring("parameter mismatch"));
}

TEST_CASE("loading rejects foreign or corrupt snapshots") {
    TempDir dir;
    testutil::write_file(dir.file("bad.idx"), "not a snapshot\n");
    CHECK_THROWS(load_index(dir.file("bad.idx")));
    testutil::write_file(
        dir.file("version.idx"),
        R"({"format":"retaudit.index","version":99,"analyzer":"unicode-alnum-lower/1",)"
        R"("type":"t","k1":1.2,"b":0.75,"doc_count":0,"term_count":0})" "\n");
    CHECK_THROWS_WITH(load_index(dir.file("version.idx")),
                      Catch::Matchers::ContainsSubstring("version"));
    testutil::write_file(
        dir.file("analyzer.idx"),
        R"({"format":"retaudit.index","version":1,"analyzer":"other/9",)"
        R"("type":"t","k1":1.2,"b":0.75,"doc_count":0,"term_count":0})" "\n");
    CHECK_THROWS_WITH(load_index(dir.file("analyzer.idx")),
                      Catch::Matchers::ContainsSubstring("analyzer"));
}
