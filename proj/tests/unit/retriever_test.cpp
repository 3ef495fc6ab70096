#include "odqa/bm25.hpp"
#include "odqa/error.hpp"
#include "odqa/retriever.hpp"
#include "odqa/tfidf.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <numeric>
#include <random>

namespace odqa {
namespace {

namespace fs = std::filesystem;
using testing::brute_force_bm25;
using testing::exact_tfidf;

std::vector<Passage> passages_of(std::initializer_list<std::pair<const char*, const char*>> docs)
{
    std::vector<Passage> out;
    for (const auto& [id, text] : docs) {
        out.push_back({id, "t", text, Split::external});
    }
    return out;
}

std::map<std::string, double> as_map(const std::vector<RetrievalHit>& hits)
{
    std::map<std::string, double> out;
    for (const auto& h : hits) {
        out[h.passage_id] = h.score;
    }
    return out;
}

void expect_ranked(const std::vector<RetrievalHit>& hits)
{
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].rank, i + 1);
        EXPECT_GT(hits[i].score, 0.0);
        if (i > 0) {
            const auto& a = hits[i - 1];
            const auto& b = hits[i];
            EXPECT_TRUE(a.score > b.score || (a.score == b.score && a.passage_id < b.passage_id));
        }
    }
}

TEST(NormalizeScores, SoftmaxPreservesOrderAndSumsToOne)
{
    std::vector<RetrievalHit> hits = {{"a", 3.0, 1}, {"b", 1.0, 2}, {"c", 1.0, 3}};
    const auto norm = normalize_scores(hits);
    ASSERT_EQ(norm.size(), 3u);
    const double z = std::exp(3.0) + 2.0 * std::exp(1.0);
    EXPECT_NEAR(norm[0].score, std::exp(3.0) / z, 1e-15);
    EXPECT_EQ(norm[1].score, norm[2].score);
    EXPECT_NEAR(norm[0].score + norm[1].score + norm[2].score, 1.0, 1e-12);
    EXPECT_EQ(norm[0].passage_id, "a");
    EXPECT_EQ(norm[2].rank, 3u);
    EXPECT_TRUE(normalize_scores({}).empty());
}

TEST(NormalizeScores, StableForLargeScores)
{
    const auto norm = normalize_scores({{"a", 1000.0, 1}, {"b", 999.0, 2}});
    EXPECT_TRUE(std::isfinite(norm[0].score));
    EXPECT_NEAR(norm[0].score, 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(TopK, BreaksTiesByPassageId)
{
    const std::vector<std::string> ids = {"a", "b", "c", "d"};
    const auto hits = detail::top_k({{3, 1.0}, {1, 1.0}, {2, 2.0}, {0, 0.0}}, ids, 10);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].passage_id, "c");
    EXPECT_EQ(hits[1].passage_id, "b");
    EXPECT_EQ(hits[2].passage_id, "d");
}

// --- BM25 ---------------------------------------------------------------------

TEST(Bm25, IdfFormula)
{
    EXPECT_DOUBLE_EQ(bm25_idf(10, 1), std::log(1.0 + 9.5 / 1.5));
    EXPECT_GT(bm25_idf(10, 10), 0.0);  // never negative
}

TEST(Bm25, HandComputedScore)
{
    const auto docs = passages_of({{"d1", "a b a"}, {"d2", "b c"}, {"d3", "c c c d"}});
    const auto index = build_bm25_index(docs, Analyzer{});
    const double avgdl = 3.0;
    const double idf_a = std::log(1.0 + (3.0 - 1.0 + 0.5) / 1.5);
    const double expected = idf_a * 2.0 * 1.9 / (2.0 + 0.9 * (1.0 - 0.4 + 0.4 * 3.0 / avgdl));
    const auto hits = index.query("a", 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].passage_id, "d1");
    EXPECT_NEAR(hits[0].score, expected, 1e-12);
}

TEST(Bm25, RepeatedQueryTermCountsTwice)
{
    const auto docs = passages_of({{"d1", "a b"}, {"d2", "b c"}, {"d3", "c d"}});
    const auto index = build_bm25_index(docs, Analyzer{});
    const auto once = index.query("a", 1);
    const auto twice = index.query("a a", 1);
    ASSERT_EQ(once.size(), 1u);
    EXPECT_NEAR(twice[0].score, 2.0 * once[0].score, 1e-12);
}

TEST(Bm25, MatchesBruteForceOnRandomFixtures)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto docs = testing::random_passages(rng, 1 + rng() % 50, 30, 25);
        const auto index = build_bm25_index(docs, Analyzer{});
        for (int q = 0; q < 3; ++q) {
            const auto question = testing::random_question(rng, 35, 6);
            const auto expected = brute_force_bm25(docs, question, kDefaultBm25K1, kDefaultBm25B);
            const auto hits = index.query(question, docs.size());
            expect_ranked(hits);
            const auto got = as_map(hits);
            ASSERT_EQ(got.size(), expected.size()) << question;
            for (const auto& [id, score] : expected) {
                ASSERT_TRUE(got.contains(id));
                EXPECT_NEAR(got.at(id), score, 1e-9);
            }
        }
    }
}

TEST(Bm25, RejectsBadParameters)
{
    const auto docs = passages_of({{"d1", "a"}});
    EXPECT_THROW((void)build_bm25_index(docs, Analyzer{}, 0.0, 0.4), UsageError);
    EXPECT_THROW((void)build_bm25_index(docs, Analyzer{}, 0.9, 1.5), UsageError);
    EXPECT_THROW((void)build_bm25_index({}, Analyzer{}), UsageError);
    const auto index = build_bm25_index(docs, Analyzer{});
    EXPECT_THROW((void)index.query("a", 0), UsageError);
}

TEST(Bm25, DuplicatePassageIdIsDataError)
{
    const auto docs = passages_of({{"d1", "a"}, {"d1", "b"}});
    EXPECT_THROW((void)build_bm25_index(docs, Analyzer{}), DataError);
}

TEST(Bm25, SerializationRoundTrip)
{
    std::mt19937_64 rng(5);
    const auto docs = testing::random_passages(rng, 30, 20, 15);
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::builtin_dictionary;
    config.compounds = {"w1 w2"};
    const auto index = build_bm25_index(docs, Analyzer(config));
    const auto copy = InvertedIndex::deserialize(index.serialize());
    EXPECT_EQ(copy.serialize(), index.serialize());
    EXPECT_EQ(copy.analyzer().config().compounds, config.compounds);
    for (int q = 0; q < 20; ++q) {
        const auto question = testing::random_question(rng, 20, 5);
        EXPECT_EQ(copy.query(question, 10), index.query(question, 10));
    }
    EXPECT_EQ(copy.token_idf("w3"), index.token_idf("w3"));
}

TEST(Bm25, CorruptFileIsDataError)
{
    const auto docs = passages_of({{"d1", "a b"}});
    auto bytes = build_bm25_index(docs, Analyzer{}).serialize();
    EXPECT_THROW((void)InvertedIndex::deserialize(bytes.substr(0, bytes.size() / 2)), DataError);
    EXPECT_THROW((void)InvertedIndex::deserialize("not an index"), DataError);
    try {
        (void)InvertedIndex::load(fs::temp_directory_path() / "odqa-missing-bm25.idx");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("odqa index --retriever bm25"), std::string::npos);
    }
}

// --- TF-IDF -------------------------------------------------------------------

TEST(Tfidf, IdfIsClampedAtZero)
{
    EXPECT_DOUBLE_EQ(tfidf_idf(10, 1), std::log(9.5 / 1.5));
    EXPECT_EQ(tfidf_idf(10, 9), 0.0);
    EXPECT_EQ(tfidf_idf(2, 1), 0.0);
}

TEST(Tfidf, HashIsStable)
{
    // FNV-1a reference values
    EXPECT_EQ(stable_hash(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(stable_hash("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_LT(term_bin("hà nội", 1024), 1024u);
}

TEST(Tfidf, UsesBigrams)
{
    const auto docs = passages_of({{"d1", "a b"}, {"d2", "b a"}, {"d3", "c"}, {"d4", "d"}, {"d5", "e"}});
    const auto index = build_tfidf_index(docs, Analyzer{}, 1u << 20);
    const auto hits = index.query("a b", 5);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].passage_id, "d1");  // matches the bigram too
    EXPECT_GT(hits[0].score, hits[1].score);
}

TEST(Tfidf, MatchesExactVocabularyOracleWhenCollisionFree)
{
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto docs = testing::random_passages(rng, 1 + rng() % 50, 30, 25);
        const std::size_t bins = trial % 4 == 0 ? 64 : std::size_t{1} << 20;
        const auto index = build_tfidf_index(docs, Analyzer{}, bins);

        std::vector<std::string> vocab;
        for (const auto& d : docs) {
            const auto terms = testing::unigrams_and_bigrams(testing::split_words(d.text));
            vocab.insert(vocab.end(), terms.begin(), terms.end());
        }
        for (int q = 0; q < 3; ++q) {
            const auto question = testing::random_question(rng, 35, 6);
            auto all = vocab;
            const auto qterms = testing::unigrams_and_bigrams(testing::split_words(question));
            all.insert(all.end(), qterms.begin(), qterms.end());
            if (!find_bin_collisions(all, bins).empty()) {
                continue;
            }
            ++checked;
            const auto expected = exact_tfidf(docs, question);
            const auto hits = index.query(question, docs.size());
            expect_ranked(hits);
            const auto got = as_map(hits);
            ASSERT_EQ(got.size(), expected.size()) << question;
            for (const auto& [id, score] : expected) {
                ASSERT_TRUE(got.contains(id));
                EXPECT_EQ(got.at(id), score) << "bit-exact score for " << id;
            }
        }
    }
    EXPECT_GT(checked, 400);
}

TEST(Tfidf, CollisionDetectorFindsSharedBins)
{
    std::vector<std::string> terms;
    for (int i = 0; i < 100; ++i) {
        terms.push_back("t" + std::to_string(i));
    }
    const auto collisions = find_bin_collisions(terms, 16);
    EXPECT_FALSE(collisions.empty());
    for (const auto& [a, b] : collisions) {
        EXPECT_NE(a, b);
        EXPECT_EQ(term_bin(a, 16), term_bin(b, 16));
    }
    EXPECT_TRUE(find_bin_collisions(std::vector<std::string>{"x", "x"}, 16).empty());
}

TEST(Tfidf, RejectsBadBinCount)
{
    const auto docs = passages_of({{"d1", "a"}});
    EXPECT_THROW((void)build_tfidf_index(docs, Analyzer{}, 1000), UsageError);
    EXPECT_THROW((void)build_tfidf_index(docs, Analyzer{}, 1), UsageError);
}

TEST(Tfidf, SerializationRoundTrip)
{
    std::mt19937_64 rng(23);
    const auto docs = testing::random_passages(rng, 40, 25, 20);
    const auto index = build_tfidf_index(docs, Analyzer{}, 1u << 16);
    const auto copy = TfidfIndex::deserialize(index.serialize());
    EXPECT_EQ(copy.serialize(), index.serialize());
    EXPECT_EQ(copy.num_bins(), index.num_bins());
    for (int q = 0; q < 20; ++q) {
        const auto question = testing::random_question(rng, 25, 5);
        EXPECT_EQ(copy.query(question, 10), index.query(question, 10));
    }
    const auto file = fs::temp_directory_path() / ("odqa-tfidf-" + std::to_string(::getpid()) + ".idx");
    index.save(file);
    EXPECT_EQ(TfidfIndex::load(file).serialize(), index.serialize());
    fs::remove(file);
}

TEST(TokenIdf, ReflectsPlainDocumentFrequency)
{
    const auto docs = passages_of({{"d1", "a b"}, {"d2", "a c"}, {"d3", "a d"}, {"d4", "e"}, {"d5", "f"}});
    const auto bm25 = build_bm25_index(docs, Analyzer{});
    const auto tfidf = build_tfidf_index(docs, Analyzer{}, 1u << 16);
    EXPECT_DOUBLE_EQ(bm25.token_idf("b"), bm25_idf(5, 1));
    EXPECT_GT(bm25.token_idf("b"), bm25.token_idf("a"));
    EXPECT_EQ(bm25.token_idf("zzz"), 0.0);
    EXPECT_DOUBLE_EQ(tfidf.token_idf("b"), tfidf_idf(5, 1));
    EXPECT_EQ(tfidf.token_idf("a"), 0.0);
}

TEST(Segmentation, ChangesBm25Vocabulary)
{
    const auto docs = passages_of({{"d1", "học sinh giỏi"}, {"d2", "sinh học"}, {"d3", "x"}});
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::builtin_dictionary;
    config.compounds = {"học sinh", "sinh học"};
    const auto plain = build_bm25_index(docs, Analyzer{});
    const auto seg = build_bm25_index(docs, Analyzer(config));
    EXPECT_EQ(plain.query("học sinh", 5).size(), 2u);
    const auto hits = seg.query("học sinh", 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].passage_id, "d1");
}

}  // namespace
}  // namespace odqa
