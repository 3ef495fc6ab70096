#include "odqa/error.hpp"
#include "odqa/external_segmenter.hpp"
#include "odqa/text_analysis.hpp"
#include "odqa/utf8.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <random>

namespace odqa {
namespace {

using namespace std::chrono_literals;
using Strings = std::vector<std::string>;

TEST(Utf8, LengthCountsCodePoints)
{
    EXPECT_EQ(utf8::length("Hà Nội"), 6u);
    EXPECT_EQ(utf8::length(""), 0u);
    EXPECT_EQ(utf8::substr("Hà Nội là", 3, 6), "Nội");
}

TEST(Utf8, RejectsMalformedInput)
{
    EXPECT_TRUE(utf8::is_valid("tiếng Việt"));
    EXPECT_FALSE(utf8::is_valid("\xC3"));
    EXPECT_FALSE(utf8::is_valid("ab\xFF"));
    EXPECT_THROW((void)utf8::substr("abc", 2, 5), std::out_of_range);
}

TEST(Utf8, BoundariesEndAtByteSize)
{
    const std::string text = "ệa";
    const auto b = utf8::boundaries(text);
    ASSERT_EQ(b.size(), 3u);
    EXPECT_EQ(b[0], 0u);
    EXPECT_EQ(b[1], 3u);
    EXPECT_EQ(b[2], text.size());
}

TEST(Normalize, LowercasesStripsPunctuationAndCollapsesSpace)
{
    EXPECT_EQ(normalize_answer("  Hà   Nội. "), "hà nội");
    EXPECT_EQ(normalize_answer("“Thủ đô”, (Hà Nội)!"), "thủ đô hà nội");
    EXPECT_EQ(normalize_answer("100$ + 5%"), "100 5");
    EXPECT_EQ(normalize_answer("..."), "");
}

TEST(Normalize, ComposesDecomposedInput)
{
    // "ệ" as e + combining circumflex + combining dot below
    const std::string decomposed = "Vi\x65\xCC\x82\xCC\xA3t";
    EXPECT_EQ(normalize_answer(decomposed), normalize_answer("Việt"));
}

TEST(Normalize, KeepsCaseAndPunctuationWhenAsked)
{
    EXPECT_EQ(normalize_text("Hà  Nội!", false, false), "Hà Nội!");
    EXPECT_EQ(normalize_text("Hà  Nội!", true, false), "hà nội!");
}

TEST(Normalize, IsIdempotent)
{
    std::mt19937_64 rng(3);
    const std::vector<std::string> pieces = {"Hà", " ", "NỘI", ".", ",", "  ", "Sài-Gòn", "(x)", "\t", "Đà"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (int i = 0; i < 8; ++i) {
            text += pieces[rng() % pieces.size()];
        }
        const auto once = normalize_answer(text);
        EXPECT_EQ(normalize_answer(once), once);
    }
}

TEST(Tokenize, SplitsNormalizedText)
{
    EXPECT_EQ(tokenize("Thủ đô, Hà Nội."), (Strings{"thủ", "đô", "hà", "nội"}));
    EXPECT_TRUE(tokenize(" ! ").empty());
}

TEST(TokenizeWithOffsets, SpansIndexTheOriginalText)
{
    const std::string text = "Hà Nội, (thủ đô) của Việt Nam.";
    const auto tokens = tokenize_with_offsets(text);
    ASSERT_EQ(tokens.size(), 7u);
    EXPECT_EQ(tokens[1].text, "nội");
    EXPECT_EQ(utf8::substr(text, tokens[1].begin, tokens[1].end), "Nội");
    EXPECT_EQ(utf8::substr(text, tokens[2].begin, tokens[2].end), "thủ");
    EXPECT_EQ(utf8::substr(text, tokens[6].begin, tokens[6].end), "Nam");
    for (const auto& t : tokens) {
        EXPECT_EQ(normalize_answer(utf8::substr(text, t.begin, t.end)), t.text);
    }
}

TEST(Ngrams, BigramsFollowUnigrams)
{
    const Strings words = {"a", "b", "c"};
    EXPECT_EQ(ngrams(words, 1), words);
    EXPECT_EQ(ngrams(words, 2), (Strings{"a", "b", "c", "a b", "b c"}));
    EXPECT_THROW((void)ngrams(words, 3), UsageError);
}

TEST(CompoundLexicon, GreedyLongestMatch)
{
    const Strings phrases = {"học sinh", "học sinh giỏi", "Việt Nam"};
    const CompoundLexicon lexicon(phrases, true, true);
    EXPECT_EQ(lexicon.join(Strings{"học", "sinh", "giỏi", "ở", "việt", "nam"}),
              (Strings{"học_sinh_giỏi", "ở", "việt_nam"}));
    EXPECT_EQ(lexicon.join(Strings{"học", "sinh", "kém"}), (Strings{"học_sinh", "kém"}));
    EXPECT_EQ(lexicon.join(Strings{"học"}), (Strings{"học"}));
}

TEST(Analyzer, NoSegmentationGivesPlainTokens)
{
    const Analyzer analyzer;
    EXPECT_EQ(analyzer.words("Học sinh giỏi!"), (Strings{"học", "sinh", "giỏi"}));
}

TEST(Analyzer, DictionarySegmentationJoinsCompounds)
{
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::builtin_dictionary;
    config.compounds = {"học sinh"};
    config.ngram_max = 2;
    const Analyzer analyzer(config);
    EXPECT_EQ(analyzer.words("Học sinh giỏi"), (Strings{"học_sinh", "giỏi"}));
    EXPECT_EQ(analyzer.terms("Học sinh giỏi"), (Strings{"học_sinh", "giỏi", "học_sinh giỏi"}));
}

TEST(Analyzer, ConfigRoundTripsThroughJson)
{
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::external_command;
    config.command = "cat";
    config.ngram_max = 2;
    config.compounds = {"a b"};
    config.timeout = 1234ms;
    const auto back = analyzer_config_from_json(to_json_string(config));
    EXPECT_EQ(to_json_string(back), to_json_string(config));
    EXPECT_THROW((void)analyzer_config_from_json("{}"), DataError);
}

TEST(Analyzer, ExternalSegmenterOutputIsNormalized)
{
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::external_command;
    config.command = "sed -u 's/Học sinh/Học_sinh/g'";
    const Analyzer analyzer(config);
    EXPECT_EQ(analyzer.words("Học sinh giỏi."), (Strings{"học_sinh", "giỏi"}));
    EXPECT_EQ(analyzer.words("Học sinh"), (Strings{"học_sinh"}));
}

TEST(Analyzer, ExternalSegmenterRequiresCommand)
{
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::external_command;
    EXPECT_THROW(Analyzer{config}, UsageError);
}

TEST(ExternalSegmenter, EchoesLinesThroughPersistentChild)
{
    ExternalSegmenter seg("cat", 5000ms);
    EXPECT_EQ(seg.segment_line("một hai"), "một hai");
    EXPECT_EQ(seg.segment_line("ba"), "ba");
}

TEST(ExternalSegmenter, ReportsEarlyExit)
{
    ExternalSegmenter seg("false", 5000ms);
    try {
        (void)seg.segment_line("x");
        FAIL() << "expected SegmenterError";
    } catch (const SegmenterError& e) {
        EXPECT_NE(std::string(e.what()).find("false"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("exited"), std::string::npos);
    }
}

TEST(ExternalSegmenter, TimesOutAndRecovers)
{
    ExternalSegmenter seg("sleep 5", 200ms);
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_THROW((void)seg.segment_line("x"), SegmenterError);
    EXPECT_LT(std::chrono::steady_clock::now() - t0, 3s);
}

TEST(ExternalSegmenter, MissingCommandFails)
{
    ExternalSegmenter seg("/nonexistent/segmenter-binary", 2000ms);
    EXPECT_THROW((void)seg.segment_line("x"), SegmenterError);
}

}  // namespace
}  // namespace odqa
