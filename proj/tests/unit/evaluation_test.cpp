#include "odqa/error.hpp"
#include "odqa/evaluation.hpp"
#include "odqa/metrics.hpp"
#include "odqa/text_analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace odqa {
namespace {

using Strings = std::vector<std::string>;
using Predictions = std::map<std::string, std::string, std::less<>>;

QARecord record(std::string id, std::string gold, QuestionType type, std::string passage = "")
{
    return {std::move(id), "?", {{std::move(gold), 0}}, std::move(passage), Split::test, type};
}

TEST(ExactMatch, NormalizesBeforeComparing)
{
    EXPECT_EQ(exact_match("Hà Nội.", Strings{"hà nội"}), 1);
    EXPECT_EQ(exact_match("Hà Nội", Strings{"Sài Gòn"}), 0);
    EXPECT_EQ(exact_match("Huế", Strings{"Sài Gòn", "  HUẾ!"}), 1);
    EXPECT_THROW((void)exact_match("x", Strings{}), UsageError);
}

TEST(ExactMatch, InvariantUnderCaseAndPunctuationPerturbation)
{
    std::mt19937_64 rng(43);
    // each word with case variants
    const std::vector<std::vector<Strings>> golds = {
        {{"thủ", "Thủ", "THỦ"}, {"đô", "Đô", "ĐÔ"}, {"hà", "Hà", "HÀ"}, {"nội", "Nội", "NỘI"}},
        {{"sông", "Sông", "SÔNG"}, {"hồng", "Hồng", "HỒNG"}},
        {{"năm", "Năm", "NĂM"}, {"1945"}},
        {{"nguyễn", "Nguyễn", "NGUYỄN"}, {"du", "Du", "DU"}},
        {{"đồng", "Đồng"}, {"bằng", "BẰNG"}, {"sông", "Sông"}, {"cửu", "Cửu", "CỬU"}, {"long", "Long", "LONG"}},
    };
    const Strings punct = {".", ",", "!", "?", "\"", "(", ")", "-", "…", "“", "”", ":", "%", "$"};
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& words = golds[rng() % golds.size()];
        std::string gold;
        std::string perturbed;
        for (const auto& variants : words) {
            gold += (gold.empty() ? "" : " ") + variants[0];
            std::string t = variants[rng() % variants.size()];
            if (rng() % 3 == 0) {
                t = punct[rng() % punct.size()] + t;
            }
            if (rng() % 3 == 0) {
                t += punct[rng() % punct.size()];
            }
            perturbed += (perturbed.empty() ? "" : std::string(1 + rng() % 3, ' ')) + t;
        }
        ASSERT_EQ(exact_match(perturbed, Strings{gold}), 1) << perturbed << " vs " << gold;
    }
}

TEST(TokenF1, HandComputed)
{
    EXPECT_DOUBLE_EQ(token_f1("hà nội", Strings{"đô hà nội"}), 0.8);
    EXPECT_EQ(token_f1("hà nội", Strings{"đô hà nội"}), 0.8);
    // four gold tokens: P = 1, R = 1/2
    EXPECT_DOUBLE_EQ(token_f1("hà nội", Strings{"thủ đô hà nội"}), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(token_f1("Hà Nội", Strings{"Hà Nội"}), 1.0);
    EXPECT_DOUBLE_EQ(token_f1("a b", Strings{"c d"}), 0.0);
    EXPECT_DOUBLE_EQ(token_f1("", Strings{""}), 1.0);
    EXPECT_DOUBLE_EQ(token_f1("", Strings{"x"}), 0.0);
    EXPECT_DOUBLE_EQ(token_f1("x", Strings{"."}), 0.0);
    // multiset overlap: "a a b" vs "a b b" shares a, b
    EXPECT_DOUBLE_EQ(token_f1("a a b", Strings{"a b b"}), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(token_f1("a", Strings{"x", "a b"}), 2.0 / 3.0);
}

TEST(TokenF1, SymmetricAndConsistentWithExactMatch)
{
    std::mt19937_64 rng(47);
    const Strings vocab = {"a", "b", "c", "d", "Hà", "nội", "."};
    auto phrase = [&] {
        std::string s;
        for (std::size_t i = 0, n = rng() % 5; i < n; ++i) {
            s += vocab[rng() % vocab.size()] + " ";
        }
        return s;
    };
    for (int trial = 0; trial < 2000; ++trial) {
        const auto p = phrase();
        const auto g = phrase();
        EXPECT_EQ(token_f1(p, std::string_view(g)), token_f1(g, std::string_view(p)));
        if (exact_match(p, Strings{g}) == 1) {
            EXPECT_EQ(token_f1(p, Strings{g}), 1.0);
        }
    }
}

TEST(PrecisionAtK, HandFixture)
{
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists = {
        {"q1", {{"g1", 3, 1}, {"x", 2, 2}, {"y", 1, 3}}},
        {"q2", {{"x", 3, 1}, {"g2", 2, 2}, {"y", 1, 3}}},
        {"q3", {{"x", 3, 1}, {"y", 2, 2}, {"g3", 1, 3}}},
        {"q4", {{"x", 3, 1}, {"y", 2, 2}, {"z", 1, 3}}},
    };
    const auto run = make_run(lists, 3);
    const std::map<std::string, std::string, std::less<>> gold = {
        {"q1", "g1"}, {"q2", "g2"}, {"q3", "g3"}, {"q4", "g4"}};
    EXPECT_EQ(precision_at_k(run, gold, 1), 25.0);
    EXPECT_EQ(precision_at_k(run, gold, 2), 50.0);
    EXPECT_EQ(precision_at_k(run, gold, 3), 75.0);
    EXPECT_EQ(precision_at_k(run, gold, 30), 75.0);
    EXPECT_THROW((void)precision_at_k(run, gold, 0), UsageError);
}

TEST(PrecisionAtK, MissingGoldListsQuestions)
{
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists = {{"q1", {}}, {"q7", {}}};
    const auto run = make_run(lists, 5);
    try {
        (void)precision_at_k(run, {{"q1", "g"}}, 1);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("q7"), std::string::npos);
    }
}

TEST(PrecisionAtK, MonotoneInK)
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists;
        std::map<std::string, std::string, std::less<>> gold;
        const std::size_t depth = 1 + rng() % 30;
        for (int q = 0; q < 20; ++q) {
            const auto qid = "q" + std::to_string(q);
            gold[qid] = "p" + std::to_string(rng() % 40);
            std::vector<std::size_t> docs(40);
            std::iota(docs.begin(), docs.end(), 0);
            std::shuffle(docs.begin(), docs.end(), rng);
            const std::size_t n = rng() % (depth + 1);
            for (std::size_t r = 0; r < n; ++r) {
                lists[qid].push_back({"p" + std::to_string(docs[r]), double(n - r), r + 1});
            }
            lists.try_emplace(qid);
        }
        const auto run = make_run(lists, depth);
        double previous = 0.0;
        for (std::size_t k = 1; k <= depth; ++k) {
            const double p = precision_at_k(run, gold, k);
            EXPECT_GE(p, previous);
            EXPECT_LE(p, 100.0);
            previous = p;
        }
    }
}

TEST(PrecisionAtK, ContainmentFallback)
{
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists = {
        {"q1", {{"a", 2, 1}, {"b", 1, 2}}}};
    const auto run = make_run(lists, 2);
    const std::map<std::string, std::vector<std::string>, std::less<>> answers = {{"q1", {"Hà Nội"}}};
    const PassageText text = [](std::string_view id) {
        return std::string(id == "a" ? "Huế là cố đô." : "Thủ đô là Hà Nội.");
    };
    EXPECT_EQ(precision_at_k_containment(run, answers, text, 1), 0.0);
    EXPECT_EQ(precision_at_k_containment(run, answers, text, 2), 100.0);
}

TEST(MakeRun, RejectsMalformedLists)
{
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists = {{"q", {{"a", 1, 2}}}};
    EXPECT_THROW((void)make_run(lists, 5), DataError);
    lists = {{"q", {{"a", 1, 1}, {"b", 1, 2}}}};
    EXPECT_THROW((void)make_run(lists, 1), DataError);
}

TEST(EvaluateE2e, MixedFixtureMatchesHandComputation)
{
    const std::vector<QARecord> records = {
        record("q1", "Hà Nội", QuestionType::What),         // exact
        record("q2", "đô Hà Nội", QuestionType::What),     // F1 0.8
        record("q3", "1945", QuestionType::When),           // wrong
        record("q4", "năm 1945", QuestionType::When),       // F1 2/3
        record("q5", "Nguyễn Du", QuestionType::Who),       // missing
        record("q6", "Huế", QuestionType::Who),             // exact after normalization
    };
    const Predictions predictions = {
        {"q1", "Hà Nội"}, {"q2", "hà nội"}, {"q3", "1975"}, {"q4", "1945"}, {"q6", "HUẾ."}};
    const auto report = evaluate_e2e(predictions, records);

    EXPECT_EQ(report.overall.count, 6u);
    EXPECT_NEAR(report.overall.em, 100.0 * 2.0 / 6.0, 1e-12);
    EXPECT_NEAR(report.overall.f1, 100.0 * (1.0 + 0.8 + 0.0 + 2.0 / 3.0 + 0.0 + 1.0) / 6.0, 1e-12);
    ASSERT_EQ(report.per_type.size(), 3u);
    EXPECT_NEAR(report.per_type.at(QuestionType::What).em, 50.0, 1e-12);
    EXPECT_NEAR(report.per_type.at(QuestionType::What).f1, 90.0, 1e-12);
    EXPECT_NEAR(report.per_type.at(QuestionType::When).em, 0.0, 1e-12);
    EXPECT_NEAR(report.per_type.at(QuestionType::When).f1, 100.0 / 3.0, 1e-12);
    EXPECT_NEAR(report.per_type.at(QuestionType::Who).em, 50.0, 1e-12);
    EXPECT_NEAR(report.per_type.at(QuestionType::Who).f1, 50.0, 1e-12);
    EXPECT_EQ(report.missing_predictions, Strings{"q5"});
    EXPECT_FALSE(report.per_type.contains(QuestionType::How));
}

TEST(EvaluateE2e, PerfectPredictionsScoreFullMarks)
{
    std::vector<QARecord> records;
    Predictions predictions;
    for (const auto type : kAllQuestionTypes) {
        const auto id = "q" + std::string(to_string(type));
        records.push_back(record(id, "đáp án " + id, type));
        predictions[id] = "đáp án " + id;
    }
    const auto report = evaluate_e2e(predictions, records);
    EXPECT_EQ(report.overall.em, 100.0);
    for (const auto& [type, s] : report.per_type) {
        EXPECT_EQ(s.em, 100.0);
        EXPECT_EQ(s.f1, 100.0);
    }
}

TEST(EvaluateE2e, OverallIsCountWeightedMeanOfTypes)
{
    std::mt19937_64 rng(59);
    const Strings answers = {"một", "hai", "ba", "một hai", "hai ba", "một hai ba"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<QARecord> records;
        Predictions predictions;
        for (int i = 0; i < 100; ++i) {
            const auto id = "q" + std::to_string(i);
            records.push_back(record(id, answers[rng() % answers.size()], kAllQuestionTypes[rng() % 8]));
            if (rng() % 10 != 0) {
                predictions[id] = answers[rng() % answers.size()];
            }
        }
        const auto report = evaluate_e2e(predictions, records);
        double em = 0.0;
        double f1 = 0.0;
        for (const auto& [type, s] : report.per_type) {
            em += s.em * static_cast<double>(s.count);
            f1 += s.f1 * static_cast<double>(s.count);
        }
        EXPECT_NEAR(em / 100.0, report.overall.em, 1e-9);
        EXPECT_NEAR(f1 / 100.0, report.overall.f1, 1e-9);
    }
}

TEST(AnswerPositions, HistogramPercentages)
{
    EXPECT_EQ(answer_position_histogram(std::vector<std::size_t>{1, 1, 1}), (std::map<std::size_t, double>{{1, 100.0}}));
    EXPECT_EQ(answer_position_histogram(std::vector<std::size_t>{1, 1, 2, 5}),
              (std::map<std::size_t, double>{{1, 50.0}, {2, 25.0}, {5, 25.0}}));
    EXPECT_EQ(answer_position_histogram(std::vector<std::size_t>{0, 2}), (std::map<std::size_t, double>{{2, 100.0}}));
    EXPECT_TRUE(answer_position_histogram(std::vector<std::size_t>{}).empty());
}

TEST(AnswerLength, MeanTokensPerType)
{
    const std::vector<QARecord> records = {record("a", "x", QuestionType::What), record("b", "x", QuestionType::What),
                                           record("c", "x", QuestionType::Who), record("d", "x", QuestionType::Who)};
    const Predictions predictions = {{"a", "một hai"}, {"b", "một hai ba bốn"}, {"c", ""}};
    const auto lengths = avg_answer_length_by_type(predictions, records);
    EXPECT_DOUBLE_EQ(lengths.at(QuestionType::What), 3.0);
    EXPECT_DOUBLE_EQ(lengths.at(QuestionType::Who), 0.0);
}

SpanCandidate candidate(std::string answer, double reader, double retriever, std::size_t rank)
{
    return {"p#" + std::to_string(rank), std::move(answer), 0, 1, reader, retriever, rank};
}

TEST(KSweep, MatchesDirectEvaluationAndCachesRetrieval)
{
    const std::vector<QARecord> records = {record("q1", "đúng", QuestionType::What),
                                           record("q2", "đúng", QuestionType::Who)};
    int calls = 0;
    const CandidateSource source = [&](const QARecord& r, std::size_t k) {
        ++calls;
        EXPECT_EQ(k, 10u);
        if (r.id == "q1") {
            return std::vector<SpanCandidate>{candidate("đúng", 0.9, 0.5, 1), candidate("sai", 0.1, 0.5, 2)};
        }
        // the right answer only appears at rank 3
        return std::vector<SpanCandidate>{candidate("sai", 0.2, 0.4, 1), candidate("sai nữa", 0.1, 0.3, 2),
                                          candidate("đúng", 0.9, 0.3, 3)};
    };
    std::vector<std::size_t> seen;
    const std::vector<std::size_t> ks = {1, 2, 3, 10};
    const auto rows = k_sweep(records, source, ks, {0.5, DedupPolicy::max},
                              [&](const SweepRow& row) { seen.push_back(row.k); });
    EXPECT_EQ(calls, 2);
    EXPECT_EQ(seen, ks);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].em, 50.0);
    EXPECT_EQ(rows[1].em, 50.0);
    EXPECT_EQ(rows[2].em, 100.0);
    EXPECT_EQ(rows[3].em, 100.0);
    EXPECT_EQ(rows[2].predictions[1].source_rank, 3u);

    const Predictions at_one = {{"q1", "đúng"}, {"q2", "sai"}};
    const auto direct = evaluate_e2e(at_one, records);
    EXPECT_EQ(rows[0].em, direct.overall.em);
    EXPECT_EQ(rows[0].f1, direct.overall.f1);
}

TEST(KSweep, ValidatesKs)
{
    const CandidateSource none = [](const QARecord&, std::size_t) { return std::vector<SpanCandidate>{}; };
    EXPECT_THROW((void)k_sweep({}, none, std::vector<std::size_t>{}, {}), UsageError);
    EXPECT_THROW((void)k_sweep({}, none, std::vector<std::size_t>{0, 1}, {}), UsageError);
}

TEST(KSweep, FailureKeepsCompletedRows)
{
    const std::vector<QARecord> records = {record("q1", "x", QuestionType::What)};
    std::vector<std::size_t> done;
    const CandidateSource failing = [](const QARecord&, std::size_t) -> std::vector<SpanCandidate> {
        throw NetworkError("reader down");
    };
    EXPECT_THROW((void)k_sweep(records, failing, std::vector<std::size_t>{1, 2}, {},
                               [&](const SweepRow& r) { done.push_back(r.k); }),
                 NetworkError);
    EXPECT_TRUE(done.empty());
}

TEST(Reports, WritersAreDeterministic)
{
    const std::vector<QARecord> records = {record("q1", "Hà Nội", QuestionType::What),
                                           record("q2", "Huế", QuestionType::Where)};
    const Predictions predictions = {{"q1", "Hà Nội"}, {"q2", "Sài Gòn"}};
    auto report = evaluate_e2e(predictions, records);
    report.p_at_k = {{1, 50.0}, {5, 100.0}};
    report.answer_position_hist = answer_position_histogram(std::vector<std::size_t>{1, 2});
    report.avg_answer_len_by_type = avg_answer_length_by_type(predictions, records);

    auto again = evaluate_e2e(predictions, records);
    again.p_at_k = report.p_at_k;
    again.answer_position_hist = report.answer_position_hist;
    again.avg_answer_len_by_type = report.avg_answer_len_by_type;
    EXPECT_EQ(report_to_json(again), report_to_json(report));
    const auto csv = report_to_csv(report);
    EXPECT_EQ(csv,
              "type,count,em,f1,avg_answer_len\n"
              "What,1,100.0000,100.0000,2.0000\n"
              "Where,1,0.0000,0.0000,2.0000\n"
              "all,2,50.0000,50.0000,\n");
    EXPECT_EQ(positions_to_csv(report.answer_position_hist), "rank,pct\n1,50.0000\n2,50.0000\n");
    const std::vector<SweepRow> rows = {{1, 10.0, 20.0, {}}, {5, 30.0, 40.5, {}}};
    EXPECT_EQ(sweep_to_csv(rows), "k,em,f1\n1,10.0000,20.0000\n5,30.0000,40.5000\n");
    const auto json = report_to_json(report);
    EXPECT_NE(json.find("\"missing_predictions\": []"), std::string::npos);
    EXPECT_NE(format_report_table(report).find("overall"), std::string::npos);
}

}  // namespace
}  // namespace odqa
