#pragma once

#include "odqa/corpus_store.hpp"
#include "odqa/question_types.hpp"
#include "odqa/retriever.hpp"
#include "odqa/selector.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

/// Ranked retrieval lists keyed by question id.
struct RetrievalRun {
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists;
    std::size_t k_max = 0;
};

/// Checks that every list has at most k_max hits ranked 1..n.
[[nodiscard]] RetrievalRun make_run(const std::map<std::string, std::vector<RetrievalHit>, std::less<>>& lists,
                                    std::size_t k_max);

/// Percentage of questions whose gold passage id is among the top k.
/// Throws DataError listing questions without a gold entry.
[[nodiscard]] double precision_at_k(const RetrievalRun& run,
                                    const std::map<std::string, std::string, std::less<>>& gold, std::size_t k);

using PassageText = std::function<std::string(std::string_view passage_id)>;

/// Percentage of questions with a top-k passage containing a normalized gold
/// answer. For corpora without gold passage ids.
[[nodiscard]] double precision_at_k_containment(
    const RetrievalRun& run, const std::map<std::string, std::vector<std::string>, std::less<>>& gold_answers,
    const PassageText& passage_text, std::size_t k);

struct TypeScores {
    double em = 0.0;  // percent
    double f1 = 0.0;  // percent
    std::size_t count = 0;
};

struct EvalReport {
    TypeScores overall;
    std::map<QuestionType, TypeScores> per_type;  // only types present
    std::map<std::size_t, double> p_at_k;
    std::map<std::size_t, double> answer_position_hist;
    std::map<QuestionType, double> avg_answer_len_by_type;
    std::vector<std::string> missing_predictions;  // scored as EM = F1 = 0
};

/// EM and F1 over `records`; overall and per question type.
[[nodiscard]] EvalReport evaluate_e2e(const std::map<std::string, std::string, std::less<>>& predictions,
                                      std::span<const QARecord> records);

/// Percentage of answered questions whose answer came from each retrieval
/// rank. Rank 0 marks an unanswered question and is skipped.
[[nodiscard]] std::map<std::size_t, double> answer_position_histogram(std::span<const std::size_t> source_ranks);

/// Mean predicted-answer length in tokens per question type. Missing
/// predictions count as length 0.
[[nodiscard]] std::map<QuestionType, double> avg_answer_length_by_type(
    const std::map<std::string, std::string, std::less<>>& predictions, std::span<const QARecord> records,
    const Tokenizer& tokenizer);
[[nodiscard]] std::map<QuestionType, double> avg_answer_length_by_type(
    const std::map<std::string, std::string, std::less<>>& predictions, std::span<const QARecord> records);

struct Prediction {
    std::string question_id;
    std::string answer;
    std::string passage_id;
    std::size_t source_rank = 0;
    double score = 0.0;
};

struct SweepRow {
    std::size_t k = 0;
    double em = 0.0;
    double f1 = 0.0;
    std::vector<Prediction> predictions;
};

/// End-to-end EM/F1 for each k in `ks`. Candidates are produced once per
/// record at max(ks) and restricted to retriever_rank <= k. `on_row` sees
/// each row as soon as it is complete.
[[nodiscard]] std::vector<SweepRow> k_sweep(std::span<const QARecord> records, const CandidateSource& source,
                                            std::span<const std::size_t> ks, const FusionConfig& fusion,
                                            const std::function<void(const SweepRow&)>& on_row = {});

[[nodiscard]] std::string report_to_json(const EvalReport& report);
[[nodiscard]] std::string report_to_csv(const EvalReport& report);
[[nodiscard]] std::string positions_to_csv(const std::map<std::size_t, double>& histogram);
[[nodiscard]] std::string sweep_to_csv(std::span<const SweepRow> rows);
[[nodiscard]] std::string format_report_table(const EvalReport& report);

}  // namespace odqa
