#pragma once

#include "odqa/corpus_store.hpp"
#include "odqa/reader.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

/// How candidates whose normalized answers coincide are combined.
enum class DedupPolicy { max, sum };

[[nodiscard]] std::string_view to_string(DedupPolicy policy) noexcept;
[[nodiscard]] DedupPolicy dedup_policy_from_string(std::string_view name);

struct FusionConfig {
    double alpha = 0.5;
    DedupPolicy dedup = DedupPolicy::max;
};

/// alpha * reader + (1 - alpha) * retriever. Throws UsageError when alpha is
/// outside [0, 1] or either score is not finite.
[[nodiscard]] double fuse(double reader_score, double retriever_score, double alpha);

struct SelectedAnswer {
    std::string answer;
    double score = 0.0;
    std::string passage_id;
    std::size_t rank_of_source_passage = 0;
};

/// Groups candidates by normalize_answer(answer_text), scores each group by
/// the max (or sum) of fused scores and returns the best group's
/// representative (its highest fused member). Ties between groups and members
/// go to the higher retriever score, then the smaller passage id. Throws
/// DataError "no candidates" on empty input.
[[nodiscard]] SelectedAnswer select_answer(std::span<const SpanCandidate> candidates, const FusionConfig& config);

enum class TuningMetric { em, f1 };

[[nodiscard]] std::string_view to_string(TuningMetric metric) noexcept;
[[nodiscard]] TuningMetric tuning_metric_from_string(std::string_view name);

struct AlphaPoint {
    double alpha = 0.0;
    double em = 0.0;
    double f1 = 0.0;
};

struct AlphaTuning {
    double alpha = 0.5;
    TuningMetric metric = TuningMetric::f1;
    std::vector<AlphaPoint> curve;
};

/// 0, step, 2 step, ... up to 1, with 1 appended when step does not divide it.
[[nodiscard]] std::vector<double> alpha_grid(double step);

/// Evaluates every grid point and picks the best by `metric`; ties go to the
/// smaller alpha.
[[nodiscard]] AlphaTuning grid_search_alpha(double step, TuningMetric metric,
                                            const std::function<AlphaPoint(double)>& evaluate);

/// Candidates for a record with retrieval depth k.
using CandidateSource = std::function<std::vector<SpanCandidate>(const QARecord&, std::size_t k)>;

/// Runs `source` once per record at depth k, then grid-searches alpha over
/// the cached candidates.
[[nodiscard]] AlphaTuning tune_alpha(std::span<const QARecord> records, const CandidateSource& source, std::size_t k,
                                     double step, TuningMetric metric = TuningMetric::f1,
                                     DedupPolicy dedup = DedupPolicy::max);

/// Deterministic sample of n records (all of them when n >= size) in input order.
[[nodiscard]] std::vector<QARecord> sample_records(std::span<const QARecord> records, std::size_t n,
                                                   std::uint64_t seed);

/// alpha_tuning.json contents.
[[nodiscard]] std::string alpha_tuning_to_json(const AlphaTuning& tuning, double step, std::uint64_t seed,
                                               std::size_t n_pairs);

/// Reads chosen_alpha from an alpha_tuning.json document. Throws DataError.
[[nodiscard]] double alpha_from_tuning_json(std::string_view text);

}  // namespace odqa
