#pragma once

#include "odqa/corpus_store.hpp"
#include "odqa/text_analysis.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

enum class ScoreSpace { probability, log };

struct ReaderConfig {
    std::size_t max_answer_tokens = 30;
    ScoreSpace score_space = ScoreSpace::probability;
};

/// Per-token start/end scores over one passage.
struct TokenScores {
    std::vector<OffsetToken> tokens;
    std::vector<double> pstart;
    std::vector<double> pend;
};

struct SpanSelection {
    std::size_t start = 0;  // token indices, inclusive
    std::size_t end = 0;
    double score = 0.0;

    friend bool operator==(const SpanSelection&, const SpanSelection&) = default;
};

/// Best (i, j) with i <= j <= i + max_answer_tokens - 1, maximizing
/// pstart[i] * pend[j] (probability space) or pstart[i] + pend[j] (log
/// space). Ties go to the smaller i, then the smaller j. Throws DataError
/// "no valid span" when every span scores zero (or -inf in log space), and
/// on mismatched or non-finite inputs.
[[nodiscard]] SpanSelection select_span(std::span<const double> pstart, std::span<const double> pend,
                                        const ReaderConfig& config);
[[nodiscard]] SpanSelection select_span(const TokenScores& scores, const ReaderConfig& config);

struct SpanCandidate {
    std::string passage_id;
    std::string answer_text;
    std::size_t start_char = 0;  // code points, [start_char, end_char)
    std::size_t end_char = 0;
    double reader_score = 0.0;
    double retriever_score = 0.0;
    std::size_t retriever_rank = 0;  // 1-based rank of the source passage, 0 if unknown

    friend bool operator==(const SpanCandidate&, const SpanCandidate&) = default;
};

/// True when 0 <= start < end <= |passage| and answer_text is exactly the
/// passage substring at those offsets.
[[nodiscard]] bool is_substring_consistent(const SpanCandidate& candidate, std::string_view passage_text);

enum class ReadStatus { ok, reader_error, network_error, protocol_error };

/// One reader result per input passage. Failures are kept, not dropped.
struct ReadOutcome {
    ReadStatus status = ReadStatus::ok;
    std::optional<SpanCandidate> candidate;
    std::string error;
};

class Reader {
  public:
    virtual ~Reader() = default;

    /// One outcome per passage, in input order.
    [[nodiscard]] virtual std::vector<ReadOutcome> read(std::string_view question,
                                                        std::span<const Passage> passages) const = 0;

    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
};

/// Weight of a plain normalized token, typically Retriever::token_idf.
using TermWeight = std::function<double(std::string_view)>;

/// Lexical-overlap start/end distributions: overlap(t) sums the weights of
/// question tokens equal to t, each score is the overlap summed over a
/// +-3 token window, and pstart = pend = softmax of those scores (log-softmax
/// in log space).
[[nodiscard]] TokenScores baseline_token_scores(std::string_view question, std::string_view passage_text,
                                                const TermWeight& weight, ScoreSpace space = ScoreSpace::probability);

inline constexpr std::size_t kBaselineWindow = 3;

/// Dependency-free reader for running and testing the pipeline without a
/// neural model. reader_score is pstart[i] * pend[j] of the chosen span.
[[nodiscard]] SpanCandidate baseline_lexical_read(std::string_view question, const Passage& passage,
                                                  const ReaderConfig& config, const TermWeight& weight);

class BaselineReader final : public Reader {
  public:
    BaselineReader(TermWeight weight, ReaderConfig config = {});

    [[nodiscard]] std::vector<ReadOutcome> read(std::string_view question,
                                                std::span<const Passage> passages) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "baseline"; }

  private:
    TermWeight weight_;
    ReaderConfig config_;
};

}  // namespace odqa
