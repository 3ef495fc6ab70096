#pragma once

#include "odqa/corpus_store.hpp"
#include "odqa/reader.hpp"
#include "odqa/retriever.hpp"
#include "odqa/selector.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

struct PipelineConfig {
    std::size_t k = 5;
    FusionConfig fusion;
    /// Fuse raw retriever scores instead of their softmax over the list.
    bool raw_retriever_scores = false;
    /// Throw NetworkError when every passage read failed on the network.
    bool fail_on_reader_outage = true;
};

struct AnswerTrace {
    std::vector<RetrievalHit> hits;  // scores as fused (normalized unless raw)
    std::vector<ReadOutcome> outcomes;
    std::vector<SpanCandidate> candidates;
    std::optional<SelectedAnswer> answer;  // empty when nothing was retrieved or read
    double retrieve_ms = 0.0;
    double read_ms = 0.0;
};

/// Retriever -> reader -> selector over a loaded store.
class QaPipeline {
  public:
    QaPipeline(const CorpusStore& store, const Retriever& retriever, const Reader& reader, PipelineConfig config);

    /// Retrieval and reading at depth k, without selection.
    [[nodiscard]] AnswerTrace read(std::string_view question, std::size_t k) const;

    /// Full pipeline at config().k.
    [[nodiscard]] AnswerTrace answer(std::string_view question) const;

    /// Candidates at depth k, for k sweeps and alpha tuning.
    [[nodiscard]] CandidateSource candidate_source() const;

    [[nodiscard]] const PipelineConfig& config() const noexcept { return config_; }

  private:
    const CorpusStore* store_;
    const Retriever* retriever_;
    const Reader* reader_;
    PipelineConfig config_;
};

}  // namespace odqa
