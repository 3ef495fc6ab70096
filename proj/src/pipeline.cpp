#include "odqa/pipeline.hpp"

#include "odqa/error.hpp"

#include <algorithm>
#include <chrono>

namespace odqa {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

QaPipeline::QaPipeline(const CorpusStore& store, const Retriever& retriever, const Reader& reader,
                       PipelineConfig config)
    : store_(&store), retriever_(&retriever), reader_(&reader), config_(config)
{
    detail::require_positive_k(config_.k);
    (void)fuse(0.0, 0.0, config_.fusion.alpha);
}

AnswerTrace QaPipeline::read(std::string_view question, std::size_t k) const
{
    AnswerTrace trace;
    auto t0 = std::chrono::steady_clock::now();
    trace.hits = retriever_->query(question, k);
    if (!config_.raw_retriever_scores) {
        trace.hits = normalize_scores(std::move(trace.hits));
    }
    trace.retrieve_ms = elapsed_ms(t0);
    if (trace.hits.empty()) {
        return trace;
    }

    std::vector<Passage> passages;
    passages.reserve(trace.hits.size());
    for (const auto& hit : trace.hits) {
        const auto* p = store_->find_passage(hit.passage_id);
        if (p == nullptr) {
            throw DataError("index refers to passage '" + hit.passage_id +
                            "' missing from the document store; rebuild the index");
        }
        passages.push_back(*p);
    }

    t0 = std::chrono::steady_clock::now();
    trace.outcomes = reader_->read(question, passages);
    trace.read_ms = elapsed_ms(t0);
    if (trace.outcomes.size() != passages.size()) {
        throw ProtocolError("reader returned " + std::to_string(trace.outcomes.size()) + " results for " +
                            std::to_string(passages.size()) + " passages");
    }
    for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
        auto& outcome = trace.outcomes[i];
        if (outcome.status != ReadStatus::ok || !outcome.candidate) {
            continue;
        }
        outcome.candidate->retriever_score = trace.hits[i].score;
        outcome.candidate->retriever_rank = trace.hits[i].rank;
        trace.candidates.push_back(*outcome.candidate);
    }
    if (config_.fail_on_reader_outage && trace.candidates.empty() &&
        std::all_of(trace.outcomes.begin(), trace.outcomes.end(),
                    [](const ReadOutcome& o) { return o.status == ReadStatus::network_error; })) {
        throw NetworkError("reader unavailable: " + trace.outcomes.front().error);
    }
    return trace;
}

AnswerTrace QaPipeline::answer(std::string_view question) const
{
    auto trace = read(question, config_.k);
    if (!trace.candidates.empty()) {
        trace.answer = select_answer(trace.candidates, config_.fusion);
    }
    return trace;
}

CandidateSource QaPipeline::candidate_source() const
{
    return [this](const QARecord& record, std::size_t k) { return read(record.question, k).candidates; };
}

}  // namespace odqa
