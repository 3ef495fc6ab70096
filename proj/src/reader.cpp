#include "odqa/reader.hpp"

#include "odqa/error.hpp"
#include "odqa/utf8.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace odqa {

SpanSelection select_span(std::span<const double> pstart, std::span<const double> pend, const ReaderConfig& config)
{
    if (pstart.empty()) {
        throw DataError("select_span: empty token list");
    }
    if (pstart.size() != pend.size()) {
        throw DataError("select_span: pstart and pend differ in length");
    }
    if (config.max_answer_tokens < 1) {
        throw UsageError("max_answer_tokens must be at least 1");
    }
    const bool log_space = config.score_space == ScoreSpace::log;
    auto valid = [&](double v) { return log_space ? !std::isnan(v) && v != std::numeric_limits<double>::infinity()
                                                  : std::isfinite(v) && v >= 0.0; };
    for (std::size_t i = 0; i < pstart.size(); ++i) {
        if (!valid(pstart[i]) || !valid(pend[i])) {
            throw DataError("select_span: invalid score at token " + std::to_string(i));
        }
    }

    const auto n = pstart.size();
    SpanSelection best;
    double best_score = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto last = std::min(n - 1, i + config.max_answer_tokens - 1);
        for (std::size_t j = i; j <= last; ++j) {
            const double s = log_space ? pstart[i] + pend[j] : pstart[i] * pend[j];
            if (!found || s > best_score) {
                best = {i, j, s};
                best_score = s;
                found = true;
            }
        }
    }
    const bool usable = log_space ? best_score > -std::numeric_limits<double>::infinity() : best_score > 0.0;
    if (!usable) {
        throw DataError("no valid span");
    }
    return best;
}

SpanSelection select_span(const TokenScores& scores, const ReaderConfig& config)
{
    if (scores.tokens.size() != scores.pstart.size()) {
        throw DataError("select_span: token and score counts differ");
    }
    return select_span(scores.pstart, scores.pend, config);
}

bool is_substring_consistent(const SpanCandidate& candidate, std::string_view passage_text)
{
    if (candidate.start_char >= candidate.end_char) {
        return false;
    }
    const auto bounds = utf8::boundaries(passage_text);
    if (candidate.end_char >= bounds.size()) {
        return false;
    }
    const auto begin = bounds[candidate.start_char];
    return passage_text.substr(begin, bounds[candidate.end_char] - begin) == candidate.answer_text;
}

TokenScores baseline_token_scores(std::string_view question, std::string_view passage_text, const TermWeight& weight,
                                  ScoreSpace space)
{
    TokenScores scores;
    scores.tokens = tokenize_with_offsets(passage_text);
    const auto n = scores.tokens.size();
    if (n == 0) {
        throw DataError("passage has no tokens to read");
    }

    const auto question_tokens = tokenize(question);
    std::vector<double> overlap(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& q : question_tokens) {
            if (q == scores.tokens[i].text) {
                overlap[i] += weight(q);
            }
        }
    }

    std::vector<double> window(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto lo = i >= kBaselineWindow ? i - kBaselineWindow : 0;
        const auto hi = std::min(n - 1, i + kBaselineWindow);
        for (std::size_t j = lo; j <= hi; ++j) {
            window[i] += overlap[j];
        }
    }

    const double max_score = *std::max_element(window.begin(), window.end());
    double sum = 0.0;
    for (const double w : window) {
        sum += std::exp(w - max_score);
    }
    scores.pstart.resize(n);
    if (space == ScoreSpace::probability) {
        for (std::size_t i = 0; i < n; ++i) {
            scores.pstart[i] = std::exp(window[i] - max_score) / sum;
        }
    } else {
        const double log_sum = std::log(sum);
        for (std::size_t i = 0; i < n; ++i) {
            scores.pstart[i] = window[i] - max_score - log_sum;
        }
    }
    scores.pend = scores.pstart;
    return scores;
}

SpanCandidate baseline_lexical_read(std::string_view question, const Passage& passage, const ReaderConfig& config,
                                    const TermWeight& weight)
{
    if (normalize_answer(question).empty()) {
        throw DataError("question is empty");
    }
    const auto scores = baseline_token_scores(question, passage.text, weight, config.score_space);
    const auto span = select_span(scores, config);

    SpanCandidate candidate;
    candidate.passage_id = passage.id;
    candidate.start_char = scores.tokens[span.start].begin;
    candidate.end_char = scores.tokens[span.end].end;
    candidate.answer_text = utf8::substr(passage.text, candidate.start_char, candidate.end_char);
    candidate.reader_score =
        config.score_space == ScoreSpace::log ? std::exp(span.score) : span.score;
    candidate.reader_score = std::clamp(candidate.reader_score, 0.0, 1.0);
    return candidate;
}

BaselineReader::BaselineReader(TermWeight weight, ReaderConfig config)
    : weight_(std::move(weight)), config_(config)
{}

std::vector<ReadOutcome> BaselineReader::read(std::string_view question, std::span<const Passage> passages) const
{
    std::vector<ReadOutcome> out;
    out.reserve(passages.size());
    for (const auto& p : passages) {
        try {
            out.push_back({ReadStatus::ok, baseline_lexical_read(question, p, config_, weight_), {}});
        } catch (const DataError& e) {
            out.push_back({ReadStatus::reader_error, std::nullopt, e.what()});
        }
    }
    return out;
}

}  // namespace odqa
