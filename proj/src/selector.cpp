#include "odqa/selector.hpp"

#include "odqa/error.hpp"
#include "odqa/evaluation.hpp"
#include "odqa/text_analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace odqa {

std::string_view to_string(DedupPolicy policy) noexcept
{
    return policy == DedupPolicy::sum ? "sum" : "max";
}

DedupPolicy dedup_policy_from_string(std::string_view name)
{
    if (name == "max") {
        return DedupPolicy::max;
    }
    if (name == "sum") {
        return DedupPolicy::sum;
    }
    throw UsageError("unknown dedup policy '" + std::string(name) + "' (expected max or sum)");
}

std::string_view to_string(TuningMetric metric) noexcept
{
    return metric == TuningMetric::em ? "em" : "f1";
}

TuningMetric tuning_metric_from_string(std::string_view name)
{
    if (name == "em") {
        return TuningMetric::em;
    }
    if (name == "f1") {
        return TuningMetric::f1;
    }
    throw UsageError("unknown tuning metric '" + std::string(name) + "' (expected em or f1)");
}

double fuse(double reader_score, double retriever_score, double alpha)
{
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
        throw UsageError("alpha must lie in [0, 1]");
    }
    if (!std::isfinite(reader_score) || !std::isfinite(retriever_score)) {
        throw UsageError("fusion inputs must be finite");
    }
    return alpha * reader_score + (1.0 - alpha) * retriever_score;
}

namespace {

struct Scored {
    const SpanCandidate* candidate;
    double fused;
};

// Strict weak order: better first.
bool better(const Scored& a, const Scored& b)
{
    if (a.fused != b.fused) {
        return a.fused > b.fused;
    }
    if (a.candidate->retriever_score != b.candidate->retriever_score) {
        return a.candidate->retriever_score > b.candidate->retriever_score;
    }
    if (a.candidate->passage_id != b.candidate->passage_id) {
        return a.candidate->passage_id < b.candidate->passage_id;
    }
    return a.candidate->start_char < b.candidate->start_char;
}

}  // namespace

SelectedAnswer select_answer(std::span<const SpanCandidate> candidates, const FusionConfig& config)
{
    if (candidates.empty()) {
        throw DataError("no candidates");
    }
    std::map<std::string, std::vector<Scored>> groups;
    for (const auto& c : candidates) {
        groups[normalize_answer(c.answer_text)].push_back({&c, fuse(c.reader_score, c.retriever_score, config.alpha)});
    }

    std::vector<Scored> best_per_group;
    best_per_group.reserve(groups.size());
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), better);
        double score = members.front().fused;
        if (config.dedup == DedupPolicy::sum) {
            score = 0.0;
            for (const auto& m : members) {
                score += m.fused;
            }
        }
        best_per_group.push_back({members.front().candidate, score});
    }
    const auto winner = *std::min_element(best_per_group.begin(), best_per_group.end(), better);
    return {winner.candidate->answer_text, winner.fused, winner.candidate->passage_id,
            winner.candidate->retriever_rank};
}

std::vector<double> alpha_grid(double step)
{
    if (!std::isfinite(step) || step <= 0.0 || step > 1.0) {
        throw UsageError("alpha grid step must lie in (0, 1]");
    }
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double a = static_cast<double>(i) * step;
        if (a > 1.0 + 1e-9) {
            break;
        }
        grid.push_back(std::min(a, 1.0));
    }
    if (std::abs(grid.back() - 1.0) > 1e-9) {
        grid.push_back(1.0);
    }
    return grid;
}

AlphaTuning grid_search_alpha(double step, TuningMetric metric, const std::function<AlphaPoint(double)>& evaluate)
{
    AlphaTuning out;
    out.metric = metric;
    double best = -1.0;
    for (const double a : alpha_grid(step)) {
        auto point = evaluate(a);
        point.alpha = a;
        const double value = metric == TuningMetric::em ? point.em : point.f1;
        if (value > best) {
            best = value;
            out.alpha = a;
        }
        out.curve.push_back(point);
    }
    return out;
}

AlphaTuning tune_alpha(std::span<const QARecord> records, const CandidateSource& source, std::size_t k, double step,
                       TuningMetric metric, DedupPolicy dedup)
{
    if (records.empty()) {
        throw UsageError("tune_alpha: no records");
    }
    std::vector<std::vector<SpanCandidate>> cached;
    cached.reserve(records.size());
    for (const auto& r : records) {
        cached.push_back(source(r, k));
    }
    return grid_search_alpha(step, metric, [&](double alpha) {
        std::map<std::string, std::string, std::less<>> predictions;
        for (std::size_t i = 0; i < records.size(); ++i) {
            std::string answer;
            if (!cached[i].empty()) {
                answer = select_answer(cached[i], {alpha, dedup}).answer;
            }
            predictions[records[i].id] = std::move(answer);
        }
        const auto report = evaluate_e2e(predictions, records);
        return AlphaPoint{alpha, report.overall.em, report.overall.f1};
    });
}

std::vector<QARecord> sample_records(std::span<const QARecord> records, std::size_t n, std::uint64_t seed)
{
    std::vector<QARecord> out;
    out.reserve(std::min(n, records.size()));
    std::mt19937_64 rng(seed);
    std::sample(records.begin(), records.end(), std::back_inserter(out), n, rng);
    return out;
}

std::string alpha_tuning_to_json(const AlphaTuning& tuning, double step, std::uint64_t seed, std::size_t n_pairs)
{
    nlohmann::ordered_json j;
    j["chosen_alpha"] = tuning.alpha;
    j["metric"] = to_string(tuning.metric);
    j["step"] = step;
    j["seed"] = seed;
    j["n_pairs"] = n_pairs;
    auto grid = nlohmann::ordered_json::array();
    auto curve = nlohmann::ordered_json::array();
    for (const auto& p : tuning.curve) {
        grid.push_back(p.alpha);
        curve.push_back({{"alpha", p.alpha}, {"em", p.em}, {"f1", p.f1}});
    }
    j["grid"] = std::move(grid);
    j["curve"] = std::move(curve);
    return j.dump(2) + "\n";
}

double alpha_from_tuning_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        const double alpha = j.at("chosen_alpha").get<double>();
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw DataError("alpha tuning file: chosen_alpha outside [0, 1]");
        }
        return alpha;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("alpha tuning file: ") + e.what());
    }
}

}  // namespace odqa
