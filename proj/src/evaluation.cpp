#include "odqa/evaluation.hpp"

#include "odqa/error.hpp"
#include "odqa/metrics.hpp"
#include "odqa/text_analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace odqa {

// --- metrics ---------------------------------------------------------------

int exact_match(std::string_view pred, std::span<const std::string> golds)
{
    if (golds.empty()) {
        throw UsageError("exact_match: empty gold list");
    }
    const auto p = normalize_answer(pred);
    for (const auto& g : golds) {
        if (normalize_answer(g) == p) {
            return 1;
        }
    }
    return 0;
}

double token_f1(std::string_view pred, std::string_view gold)
{
    const auto p = tokenize(pred);
    const auto g = tokenize(gold);
    if (p.empty() && g.empty()) {
        return 1.0;
    }
    if (p.empty() || g.empty()) {
        return 0.0;
    }
    std::unordered_map<std::string, int> counts;
    for (const auto& t : g) {
        ++counts[t];
    }
    std::size_t overlap = 0;
    for (const auto& t : p) {
        if (auto it = counts.find(t); it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

double token_f1(std::string_view pred, std::span<const std::string> golds)
{
    if (golds.empty()) {
        throw UsageError("token_f1: empty gold list");
    }
    double best = 0.0;
    for (const auto& g : golds) {
        best = std::max(best, token_f1(pred, std::string_view(g)));
    }
    return best;
}

// --- retrieval ---------------------------------------------------------------

namespace {

template <typename IsRelevant>
double precision_impl(const RetrievalRun& run, std::size_t k, IsRelevant&& relevant)
{
    if (k == 0) {
        throw UsageError("precision_at_k: k must be at least 1");
    }
    if (run.lists.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (const auto& [qid, list] : run.lists) {
        const auto depth = std::min(k, list.size());
        for (std::size_t i = 0; i < depth; ++i) {
            if (relevant(qid, list[i])) {
                ++hits;
                break;
            }
        }
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(run.lists.size());
}

template <typename Map>
void require_gold(const RetrievalRun& run, const Map& gold)
{
    std::vector<std::string> missing;
    for (const auto& [qid, list] : run.lists) {
        if (!gold.contains(qid)) {
            missing.push_back(qid);
        }
    }
    if (!missing.empty()) {
        std::string message = "no gold passage for question(s):";
        for (const auto& q : missing) {
            message += " " + q;
        }
        throw DataError(message);
    }
}

}  // namespace

double precision_at_k(const RetrievalRun& run, const std::map<std::string, std::string, std::less<>>& gold,
                      std::size_t k)
{
    require_gold(run, gold);
    return precision_impl(run, k, [&](const std::string& qid, const RetrievalHit& hit) {
        return gold.find(qid)->second == hit.passage_id;
    });
}

double precision_at_k_containment(const RetrievalRun& run,
                                  const std::map<std::string, std::vector<std::string>, std::less<>>& gold_answers,
                                  const PassageText& passage_text, std::size_t k)
{
    require_gold(run, gold_answers);
    return precision_impl(run, k, [&](const std::string& qid, const RetrievalHit& hit) {
        const auto text = normalize_answer(passage_text(hit.passage_id));
        const auto& answers = gold_answers.find(qid)->second;
        return std::any_of(answers.begin(), answers.end(), [&](const std::string& a) {
            const auto norm = normalize_answer(a);
            return !norm.empty() && text.find(norm) != std::string::npos;
        });
    });
}

RetrievalRun make_run(const std::map<std::string, std::vector<RetrievalHit>, std::less<>>& lists, std::size_t k_max)
{
    RetrievalRun run;
    run.k_max = k_max;
    for (const auto& [qid, hits] : lists) {
        if (hits.size() > k_max) {
            throw DataError("retrieval list for " + qid + " is longer than k_max");
        }
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (hits[i].rank != i + 1) {
                throw DataError("retrieval list for " + qid + " has non-contiguous ranks");
            }
        }
        run.lists.emplace(qid, hits);
    }
    return run;
}

// --- end to end ---------------------------------------------------------------

EvalReport evaluate_e2e(const std::map<std::string, std::string, std::less<>>& predictions,
                        std::span<const QARecord> records)
{
    EvalReport report;
    std::map<QuestionType, std::pair<double, double>> sums;  // em, f1 in [0, 1]
    double em_total = 0.0;
    double f1_total = 0.0;
    for (const auto& record : records) {
        std::vector<std::string> golds;
        golds.reserve(record.gold_answers.size());
        for (const auto& a : record.gold_answers) {
            golds.push_back(a.text);
        }
        double em = 0.0;
        double f1 = 0.0;
        const auto it = predictions.find(record.id);
        if (it == predictions.end()) {
            report.missing_predictions.push_back(record.id);
        } else if (!golds.empty()) {
            em = exact_match(it->second, golds);
            f1 = token_f1(it->second, golds);
        }
        auto& bucket = report.per_type[record.question_type];
        ++bucket.count;
        sums[record.question_type].first += em;
        sums[record.question_type].second += f1;
        em_total += em;
        f1_total += f1;
    }
    for (auto& [type, bucket] : report.per_type) {
        const auto n = static_cast<double>(bucket.count);
        bucket.em = 100.0 * sums[type].first / n;
        bucket.f1 = 100.0 * sums[type].second / n;
    }
    report.overall.count = records.size();
    if (!records.empty()) {
        report.overall.em = 100.0 * em_total / static_cast<double>(records.size());
        report.overall.f1 = 100.0 * f1_total / static_cast<double>(records.size());
    }
    return report;
}

std::map<std::size_t, double> answer_position_histogram(std::span<const std::size_t> source_ranks)
{
    std::map<std::size_t, std::size_t> counts;
    std::size_t answered = 0;
    for (const auto rank : source_ranks) {
        if (rank == 0) {
            continue;
        }
        ++counts[rank];
        ++answered;
    }
    std::map<std::size_t, double> out;
    for (const auto& [rank, n] : counts) {
        out[rank] = 100.0 * static_cast<double>(n) / static_cast<double>(answered);
    }
    return out;
}

std::map<QuestionType, double> avg_answer_length_by_type(
    const std::map<std::string, std::string, std::less<>>& predictions, std::span<const QARecord> records,
    const Tokenizer& tokenizer)
{
    std::map<QuestionType, std::pair<std::size_t, std::size_t>> sums;  // tokens, questions
    for (const auto& record : records) {
        std::size_t length = 0;
        if (const auto it = predictions.find(record.id); it != predictions.end()) {
            length = tokenizer(it->second).size();
        }
        auto& s = sums[record.question_type];
        s.first += length;
        ++s.second;
    }
    std::map<QuestionType, double> out;
    for (const auto& [type, s] : sums) {
        out[type] = static_cast<double>(s.first) / static_cast<double>(s.second);
    }
    return out;
}

std::map<QuestionType, double> avg_answer_length_by_type(
    const std::map<std::string, std::string, std::less<>>& predictions, std::span<const QARecord> records)
{
    return avg_answer_length_by_type(predictions, records, [](std::string_view t) { return tokenize(t); });
}

// --- k sweep ---------------------------------------------------------------

std::vector<SweepRow> k_sweep(std::span<const QARecord> records, const CandidateSource& source,
                              std::span<const std::size_t> ks, const FusionConfig& fusion,
                              const std::function<void(const SweepRow&)>& on_row)
{
    if (ks.empty()) {
        throw UsageError("k_sweep: empty k list");
    }
    if (std::any_of(ks.begin(), ks.end(), [](std::size_t k) { return k == 0; })) {
        throw UsageError("k_sweep: every k must be at least 1");
    }
    const auto k_max = *std::max_element(ks.begin(), ks.end());

    std::vector<std::optional<std::vector<SpanCandidate>>> cache(records.size());
    std::vector<SweepRow> rows;
    for (const auto k : ks) {
        SweepRow row;
        row.k = k;
        std::map<std::string, std::string, std::less<>> predictions;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!cache[i]) {
                cache[i] = source(records[i], k_max);
            }
            std::vector<SpanCandidate> within;
            for (const auto& c : *cache[i]) {
                if (c.retriever_rank >= 1 && c.retriever_rank <= k) {
                    within.push_back(c);
                }
            }
            Prediction prediction{records[i].id, "", "", 0, 0.0};
            if (!within.empty()) {
                const auto selected = select_answer(within, fusion);
                prediction.answer = selected.answer;
                prediction.passage_id = selected.passage_id;
                prediction.source_rank = selected.rank_of_source_passage;
                prediction.score = selected.score;
            }
            predictions[records[i].id] = prediction.answer;
            row.predictions.push_back(std::move(prediction));
        }
        const auto report = evaluate_e2e(predictions, records);
        row.em = report.overall.em;
        row.f1 = report.overall.f1;
        if (on_row) {
            on_row(row);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- output ----------------------------------------------------------------

std::string report_to_json(const EvalReport& report)
{
    nlohmann::ordered_json j;
    j["overall"] = {{"em", report.overall.em}, {"f1", report.overall.f1}, {"count", report.overall.count}};
    nlohmann::ordered_json per_type = nlohmann::ordered_json::object();
    for (const auto& [type, s] : report.per_type) {
        per_type[std::string(to_string(type))] = {{"em", s.em}, {"f1", s.f1}, {"count", s.count}};
    }
    j["per_type"] = std::move(per_type);
    nlohmann::ordered_json pk = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.p_at_k) {
        pk[std::to_string(k)] = v;
    }
    j["p_at_k"] = std::move(pk);
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [rank, v] : report.answer_position_hist) {
        hist[std::to_string(rank)] = v;
    }
    j["answer_position_hist"] = std::move(hist);
    nlohmann::ordered_json lengths = nlohmann::ordered_json::object();
    for (const auto& [type, v] : report.avg_answer_len_by_type) {
        lengths[std::string(to_string(type))] = v;
    }
    j["avg_answer_len_by_type"] = std::move(lengths);
    j["flags"] = {{"missing_predictions", report.missing_predictions}};
    return j.dump(2) + "\n";
}

namespace {

std::string fixed(double v, int digits = 2)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

}  // namespace

std::string report_to_csv(const EvalReport& report)
{
    std::ostringstream out;
    out << "type,count,em,f1,avg_answer_len\n";
    for (const auto& [type, s] : report.per_type) {
        const auto len = report.avg_answer_len_by_type.find(type);
        out << to_string(type) << ',' << s.count << ',' << fixed(s.em, 4) << ',' << fixed(s.f1, 4) << ','
            << (len == report.avg_answer_len_by_type.end() ? std::string() : fixed(len->second, 4)) << '\n';
    }
    out << "all," << report.overall.count << ',' << fixed(report.overall.em, 4) << ',' << fixed(report.overall.f1, 4)
        << ",\n";
    return out.str();
}

std::string positions_to_csv(const std::map<std::size_t, double>& histogram)
{
    std::ostringstream out;
    out << "rank,pct\n";
    for (const auto& [rank, pct] : histogram) {
        out << rank << ',' << fixed(pct, 4) << '\n';
    }
    return out.str();
}

std::string sweep_to_csv(std::span<const SweepRow> rows)
{
    std::ostringstream out;
    out << "k,em,f1\n";
    for (const auto& row : rows) {
        out << row.k << ',' << fixed(row.em, 4) << ',' << fixed(row.f1, 4) << '\n';
    }
    return out.str();
}

std::string format_report_table(const EvalReport& report)
{
    std::ostringstream out;
    out << std::left << std::setw(10) << "type" << std::right << std::setw(8) << "count" << std::setw(9) << "EM"
        << std::setw(9) << "F1" << '\n';
    for (const auto& [type, s] : report.per_type) {
        out << std::left << std::setw(10) << to_string(type) << std::right << std::setw(8) << s.count << std::setw(9)
            << fixed(s.em) << std::setw(9) << fixed(s.f1) << '\n';
    }
    out << std::left << std::setw(10) << "overall" << std::right << std::setw(8) << report.overall.count
        << std::setw(9) << fixed(report.overall.em) << std::setw(9) << fixed(report.overall.f1) << '\n';
    if (!report.p_at_k.empty()) {
        out << '\n';
        for (const auto& [k, v] : report.p_at_k) {
            out << "P@" << std::left << std::setw(4) << k << std::right << std::setw(8) << fixed(v) << '\n';
        }
    }
    return out.str();
}

}  // namespace odqa
