#include "odqa/retriever.hpp"

#include "odqa/binary_io.hpp"
#include "odqa/error.hpp"
#include "odqa/text_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace odqa {

std::vector<RetrievalHit> normalize_scores(std::vector<RetrievalHit> hits)
{
    if (hits.empty()) {
        return hits;
    }
    const auto max_it = std::max_element(hits.begin(), hits.end(),
                                         [](const auto& a, const auto& b) { return a.score < b.score; });
    const double max_score = max_it->score;
    double sum = 0.0;
    for (auto& h : hits) {
        h.score = std::exp(h.score - max_score);
        sum += h.score;
    }
    for (auto& h : hits) {
        h.score /= sum;
    }
    return hits;
}

PlainTokenStats::PlainTokenStats(std::span<const Passage> passages) : n_docs_(passages.size())
{
    for (const auto& p : passages) {
        const auto tokens = tokenize(p.text);
        const std::unordered_set<std::string> distinct(tokens.begin(), tokens.end());
        for (const auto& t : distinct) {
            ++df_[t];
        }
    }
}

std::uint32_t PlainTokenStats::doc_freq(std::string_view token) const
{
    const auto it = df_.find(std::string(token));
    return it == df_.end() ? 0 : it->second;
}

void PlainTokenStats::write(io::BinaryWriter& out) const
{
    const std::map<std::string, std::uint32_t> ordered(df_.begin(), df_.end());
    out.u64(n_docs_);
    out.u64(ordered.size());
    for (const auto& [token, df] : ordered) {
        out.str(token);
        out.u32(df);
    }
}

PlainTokenStats PlainTokenStats::read(io::BinaryReader& in)
{
    PlainTokenStats stats;
    stats.n_docs_ = in.u64();
    const auto n = in.u64();
    stats.df_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto token = in.str();
        stats.df_.emplace(std::move(token), in.u32());
    }
    return stats;
}

namespace detail {

std::vector<const Passage*> sorted_by_id(std::span<const Passage> passages)
{
    if (passages.empty()) {
        throw UsageError("cannot build an index over an empty passage list");
    }
    std::vector<const Passage*> out;
    out.reserve(passages.size());
    for (const auto& p : passages) {
        out.push_back(&p);
    }
    std::sort(out.begin(), out.end(), [](const Passage* a, const Passage* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i - 1]->id == out[i]->id) {
            throw DataError("duplicate passage id " + out[i]->id);
        }
    }
    return out;
}

std::vector<RetrievalHit> top_k(std::vector<std::pair<std::uint32_t, double>> scored,
                                std::span<const std::string> doc_ids, std::size_t k)
{
    std::erase_if(scored, [](const auto& s) { return !(s.second > 0.0); });
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    };
    const auto n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
    std::vector<RetrievalHit> hits;
    hits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        hits.push_back({doc_ids[scored[i].first], scored[i].second, i + 1});
    }
    return hits;
}

void require_positive_k(std::size_t k)
{
    if (k == 0) {
        throw UsageError("k must be at least 1");
    }
}

}  // namespace detail

}  // namespace odqa
