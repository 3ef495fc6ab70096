#include "odqa/tfidf.hpp"

#include "odqa/binary_io.hpp"
#include "odqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace odqa {

namespace {

constexpr std::string_view kMagic = "ODQA-TFIDF";
constexpr std::uint32_t kFormatVersion = 1;

void require_bins(std::size_t num_bins)
{
    if (num_bins < 2 || num_bins > (std::size_t{1} << 32) || (num_bins & (num_bins - 1)) != 0) {
        throw UsageError("num_bins must be a power of two in [2, 2^32], got " + std::to_string(num_bins));
    }
}

}  // namespace

std::uint64_t stable_hash(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint32_t term_bin(std::string_view term, std::size_t num_bins) noexcept
{
    return static_cast<std::uint32_t>(stable_hash(term) & (num_bins - 1));
}

double tfidf_idf(std::size_t n_docs, std::size_t doc_freq) noexcept
{
    const double n = static_cast<double>(n_docs);
    const double df = static_cast<double>(doc_freq);
    return std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
}

double IdfSnapshot::idf(std::uint32_t bin) const noexcept
{
    const auto it = doc_freq.find(bin);
    return tfidf_idf(n_docs, it == doc_freq.end() ? 0 : it->second);
}

std::vector<std::pair<std::string, std::string>> find_bin_collisions(std::span<const std::string> terms,
                                                                     std::size_t num_bins)
{
    std::unordered_map<std::uint32_t, std::string> owner;
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& term : terms) {
        const auto [it, inserted] = owner.emplace(term_bin(term, num_bins), term);
        if (!inserted && it->second != term) {
            out.emplace_back(it->second, term);
        }
    }
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> hashed_term_counts(const Analyzer& analyzer, std::string_view text,
                                                                       std::size_t num_bins)
{
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& term : analyzer.terms(text)) {
        ++counts[term_bin(term, num_bins)];
    }
    return {counts.begin(), counts.end()};
}

SparseVector weigh_counts(std::span<const std::pair<std::uint32_t, std::uint32_t>> counts, const IdfSnapshot& idf)
{
    SparseVector out;
    out.reserve(counts.size());
    for (const auto& [bin, tf] : counts) {
        const double w = std::log1p(static_cast<double>(tf)) * idf.idf(bin);
        if (w > 0.0) {
            out.push_back({bin, w});
        }
    }
    return out;
}

TfidfIndex build_tfidf_index(std::span<const Passage> passages, const Analyzer& analyzer, std::size_t num_bins)
{
    require_bins(num_bins);
    const auto sorted = detail::sorted_by_id(passages);

    TfidfIndex index;
    index.num_bins_ = num_bins;
    if (analyzer.config().ngram_max == 2) {
        index.analyzer_ = analyzer;
    } else {
        auto config = analyzer.config();
        config.ngram_max = 2;
        index.analyzer_ = Analyzer(config);
    }

    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> counts;
    counts.reserve(sorted.size());
    index.idf_.n_docs = sorted.size();
    for (const auto* p : sorted) {
        index.doc_ids_.push_back(p->id);
        counts.push_back(hashed_term_counts(index.analyzer_, p->text, num_bins));
        for (const auto& [bin, tf] : counts.back()) {
            ++index.idf_.doc_freq[bin];
        }
    }
    index.doc_vectors_.reserve(counts.size());
    for (const auto& c : counts) {
        index.doc_vectors_.push_back(weigh_counts(c, index.idf_));
    }

    index.plain_ = PlainTokenStats(passages);
    index.build_postings();
    return index;
}

void TfidfIndex::build_postings()
{
    postings_.clear();
    for (std::uint32_t doc = 0; doc < doc_vectors_.size(); ++doc) {
        for (const auto& e : doc_vectors_[doc]) {
            postings_[e.bin].emplace_back(doc, e.weight);
        }
    }
}

std::uint32_t TfidfIndex::doc_freq(std::uint32_t bin) const noexcept
{
    const auto it = idf_.doc_freq.find(bin);
    return it == idf_.doc_freq.end() ? 0 : it->second;
}

std::vector<SparseEntry> TfidfIndex::query_vector(std::string_view question) const
{
    std::vector<std::uint32_t> order;
    std::unordered_map<std::uint32_t, std::uint32_t> counts;
    for (const auto& term : analyzer_.terms(question)) {
        const auto bin = term_bin(term, num_bins_);
        if (counts[bin]++ == 0) {
            order.push_back(bin);
        }
    }
    std::vector<SparseEntry> out;
    out.reserve(order.size());
    for (const auto bin : order) {
        const double w = std::log1p(static_cast<double>(counts[bin])) * idf_.idf(bin);
        if (w > 0.0) {
            out.push_back({bin, w});
        }
    }
    return out;
}

std::vector<RetrievalHit> TfidfIndex::query(std::string_view question, std::size_t k) const
{
    detail::require_positive_k(k);
    std::vector<double> acc(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& q : query_vector(question)) {
        const auto it = postings_.find(q.bin);
        if (it == postings_.end()) {
            continue;
        }
        for (const auto& [doc, w] : it->second) {
            if (acc[doc] == 0.0) {
                touched.push_back(doc);
            }
            acc[doc] += q.weight * w;
        }
    }
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(touched.size());
    for (const auto doc : touched) {
        scored.emplace_back(doc, acc[doc]);
    }
    return detail::top_k(std::move(scored), doc_ids_, k);
}

double TfidfIndex::token_idf(std::string_view token) const
{
    return tfidf_idf(plain_.n_docs(), plain_.doc_freq(token));
}

std::string TfidfIndex::serialize() const
{
    std::ostringstream out(std::ios::binary);
    io::BinaryWriter w(out);
    w.raw(kMagic);
    w.u32(kFormatVersion);
    w.str(to_json_string(analyzer_.config()));
    w.u64(num_bins_);
    w.u64(doc_ids_.size());
    for (const auto& id : doc_ids_) {
        w.str(id);
    }
    const std::map<std::uint32_t, std::uint32_t> df(idf_.doc_freq.begin(), idf_.doc_freq.end());
    w.u64(df.size());
    for (const auto& [bin, count] : df) {
        w.u32(bin);
        w.u32(count);
    }
    for (const auto& vec : doc_vectors_) {
        w.u64(vec.size());
        for (const auto& e : vec) {
            w.u32(e.bin);
            w.f64(e.weight);
        }
    }
    plain_.write(w);
    return std::move(out).str();
}

TfidfIndex TfidfIndex::deserialize(const std::string& bytes, const std::string& what)
{
    std::istringstream in(bytes, std::ios::binary);
    io::BinaryReader r(in, what);
    r.expect_magic(kMagic);
    if (const auto version = r.u32(); version != kFormatVersion) {
        throw DataError(what + ": unsupported format version " + std::to_string(version));
    }
    TfidfIndex index;
    index.analyzer_ = Analyzer(analyzer_config_from_json(r.str()));
    index.num_bins_ = r.u64();
    require_bins(index.num_bins_);
    const auto n_docs = r.u64();
    index.doc_ids_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(r.str());
    }
    index.idf_.n_docs = n_docs;
    const auto n_df = r.u64();
    for (std::uint64_t i = 0; i < n_df; ++i) {
        const auto bin = r.u32();
        index.idf_.doc_freq[bin] = r.u32();
    }
    index.doc_vectors_.resize(n_docs);
    for (auto& vec : index.doc_vectors_) {
        const auto n = r.u64();
        vec.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto bin = r.u32();
            vec.push_back({bin, r.f64()});
        }
    }
    index.plain_ = PlainTokenStats::read(r);
    index.build_postings();
    return index;
}

void TfidfIndex::save(const std::filesystem::path& file) const
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

TfidfIndex TfidfIndex::load(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError("no TF-IDF index at " + file.string() + "; run `odqa index --retriever tfidf` first");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str(), file.string());
}

std::vector<RetrievalHit> tfidf_query(const TfidfIndex& index, std::string_view question, std::size_t k)
{
    return index.query(question, k);
}

}  // namespace odqa
