#include "odqa/bm25.hpp"

#include "odqa/binary_io.hpp"
#include "odqa/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace odqa {

namespace {

constexpr std::string_view kMagic = "ODQA-BM25";
constexpr std::uint32_t kFormatVersion = 1;

void require_params(double k1, double b)
{
    if (!(k1 > 0.0) || !std::isfinite(k1)) {
        throw UsageError("BM25 k1 must be positive");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw UsageError("BM25 b must lie in [0, 1]");
    }
}

}  // namespace

double bm25_idf(std::size_t n_docs, std::size_t doc_freq) noexcept
{
    const double n = static_cast<double>(n_docs);
    const double df = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_term_score(double idf, double tf, double doc_len, double avg_doc_len, double k1, double b) noexcept
{
    return idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * doc_len / avg_doc_len));
}

AnalyzerConfig default_bm25_analyzer_config()
{
    AnalyzerConfig config;
    config.segmenter = SegmenterKind::builtin_dictionary;
    config.ngram_max = 1;
    return config;
}

InvertedIndex build_bm25_index(std::span<const Passage> passages, const Analyzer& analyzer, double k1, double b)
{
    require_params(k1, b);
    const auto sorted = detail::sorted_by_id(passages);

    InvertedIndex index;
    index.analyzer_ = analyzer;
    index.k1_ = k1;
    index.b_ = b;
    index.doc_ids_.reserve(sorted.size());
    index.doc_len_.reserve(sorted.size());

    std::uint64_t total_len = 0;
    for (std::uint32_t doc = 0; doc < sorted.size(); ++doc) {
        index.doc_ids_.push_back(sorted[doc]->id);
        const auto terms = analyzer.terms(sorted[doc]->text);
        index.doc_len_.push_back(static_cast<std::uint32_t>(terms.size()));
        total_len += terms.size();
        std::map<std::string_view, std::uint32_t> tf;
        for (const auto& t : terms) {
            ++tf[t];
        }
        // docs are visited in ascending order, so every list stays sorted
        for (const auto& [term, count] : tf) {
            index.postings_[std::string(term)].push_back({doc, count});
        }
    }
    index.avg_doc_len_ = static_cast<double>(total_len) / static_cast<double>(sorted.size());
    index.plain_ = PlainTokenStats(passages);
    return index;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const
{
    const auto it = postings_.find(std::string(term));
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

std::vector<RetrievalHit> InvertedIndex::query(std::string_view question, std::size_t k) const
{
    detail::require_positive_k(k);

    std::vector<std::string> order;
    std::unordered_map<std::string, std::uint32_t> qtf;
    for (auto& term : analyzer_.terms(question)) {
        if (qtf[term]++ == 0) {
            order.push_back(std::move(term));
        }
    }

    const auto n = doc_ids_.size();
    std::vector<double> acc(n, 0.0);
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> touched;
    for (const auto& term : order) {
        const auto list = postings(term);
        if (list.empty()) {
            continue;
        }
        const double idf = bm25_idf(n, list.size());
        const double weight = static_cast<double>(qtf[term]);
        for (const auto& p : list) {
            if (!seen[p.doc]) {
                seen[p.doc] = 1;
                touched.push_back(p.doc);
            }
            acc[p.doc] += weight * bm25_term_score(idf, static_cast<double>(p.tf),
                                                   static_cast<double>(doc_len_[p.doc]), avg_doc_len_, k1_, b_);
        }
    }
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(touched.size());
    for (const auto doc : touched) {
        scored.emplace_back(doc, acc[doc]);
    }
    return detail::top_k(std::move(scored), doc_ids_, k);
}

double InvertedIndex::token_idf(std::string_view token) const
{
    const auto df = plain_.doc_freq(token);
    return df == 0 ? 0.0 : bm25_idf(plain_.n_docs(), df);
}

std::string InvertedIndex::serialize() const
{
    std::ostringstream out(std::ios::binary);
    io::BinaryWriter w(out);
    w.raw(kMagic);
    w.u32(kFormatVersion);
    w.str(to_json_string(analyzer_.config()));
    w.f64(k1_);
    w.f64(b_);
    w.u64(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        w.str(doc_ids_[i]);
        w.u32(doc_len_[i]);
    }
    const std::map<std::string_view, const std::vector<Posting>*> ordered = [&] {
        std::map<std::string_view, const std::vector<Posting>*> m;
        for (const auto& [term, list] : postings_) {
            m.emplace(term, &list);
        }
        return m;
    }();
    w.u64(ordered.size());
    for (const auto& [term, list] : ordered) {
        w.str(term);
        w.u64(list->size());
        for (const auto& p : *list) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    plain_.write(w);
    return std::move(out).str();
}

InvertedIndex InvertedIndex::deserialize(const std::string& bytes, const std::string& what)
{
    std::istringstream in(bytes, std::ios::binary);
    io::BinaryReader r(in, what);
    r.expect_magic(kMagic);
    if (const auto version = r.u32(); version != kFormatVersion) {
        throw DataError(what + ": unsupported format version " + std::to_string(version));
    }
    InvertedIndex index;
    index.analyzer_ = Analyzer(analyzer_config_from_json(r.str()));
    index.k1_ = r.f64();
    index.b_ = r.f64();
    require_params(index.k1_, index.b_);
    const auto n_docs = r.u64();
    std::uint64_t total_len = 0;
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(r.str());
        index.doc_len_.push_back(r.u32());
        total_len += index.doc_len_.back();
    }
    if (n_docs == 0) {
        throw DataError(what + ": index holds no documents");
    }
    index.avg_doc_len_ = static_cast<double>(total_len) / static_cast<double>(n_docs);
    const auto n_terms = r.u64();
    index.postings_.reserve(n_terms);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        auto term = r.str();
        const auto n = r.u64();
        std::vector<Posting> list;
        list.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto doc = r.u32();
            if (doc >= n_docs) {
                throw DataError(what + ": posting refers to document " + std::to_string(doc));
            }
            list.push_back({doc, r.u32()});
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    index.plain_ = PlainTokenStats::read(r);
    return index;
}

void InvertedIndex::save(const std::filesystem::path& file) const
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError("no BM25 index at " + file.string() + "; run `odqa index --retriever bm25` first");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str(), file.string());
}

std::vector<RetrievalHit> bm25_query(const InvertedIndex& index, std::string_view question, std::size_t k)
{
    return index.query(question, k);
}

}  // namespace odqa
