#pragma once

#include "odqa/retriever.hpp"
#include "odqa/text_analysis.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace odqa {

inline constexpr std::size_t kDefaultTfidfBins = std::size_t{1} << 24;

/// FNV-1a, 64 bit. Stable across runs and platforms.
[[nodiscard]] std::uint64_t stable_hash(std::string_view text) noexcept;

[[nodiscard]] std::uint32_t term_bin(std::string_view term, std::size_t num_bins) noexcept;

/// log((N - df + 0.5) / (df + 0.5)), clamped at 0.
[[nodiscard]] double tfidf_idf(std::size_t n_docs, std::size_t doc_freq) noexcept;

struct SparseEntry {
    std::uint32_t bin;
    double weight;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sorted by bin, zero weights omitted.
using SparseVector = std::vector<SparseEntry>;

struct IdfSnapshot {
    std::size_t n_docs = 0;
    std::unordered_map<std::uint32_t, std::uint32_t> doc_freq;

    [[nodiscard]] double idf(std::uint32_t bin) const noexcept;
};

/// Distinct terms that share a bin, as (first term seen, other term) pairs.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> find_bin_collisions(std::span<const std::string> terms,
                                                                                   std::size_t num_bins);

/// Hashed term frequencies of one text, sorted by bin.
[[nodiscard]] std::vector<std::pair<std::uint32_t, std::uint32_t>> hashed_term_counts(const Analyzer& analyzer,
                                                                                     std::string_view text,
                                                                                     std::size_t num_bins);

/// log(1 + tf) * idf per bin under a given idf snapshot.
[[nodiscard]] SparseVector weigh_counts(std::span<const std::pair<std::uint32_t, std::uint32_t>> counts,
                                        const IdfSnapshot& idf);

/// Hashed unigram+bigram TF-IDF over passages, scored by sparse dot product
/// with the question vector.
class TfidfIndex final : public Retriever {
  public:
    [[nodiscard]] std::vector<RetrievalHit> query(std::string_view question, std::size_t k) const override;
    [[nodiscard]] double token_idf(std::string_view token) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "tfidf"; }

    [[nodiscard]] std::size_t num_bins() const noexcept { return num_bins_; }
    [[nodiscard]] std::size_t n_docs() const noexcept { return doc_ids_.size(); }
    [[nodiscard]] const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    [[nodiscard]] const SparseVector& doc_vector(std::size_t doc) const { return doc_vectors_.at(doc); }
    [[nodiscard]] std::uint32_t doc_freq(std::uint32_t bin) const noexcept;
    [[nodiscard]] const IdfSnapshot& idf_snapshot() const noexcept { return idf_; }
    [[nodiscard]] const Analyzer& analyzer() const noexcept { return analyzer_; }

    /// Query weights in first-occurrence order of the question's terms.
    [[nodiscard]] std::vector<SparseEntry> query_vector(std::string_view question) const;

    /// Versioned binary image of the index (the tfidf.idx format).
    [[nodiscard]] std::string serialize() const;
    void save(const std::filesystem::path& file) const;
    [[nodiscard]] static TfidfIndex load(const std::filesystem::path& file);
    [[nodiscard]] static TfidfIndex deserialize(const std::string& bytes, const std::string& what = "tfidf index");

    friend TfidfIndex build_tfidf_index(std::span<const Passage> passages, const Analyzer& analyzer,
                                        std::size_t num_bins);

  private:
    TfidfIndex() = default;
    void build_postings();

    std::size_t num_bins_ = kDefaultTfidfBins;
    Analyzer analyzer_;
    std::vector<std::string> doc_ids_;
    std::vector<SparseVector> doc_vectors_;
    IdfSnapshot idf_;
    PlainTokenStats plain_;
    // bin -> (doc, weight), doc ascending; derived from doc_vectors_
    std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, double>>> postings_;
};

/// Throws UsageError on an empty passage list or a num_bins that is not a
/// power of two in [2, 2^32]. The analyzer is forced to ngram_max = 2.
[[nodiscard]] TfidfIndex build_tfidf_index(std::span<const Passage> passages, const Analyzer& analyzer,
                                           std::size_t num_bins = kDefaultTfidfBins);

[[nodiscard]] std::vector<RetrievalHit> tfidf_query(const TfidfIndex& index, std::string_view question, std::size_t k);

}  // namespace odqa
