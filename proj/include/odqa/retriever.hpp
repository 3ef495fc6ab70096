#pragma once

#include "odqa/corpus_store.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace odqa {

namespace io {
class BinaryReader;
class BinaryWriter;
}  // namespace io

struct RetrievalHit {
    std::string passage_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based

    friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

/// A built passage index answering bag-of-words questions. Implementations
/// are immutable after construction and safe for concurrent queries.
class Retriever {
  public:
    virtual ~Retriever() = default;

    /// Top-k passages with score > 0, sorted by score descending then passage
    /// id ascending; ranks 1..n. Throws UsageError for k == 0.
    [[nodiscard]] virtual std::vector<RetrievalHit> query(std::string_view question, std::size_t k) const = 0;

    /// Weight of a plain normalized token (no segmentation, unigram) under
    /// this index's idf; 0 for unseen tokens.
    [[nodiscard]] virtual double token_idf(std::string_view token) const = 0;

    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
};

/// Softmax over the raw scores of a retrieved list. Order is preserved and
/// the output sums to 1.
[[nodiscard]] std::vector<RetrievalHit> normalize_scores(std::vector<RetrievalHit> hits);

/// Document frequency of plain tokens (tokenize()), kept beside every index
/// so the lexical reader can weight passage tokens whatever the index's
/// segmentation.
class PlainTokenStats {
  public:
    PlainTokenStats() = default;
    explicit PlainTokenStats(std::span<const Passage> passages);

    [[nodiscard]] std::uint32_t doc_freq(std::string_view token) const;
    [[nodiscard]] std::size_t n_docs() const noexcept { return n_docs_; }

    void write(io::BinaryWriter& out) const;
    [[nodiscard]] static PlainTokenStats read(io::BinaryReader& in);

  private:
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::uint32_t> df_;
};

namespace detail {

/// Passages ordered by id; throws UsageError on an empty list and DataError
/// on a duplicate id.
[[nodiscard]] std::vector<const Passage*> sorted_by_id(std::span<const Passage> passages);

/// Ranks (doc index, score) pairs. Doc indices follow ascending passage id,
/// so ties on score go to the smaller index.
[[nodiscard]] std::vector<RetrievalHit> top_k(std::vector<std::pair<std::uint32_t, double>> scored,
                                              std::span<const std::string> doc_ids, std::size_t k);

void require_positive_k(std::size_t k);

}  // namespace detail

}  // namespace odqa
