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
#include <vector>

namespace odqa {

/// Anserini defaults.
inline constexpr double kDefaultBm25K1 = 0.9;
inline constexpr double kDefaultBm25B = 0.4;

struct Posting {
    std::uint32_t doc;  // index into doc_ids(), ascending passage id
    std::uint32_t tf;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
[[nodiscard]] double bm25_idf(std::size_t n_docs, std::size_t doc_freq) noexcept;

/// idf * tf (k1 + 1) / (tf + k1 (1 - b + b |d| / avgdl)).
[[nodiscard]] double bm25_term_score(double idf, double tf, double doc_len, double avg_doc_len, double k1,
                                     double b) noexcept;

/// The default BM25 analyzer: unigrams, builtin dictionary segmentation.
[[nodiscard]] AnalyzerConfig default_bm25_analyzer_config();

/// Term -> postings inverted index scored with Okapi BM25. Question terms
/// are a bag: each distinct term contributes once per occurrence in the
/// question.
class InvertedIndex final : public Retriever {
  public:
    [[nodiscard]] std::vector<RetrievalHit> query(std::string_view question, std::size_t k) const override;
    [[nodiscard]] double token_idf(std::string_view token) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "bm25"; }

    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    [[nodiscard]] std::size_t n_terms() const noexcept { return postings_.size(); }
    [[nodiscard]] std::size_t n_docs() const noexcept { return doc_ids_.size(); }
    [[nodiscard]] const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    [[nodiscard]] std::uint32_t doc_len(std::size_t doc) const { return doc_len_.at(doc); }
    [[nodiscard]] double avg_doc_len() const noexcept { return avg_doc_len_; }
    [[nodiscard]] double k1() const noexcept { return k1_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] const Analyzer& analyzer() const noexcept { return analyzer_; }

    /// Versioned binary image of the index (the bm25.idx format).
    [[nodiscard]] std::string serialize() const;
    void save(const std::filesystem::path& file) const;
    [[nodiscard]] static InvertedIndex load(const std::filesystem::path& file);
    [[nodiscard]] static InvertedIndex deserialize(const std::string& bytes, const std::string& what = "bm25 index");

    friend InvertedIndex build_bm25_index(std::span<const Passage> passages, const Analyzer& analyzer, double k1,
                                          double b);

  private:
    InvertedIndex() = default;

    Analyzer analyzer_;
    double k1_ = kDefaultBm25K1;
    double b_ = kDefaultBm25B;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_len_;
    double avg_doc_len_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    PlainTokenStats plain_;
};

/// Throws UsageError on an empty corpus, k1 <= 0, or b outside [0, 1].
[[nodiscard]] InvertedIndex build_bm25_index(std::span<const Passage> passages, const Analyzer& analyzer,
                                             double k1 = kDefaultBm25K1, double b = kDefaultBm25B);

[[nodiscard]] std::vector<RetrievalHit> bm25_query(const InvertedIndex& index, std::string_view question, std::size_t k);

}  // namespace odqa
