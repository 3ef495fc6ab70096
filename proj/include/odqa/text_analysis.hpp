#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace odqa {

class ExternalSegmenter;

/// Joins the syllables of one segmented word ("học_sinh").
inline constexpr char kWordJoiner = '_';
/// Joins the two halves of a bigram term. Never appears inside a token.
inline constexpr char kBigramSeparator = ' ';

/// Text normalization shared by metrics and retrieval:
/// NFC, optional lowercase, optional removal of every code point in Unicode
/// general categories P* and S*, whitespace runs collapsed to one space, trim.
[[nodiscard]] std::string normalize_text(std::string_view text, bool lowercase, bool strip_punctuation);

/// normalize_text with lowercase and punctuation stripping on. No article
/// removal.
[[nodiscard]] std::string normalize_answer(std::string_view text);

/// Whitespace split of normalize_answer(text).
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

[[nodiscard]] bool is_punctuation_or_symbol(char32_t c) noexcept;

struct OffsetToken {
    std::string text;   // normalized form
    std::size_t begin;  // code point offsets into the original text, [begin, end)
    std::size_t end;
};

/// Tokens of the original (unnormalized) text with their code point spans.
/// Leading and trailing punctuation is trimmed from each span; tokens that
/// normalize to nothing are dropped.
[[nodiscard]] std::vector<OffsetToken> tokenize_with_offsets(std::string_view text, bool lowercase = true,
                                                             bool strip_punctuation = true);

/// n = 1: the tokens. n = 2: the tokens followed by every adjacent pair
/// joined with kBigramSeparator.
[[nodiscard]] std::vector<std::string> ngrams(std::span<const std::string> tokens, int n);

enum class SegmenterKind { none, builtin_dictionary, external_command };

[[nodiscard]] std::string_view to_string(SegmenterKind kind) noexcept;
[[nodiscard]] SegmenterKind segmenter_kind_from_string(std::string_view name);

struct AnalyzerConfig {
    bool lowercase = true;
    bool strip_punctuation = true;
    SegmenterKind segmenter = SegmenterKind::none;
    int ngram_max = 1;
    /// Multi-syllable words for builtin_dictionary, space separated.
    std::vector<std::string> compounds;
    /// Shell command for external_command.
    std::string command;
    std::chrono::milliseconds timeout{10'000};
};

[[nodiscard]] std::string to_json_string(const AnalyzerConfig& config);
[[nodiscard]] AnalyzerConfig analyzer_config_from_json(std::string_view json);

/// Greedy longest-match compound joiner.
class CompoundLexicon {
  public:
    CompoundLexicon() = default;
    CompoundLexicon(std::span<const std::string> phrases, bool lowercase, bool strip_punctuation);

    [[nodiscard]] std::vector<std::string> join(std::span<const std::string> tokens) const;
    [[nodiscard]] bool empty() const noexcept { return phrases_.empty(); }

  private:
    std::unordered_set<std::string> phrases_;  // tokens joined by ' '
    std::unordered_map<std::string, std::size_t> max_len_by_first_;
};

/// Immutable analysis configuration plus the runtime state it needs (the
/// compiled compound lexicon, the external segmenter process). Copies share
/// that state. External segmentation keeps one child process alive and
/// serializes calls to it.
class Analyzer {
  public:
    explicit Analyzer(AnalyzerConfig config = {});

    [[nodiscard]] const AnalyzerConfig& config() const noexcept { return config_; }

    /// Normalized words after segmentation.
    [[nodiscard]] std::vector<std::string> words(std::string_view text) const;
    /// ngrams(words(text), ngram_max).
    [[nodiscard]] std::vector<std::string> terms(std::string_view text) const;

  private:
    AnalyzerConfig config_;
    std::shared_ptr<const CompoundLexicon> lexicon_;
    std::shared_ptr<ExternalSegmenter> external_;
};

[[nodiscard]] std::vector<std::string> segment_words(std::string_view text, const Analyzer& analyzer);

/// Compounds file: one phrase per line, '#' starts a comment.
[[nodiscard]] std::vector<std::string> load_compound_file(const std::string& path);

}  // namespace odqa
