#pragma once

#include "odqa/question_types.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

enum class Split { train, dev, test, external };

[[nodiscard]] std::string_view to_string(Split split) noexcept;
/// Throws UsageError("unknown split ...").
[[nodiscard]] Split split_from_string(std::string_view name);

struct Passage {
    std::string id;  // "<article title>#<paragraph index>"
    std::string article_title;
    std::string text;
    Split split = Split::external;
};

struct GoldAnswer {
    std::string text;
    std::size_t answer_start = 0;  // code points into the gold passage
};

struct QARecord {
    std::string id;
    std::string question;
    std::vector<GoldAnswer> gold_answers;
    std::string gold_passage_id;
    Split split = Split::external;
    QuestionType question_type = QuestionType::Others;
};

struct CorpusStats {
    std::size_t n_articles = 0;
    std::size_t n_passages = 0;
    std::size_t n_questions = 0;
    double avg_passage_len = 0.0;
    double avg_question_len = 0.0;
    double avg_answer_len = 0.0;
    std::size_t vocab_size = 0;
};

struct IngestResult {
    std::size_t n_passages = 0;
    std::size_t n_questions = 0;
    std::vector<std::string> warnings;
};

struct IngestProvenance {
    std::string source;
    Split split = Split::external;
    std::size_t n_passages = 0;
    std::size_t n_questions = 0;
    std::size_t n_warnings = 0;
};

inline constexpr int kStoreSchemaVersion = 1;

[[nodiscard]] std::string make_passage_id(std::string_view title, std::size_t paragraph_index);

/// In-memory passage and question store persisted as JSON Lines
/// (passages.jsonl, questions.jsonl, meta.json). Single writer during
/// ingest; read-only afterwards.
class CorpusStore {
  public:
    /// Throws DataError when the directory holds no store.
    [[nodiscard]] static CorpusStore load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;
    [[nodiscard]] static bool exists(const std::filesystem::path& dir);

    /// Replaces any passage with the same id.
    void put_passage(Passage passage);
    /// Throws DataError if the gold passage is missing or a gold answer is
    /// not found at its answer_start.
    void put_question(QARecord record);

    [[nodiscard]] const Passage* find_passage(std::string_view id) const;
    [[nodiscard]] const Passage& passage(std::string_view id) const;

    /// Ordered by id.
    [[nodiscard]] const std::map<std::string, Passage, std::less<>>& passages() const noexcept { return passages_; }
    [[nodiscard]] const std::map<std::string, QARecord, std::less<>>& questions() const noexcept { return questions_; }

    /// Every passage, ordered by id.
    [[nodiscard]] std::vector<Passage> passage_list() const;
    /// Questions of one split, ordered by id.
    [[nodiscard]] std::vector<QARecord> questions_in(Split split) const;

    void record_ingest(IngestProvenance provenance) { ingests_.push_back(std::move(provenance)); }
    [[nodiscard]] const std::vector<IngestProvenance>& ingests() const noexcept { return ingests_; }

  private:
    std::map<std::string, Passage, std::less<>> passages_;
    std::map<std::string, QARecord, std::less<>> questions_;
    std::vector<IngestProvenance> ingests_;
};

/// True when passage_text[answer_start, answer_start + len(answer)) == answer,
/// offsets in code points.
[[nodiscard]] bool answer_matches(std::string_view passage_text, const GoldAnswer& answer);

/// Reads SQuAD v1.1 JSON. Malformed JSON throws ParseError with the byte
/// offset; records whose answers do not line up are skipped with a warning.
IngestResult ingest_squad_json(std::istream& in, Split split, const QuestionTypeLexicon& lexicon, CorpusStore& store);
IngestResult ingest_squad_json(std::string_view json, Split split, const QuestionTypeLexicon& lexicon,
                               CorpusStore& store);

/// Re-emits the passages and questions of one split as SQuAD v1.1 JSON.
[[nodiscard]] std::string to_squad_json(const CorpusStore& store, Split split);

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// Table-1 style statistics for one split. Averages are token counts under
/// `tokenizer`; answers average over every gold answer; the vocabulary spans
/// passages, questions and answers. Throws DataError if the split is empty.
[[nodiscard]] CorpusStats corpus_stats(const CorpusStore& store, Split split, const Tokenizer& tokenizer);
[[nodiscard]] CorpusStats corpus_stats(const CorpusStore& store, Split split);

}  // namespace odqa
