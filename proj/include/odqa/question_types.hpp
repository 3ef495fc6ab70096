#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>

namespace odqa {

enum class QuestionType { What, Who, When, Where, Why, How, HowMany, Others };

inline constexpr std::array kAllQuestionTypes = {
    QuestionType::What, QuestionType::Who, QuestionType::When,    QuestionType::Where,
    QuestionType::Why,  QuestionType::How, QuestionType::HowMany, QuestionType::Others,
};

[[nodiscard]] std::string_view to_string(QuestionType type) noexcept;
[[nodiscard]] QuestionType question_type_from_string(std::string_view name);

/// Question-word phrases mapped to a question type. Phrases are matched on
/// whole normalized tokens; the phrase with the most tokens wins, ties go to
/// the earliest occurrence, no match gives Others.
class QuestionTypeLexicon {
  public:
    /// Only the built-in phrases (là gì, điều gì, làm gì, cái gì, như thế nào).
    [[nodiscard]] static QuestionTypeLexicon defaults();

    /// Defaults plus the phrases from a "phrase<TAB>Type" file.
    [[nodiscard]] static QuestionTypeLexicon from_file(const std::string& path);

    /// Throws UsageError on an empty phrase or a phrase already bound to a
    /// different type.
    void add(std::string_view phrase, QuestionType type);

    [[nodiscard]] QuestionType classify(std::string_view question) const;

    [[nodiscard]] std::size_t size() const noexcept { return phrases_.size(); }

  private:
    std::unordered_map<std::string, QuestionType> phrases_;  // normalized, space-joined
    std::size_t max_tokens_ = 0;
};

[[nodiscard]] QuestionType classify_question(std::string_view question, const QuestionTypeLexicon& lexicon);

}  // namespace odqa
