#include "odqa/question_types.hpp"

#include "odqa/error.hpp"
#include "odqa/text_analysis.hpp"

#include <fstream>

namespace odqa {

std::string_view to_string(QuestionType type) noexcept
{
    switch (type) {
    case QuestionType::What:
        return "What";
    case QuestionType::Who:
        return "Who";
    case QuestionType::When:
        return "When";
    case QuestionType::Where:
        return "Where";
    case QuestionType::Why:
        return "Why";
    case QuestionType::How:
        return "How";
    case QuestionType::HowMany:
        return "HowMany";
    case QuestionType::Others:
        return "Others";
    }
    return "Others";
}

QuestionType question_type_from_string(std::string_view name)
{
    for (const auto type : kAllQuestionTypes) {
        if (to_string(type) == name) {
            return type;
        }
    }
    throw UsageError("unknown question type: " + std::string(name));
}

QuestionTypeLexicon QuestionTypeLexicon::defaults()
{
    QuestionTypeLexicon lexicon;
    for (const char* phrase : {"là gì", "điều gì", "làm gì", "cái gì"}) {
        lexicon.add(phrase, QuestionType::What);
    }
    lexicon.add("như thế nào", QuestionType::How);
    return lexicon;
}

QuestionTypeLexicon QuestionTypeLexicon::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open question-word lexicon " + path);
    }
    auto lexicon = defaults();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected phrase<TAB>type");
        }
        lexicon.add(std::string_view(line).substr(0, tab), question_type_from_string(line.substr(tab + 1)));
    }
    return lexicon;
}

void QuestionTypeLexicon::add(std::string_view phrase, QuestionType type)
{
    const auto tokens = tokenize(phrase);
    if (tokens.empty()) {
        throw UsageError("question-word phrase is empty after normalization: '" + std::string(phrase) + "'");
    }
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        key += (i ? " " : "") + tokens[i];
    }
    const auto [it, inserted] = phrases_.emplace(key, type);
    if (!inserted && it->second != type) {
        throw UsageError("question-word phrase '" + key + "' bound to both " + std::string(to_string(it->second)) +
                         " and " + std::string(to_string(type)));
    }
    max_tokens_ = std::max(max_tokens_, tokens.size());
}

QuestionType QuestionTypeLexicon::classify(std::string_view question) const
{
    const auto tokens = tokenize(question);
    std::size_t best_len = 0;
    QuestionType best = QuestionType::Others;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string key;
        for (std::size_t len = 1; len <= max_tokens_ && i + len <= tokens.size(); ++len) {
            if (len > 1) {
                key.push_back(' ');
            }
            key += tokens[i + len - 1];
            // strictly longer only, so an earlier match of equal length stays
            if (len > best_len) {
                if (const auto it = phrases_.find(key); it != phrases_.end()) {
                    best_len = len;
                    best = it->second;
                }
            }
        }
    }
    return best;
}

QuestionType classify_question(std::string_view question, const QuestionTypeLexicon& lexicon)
{
    return lexicon.classify(question);
}

}  // namespace odqa
