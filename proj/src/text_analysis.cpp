#include "odqa/text_analysis.hpp"

#include "odqa/error.hpp"
#include "odqa/external_segmenter.hpp"

#include <json.hpp>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace odqa {

namespace {

const icu::Normalizer2& nfc()
{
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
        if (U_FAILURE(status) || n == nullptr) {
            throw std::runtime_error("ICU NFC normalizer unavailable");
        }
        return n;
    }();
    return *instance;
}

std::vector<std::string> split_spaces(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto next = text.find(' ', pos);
        const auto end = next == std::string::npos ? text.size() : next;
        if (end > pos) {
            out.emplace_back(text, pos, end - pos);
        }
        pos = end + 1;
    }
    return out;
}

std::string join(std::span<const std::string> parts, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out.push_back(sep);
        }
        out += parts[i];
    }
    return out;
}

}  // namespace

bool is_punctuation_or_symbol(char32_t c) noexcept
{
    return (U_GET_GC_MASK(static_cast<UChar32>(c)) & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

std::string normalize_text(std::string_view text, bool lowercase, bool strip_punctuation)
{
    UErrorCode status = U_ZERO_ERROR;
    const auto source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfc().normalize(source, status);
    if (lowercase) {
        normalized.toLower(icu::Locale::getRoot());
    }

    icu::UnicodeString filtered;
    bool pending_space = false;
    for (int32_t i = 0; i < normalized.length();) {
        const UChar32 c = normalized.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !filtered.isEmpty();
            continue;
        }
        if (strip_punctuation && is_punctuation_or_symbol(static_cast<char32_t>(c))) {
            continue;
        }
        if (pending_space) {
            filtered.append(static_cast<UChar>(' '));
            pending_space = false;
        }
        filtered.append(c);
    }
    // Removing code points can expose new canonical compositions.
    const icu::UnicodeString recomposed = nfc().normalize(filtered, status);
    if (U_FAILURE(status)) {
        throw std::runtime_error(std::string("ICU normalization failed: ") + u_errorName(status));
    }
    std::string out;
    recomposed.toUTF8String(out);
    return out;
}

std::string normalize_answer(std::string_view text)
{
    return normalize_text(text, true, true);
}

std::vector<std::string> tokenize(std::string_view text)
{
    return split_spaces(normalize_answer(text));
}

std::vector<OffsetToken> tokenize_with_offsets(std::string_view text, bool lowercase, bool strip_punctuation)
{
    struct CodePoint {
        UChar32 value;
        std::size_t byte;
    };
    std::vector<CodePoint> cps;
    cps.reserve(text.size());
    {
        const auto* s = reinterpret_cast<const uint8_t*>(text.data());
        const auto n = static_cast<int32_t>(text.size());
        int32_t i = 0;
        while (i < n) {
            const auto at = static_cast<std::size_t>(i);
            UChar32 c;
            U8_NEXT(s, i, n, c);
            cps.push_back({c, at});
        }
    }
    auto byte_at = [&](std::size_t cp) { return cp < cps.size() ? cps[cp].byte : text.size(); };
    auto trimmable = [&](std::size_t cp) {
        return strip_punctuation &&
               (cps[cp].value < 0 || is_punctuation_or_symbol(static_cast<char32_t>(cps[cp].value)));
    };

    std::vector<OffsetToken> out;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (cps[i].value >= 0 && u_isUWhiteSpace(cps[i].value)) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < cps.size() && !(cps[end].value >= 0 && u_isUWhiteSpace(cps[end].value))) {
            ++end;
        }
        std::size_t begin = i;
        std::size_t stop = end;
        while (begin < stop && trimmable(begin)) {
            ++begin;
        }
        while (stop > begin && trimmable(stop - 1)) {
            --stop;
        }
        if (begin < stop) {
            const auto raw = text.substr(byte_at(begin), byte_at(stop) - byte_at(begin));
            auto norm = normalize_text(raw, lowercase, strip_punctuation);
            if (!norm.empty()) {
                out.push_back({std::move(norm), begin, stop});
            }
        }
        i = end;
    }
    return out;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int n)
{
    if (n != 1 && n != 2) {
        throw UsageError("ngrams: n must be 1 or 2, got " + std::to_string(n));
    }
    std::vector<std::string> out(tokens.begin(), tokens.end());
    if (n == 2 && tokens.size() > 1) {
        out.reserve(tokens.size() * 2 - 1);
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            std::string bigram;
            bigram.reserve(tokens[i].size() + tokens[i + 1].size() + 1);
            bigram += tokens[i];
            bigram.push_back(kBigramSeparator);
            bigram += tokens[i + 1];
            out.push_back(std::move(bigram));
        }
    }
    return out;
}

std::string_view to_string(SegmenterKind kind) noexcept
{
    switch (kind) {
    case SegmenterKind::none:
        return "none";
    case SegmenterKind::builtin_dictionary:
        return "builtin_dictionary";
    case SegmenterKind::external_command:
        return "external_command";
    }
    return "none";
}

SegmenterKind segmenter_kind_from_string(std::string_view name)
{
    if (name == "none") {
        return SegmenterKind::none;
    }
    if (name == "builtin_dictionary") {
        return SegmenterKind::builtin_dictionary;
    }
    if (name == "external_command") {
        return SegmenterKind::external_command;
    }
    throw UsageError("unknown segmenter kind: " + std::string(name));
}

std::string to_json_string(const AnalyzerConfig& config)
{
    nlohmann::ordered_json j;
    j["lowercase"] = config.lowercase;
    j["strip_punctuation"] = config.strip_punctuation;
    j["segmenter"] = to_string(config.segmenter);
    j["ngram_max"] = config.ngram_max;
    j["compounds"] = config.compounds;
    j["command"] = config.command;
    j["timeout_ms"] = config.timeout.count();
    return j.dump();
}

AnalyzerConfig analyzer_config_from_json(std::string_view json)
{
    try {
        const auto j = nlohmann::json::parse(json);
        AnalyzerConfig config;
        config.lowercase = j.at("lowercase").get<bool>();
        config.strip_punctuation = j.at("strip_punctuation").get<bool>();
        config.segmenter = segmenter_kind_from_string(j.at("segmenter").get<std::string>());
        config.ngram_max = j.at("ngram_max").get<int>();
        config.compounds = j.at("compounds").get<std::vector<std::string>>();
        config.command = j.at("command").get<std::string>();
        config.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<std::int64_t>());
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid analyzer config: ") + e.what());
    }
}

CompoundLexicon::CompoundLexicon(std::span<const std::string> phrases, bool lowercase, bool strip_punctuation)
{
    for (const auto& phrase : phrases) {
        const auto tokens = split_spaces(normalize_text(phrase, lowercase, strip_punctuation));
        if (tokens.size() < 2) {
            continue;
        }
        phrases_.insert(odqa::join(tokens, ' '));
        auto& longest = max_len_by_first_[tokens.front()];
        longest = std::max(longest, tokens.size());
    }
}

std::vector<std::string> CompoundLexicon::join(std::span<const std::string> tokens) const
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    while (i < tokens.size()) {
        const auto it = max_len_by_first_.find(tokens[i]);
        std::size_t matched = 1;
        if (it != max_len_by_first_.end()) {
            for (std::size_t len = std::min(it->second, tokens.size() - i); len >= 2; --len) {
                if (phrases_.contains(odqa::join(tokens.subspan(i, len), ' '))) {
                    matched = len;
                    break;
                }
            }
        }
        out.push_back(odqa::join(tokens.subspan(i, matched), kWordJoiner));
        i += matched;
    }
    return out;
}

Analyzer::Analyzer(AnalyzerConfig config) : config_(std::move(config))
{
    if (config_.ngram_max != 1 && config_.ngram_max != 2) {
        throw UsageError("analyzer ngram_max must be 1 or 2");
    }
    switch (config_.segmenter) {
    case SegmenterKind::none:
        break;
    case SegmenterKind::builtin_dictionary:
        lexicon_ = std::make_shared<CompoundLexicon>(config_.compounds, config_.lowercase, config_.strip_punctuation);
        break;
    case SegmenterKind::external_command:
        if (config_.command.empty()) {
            throw UsageError("external_command segmenter needs a command");
        }
        external_ = std::make_shared<ExternalSegmenter>(config_.command, config_.timeout);
        break;
    }
}

std::vector<std::string> Analyzer::words(std::string_view text) const
{
    switch (config_.segmenter) {
    case SegmenterKind::none:
        return split_spaces(normalize_text(text, config_.lowercase, config_.strip_punctuation));
    case SegmenterKind::builtin_dictionary: {
        const auto base = split_spaces(normalize_text(text, config_.lowercase, config_.strip_punctuation));
        return lexicon_->join(base);
    }
    case SegmenterKind::external_command: {
        std::string line(text);
        std::replace_if(line.begin(), line.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
        const auto segmented = external_->segment_line(line);
        std::vector<std::string> out;
        std::istringstream in(segmented);
        std::string word;
        while (in >> word) {
            std::vector<std::string> parts;
            std::size_t pos = 0;
            while (pos <= word.size()) {
                const auto next = std::min(word.find(kWordJoiner, pos), word.size());
                auto norm = normalize_text(std::string_view(word).substr(pos, next - pos), config_.lowercase,
                                           config_.strip_punctuation);
                for (auto& piece : split_spaces(norm)) {
                    parts.push_back(std::move(piece));
                }
                pos = next + 1;
            }
            if (!parts.empty()) {
                out.push_back(odqa::join(parts, kWordJoiner));
            }
        }
        return out;
    }
    }
    return {};
}

std::vector<std::string> Analyzer::terms(std::string_view text) const
{
    return ngrams(words(text), config_.ngram_max);
}

std::vector<std::string> segment_words(std::string_view text, const Analyzer& analyzer)
{
    return analyzer.words(text);
}

std::vector<std::string> load_compound_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open compound lexicon " + path);
    }
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

}  // namespace odqa
