#include "odqa/corpus_store.hpp"

#include "odqa/error.hpp"
#include "odqa/text_analysis.hpp"
#include "odqa/utf8.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace odqa {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Split split) noexcept
{
    switch (split) {
    case Split::train:
        return "train";
    case Split::dev:
        return "dev";
    case Split::test:
        return "test";
    case Split::external:
        return "external";
    }
    return "external";
}

Split split_from_string(std::string_view name)
{
    for (const auto split : {Split::train, Split::dev, Split::test, Split::external}) {
        if (to_string(split) == name) {
            return split;
        }
    }
    throw UsageError("unknown split '" + std::string(name) + "' (expected train, dev, test or external)");
}

std::string make_passage_id(std::string_view title, std::size_t paragraph_index)
{
    return std::string(title) + "#" + std::to_string(paragraph_index);
}

bool answer_matches(std::string_view passage_text, const GoldAnswer& answer)
{
    const auto bounds = utf8::boundaries(passage_text);
    const auto length = utf8::length(answer.text);
    const auto end = answer.answer_start + length;
    if (answer.text.empty() || end >= bounds.size()) {
        return false;
    }
    const auto begin_byte = bounds[answer.answer_start];
    return passage_text.substr(begin_byte, bounds[end] - begin_byte) == answer.text;
}

// --- store -----------------------------------------------------------------

namespace {

const char* kPassagesFile = "passages.jsonl";
const char* kQuestionsFile = "questions.jsonl";
const char* kMetaFile = "meta.json";

ordered_json passage_to_json(const Passage& p)
{
    ordered_json j;
    j["schema"] = kStoreSchemaVersion;
    j["id"] = p.id;
    j["article_title"] = p.article_title;
    j["split"] = to_string(p.split);
    j["text"] = p.text;
    return j;
}

ordered_json question_to_json(const QARecord& q)
{
    ordered_json j;
    j["schema"] = kStoreSchemaVersion;
    j["id"] = q.id;
    j["question"] = q.question;
    j["gold_passage_id"] = q.gold_passage_id;
    j["split"] = to_string(q.split);
    j["question_type"] = to_string(q.question_type);
    auto answers = ordered_json::array();
    for (const auto& a : q.gold_answers) {
        answers.push_back({{"text", a.text}, {"answer_start", a.answer_start}});
    }
    j["gold_answers"] = std::move(answers);
    return j;
}

void check_schema(const json& j, const std::filesystem::path& file, std::size_t line_no)
{
    const auto version = j.value("schema", 0);
    if (version != kStoreSchemaVersion) {
        throw DataError(file.string() + ":" + std::to_string(line_no) + ": unsupported schema version " +
                        std::to_string(version));
    }
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& file, Fn&& fn)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + file.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(file.string() + ":" + std::to_string(line_no) + ": " + e.what(), e.byte);
        }
        check_schema(j, file, line_no);
        try {
            fn(j);
        } catch (const json::exception& e) {
            throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace

bool CorpusStore::exists(const std::filesystem::path& dir)
{
    return std::filesystem::exists(dir / kPassagesFile) && std::filesystem::exists(dir / kQuestionsFile);
}

CorpusStore CorpusStore::load(const std::filesystem::path& dir)
{
    if (!exists(dir)) {
        throw DataError("no document store in " + dir.string() + "; run `odqa ingest` first");
    }
    CorpusStore store;
    for_each_jsonl(dir / kPassagesFile, [&](const json& j) {
        Passage p;
        p.id = j.at("id").get<std::string>();
        p.article_title = j.at("article_title").get<std::string>();
        p.split = split_from_string(j.at("split").get<std::string>());
        p.text = j.at("text").get<std::string>();
        store.put_passage(std::move(p));
    });
    for_each_jsonl(dir / kQuestionsFile, [&](const json& j) {
        QARecord q;
        q.id = j.at("id").get<std::string>();
        q.question = j.at("question").get<std::string>();
        q.gold_passage_id = j.at("gold_passage_id").get<std::string>();
        q.split = split_from_string(j.at("split").get<std::string>());
        q.question_type = question_type_from_string(j.at("question_type").get<std::string>());
        for (const auto& a : j.at("gold_answers")) {
            q.gold_answers.push_back({a.at("text").get<std::string>(), a.at("answer_start").get<std::size_t>()});
        }
        store.put_question(std::move(q));
    });
    if (std::filesystem::exists(dir / kMetaFile)) {
        std::ifstream in(dir / kMetaFile);
        try {
            const auto meta = json::parse(in);
            for (const auto& entry : meta.value("ingests", json::array())) {
                IngestProvenance p;
                p.source = entry.at("source").get<std::string>();
                p.split = split_from_string(entry.at("split").get<std::string>());
                p.n_passages = entry.at("n_passages").get<std::size_t>();
                p.n_questions = entry.at("n_questions").get<std::size_t>();
                p.n_warnings = entry.at("n_warnings").get<std::size_t>();
                store.ingests_.push_back(std::move(p));
            }
        } catch (const json::exception& e) {
            throw DataError((dir / kMetaFile).string() + ": " + e.what());
        }
    }
    return store;
}

void CorpusStore::save(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / kPassagesFile, std::ios::binary | std::ios::trunc);
        for (const auto& [id, p] : passages_) {
            out << passage_to_json(p).dump() << '\n';
        }
        if (!out) {
            throw DataError("failed writing " + (dir / kPassagesFile).string());
        }
    }
    {
        std::ofstream out(dir / kQuestionsFile, std::ios::binary | std::ios::trunc);
        for (const auto& [id, q] : questions_) {
            out << question_to_json(q).dump() << '\n';
        }
        if (!out) {
            throw DataError("failed writing " + (dir / kQuestionsFile).string());
        }
    }
    ordered_json meta;
    meta["schema_version"] = kStoreSchemaVersion;
    meta["n_passages"] = passages_.size();
    meta["n_questions"] = questions_.size();
    auto ingests = ordered_json::array();
    for (const auto& p : ingests_) {
        ingests.push_back({{"source", p.source},
                           {"split", to_string(p.split)},
                           {"n_passages", p.n_passages},
                           {"n_questions", p.n_questions},
                           {"n_warnings", p.n_warnings}});
    }
    meta["ingests"] = std::move(ingests);
    std::ofstream out(dir / kMetaFile, std::ios::binary | std::ios::trunc);
    out << meta.dump(2) << '\n';
}

void CorpusStore::put_passage(Passage passage)
{
    if (passage.id.empty()) {
        throw DataError("passage id is empty");
    }
    if (normalize_text(passage.text, false, false).empty()) {
        throw DataError("passage " + passage.id + " has empty text");
    }
    auto id = passage.id;
    passages_.insert_or_assign(std::move(id), std::move(passage));
}

void CorpusStore::put_question(QARecord record)
{
    const auto* gold = find_passage(record.gold_passage_id);
    if (gold == nullptr) {
        throw DataError("question " + record.id + " refers to unknown passage " + record.gold_passage_id);
    }
    if (record.gold_answers.empty()) {
        throw DataError("question " + record.id + " has no gold answers");
    }
    for (const auto& answer : record.gold_answers) {
        if (!answer_matches(gold->text, answer)) {
            throw DataError("question " + record.id + ": answer '" + answer.text + "' not found at offset " +
                            std::to_string(answer.answer_start));
        }
    }
    auto id = record.id;
    questions_.insert_or_assign(std::move(id), std::move(record));
}

const Passage* CorpusStore::find_passage(std::string_view id) const
{
    const auto it = passages_.find(id);
    return it == passages_.end() ? nullptr : &it->second;
}

const Passage& CorpusStore::passage(std::string_view id) const
{
    const auto* p = find_passage(id);
    if (p == nullptr) {
        throw DataError("unknown passage id " + std::string(id));
    }
    return *p;
}

std::vector<Passage> CorpusStore::passage_list() const
{
    std::vector<Passage> out;
    out.reserve(passages_.size());
    for (const auto& [id, p] : passages_) {
        out.push_back(p);
    }
    return out;
}

std::vector<QARecord> CorpusStore::questions_in(Split split) const
{
    std::vector<QARecord> out;
    for (const auto& [id, q] : questions_) {
        if (q.split == split) {
            out.push_back(q);
        }
    }
    return out;
}

// --- ingest ----------------------------------------------------------------

IngestResult ingest_squad_json(std::istream& in, Split split, const QuestionTypeLexicon& lexicon, CorpusStore& store)
{
    std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ingest_squad_json(std::string_view(buffer), split, lexicon, store);
}

IngestResult ingest_squad_json(std::string_view text, Split split, const QuestionTypeLexicon& lexicon,
                               CorpusStore& store)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed SQuAD JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
        throw DataError("SQuAD JSON must be an object with a 'data' array");
    }

    IngestResult result;
    auto warn = [&](std::string message) { result.warnings.push_back(std::move(message)); };

    for (std::size_t a = 0; a < doc["data"].size(); ++a) {
        const auto& article = doc["data"][a];
        if (!article.is_object() || !article.contains("paragraphs") || !article["paragraphs"].is_array()) {
            warn("data[" + std::to_string(a) + "]: no paragraphs array, skipped");
            continue;
        }
        const auto title = article.value("title", std::string("article-") + std::to_string(a));
        const auto& paragraphs = article["paragraphs"];
        for (std::size_t p = 0; p < paragraphs.size(); ++p) {
            const auto& para = paragraphs[p];
            const auto where = title + " paragraph " + std::to_string(p);
            if (!para.is_object() || !para.contains("context") || !para["context"].is_string()) {
                warn(where + ": no context, skipped");
                continue;
            }
            Passage passage{make_passage_id(title, p), title, para["context"].get<std::string>(), split};
            if (!utf8::is_valid(passage.text)) {
                warn(where + ": context is not valid UTF-8, skipped");
                continue;
            }
            try {
                store.put_passage(passage);
            } catch (const DataError& e) {
                warn(where + ": " + e.what());
                continue;
            }
            ++result.n_passages;

            if (!para.contains("qas") || !para["qas"].is_array()) {
                continue;
            }
            for (const auto& qa : para["qas"]) {
                QARecord record;
                record.gold_passage_id = passage.id;
                record.split = split;
                try {
                    record.id = qa.at("id").is_string() ? qa.at("id").get<std::string>() : qa.at("id").dump();
                    record.question = qa.at("question").get<std::string>();
                    for (const auto& ans : qa.at("answers")) {
                        const auto start = ans.at("answer_start").get<std::int64_t>();
                        if (start < 0) {
                            throw DataError("answer_start " + std::to_string(start) + " out of range");
                        }
                        record.gold_answers.push_back(
                            {ans.at("text").get<std::string>(), static_cast<std::size_t>(start)});
                    }
                } catch (const json::exception& e) {
                    warn(where + " qa '" + record.id + "': " + e.what() + ", skipped");
                    continue;
                } catch (const DataError& e) {
                    warn(where + " qa '" + record.id + "': " + e.what() + ", skipped");
                    continue;
                }
                record.question_type = lexicon.classify(record.question);
                try {
                    store.put_question(std::move(record));
                } catch (const DataError& e) {
                    warn(where + ": " + e.what() + ", skipped");
                    continue;
                }
                ++result.n_questions;
            }
        }
    }
    return result;
}

std::string to_squad_json(const CorpusStore& store, Split split)
{
    std::map<std::string, std::vector<const QARecord*>, std::less<>> by_passage;
    for (const auto& [id, q] : store.questions()) {
        if (q.split == split) {
            by_passage[q.gold_passage_id].push_back(&q);
        }
    }
    // title -> (paragraph index, passage); the index is the id suffix, so a
    // re-ingest reproduces the same passage ids.
    std::map<std::string, std::vector<std::pair<std::size_t, const Passage*>>> articles;
    for (const auto& [id, p] : store.passages()) {
        if (p.split != split) {
            continue;
        }
        std::size_t index = 0;
        if (const auto hash = id.rfind('#'); hash != std::string::npos) {
            try {
                index = std::stoul(id.substr(hash + 1));
            } catch (const std::exception&) {
                index = 0;
            }
        }
        articles[p.article_title].emplace_back(index, &p);
    }

    ordered_json data = ordered_json::array();
    for (auto& [title, paragraphs] : articles) {
        std::sort(paragraphs.begin(), paragraphs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ordered_json article;
        article["title"] = title;
        article["paragraphs"] = ordered_json::array();
        for (const auto& [index, p] : paragraphs) {
            ordered_json para;
            para["context"] = p->text;
            para["qas"] = ordered_json::array();
            if (const auto it = by_passage.find(p->id); it != by_passage.end()) {
                for (const auto* q : it->second) {
                    ordered_json qa;
                    qa["id"] = q->id;
                    qa["question"] = q->question;
                    qa["answers"] = ordered_json::array();
                    for (const auto& a : q->gold_answers) {
                        qa["answers"].push_back({{"text", a.text}, {"answer_start", a.answer_start}});
                    }
                    para["qas"].push_back(std::move(qa));
                }
            }
            article["paragraphs"].push_back(std::move(para));
        }
        data.push_back(std::move(article));
    }
    ordered_json doc;
    doc["version"] = "1.1";
    doc["data"] = std::move(data);
    return doc.dump();
}

// --- statistics ------------------------------------------------------------

CorpusStats corpus_stats(const CorpusStore& store, Split split, const Tokenizer& tokenizer)
{
    CorpusStats stats;
    std::set<std::string, std::less<>> titles;
    std::set<std::string, std::less<>> vocab;
    std::size_t passage_tokens = 0;
    std::size_t question_tokens = 0;
    std::size_t answer_tokens = 0;
    std::size_t n_answers = 0;

    auto count = [&](std::string_view text) {
        const auto tokens = tokenizer(text);
        vocab.insert(tokens.begin(), tokens.end());
        return tokens.size();
    };

    for (const auto& [id, p] : store.passages()) {
        if (p.split != split) {
            continue;
        }
        ++stats.n_passages;
        titles.insert(p.article_title);
        passage_tokens += count(p.text);
    }
    if (stats.n_passages == 0) {
        throw DataError("no passages stored for split " + std::string(to_string(split)));
    }
    for (const auto& [id, q] : store.questions()) {
        if (q.split != split) {
            continue;
        }
        ++stats.n_questions;
        question_tokens += count(q.question);
        for (const auto& a : q.gold_answers) {
            ++n_answers;
            answer_tokens += count(a.text);
        }
    }
    stats.n_articles = titles.size();
    stats.avg_passage_len = static_cast<double>(passage_tokens) / static_cast<double>(stats.n_passages);
    if (stats.n_questions > 0) {
        stats.avg_question_len = static_cast<double>(question_tokens) / static_cast<double>(stats.n_questions);
    }
    if (n_answers > 0) {
        stats.avg_answer_len = static_cast<double>(answer_tokens) / static_cast<double>(n_answers);
    }
    stats.vocab_size = vocab.size();
    return stats;
}

CorpusStats corpus_stats(const CorpusStore& store, Split split)
{
    return corpus_stats(store, split, [](std::string_view text) { return tokenize(text); });
}

}  // namespace odqa
