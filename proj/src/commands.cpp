#include "odqa/commands.hpp"

#include "odqa/bm25.hpp"
#include "odqa/error.hpp"
#include "odqa/evaluation.hpp"
#include "odqa/pipeline.hpp"
#include "odqa/question_types.hpp"
#include "odqa/remote_reader.hpp"
#include "odqa/tfidf.hpp"
#include "odqa/utf8.hpp"

#include <json.hpp>
#include <unicode/uversion.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef ODQA_VERSION
#define ODQA_VERSION "0.0.0"
#endif
#ifndef ODQA_DEFAULT_QUESTION_WORDS
#define ODQA_DEFAULT_QUESTION_WORDS ""
#endif
#ifndef ODQA_DEFAULT_COMPOUNDS
#define ODQA_DEFAULT_COMPOUNDS ""
#endif

namespace odqa {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(RetrieverKind kind) noexcept
{
    return kind == RetrieverKind::tfidf ? "tfidf" : "bm25";
}

std::string_view to_string(Segmentation mode) noexcept
{
    switch (mode) {
    case Segmentation::on:
        return "on";
    case Segmentation::off:
        return "off";
    case Segmentation::default_per_retriever:
        break;
    }
    return "default";
}

std::string_view to_string(ReaderKind kind) noexcept
{
    return kind == ReaderKind::remote ? "remote" : "baseline";
}

RetrieverKind retriever_kind_from_string(std::string_view name)
{
    if (name == "tfidf") {
        return RetrieverKind::tfidf;
    }
    if (name == "bm25") {
        return RetrieverKind::bm25;
    }
    throw UsageError("unknown retriever '" + std::string(name) + "' (expected tfidf or bm25)");
}

Segmentation segmentation_from_string(std::string_view name)
{
    if (name == "on") {
        return Segmentation::on;
    }
    if (name == "off") {
        return Segmentation::off;
    }
    if (name == "default") {
        return Segmentation::default_per_retriever;
    }
    throw UsageError("unknown segmentation mode '" + std::string(name) + "' (expected on, off or default)");
}

ReaderKind reader_kind_from_string(std::string_view name)
{
    if (name == "baseline") {
        return ReaderKind::baseline;
    }
    if (name == "remote") {
        return ReaderKind::remote;
    }
    throw UsageError("unknown reader '" + std::string(name) + "' (expected baseline or remote)");
}

void validate(const RunConfig& config)
{
    if (config.k == 0) {
        throw UsageError("--k must be at least 1");
    }
    if (config.alpha && !(*config.alpha >= 0.0 && *config.alpha <= 1.0)) {
        throw UsageError("--alpha must lie in [0, 1]");
    }
    if (config.reader == ReaderKind::remote && config.endpoint.empty()) {
        throw UsageError("--reader remote needs --endpoint");
    }
    if (config.max_answer_tokens == 0) {
        throw UsageError("--max-answer-tokens must be at least 1");
    }
    if (config.max_parallel == 0) {
        throw UsageError("--max-parallel must be at least 1");
    }
}

bool segmentation_enabled(const RunConfig& config) noexcept
{
    switch (config.segmentation) {
    case Segmentation::on:
        return true;
    case Segmentation::off:
        return false;
    case Segmentation::default_per_retriever:
        break;
    }
    return config.retriever == RetrieverKind::bm25;
}

fs::path output_dir(const RunConfig& config)
{
    return config.out_dir.empty() ? config.data_dir : config.out_dir;
}

fs::path index_path(const RunConfig& config)
{
    const bool default_on = config.retriever == RetrieverKind::bm25;
    std::string name(to_string(config.retriever));
    if (segmentation_enabled(config) != default_on) {
        name += segmentation_enabled(config) ? ".seg" : ".noseg";
    }
    return config.data_dir / (name + ".idx");
}

AnalyzerConfig analyzer_config(const RunConfig& config)
{
    AnalyzerConfig analyzer;
    analyzer.ngram_max = config.retriever == RetrieverKind::tfidf ? 2 : 1;
    if (!segmentation_enabled(config)) {
        return analyzer;
    }
    if (!config.segmenter_command.empty()) {
        analyzer.segmenter = SegmenterKind::external_command;
        analyzer.command = config.segmenter_command;
        analyzer.timeout = config.segmenter_timeout;
        return analyzer;
    }
    analyzer.segmenter = SegmenterKind::builtin_dictionary;
    const std::string path = config.compounds_file.empty() ? ODQA_DEFAULT_COMPOUNDS : config.compounds_file;
    if (!path.empty()) {
        if (!fs::exists(path)) {
            throw UsageError("compound dictionary '" + path + "' not found");
        }
        analyzer.compounds = load_compound_file(path);
    }
    return analyzer;
}

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view contents)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

void require_utf8(std::string_view text, std::string_view what)
{
    if (!utf8::is_valid(text)) {
        throw DataError(std::string(what) + " is not valid UTF-8");
    }
}

QuestionTypeLexicon question_lexicon(const RunConfig& config)
{
    if (!config.question_words.empty()) {
        return QuestionTypeLexicon::from_file(config.question_words);
    }
    const std::string shipped = ODQA_DEFAULT_QUESTION_WORDS;
    if (!shipped.empty() && fs::exists(shipped)) {
        return QuestionTypeLexicon::from_file(shipped);
    }
    return QuestionTypeLexicon::defaults();
}

std::string segmentation_flag(const RunConfig& config)
{
    return segmentation_enabled(config) ? "on" : "off";
}

ojson config_json(const RunConfig& config)
{
    ojson j;
    j["data_dir"] = config.data_dir.string();
    j["out"] = output_dir(config).string();
    j["retriever"] = to_string(config.retriever);
    j["segmentation"] = segmentation_flag(config);
    j["reader"] = to_string(config.reader);
    j["endpoint"] = config.endpoint;
    j["k"] = config.k;
    j["alpha"] = config.alpha ? ojson(*config.alpha) : ojson(nullptr);
    j["seed"] = config.seed;
    j["compounds"] = config.compounds_file;
    j["segmenter_command"] = config.segmenter_command;
    j["segmenter_timeout_ms"] = config.segmenter_timeout.count();
    j["question_words"] = config.question_words;
    j["tfidf_bins"] = config.tfidf_bins;
    j["bm25_k1"] = config.bm25_k1;
    j["bm25_b"] = config.bm25_b;
    j["dedup"] = to_string(config.dedup);
    j["raw_retriever_scores"] = config.raw_retriever_scores;
    j["max_answer_tokens"] = config.max_answer_tokens;
    j["max_parallel"] = config.max_parallel;
    j["reader_timeout_ms"] = config.reader_timeout.count();
    return j;
}

std::string now_utc()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

class Timer {
  public:
    [[nodiscard]] double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CorpusStore load_store(const RunConfig& config)
{
    return CorpusStore::load(config.data_dir);
}

std::vector<QARecord> split_questions(const CorpusStore& store, Split split)
{
    auto records = store.questions_in(split);
    if (records.empty()) {
        throw DataError("no " + std::string(to_string(split)) + " questions in the store; run `odqa ingest <file> --split " +
                        std::string(to_string(split)) + "` first");
    }
    return records;
}

std::string fixed(double v, int digits)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::map<std::string, std::string, std::less<>> gold_ids(std::span<const QARecord> records)
{
    std::map<std::string, std::string, std::less<>> gold;
    for (const auto& r : records) {
        if (!r.gold_passage_id.empty()) {
            gold[r.id] = r.gold_passage_id;
        }
    }
    return gold;
}

struct Session {
    CorpusStore store;
    std::unique_ptr<Retriever> retriever;
    std::unique_ptr<Reader> reader;
    ResolvedAlpha alpha;
    std::unique_ptr<QaPipeline> pipeline;
};

Session open_session(const RunConfig& config)
{
    validate(config);
    Session s{load_store(config), load_retriever(config), nullptr, resolve_alpha(config), nullptr};
    s.reader = make_reader(config, *s.retriever);
    PipelineConfig pc;
    pc.k = config.k;
    pc.fusion = {s.alpha.value, config.dedup};
    pc.raw_retriever_scores = config.raw_retriever_scores;
    s.pipeline = std::make_unique<QaPipeline>(s.store, *s.retriever, *s.reader, pc);
    return s;
}

void report_reader_failures(const AnswerTrace& trace, std::size_t& failures)
{
    for (const auto& o : trace.outcomes) {
        if (o.status != ReadStatus::ok) {
            ++failures;
            std::clog << "warning: " << o.error << '\n';
        }
    }
}

}  // namespace

ResolvedAlpha resolve_alpha(const RunConfig& config)
{
    if (config.alpha) {
        return {*config.alpha, "flag"};
    }
    const auto file = config.data_dir / "alpha_tuning.json";
    if (fs::exists(file)) {
        return {alpha_from_tuning_json(read_file(file)), "tuning file"};
    }
    return {0.5, "default"};
}

std::unique_ptr<Retriever> load_retriever(const RunConfig& config)
{
    const auto path = index_path(config);
    if (!fs::exists(path)) {
        throw DataError("no " + std::string(to_string(config.retriever)) + " index at " + path.string() +
                        "; run `odqa index --retriever " + std::string(to_string(config.retriever)) +
                        " --segmentation " + segmentation_flag(config) + "` first");
    }
    if (config.retriever == RetrieverKind::tfidf) {
        return std::make_unique<TfidfIndex>(TfidfIndex::load(path));
    }
    return std::make_unique<InvertedIndex>(InvertedIndex::load(path));
}

std::unique_ptr<Reader> make_reader(const RunConfig& config, const Retriever& retriever)
{
    if (config.reader == ReaderKind::remote) {
        RemoteReaderConfig rc;
        rc.endpoint = config.endpoint;
        rc.timeout = config.reader_timeout;
        rc.max_parallel = config.max_parallel;
        const auto health = check_health(rc);
        if (health.status != "ok") {
            throw NetworkError("reader at " + config.endpoint + " reports status '" + health.status + "'");
        }
        return std::make_unique<RemoteReader>(rc);
    }
    ReaderConfig rc;
    rc.max_answer_tokens = config.max_answer_tokens;
    return std::make_unique<BaselineReader>([&retriever](std::string_view t) { return retriever.token_idf(t); }, rc);
}

void write_manifest(const fs::path& dir, std::string_view command, const RunConfig& config,
                    const std::string& extra_json, const std::vector<std::string>& outputs, double elapsed_ms)
{
    ojson j;
    j["command"] = command;
    j["argv"] = config.argv;
    j["config"] = config_json(config);
    j["seed"] = config.seed;
    j["versions"] = {{"odqa", ODQA_VERSION}, {"icu", U_ICU_VERSION}, {"compiler", __VERSION__}};
    j["started_at"] = now_utc();
    j["elapsed_ms"] = elapsed_ms;
    j["outputs"] = outputs;
    j["details"] = extra_json.empty() ? ojson::object() : ojson::parse(extra_json);
    write_file(dir / (std::string(command) + ".manifest.json"), j.dump(2) + "\n");
}

void cmd_ingest(const RunConfig& config, const fs::path& input, Split split, std::ostream& out)
{
    const Timer timer;
    const auto text = read_file(input);
    require_utf8(text, input.string());
    auto store = CorpusStore::exists(config.data_dir) ? CorpusStore::load(config.data_dir) : CorpusStore{};
    const auto result = ingest_squad_json(std::string_view(text), split, question_lexicon(config), store);
    for (const auto& w : result.warnings) {
        std::clog << "warning: " << w << '\n';
    }
    store.record_ingest({input.string(), split, result.n_passages, result.n_questions, result.warnings.size()});
    store.save(config.data_dir);

    out << "ingested " << result.n_passages << " passages and " << result.n_questions << " questions into "
        << to_string(split) << " (" << result.warnings.size() << " records skipped)\n";
    const ojson details = {{"input", input.string()},
                           {"split", to_string(split)},
                           {"n_passages", result.n_passages},
                           {"n_questions", result.n_questions},
                           {"n_skipped", result.warnings.size()}};
    write_manifest(config.data_dir, "ingest", config, details.dump(),
                   {"passages.jsonl", "questions.jsonl", "meta.json"}, timer.ms());
}

void cmd_index(const RunConfig& config, std::ostream& out)
{
    const Timer timer;
    validate(config);
    const auto store = load_store(config);
    const auto passages = store.passage_list();
    if (passages.empty()) {
        throw DataError("the document store has no passages; run `odqa ingest` first");
    }
    const Analyzer analyzer(analyzer_config(config));
    const auto path = index_path(config);
    ojson details = {{"index", path.filename().string()}, {"n_passages", passages.size()}};
    if (config.retriever == RetrieverKind::tfidf) {
        const auto index = build_tfidf_index(passages, analyzer, config.tfidf_bins);
        index.save(path);
        details["num_bins"] = index.num_bins();
        out << "built tfidf index over " << index.n_docs() << " passages (" << index.num_bins() << " bins)";
    } else {
        const auto index = build_bm25_index(passages, analyzer, config.bm25_k1, config.bm25_b);
        index.save(path);
        details["n_terms"] = index.n_terms();
        details["avg_doc_len"] = index.avg_doc_len();
        out << "built bm25 index over " << index.n_docs() << " passages (" << index.n_terms() << " terms)";
    }
    out << ", segmentation " << segmentation_flag(config) << " -> " << path.string() << '\n';
    write_manifest(config.data_dir, "index", config, details.dump(), {path.filename().string()}, timer.ms());
}

void cmd_stats(const RunConfig& config, std::ostream& out)
{
    const Timer timer;
    const auto store = load_store(config);
    ojson j = ojson::object();
    out << std::left << std::setw(10) << "split" << std::right << std::setw(9) << "articles" << std::setw(10)
        << "passages" << std::setw(11) << "questions" << std::setw(10) << "avg_pass" << std::setw(9) << "avg_q"
        << std::setw(9) << "avg_ans" << std::setw(9) << "vocab" << '\n';
    for (const auto split : {Split::train, Split::dev, Split::test, Split::external}) {
        const bool present = std::any_of(store.passages().begin(), store.passages().end(),
                                         [split](const auto& kv) { return kv.second.split == split; });
        if (!present) {
            continue;
        }
        const auto s = corpus_stats(store, split);
        j[std::string(to_string(split))] = {{"articles", s.n_articles},
                                            {"passages", s.n_passages},
                                            {"questions", s.n_questions},
                                            {"avg_passage_len", s.avg_passage_len},
                                            {"avg_question_len", s.avg_question_len},
                                            {"avg_answer_len", s.avg_answer_len},
                                            {"vocab_size", s.vocab_size}};
        out << std::left << std::setw(10) << to_string(split) << std::right << std::setw(9) << s.n_articles
            << std::setw(10) << s.n_passages << std::setw(11) << s.n_questions << std::setw(10)
            << fixed(s.avg_passage_len, 2) << std::setw(9) << fixed(s.avg_question_len, 2) << std::setw(9)
            << fixed(s.avg_answer_len, 2) << std::setw(9) << s.vocab_size << '\n';
    }
    const auto dir = output_dir(config);
    write_file(dir / "stats.json", j.dump(2) + "\n");
    write_manifest(dir, "stats", config, "", {"stats.json"}, timer.ms());
}

void cmd_retrieve_eval(const RunConfig& config, std::vector<std::size_t> ks, Split split, std::ostream& out)
{
    const Timer timer;
    validate(config);
    if (ks.empty()) {
        ks = {1, 5, 10, 20, 30};
    }
    if (std::any_of(ks.begin(), ks.end(), [](std::size_t k) { return k == 0; })) {
        throw UsageError("every k must be at least 1");
    }
    const auto store = load_store(config);
    const auto retriever = load_retriever(config);
    const auto records = split_questions(store, split);
    const auto k_max = *std::max_element(ks.begin(), ks.end());

    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists;
    for (const auto& r : records) {
        lists[r.id] = retriever->query(r.question, k_max);
    }
    const auto run = make_run(lists, k_max);
    const auto gold = gold_ids(records);

    ojson j;
    j["retriever"] = to_string(config.retriever);
    j["segmentation"] = segmentation_flag(config);
    j["split"] = to_string(split);
    j["n_questions"] = records.size();
    ojson pk = ojson::object();
    std::ostringstream csv;
    csv << "k,p_at_k\n";
    out << to_string(config.retriever) << " (segmentation " << segmentation_flag(config) << ") on "
        << to_string(split) << ", " << records.size() << " questions\n";
    for (const auto k : ks) {
        const double p = gold.size() == records.size()
                             ? precision_at_k(run, gold, k)
                             : precision_at_k_containment(
                                   run,
                                   [&] {
                                       std::map<std::string, std::vector<std::string>, std::less<>> answers;
                                       for (const auto& r : records) {
                                           for (const auto& a : r.gold_answers) {
                                               answers[r.id].push_back(a.text);
                                           }
                                       }
                                       return answers;
                                   }(),
                                   [&](std::string_view id) { return store.passage(id).text; }, k);
        pk[std::to_string(k)] = p;
        csv << k << ',' << fixed(p, 4) << '\n';
        out << "P@" << std::left << std::setw(4) << k << std::right << std::setw(8) << fixed(p, 2) << '\n';
    }
    j["p_at_k"] = std::move(pk);

    const auto dir = output_dir(config);
    write_file(dir / "retrieval.json", j.dump(2) + "\n");
    write_file(dir / "p_at_k.csv", csv.str());
    write_manifest(dir, "retrieve-eval", config, ojson{{"split", to_string(split)}, {"ks", ks}}.dump(),
                   {"retrieval.json", "p_at_k.csv"}, timer.ms());
}

void cmd_answer(const RunConfig& config, std::string_view question, std::ostream& out)
{
    require_utf8(question, "question");
    if (tokenize(question).empty()) {
        throw UsageError("empty question");
    }
    const auto session = open_session(config);
    const auto trace = session.pipeline->answer(question);
    std::size_t failures = 0;
    report_reader_failures(trace, failures);
    if (!trace.answer) {
        out << "no answer found\n";
        return;
    }
    out << "answer:  " << trace.answer->answer << '\n'
        << "score:   " << fixed(trace.answer->score, 6) << '\n'
        << "passage: " << trace.answer->passage_id << " (rank " << trace.answer->rank_of_source_passage << ")\n";
}

void cmd_eval(const RunConfig& config, Split split, std::ostream& out)
{
    const Timer timer;
    const auto session = open_session(config);
    const auto records = split_questions(session.store, split);

    std::map<std::string, std::string, std::less<>> predictions;
    std::map<std::string, std::vector<RetrievalHit>, std::less<>> lists;
    std::vector<std::size_t> source_ranks;
    ojson prediction_lines = ojson::array();
    std::size_t failures = 0;
    for (const auto& r : records) {
        const auto trace = session.pipeline->answer(r.question);
        report_reader_failures(trace, failures);
        lists[r.id] = trace.hits;
        const auto answer = trace.answer ? trace.answer->answer : std::string();
        predictions[r.id] = answer;
        source_ranks.push_back(trace.answer ? trace.answer->rank_of_source_passage : 0);
        prediction_lines.push_back({{"id", r.id},
                                    {"answer", answer},
                                    {"score", trace.answer ? trace.answer->score : 0.0},
                                    {"passage_id", trace.answer ? trace.answer->passage_id : std::string()},
                                    {"rank", source_ranks.back()}});
    }

    auto report = evaluate_e2e(predictions, records);
    const auto run = make_run(lists, config.k);
    const auto gold = gold_ids(records);
    if (gold.size() == records.size()) {
        for (std::size_t k = 1; k <= config.k; ++k) {
            report.p_at_k[k] = precision_at_k(run, gold, k);
        }
    }
    report.answer_position_hist = answer_position_histogram(source_ranks);
    report.avg_answer_len_by_type = avg_answer_length_by_type(predictions, records);

    const auto dir = output_dir(config);
    write_file(dir / "report.json", report_to_json(report));
    write_file(dir / "report.csv", report_to_csv(report));
    write_file(dir / "positions.csv", positions_to_csv(report.answer_position_hist));
    std::string jsonl;
    for (const auto& line : prediction_lines) {
        jsonl += line.dump() + "\n";
    }
    write_file(dir / "predictions.jsonl", jsonl);

    out << to_string(config.retriever) << " + " << to_string(config.reader) << " reader on " << to_string(split)
        << ", k=" << config.k << ", alpha=" << session.alpha.value << " (" << session.alpha.source << ")\n\n"
        << format_report_table(report);
    if (failures > 0) {
        out << '\n' << failures << " passage reads failed\n";
    }
    const ojson details = {{"split", to_string(split)},
                           {"alpha", session.alpha.value},
                           {"alpha_source", session.alpha.source},
                           {"reader_failures", failures}};
    write_manifest(dir, "eval", config, details.dump(),
                   {"report.json", "report.csv", "positions.csv", "predictions.jsonl"}, timer.ms());
}

void cmd_sweep(const RunConfig& config, std::vector<std::size_t> ks, Split split, std::ostream& out)
{
    const Timer timer;
    if (ks.empty()) {
        ks = {1, 5, 10, 15, 20, 25, 30};
    }
    const auto session = open_session(config);
    const auto records = split_questions(session.store, split);
    const auto dir = output_dir(config);

    std::vector<SweepRow> done;
    const auto flush = [&] { write_file(dir / "sweep.csv", sweep_to_csv(done)); };
    const auto details = [&](std::string_view status) {
        return ojson{{"split", to_string(split)},
                     {"ks", ks},
                     {"alpha", session.alpha.value},
                     {"alpha_source", session.alpha.source},
                     {"status", status},
                     {"rows_completed", done.size()}}
            .dump();
    };
    out << "k      EM      F1\n";
    try {
        (void)k_sweep(records, session.pipeline->candidate_source(), ks, session.pipeline->config().fusion,
                      [&](const SweepRow& row) {
                          done.push_back({row.k, row.em, row.f1, {}});
                          flush();
                          out << std::left << std::setw(4) << row.k << std::right << std::setw(8) << fixed(row.em, 2)
                              << std::setw(8) << fixed(row.f1, 2) << '\n';
                      });
    } catch (const std::exception&) {
        flush();
        write_manifest(dir, "sweep", config, details("failed"), {"sweep.csv"}, timer.ms());
        throw;
    }
    write_manifest(dir, "sweep", config, details("complete"), {"sweep.csv"}, timer.ms());
}

void cmd_tune_alpha(const RunConfig& config, std::size_t n_pairs, double step, TuningMetric metric,
                    std::ostream& out)
{
    const Timer timer;
    if (n_pairs == 0) {
        throw UsageError("--pairs must be at least 1");
    }
    auto run_config = config;
    run_config.alpha = 0.5;  // replaced by the grid
    const auto session = open_session(run_config);
    const auto train = split_questions(session.store, Split::train);
    if (train.size() < n_pairs) {
        std::clog << "warning: only " << train.size() << " train questions, tuning on all of them\n";
    }
    const auto sample = sample_records(train, n_pairs, config.seed);
    const auto tuning = tune_alpha(sample, session.pipeline->candidate_source(), config.k, step, metric, config.dedup);

    const auto dir = output_dir(config);
    write_file(dir / "alpha_tuning.json", alpha_tuning_to_json(tuning, step, config.seed, sample.size()));
    out << "alpha   EM      F1\n";
    for (const auto& p : tuning.curve) {
        out << std::left << std::setw(6) << fixed(p.alpha, 3) << std::right << std::setw(7) << fixed(p.em, 2)
            << std::setw(8) << fixed(p.f1, 2) << '\n';
    }
    out << "chosen alpha " << tuning.alpha << " by " << to_string(metric) << " on " << sample.size()
        << " train pairs\n";
    const ojson details = {{"n_pairs", sample.size()}, {"step", step}, {"metric", to_string(metric)}};
    write_manifest(dir, "tune-alpha", config, details.dump(), {"alpha_tuning.json"}, timer.ms());
}

void cmd_repl(const RunConfig& config, std::istream& in, std::ostream& out)
{
    const auto session = open_session(config);
    out << "odqa " << to_string(config.retriever) << " + " << to_string(config.reader) << ", k=" << config.k
        << ", alpha=" << session.alpha.value << "; empty line or :quit exits\n";
    std::string line;
    while (out << "? " << std::flush, std::getline(in, line)) {
        if (line.empty() || line == ":quit" || line == ":q") {
            break;
        }
        if (!utf8::is_valid(line)) {
            out << "error: input is not valid UTF-8\n";
            continue;
        }
        const Timer timer;
        try {
            const auto trace = session.pipeline->answer(line);
            std::size_t failures = 0;
            report_reader_failures(trace, failures);
            if (trace.answer) {
                out << trace.answer->answer << "  [score " << fixed(trace.answer->score, 4) << ", "
                    << trace.answer->passage_id << ", rank " << trace.answer->rank_of_source_passage << "]";
            } else {
                out << "no answer found";
            }
        } catch (const Error& e) {
            out << "error: " << e.what();
        }
        out << "  (" << fixed(timer.ms(), 1) << " ms)\n";
    }
}

}  // namespace odqa
