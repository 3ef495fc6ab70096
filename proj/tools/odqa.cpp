// odqa: open-domain question answering over a SQuAD-format corpus.

#include "odqa/commands.hpp"
#include "odqa/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using odqa::ExitCode;

template <typename Fn>
int run_guarded(Fn&& fn)
{
    try {
        fn();
        return static_cast<int>(ExitCode::success);
    } catch (const odqa::Error& e) {
        std::cerr << "odqa: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "odqa: " << e.what() << '\n';
        return static_cast<int>(ExitCode::data);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Open-domain question answering: retriever, reader and answer selector"};
    app.set_config("--config", "", "flat key=value file mirroring the flag names");
    app.require_subcommand(1);
    app.fallthrough();

    odqa::RunConfig config;
    config.argv.assign(argv, argv + argc);
    std::string data_dir = config.data_dir.string();
    std::string out_dir;
    std::string retriever = "bm25";
    std::string segmentation = "default";
    std::string reader = "baseline";
    std::string dedup = "max";
    std::optional<double> alpha;
    long long segmenter_timeout_ms = config.segmenter_timeout.count();
    long long reader_timeout_ms = config.reader_timeout.count();

    app.add_option("--data-dir", data_dir, "store and index directory")->envname("ODQA_DATA_DIR");
    app.add_option("--out", out_dir, "output directory (default: --data-dir)")->envname("ODQA_OUT");
    app.add_option("--retriever", retriever, "tfidf or bm25")->envname("ODQA_RETRIEVER");
    app.add_option("--segmentation", segmentation, "on, off or default (bm25 on, tfidf off)")
        ->envname("ODQA_SEGMENTATION");
    app.add_option("--reader", reader, "baseline or remote")->envname("ODQA_READER");
    app.add_option("--endpoint", config.endpoint, "remote reader URL")->envname("ODQA_ENDPOINT");
    app.add_option("--k", config.k, "passages retrieved per question")->envname("ODQA_K");
    app.add_option("--alpha", alpha, "reader weight in [0, 1] (default: alpha_tuning.json, else 0.5)")
        ->envname("ODQA_ALPHA");
    app.add_option("--seed", config.seed, "sampling seed")->envname("ODQA_SEED");
    app.add_option("--compounds", config.compounds_file, "compound word list for segmentation")
        ->envname("ODQA_COMPOUNDS");
    app.add_option("--segmenter-command", config.segmenter_command,
                   "external segmenter: line in, words joined by '_' out")
        ->envname("ODQA_SEGMENTER_COMMAND");
    app.add_option("--segmenter-timeout-ms", segmenter_timeout_ms)->envname("ODQA_SEGMENTER_TIMEOUT_MS");
    app.add_option("--question-words", config.question_words, "question-type phrase table (TSV)")
        ->envname("ODQA_QUESTION_WORDS");
    app.add_option("--tfidf-bins", config.tfidf_bins, "hash bins, a power of two")->envname("ODQA_TFIDF_BINS");
    app.add_option("--bm25-k1", config.bm25_k1)->envname("ODQA_BM25_K1");
    app.add_option("--bm25-b", config.bm25_b)->envname("ODQA_BM25_B");
    app.add_option("--dedup", dedup, "max or sum")->envname("ODQA_DEDUP");
    app.add_flag("--raw-retriever-scores", config.raw_retriever_scores, "fuse unnormalized retriever scores");
    app.add_option("--max-answer-tokens", config.max_answer_tokens)->envname("ODQA_MAX_ANSWER_TOKENS");
    app.add_option("--max-parallel", config.max_parallel, "concurrent remote reader requests")
        ->envname("ODQA_MAX_PARALLEL");
    app.add_option("--reader-timeout-ms", reader_timeout_ms)->envname("ODQA_READER_TIMEOUT_MS");

    std::string input;
    std::string split_name = "train";
    auto* ingest = app.add_subcommand("ingest", "load a SQuAD v1.1 JSON file into the store");
    ingest->add_option("input", input, "SQuAD JSON file")->required();
    ingest->add_option("--split", split_name, "train, dev, test or external");

    app.add_subcommand("index", "build the index for --retriever and --segmentation");
    app.add_subcommand("stats", "corpus statistics per split");

    std::vector<std::size_t> ks;
    std::string eval_split = "test";
    auto* retrieve_eval = app.add_subcommand("retrieve-eval", "P@k of the retriever");
    retrieve_eval->add_option("--ks", ks, "k values (default 1 5 10 20 30)")->delimiter(',');
    retrieve_eval->add_option("--split", eval_split);

    std::string question;
    auto* answer = app.add_subcommand("answer", "answer one question");
    answer->add_option("question", question)->required();

    auto* eval = app.add_subcommand("eval", "end-to-end EM/F1 with report files");
    eval->add_option("--split", eval_split);

    auto* sweep = app.add_subcommand("sweep", "end-to-end EM/F1 for several k");
    sweep->add_option("--ks", ks, "k values (default 1 5 10 15 20 25 30)")->delimiter(',');
    sweep->add_option("--split", eval_split);

    std::size_t pairs = 1000;
    double step = 0.05;
    std::string metric = "f1";
    auto* tune = app.add_subcommand("tune-alpha", "grid-search alpha on sampled train pairs");
    tune->add_option("--pairs", pairs);
    tune->add_option("--step", step);
    tune->add_option("--metric", metric, "em or f1");

    app.add_subcommand("repl", "interactive question answering");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    return run_guarded([&] {
        config.data_dir = data_dir;
        config.out_dir = out_dir;
        config.retriever = odqa::retriever_kind_from_string(retriever);
        config.segmentation = odqa::segmentation_from_string(segmentation);
        config.reader = odqa::reader_kind_from_string(reader);
        config.dedup = odqa::dedup_policy_from_string(dedup);
        config.alpha = alpha;
        config.segmenter_timeout = std::chrono::milliseconds(segmenter_timeout_ms);
        config.reader_timeout = std::chrono::milliseconds(reader_timeout_ms);
        odqa::validate(config);

        const auto& sub = *app.get_subcommands().front();
        const std::string name = sub.get_name();
        if (name == "ingest") {
            odqa::cmd_ingest(config, input, odqa::split_from_string(split_name), std::cout);
        } else if (name == "index") {
            odqa::cmd_index(config, std::cout);
        } else if (name == "stats") {
            odqa::cmd_stats(config, std::cout);
        } else if (name == "retrieve-eval") {
            odqa::cmd_retrieve_eval(config, ks, odqa::split_from_string(eval_split), std::cout);
        } else if (name == "answer") {
            odqa::cmd_answer(config, question, std::cout);
        } else if (name == "eval") {
            odqa::cmd_eval(config, odqa::split_from_string(eval_split), std::cout);
        } else if (name == "sweep") {
            odqa::cmd_sweep(config, ks, odqa::split_from_string(eval_split), std::cout);
        } else if (name == "tune-alpha") {
            odqa::cmd_tune_alpha(config, pairs, step, odqa::tuning_metric_from_string(metric), std::cout);
        } else if (name == "repl") {
            odqa::cmd_repl(config, std::cin, std::cout);
        }
    });
}
