#pragma once

#include "odqa/corpus_store.hpp"
#include "odqa/reader.hpp"
#include "odqa/retriever.hpp"
#include "odqa/selector.hpp"
#include "odqa/text_analysis.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

enum class RetrieverKind { tfidf, bm25 };
enum class Segmentation { on, off, default_per_retriever };
enum class ReaderKind { baseline, remote };

[[nodiscard]] std::string_view to_string(RetrieverKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Segmentation mode) noexcept;
[[nodiscard]] std::string_view to_string(ReaderKind kind) noexcept;
[[nodiscard]] RetrieverKind retriever_kind_from_string(std::string_view name);
[[nodiscard]] Segmentation segmentation_from_string(std::string_view name);
[[nodiscard]] ReaderKind reader_kind_from_string(std::string_view name);

struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::filesystem::path out_dir;  // empty: data_dir
    RetrieverKind retriever = RetrieverKind::bm25;
    Segmentation segmentation = Segmentation::default_per_retriever;
    ReaderKind reader = ReaderKind::baseline;
    std::string endpoint;
    std::size_t k = 5;
    std::optional<double> alpha;  // empty: alpha_tuning.json in data_dir, else 0.5
    std::uint64_t seed = 42;

    std::string compounds_file;     // builtin segmentation dictionary; empty: shipped list
    std::string segmenter_command;  // external segmenter, replaces the dictionary
    std::chrono::milliseconds segmenter_timeout{10'000};
    std::string question_words;  // question-type TSV; empty: shipped list
    std::size_t tfidf_bins = std::size_t{1} << 24;
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    DedupPolicy dedup = DedupPolicy::max;
    bool raw_retriever_scores = false;
    std::size_t max_answer_tokens = 30;
    std::size_t max_parallel = 4;
    std::chrono::milliseconds reader_timeout{30'000};

    std::vector<std::string> argv;  // recorded in manifests
};

/// Throws UsageError on k == 0, alpha outside [0, 1], a remote reader
/// without an endpoint and similar.
void validate(const RunConfig& config);

[[nodiscard]] bool segmentation_enabled(const RunConfig& config) noexcept;
[[nodiscard]] std::filesystem::path output_dir(const RunConfig& config);

/// "<retriever>.idx" for the retriever's default segmentation, otherwise
/// "<retriever>.seg.idx" or "<retriever>.noseg.idx".
[[nodiscard]] std::filesystem::path index_path(const RunConfig& config);

[[nodiscard]] AnalyzerConfig analyzer_config(const RunConfig& config);

struct ResolvedAlpha {
    double value = 0.5;
    std::string source;  // "flag", "tuning file" or "default"
};
[[nodiscard]] ResolvedAlpha resolve_alpha(const RunConfig& config);

/// Throws DataError naming the command to run first when the index is missing.
[[nodiscard]] std::unique_ptr<Retriever> load_retriever(const RunConfig& config);
[[nodiscard]] std::unique_ptr<Reader> make_reader(const RunConfig& config, const Retriever& retriever);

/// Writes "<command>.manifest.json" into `dir`.
void write_manifest(const std::filesystem::path& dir, std::string_view command, const RunConfig& config,
                    const std::string& extra_json, const std::vector<std::string>& outputs, double elapsed_ms);

void cmd_ingest(const RunConfig& config, const std::filesystem::path& input, Split split, std::ostream& out);
void cmd_index(const RunConfig& config, std::ostream& out);
void cmd_stats(const RunConfig& config, std::ostream& out);
void cmd_retrieve_eval(const RunConfig& config, std::vector<std::size_t> ks, Split split, std::ostream& out);
void cmd_answer(const RunConfig& config, std::string_view question, std::ostream& out);
void cmd_eval(const RunConfig& config, Split split, std::ostream& out);
void cmd_sweep(const RunConfig& config, std::vector<std::size_t> ks, Split split, std::ostream& out);
void cmd_tune_alpha(const RunConfig& config, std::size_t n_pairs, double step, TuningMetric metric,
                    std::ostream& out);
void cmd_repl(const RunConfig& config, std::istream& in, std::ostream& out);

}  // namespace odqa
