#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbrd/corpus.hpp"
#include "dbrd/evalkit.hpp"
#include "dbrd/extract.hpp"
#include "dbrd/rep.hpp"
#include "dbrd/selection.hpp"
#include "dbrd/tune.hpp"

namespace dbrd {

enum class ExtractorKind { none, tfidf, yake, llm };

std::string to_string(ExtractorKind kind);
ExtractorKind parse_extractor(std::string_view text);

struct PipelineConfig {
    SelectionRule rule;  // a missing length threshold is computed from the training reports
    ExtractorKind extractor = ExtractorKind::none;
    std::string template_name = "final";
    std::optional<std::filesystem::path> template_path;
    std::optional<std::size_t> runs;  // 5 for llm, 1 otherwise
    std::size_t k_max = 10;
    std::optional<std::filesystem::path> model_path;
    BucketScoring scoring = BucketScoring::max;
    std::size_t n_best = 10;
    std::size_t jobs = 1;
    TuneOptions tune;

    std::size_t effective_runs() const { return runs.value_or(extractor == ExtractorKind::llm ? 5 : 1); }
    void validate() const;

    /// Sets one option from its textual form; throws std::invalid_argument on
    /// unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Every option with its effective value, in a stable order.
    std::vector<std::pair<std::string, std::string>> describe() const;
};

/// Reads "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineEnv {
    CompletionClient* client = nullptr;  // required for extractor=llm
    KeywordCache* cache = nullptr;       // optional, llm only
    std::ostream* log = nullptr;         // diagnostics; defaults to std::cerr
};

struct PipelineResult {
    EvalReport report;  // averaged over runs
    std::vector<EvalReport> per_run;
    RepModel model;
    SelectionRule rule;  // with the threshold filled in
    std::size_t selected = 0;
    std::size_t fallbacks = 0;  // failed extractions, summed over runs
};

/// Resolves the REP parameters: the model file when given, otherwise tuning
/// on the corpus' training pairs, otherwise the defaults.
RepModel resolve_model(const Corpus& corpus, const RepContext& ctx, const PipelineConfig& cfg, std::ostream& log);

/// Selects test queries, rewrites the selected ones with the extractor, ranks
/// every query against the unchanged repository and averages RR@k over runs.
PipelineResult run_pipeline(const Corpus& corpus, const PipelineConfig& cfg, const PipelineEnv& env = {});

/// Same, with an already built context and model.
PipelineResult run_pipeline(const Corpus& corpus, const RepContext& ctx, const RepModel& model,
                            const PipelineConfig& cfg, const PipelineEnv& env = {});

/// Ranks the given query reports in parallel (up to `jobs` threads).
std::vector<RankedPrediction> rank_queries(const RepModel& model, const RepContext& ctx,
                                           const std::vector<BugReport>& queries, std::size_t k,
                                           BucketScoring scoring, std::size_t jobs, std::size_t run = 0);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace dbrd
