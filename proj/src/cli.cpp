#include "dbrd/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbrd/evalkit.hpp"
#include "dbrd/extract.hpp"
#include "dbrd/pipeline.hpp"
#include "dbrd/rep.hpp"
#include "dbrd/selection.hpp"
#include "dbrd/tune.hpp"

namespace dbrd {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Flag {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
};

// Pipeline options shared by several subcommands. Values stay textual until
// they are applied on top of the config file, so flags win over the file.
class FlagSet {
  public:
    void add(CLI::App* app, const std::string& names, const std::string& key, const std::string& help) {
        auto& f = flags_.emplace_back(Flag{key, {}, nullptr});
        f.option = app->add_option(names, f.value, help);
    }

    void apply(PipelineConfig& cfg) const {
        for (const auto& f : flags_) {
            if (f.option->count() == 0) continue;
            try {
                cfg.set(f.key, f.value);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
    }

  private:
    std::deque<Flag> flags_;
};

struct Globals {
    std::string workspace = "dbrd-workspace";
    std::string config;
    std::string endpoint;
    std::string llm_model;
    std::size_t max_in_flight = 4;
    int retries = 3;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    const CliIo& io;
    Globals& globals;
};

fs::path workspace_file(const Globals& g, const std::string& name) { return fs::path(g.workspace) / name; }

void ensure_workspace(const Globals& g) { fs::create_directories(g.workspace); }

PipelineConfig base_config(const Globals& g, const FlagSet& flags) {
    PipelineConfig cfg;
    if (!g.config.empty()) {
        for (const auto& [key, value] : read_key_values(g.config)) {
            try {
                cfg.set(key, value);
            } catch (const std::invalid_argument& e) {
                throw UsageError(g.config + ": " + e.what());
            }
        }
    }
    flags.apply(cfg);
    if (!cfg.model_path && fs::exists(workspace_file(g, "model.txt"))) cfg.model_path = workspace_file(g, "model.txt");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

LlmConfig llm_config(const Globals& g) {
    LlmConfig cfg;
    if (!g.endpoint.empty()) cfg.endpoint = g.endpoint;
    if (!g.llm_model.empty()) cfg.model_name = g.llm_model;
    cfg.max_in_flight = g.max_in_flight;
    cfg.max_transport_retries = g.retries;
    cfg.api_key = api_key_from_env();
    return cfg;
}

void print_header(std::ostream& err, const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
    err << "# dbrd " << command << '\n';
    for (const auto& [k, v] : entries) err << "# " << k << " = " << v << '\n';
}

std::vector<std::pair<std::string, std::string>> header_entries(const Context& ctx, const std::string& corpus,
                                                                const PipelineConfig& cfg, bool with_llm) {
    std::vector<std::pair<std::string, std::string>> entries{{"corpus", corpus},
                                                             {"workspace", ctx.globals.workspace},
                                                             {"config", ctx.globals.config}};
    for (auto& e : cfg.describe()) entries.push_back(std::move(e));
    if (with_llm) {
        const auto llm = llm_config(ctx.globals);
        entries.emplace_back("endpoint", llm.endpoint);
        entries.emplace_back("llm_model", llm.model_name);
        entries.emplace_back("temperature", std::to_string(llm.temperature));
        entries.emplace_back("llm_seed", std::to_string(llm.seed));
        entries.emplace_back("max_in_flight", std::to_string(llm.max_in_flight));
        entries.emplace_back("retries", std::to_string(llm.max_transport_retries));
        entries.emplace_back("api_key", llm.api_key.empty() ? "unset" : "set (LLM_API_KEY)");
    }
    return entries;
}

std::unique_ptr<ChatClient> make_client(const Context& ctx) {
    auto cfg = llm_config(ctx.globals);
    if (cfg.api_key.empty()) ctx.err << "warning: LLM_API_KEY is not set\n";
    auto transport = ctx.io.transport ? ctx.io.transport : std::make_shared<HttplibTransport>();
    return std::make_unique<ChatClient>(std::move(cfg), std::move(transport));
}

RepModel model_for(const Context& ctx, const Corpus& corpus, const RepContext& rep, const PipelineConfig& cfg) {
    const bool tuned = !cfg.model_path && !corpus.train_pairs().empty();
    RepModel model = resolve_model(corpus, rep, cfg, ctx.err);
    if (tuned) {
        ensure_workspace(ctx.globals);
        const auto path = workspace_file(ctx.globals, "model.txt");
        save_model(model, path);
        ctx.err << "saved tuned model to " << path.string() << '\n';
    }
    return model;
}

void print_corpus_summary(std::ostream& out, const Corpus& corpus) {
    std::size_t dup_train = 0;
    for (const auto& p : corpus.train_pairs()) dup_train += p.is_duplicate ? 1 : 0;
    std::size_t dup_valid = 0;
    for (const auto& p : corpus.valid_pairs()) dup_valid += p.is_duplicate ? 1 : 0;
    out << "reports\t" << corpus.size() << '\n'
        << "buckets\t" << corpus.buckets().size() << '\n'
        << "duplicates\t" << corpus.size() - corpus.buckets().size() << '\n'
        << "train_pairs\t" << corpus.train_pairs().size() << " (" << dup_train << " duplicate)\n"
        << "valid_pairs\t" << corpus.valid_pairs().size() << " (" << dup_valid << " duplicate)\n"
        << "test_queries\t" << corpus.test_queries().size() << '\n';
}

void print_rr(std::ostream& out, const EvalReport& report) {
    out << "k\trr\tn_recalled\tn_total\n";
    for (const auto& [k, rr] : report.rr_at_k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", rr);
        out << k << '\t' << buf << '\t' << report.n_recalled_at_k.at(k) << '\t'
            << report.n_total * report.runs_averaged << '\n';
    }
}

std::string percent(std::size_t part, std::size_t whole) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole));
    return buf;
}

// --- commands ---------------------------------------------------------------

int cmd_ingest(const Context& ctx, const std::string& corpus_path, const std::string& out_dir) {
    print_header(ctx.err, "ingest", {{"corpus", corpus_path}, {"out", out_dir}});
    const Corpus corpus = load_corpus(corpus_path);
    print_corpus_summary(ctx.out, corpus);
    if (!out_dir.empty()) {
        save_corpus(corpus, out_dir);
        ctx.err << "wrote " << out_dir << '\n';
    }
    return kExitOk;
}

int cmd_stats(const Context& ctx, const std::string& corpus_path) {
    print_header(ctx.err, "stats", {{"corpus", corpus_path}});
    const Corpus corpus = load_corpus(corpus_path);
    print_corpus_summary(ctx.out, corpus);

    std::size_t largest = 0;
    for (const auto& b : corpus.buckets()) largest = std::max(largest, b.members.size());
    ctx.out << "largest_bucket\t" << largest << '\n';
    ctx.out << "test_period_reports\t" << corpus.test_period().size() << '\n';

    const auto reports = corpus.reports();
    std::size_t product = 0, component = 0, type = 0, priority = 0, version = 0, words = 0;
    for (const auto& r : reports) {
        product += r.product ? 1 : 0;
        component += r.component ? 1 : 0;
        type += r.type ? 1 : 0;
        priority += r.priority ? 1 : 0;
        version += r.version ? 1 : 0;
        words += word_count(r.description);
    }
    const auto n = reports.size();
    ctx.out << "has_product\t" << percent(product, n) << '\n'
            << "has_component\t" << percent(component, n) << '\n'
            << "has_type\t" << percent(type, n) << '\n'
            << "has_priority\t" << percent(priority, n) << '\n'
            << "has_version\t" << percent(version, n) << '\n';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", n == 0 ? 0.0 : static_cast<double>(words) / static_cast<double>(n));
    ctx.out << "mean_description_words\t" << buf << '\n';
    const auto training = corpus.training_reports();
    if (!training.empty()) ctx.out << "length_threshold_p75\t" << length_threshold(training) << '\n';
    return kExitOk;
}

int cmd_select(const Context& ctx, const std::string& corpus_path, const FlagSet& flags, bool rule_given) {
    auto cfg = base_config(ctx.globals, flags);
    print_header(ctx.err, "select", header_entries(ctx, corpus_path, cfg, false));
    const Corpus corpus = load_corpus(corpus_path);
    const auto training = corpus.training_reports();

    std::vector<RuleKind> kinds;
    if (rule_given || !ctx.globals.config.empty()) kinds.push_back(cfg.rule.kind);
    else kinds = {RuleKind::content, RuleKind::length, RuleKind::length_or_content};

    std::optional<std::size_t> threshold = cfg.rule.length_threshold;
    auto resolved_threshold = [&]() {
        if (!threshold) threshold = length_threshold(training);
        return *threshold;
    };

    ctx.out << "rule\tselected\ttotal\tratio\n";
    const auto queries = corpus.test_queries();
    for (auto kind : kinds) {
        SelectionRule rule{kind, std::nullopt};
        if (rule.uses_length()) rule.length_threshold = resolved_threshold();
        std::size_t selected = 0;
        for (const auto& id : queries) selected += is_selected(corpus.report(id), rule) ? 1 : 0;
        ctx.out << to_string(kind) << '\t' << selected << '\t' << queries.size() << '\t'
                << percent(selected, queries.size()) << '\n';
    }
    if (threshold) ctx.err << "length threshold: " << *threshold << " words\n";
    return kExitOk;
}

int cmd_extract(const Context& ctx, const std::string& corpus_path, const FlagSet& flags, const std::string& out_path) {
    auto cfg = base_config(ctx.globals, flags);
    if (cfg.extractor == ExtractorKind::none) throw UsageError("extract needs --extractor tfidf, yake or llm");
    const bool llm = cfg.extractor == ExtractorKind::llm;
    auto entries = header_entries(ctx, corpus_path, cfg, llm);
    entries.emplace_back("out", out_path.empty() ? "-" : out_path);
    print_header(ctx.err, "extract", entries);

    const Corpus corpus = load_corpus(corpus_path);
    const auto training = corpus.training_reports();
    SelectionRule rule = cfg.rule;
    if (rule.uses_length() && !rule.length_threshold) rule.length_threshold = length_threshold(training);

    std::vector<BugReport> targets;
    for (const auto& id : corpus.test_queries()) {
        const auto& r = corpus.report(id);
        if (is_selected(r, rule)) targets.push_back(r);
    }
    ctx.err << "extracting keywords for " << targets.size() << " selected queries\n";

    std::optional<FieldIndex> stats;
    if (cfg.extractor == ExtractorKind::tfidf) {
        stats = FieldIndex::build(std::span<const BugReport>(training), NgramOrder::unigram, PrepConfig::defaults());
    }
    std::unique_ptr<ChatClient> client;
    std::unique_ptr<KeywordCache> cache;
    std::optional<PromptTemplate> prompt;
    if (llm) {
        client = make_client(ctx);
        ensure_workspace(ctx.globals);
        cache = std::make_unique<KeywordCache>(workspace_file(ctx.globals, "keywords.jsonl"));
        prompt = cfg.template_path ? PromptTemplate::load(cfg.template_name, *cfg.template_path)
                                   : PromptTemplate::builtin(cfg.template_name);
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
    }
    std::ostream& sink = out_path.empty() ? ctx.out : file;

    const std::size_t runs = cfg.effective_runs();
    std::size_t failures = 0;
    for (std::size_t run = 0; run < runs; ++run) {
        std::vector<std::optional<KeywordResult>> results(targets.size());
        std::vector<std::string> errors(targets.size());
        parallel_for(targets.size(), cfg.jobs, [&](std::size_t i) {
            const auto& r = targets[i];
            try {
                switch (cfg.extractor) {
                    case ExtractorKind::tfidf: results[i] = extract_tfidf(r, *stats, cfg.n_best); break;
                    case ExtractorKind::yake: results[i] = extract_yake(r, cfg.n_best); break;
                    case ExtractorKind::llm: {
                        const CacheKey key{r.id, prompt->name, run};
                        if (auto hit = cache->get(key)) {
                            results[i] = *hit;
                        } else {
                            results[i] = extract_llm(r, *prompt, *client);
                            cache->put(key, *results[i]);
                        }
                        break;
                    }
                    case ExtractorKind::none: break;
                }
            } catch (const ExtractionError& e) {
                errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (!results[i]) {
                ++failures;
                ctx.err << "run " << run << ": " << errors[i] << '\n';
                continue;
            }
            sink << nlohmann::json{{"report_id", targets[i].id},
                                   {"extractor", to_string(cfg.extractor)},
                                   {"run", run},
                                   {"summary_kw", results[i]->summary_kw},
                                   {"description_kw", results[i]->description_kw}}
                        .dump()
                 << '\n';
        }
    }
    if (failures > 0) ctx.err << failures << " extraction(s) failed\n";
    return kExitOk;
}

int cmd_tune(const Context& ctx, const std::string& corpus_path, const FlagSet& flags, std::string out_path) {
    PipelineConfig cfg;
    if (!ctx.globals.config.empty()) cfg = base_config(ctx.globals, flags);
    else flags.apply(cfg);
    if (out_path.empty()) out_path = workspace_file(ctx.globals, "model.txt").string();
    print_header(ctx.err, "tune",
                 {{"corpus", corpus_path},
                  {"workspace", ctx.globals.workspace},
                  {"out", out_path},
                  {"learning_rate", std::to_string(cfg.tune.learning_rate)},
                  {"epochs", std::to_string(cfg.tune.epochs)},
                  {"seed", std::to_string(cfg.tune.seed)}});
    const Corpus corpus = load_corpus(corpus_path);
    if (corpus.train_pairs().empty()) throw std::runtime_error("corpus has no training pairs");
    const RepContext rep(corpus);
    const auto result = tune(RepModel{}, rep, corpus.train_pairs(), corpus.valid_pairs(), cfg.tune);
    for (std::size_t e = 0; e < result.valid_loss_per_epoch.size(); ++e) {
        ctx.err << "epoch " << e + 1 << " validation loss " << result.valid_loss_per_epoch[e] << '\n';
    }
    const auto parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    save_model(result.model, out_path);
    ctx.out << "model\t" << out_path << '\n'
            << "initial_valid_loss\t" << result.initial_valid_loss << '\n'
            << "best_valid_loss\t" << result.best_valid_loss << '\n'
            << "best_epoch\t" << result.best_epoch << '\n';
    return kExitOk;
}

int cmd_rank(const Context& ctx, const std::string& corpus_path, const FlagSet& flags, const std::string& query,
             std::size_t k) {
    auto cfg = base_config(ctx.globals, flags);
    auto entries = header_entries(ctx, corpus_path, cfg, false);
    entries.emplace_back("query", query);
    entries.emplace_back("k", std::to_string(k));
    print_header(ctx.err, "rank", entries);
    if (k == 0) throw UsageError("--k must be at least 1");
    const Corpus corpus = load_corpus(corpus_path);
    if (!corpus.contains(query)) throw std::runtime_error("unknown query report " + query);
    const RepContext rep(corpus);
    const RepModel model = model_for(ctx, corpus, rep, cfg);
    for (const auto& b : rank(model, rep, query, k, cfg.scoring)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", b.score);
        ctx.out << b.master << '\t' << buf << '\n';
    }
    return kExitOk;
}

int run_evaluation(const Context& ctx, const std::string& command, const std::string& corpus_path, PipelineConfig cfg,
                   std::string out_path, const std::string& compare, std::string venn, std::size_t venn_k) {
    const bool llm = cfg.extractor == ExtractorKind::llm;
    if (out_path.empty()) out_path = workspace_file(ctx.globals, command + ".json").string();
    auto entries = header_entries(ctx, corpus_path, cfg, llm);
    entries.emplace_back("out", out_path);
    if (!compare.empty()) {
        if (venn.empty()) venn = workspace_file(ctx.globals, command + "_venn.csv").string();
        entries.emplace_back("compare", compare);
        entries.emplace_back("venn", venn);
        entries.emplace_back("venn_k", std::to_string(venn_k));
    }
    print_header(ctx.err, command, entries);

    const Corpus corpus = load_corpus(corpus_path);
    const RepContext rep(corpus);
    const RepModel model = model_for(ctx, corpus, rep, cfg);

    std::unique_ptr<ChatClient> client;
    std::unique_ptr<KeywordCache> cache;
    PipelineEnv env;
    env.log = &ctx.err;
    if (llm) {
        client = make_client(ctx);
        ensure_workspace(ctx.globals);
        cache = std::make_unique<KeywordCache>(workspace_file(ctx.globals, "keywords.jsonl"));
        env.client = client.get();
        env.cache = cache.get();
    }
    const auto result = run_pipeline(corpus, rep, model, cfg, env);
    ctx.err << "selected " << result.selected << " of " << corpus.test_queries().size() << " queries";
    if (result.rule.length_threshold) ctx.err << " (length threshold " << *result.rule.length_threshold << ")";
    ctx.err << "; " << result.fallbacks << " extraction fallback(s)\n";

    const auto parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_report(result.report, out_path);
    print_rr(ctx.out, result.report);
    ctx.err << "wrote " << out_path << " and " << csv_path_for(out_path).string() << '\n';

    if (!compare.empty()) {
        const auto other = read_report(compare);
        // Overlap is per run; compare the first run of each report.
        std::vector<RankedPrediction> a, b;
        for (const auto& p : result.report.per_query) if (p.run == 0) a.push_back(p);
        for (const auto& p : other.per_query) if (p.run == 0) b.push_back(p);
        const auto counts = overlap_counts(a, b, venn_k);
        write_overlap_csv(counts, venn);
        ctx.err << "overlap at k=" << venn_k << ": only_this=" << counts.only_a << " only_other=" << counts.only_b
                << " both=" << counts.both << " neither=" << counts.neither << " -> " << venn << '\n';
    }
    return kExitOk;
}

void add_pipeline_flags(CLI::App* app, FlagSet& flags, bool extraction, bool tuning) {
    flags.add(app, "--model", "model_path", "REP parameter file (default: <workspace>/model.txt, else tuned)");
    flags.add(app, "--k-max", "k_max", "Largest cut-off k for RR@k (default 10)");
    flags.add(app, "--scoring", "scoring", "Bucket score: max or master (default max)");
    flags.add(app, "--jobs", "jobs", "Worker threads for ranking and extraction (default 1)");
    if (extraction) {
        flags.add(app, "--select,--rule", "rule", "Selection rule: none, content, length, both (default none)");
        flags.add(app, "--length-threshold", "length_threshold", "Word threshold for the length rule (default p75)");
        flags.add(app, "--extractor", "extractor", "none, tfidf, yake or llm (default none)");
        flags.add(app, "--template", "template", "Prompt template: final, concise, verbose (default final)");
        flags.add(app, "--template-file", "template_path", "Custom prompt template file");
        flags.add(app, "--runs", "runs", "Runs to average (default 5 for llm, 1 otherwise)");
        flags.add(app, "--n-best", "n_best", "Keywords per field for tfidf and yake (default 10)");
    }
    if (tuning) {
        flags.add(app, "--epochs", "epochs", "Tuning epochs (default 30)");
        flags.add(app, "--lr", "learning_rate", "Tuning learning rate (default 0.001)");
        flags.add(app, "--seed", "seed", "Tuning seed (default 42)");
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const CliIo& io) {
    std::ostream& out = io.out ? *io.out : std::cout;
    std::ostream& err = io.err ? *io.err : std::cerr;

    CLI::App app{"Duplicate bug report retrieval: selection, keyword extraction and REP ranking"};
    app.require_subcommand(1, 1);
    app.footer("Option precedence: command-line flag > --config file > built-in default.\n"
               "The LLM API key is read from the LLM_API_KEY environment variable.\n"
               "Exit status: 0 success, 1 runtime error, 2 usage error.");

    Globals globals;
    app.add_option("--workspace", globals.workspace, "Directory for caches (model, keywords, reports)")
        ->capture_default_str();
    app.add_option("--config", globals.config, "key = value file with pipeline options")->check(CLI::ExistingFile);
    app.add_option("--endpoint", globals.endpoint, "Chat-completions endpoint URL");
    app.add_option("--llm-model", globals.llm_model, "Model name sent to the endpoint");
    app.add_option("--max-in-flight", globals.max_in_flight, "Concurrent LLM requests")->capture_default_str();
    app.add_option("--retries", globals.retries, "Transport retries per LLM request")->capture_default_str();

    std::string corpus_path;
    auto add_corpus = [&](CLI::App* sub) {
        sub->add_option("corpus", corpus_path, "reports.jsonl file or corpus directory")
            ->required()
            ->check(CLI::ExistingPath);
    };

    auto* ingest = app.add_subcommand("ingest", "Validate and load a corpus, print its statistics");
    add_corpus(ingest);
    std::string ingest_out;
    ingest->add_option("--out", ingest_out, "Write the normalized corpus directory here");

    auto* stats = app.add_subcommand("stats", "Print detailed corpus statistics");
    add_corpus(stats);

    FlagSet select_flags;
    auto* select_cmd = app.add_subcommand("select", "Count test queries matched by the selection rules");
    add_corpus(select_cmd);
    select_flags.add(select_cmd, "--select,--rule", "rule", "Rule to count (default: content, length and both)");
    select_flags.add(select_cmd, "--length-threshold", "length_threshold", "Word threshold (default p75)");

    FlagSet extract_flags;
    std::string extract_out;
    auto* extract_cmd = app.add_subcommand("extract", "Extract keywords for the selected test queries");
    add_corpus(extract_cmd);
    add_pipeline_flags(extract_cmd, extract_flags, true, false);
    extract_cmd->add_option("--out", extract_out, "JSONL output (default stdout)");

    FlagSet tune_flags;
    std::string tune_out;
    auto* tune_cmd = app.add_subcommand("tune", "Fit REP parameters on the training pairs");
    add_corpus(tune_cmd);
    tune_flags.add(tune_cmd, "--epochs", "epochs", "Epochs (default 30)");
    tune_flags.add(tune_cmd, "--lr", "learning_rate", "Learning rate (default 0.001)");
    tune_flags.add(tune_cmd, "--seed", "seed", "Seed (default 42)");
    tune_cmd->add_option("--out", tune_out, "Parameter file (default <workspace>/model.txt)");

    FlagSet rank_flags;
    std::string query;
    std::size_t k = 10;
    auto* rank_cmd = app.add_subcommand("rank", "Print the top-k bucket masters for one query");
    add_corpus(rank_cmd);
    add_pipeline_flags(rank_cmd, rank_flags, false, true);
    rank_cmd->add_option("--query", query, "Query report id")->required();
    rank_cmd->add_option("--k", k, "Number of masters")->capture_default_str();

    FlagSet eval_flags;
    std::string eval_out, compare, venn;
    std::size_t venn_k = 10;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate plain REP on the test queries");
    add_corpus(eval_cmd);
    add_pipeline_flags(eval_cmd, eval_flags, false, true);
    eval_cmd->add_option("--out", eval_out, "Report JSON (default <workspace>/eval.json); a .csv is written alongside");
    eval_cmd->add_option("--compare", compare, "Another report JSON for overlap counts")->check(CLI::ExistingFile);
    eval_cmd->add_option("--venn", venn, "Overlap CSV (default <workspace>/eval_venn.csv)");
    eval_cmd->add_option("--venn-k", venn_k, "Cut-off for overlap counts")->capture_default_str();

    FlagSet pipe_flags;
    std::string pipe_out, pipe_compare, pipe_venn;
    std::size_t pipe_venn_k = 10;
    auto* pipe_cmd = app.add_subcommand("pipeline", "Select, extract, rank and evaluate");
    add_corpus(pipe_cmd);
    add_pipeline_flags(pipe_cmd, pipe_flags, true, true);
    pipe_cmd->add_option("--out", pipe_out, "Report JSON (default <workspace>/pipeline.json)");
    pipe_cmd->add_option("--compare", pipe_compare, "Another report JSON for overlap counts")
        ->check(CLI::ExistingFile);
    pipe_cmd->add_option("--venn", pipe_venn, "Overlap CSV (default <workspace>/pipeline_venn.csv)");
    pipe_cmd->add_option("--venn-k", pipe_venn_k, "Cut-off for overlap counts")->capture_default_str();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("dbrd");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    Context ctx{out, err, io, globals};
    try {
        if (*ingest) return cmd_ingest(ctx, corpus_path, ingest_out);
        if (*stats) return cmd_stats(ctx, corpus_path);
        if (*select_cmd) return cmd_select(ctx, corpus_path, select_flags, select_cmd->count("--select") > 0);
        if (*extract_cmd) return cmd_extract(ctx, corpus_path, extract_flags, extract_out);
        if (*tune_cmd) return cmd_tune(ctx, corpus_path, tune_flags, tune_out);
        if (*rank_cmd) return cmd_rank(ctx, corpus_path, rank_flags, query, k);
        if (*eval_cmd) {
            auto cfg = base_config(globals, eval_flags);
            cfg.extractor = ExtractorKind::none;
            cfg.rule = SelectionRule{};
            cfg.runs = 1;
            return run_evaluation(ctx, "eval", corpus_path, cfg, eval_out, compare, venn, venn_k);
        }
        if (*pipe_cmd) {
            return run_evaluation(ctx, "pipeline", corpus_path, base_config(globals, pipe_flags), pipe_out,
                                  pipe_compare, pipe_venn, pipe_venn_k);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << "Run with --help for usage.\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace dbrd
