#include "dbrd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dbrd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("bad value '" + std::string(value) + "' for " + std::string(key));
    }
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string s(value);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("bad value '" + s + "' for " + std::string(key));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string to_string(ExtractorKind kind) {
    switch (kind) {
        case ExtractorKind::none: return "none";
        case ExtractorKind::tfidf: return "tfidf";
        case ExtractorKind::yake: return "yake";
        case ExtractorKind::llm: return "llm";
    }
    return "none";
}

ExtractorKind parse_extractor(std::string_view text) {
    if (text == "none") return ExtractorKind::none;
    if (text == "tfidf") return ExtractorKind::tfidf;
    if (text == "yake") return ExtractorKind::yake;
    if (text == "llm") return ExtractorKind::llm;
    throw std::invalid_argument("unknown extractor '" + std::string(text) + "' (none, tfidf, yake, llm)");
}

void PipelineConfig::validate() const {
    if (runs && *runs == 0) throw std::invalid_argument("runs must be at least 1");
    if (k_max == 0) throw std::invalid_argument("k_max must be at least 1");
    if (n_best == 0) throw std::invalid_argument("n_best must be at least 1");
    if (jobs == 0) throw std::invalid_argument("jobs must be at least 1");
    if (!rule.uses_length() && rule.length_threshold) {
        throw std::invalid_argument("length_threshold given for rule " + to_string(rule.kind));
    }
    if (extractor == ExtractorKind::llm && !template_path) PromptTemplate::builtin(template_name);
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "rule" || key == "select") {
        rule.kind = parse_rule_kind(value);
    } else if (key == "length_threshold") {
        if (value.empty() || value == "auto") rule.length_threshold.reset();
        else rule.length_threshold = parse_number<std::size_t>(key, value);
    } else if (key == "extractor") {
        extractor = parse_extractor(value);
    } else if (key == "template") {
        template_name = std::string(value);
    } else if (key == "template_path") {
        if (value.empty()) template_path.reset();
        else template_path = std::filesystem::path(value);
    } else if (key == "runs") {
        if (value.empty() || value == "auto") runs.reset();
        else runs = parse_number<std::size_t>(key, value);
    } else if (key == "k_max") {
        k_max = parse_number<std::size_t>(key, value);
    } else if (key == "model_path") {
        if (value.empty()) model_path.reset();
        else model_path = std::filesystem::path(value);
    } else if (key == "scoring") {
        scoring = parse_bucket_scoring(value);
    } else if (key == "n_best") {
        n_best = parse_number<std::size_t>(key, value);
    } else if (key == "jobs") {
        jobs = parse_number<std::size_t>(key, value);
    } else if (key == "learning_rate") {
        tune.learning_rate = parse_double(key, value);
    } else if (key == "epochs") {
        tune.epochs = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
        tune.seed = parse_number<std::uint64_t>(key, value);
    } else {
        throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
    }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::describe() const {
    return {
        {"rule", to_string(rule.kind)},
        {"length_threshold", rule.length_threshold ? std::to_string(*rule.length_threshold) : "auto"},
        {"extractor", to_string(extractor)},
        {"template", template_name},
        {"template_path", template_path ? template_path->string() : ""},
        {"runs", std::to_string(effective_runs())},
        {"k_max", std::to_string(k_max)},
        {"model_path", model_path ? model_path->string() : ""},
        {"scoring", to_string(scoring)},
        {"n_best", std::to_string(n_best)},
        {"jobs", std::to_string(jobs)},
        {"learning_rate", format_double(tune.learning_rate)},
        {"epochs", std::to_string(tune.epochs)},
        {"seed", std::to_string(tune.seed)},
        {"reindex_queries", "off"},
    };
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        out[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
    }
    return out;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    PipelineConfig cfg;
    for (const auto& [key, value] : read_key_values(path)) cfg.set(key, value);
    cfg.validate();
    return cfg;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(std::max<std::size_t>(1, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

std::vector<RankedPrediction> rank_queries(const RepModel& model, const RepContext& ctx,
                                           const std::vector<BugReport>& queries, std::size_t k,
                                           BucketScoring scoring, std::size_t jobs, std::size_t run) {
    std::vector<RankedPrediction> preds(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        const auto& q = queries[i];
        auto& p = preds[i];
        p.query = q.id;
        p.truth_master = ctx.corpus().master_of(q.id);
        p.run = run;
        for (auto& b : rank(model, ctx, q, k, scoring)) p.ranked_masters.push_back(std::move(b.master));
    });
    return preds;
}

RepModel resolve_model(const Corpus& corpus, const RepContext& ctx, const PipelineConfig& cfg, std::ostream& log) {
    if (cfg.model_path) return load_model(*cfg.model_path);
    if (corpus.train_pairs().empty()) {
        log << "no model file and no training pairs; using default parameters\n";
        return RepModel{};
    }
    const auto result = tune(RepModel{}, ctx, corpus.train_pairs(), corpus.valid_pairs(), cfg.tune);
    log << "tuned model: validation loss " << result.initial_valid_loss << " -> " << result.best_valid_loss
        << " (epoch " << result.best_epoch << ")\n";
    return result.model;
}

PipelineResult run_pipeline(const Corpus& corpus, const PipelineConfig& cfg, const PipelineEnv& env) {
    cfg.validate();
    std::ostream& log = env.log ? *env.log : std::cerr;
    const RepContext ctx(corpus);
    const RepModel model = resolve_model(corpus, ctx, cfg, log);
    return run_pipeline(corpus, ctx, model, cfg, env);
}

PipelineResult run_pipeline(const Corpus& corpus, const RepContext& ctx, const RepModel& model,
                            const PipelineConfig& cfg, const PipelineEnv& env) {
    cfg.validate();
    std::ostream& log = env.log ? *env.log : std::cerr;
    if (corpus.test_queries().empty()) throw std::invalid_argument("corpus has no test queries");

    PipelineResult result;
    result.model = model;
    result.rule = cfg.rule;
    const auto training = corpus.training_reports();
    if (result.rule.uses_length() && !result.rule.length_threshold) {
        result.rule.length_threshold = length_threshold(training);
    }
    result.rule.validate();

    std::vector<BugReport> originals;
    std::vector<bool> selected;
    for (const auto& id : corpus.test_queries()) {
        originals.push_back(corpus.report(id));
        selected.push_back(cfg.extractor != ExtractorKind::none && is_selected(originals.back(), result.rule));
    }
    result.selected = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));

    std::optional<FieldIndex> tfidf_stats;
    if (cfg.extractor == ExtractorKind::tfidf) {
        tfidf_stats = FieldIndex::build(std::span<const BugReport>(training), NgramOrder::unigram, PrepConfig::defaults());
    }
    std::optional<PromptTemplate> prompt;
    if (cfg.extractor == ExtractorKind::llm) {
        if (!env.client) throw std::invalid_argument("extractor llm needs a completion client");
        prompt = cfg.template_path ? PromptTemplate::load(cfg.template_name, *cfg.template_path)
                                   : PromptTemplate::builtin(cfg.template_name);
    }

    std::mutex log_mutex;
    std::atomic<std::size_t> fallbacks{0};
    auto extract = [&](const BugReport& report, std::size_t run) -> KeywordResult {
        switch (cfg.extractor) {
            case ExtractorKind::tfidf: return extract_tfidf(report, *tfidf_stats, cfg.n_best);
            case ExtractorKind::yake: return extract_yake(report, cfg.n_best);
            case ExtractorKind::llm: {
                const CacheKey key{report.id, prompt->name, run};
                if (env.cache) {
                    if (auto hit = env.cache->get(key)) return *hit;
                }
                auto kw = extract_llm(report, *prompt, *env.client);
                if (env.cache) env.cache->put(key, kw);
                return kw;
            }
            case ExtractorKind::none: break;
        }
        throw std::logic_error("no extractor");
    };

    const std::size_t runs = cfg.effective_runs();
    for (std::size_t run = 0; run < runs; ++run) {
        std::vector<BugReport> queries = originals;
        parallel_for(queries.size(), cfg.jobs, [&](std::size_t i) {
            if (!selected[i]) return;
            try {
                queries[i] = rewrite_report(originals[i], extract(originals[i], run));
            } catch (const std::exception& e) {
                ++fallbacks;
                std::lock_guard lock(log_mutex);
                log << "run " << run << ": extraction failed for report " << originals[i].id
                    << ", keeping original text: " << e.what() << '\n';
            }
        });
        result.per_run.push_back(
            make_report(rank_queries(model, ctx, queries, cfg.k_max, cfg.scoring, cfg.jobs, run), cfg.k_max));
    }
    result.report = average_runs(result.per_run);
    result.fallbacks = fallbacks.load();
    return result;
}

}  // namespace dbrd
