// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbrd/evalkit.hpp"
#include "dbrd/extract.hpp"
#include "dbrd/pipeline.hpp"
#include "dbrd/rep.hpp"
#include "dbrd/selection.hpp"
#include "dbrd/tune.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace dbrd {
namespace {

using Clock = std::chrono::steady_clock;
using testing::report;

constexpr double kBm25fTolerance = 1e-9;
constexpr double kBm25fSeconds = 1.0;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientRelError = 1e-4;
constexpr double kGradientFloor = 1e-8;
constexpr double kGradientSeconds = 5.0;
constexpr double kRecallSeconds = 5.0;
constexpr double kTfidfTolerance = 1e-12;
constexpr double kSyntheticMinRr10 = 0.9;
constexpr double kSyntheticSeconds = 30.0;
constexpr double kSparkRr10 = 0.556;
constexpr double kSparkRr10Tolerance = 0.05;
constexpr std::size_t kSparkContentSelected = 1466;
constexpr double kSparkContentTolerance = 0.01;

// Reports that finished EvalReports feed into the monotonicity check.
std::vector<EvalReport> produced_reports;

struct Outcome {
    enum class Status { pass, fail, skip } status = Status::pass;
    std::string detail;
};

class Checker {
  public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        ok_ = ok_ && ok;
    }
    bool ok() const { return ok_; }
    std::string failures() const {
        std::string out;
        for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
        return out;
    }

  private:
    bool ok_ = true;
    std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

Outcome finish(const Checker& c, const std::string& detail) {
    if (c.ok()) return {Outcome::Status::pass, detail};
    return {Outcome::Status::fail, detail + " | " + c.failures()};
}

// 1 -------------------------------------------------------------------------
Outcome bm25f_oracle_check() {
    const auto start = Clock::now();
    const std::vector<BugReport> docs = {
        report("d1", 1, "spark context crash", "context fails on start with null pointer context"),
        report("d2", 2, "ui colors wrong", "the ui shows wrong colors after upgrade"),
        report("d3", 3, "context crash again", "crash crash in spark context init"),
        report("d4", 4, "executor lost", ""),
        report("d5", 5, "shuffle fetch failed", "fetch failed for shuffle block on executor crash"),
    };
    const PrepConfig cfg;
    const auto index = FieldIndex::build(docs, NgramOrder::unigram, cfg);
    std::vector<testing::RawDoc> collection;
    for (const auto& d : docs) {
        collection.push_back({tokenize(d.summary, cfg).tokens, tokenize(d.description, cfg).tokens});
    }
    const std::vector<Bm25fParams> params = {Bm25fParams{}, Bm25fParams{1.2, 0.5, 2.0, 0.7, 0.9, 0.1},
                                             Bm25fParams{0.3, 4.0, 1.0, 1.0, 0.0, 1.0}};
    Checker c;
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& p : params) {
        const testing::RawParams raw{p.k1, p.k3, p.w_summary, p.w_description, p.b_summary, p.b_description};
        for (std::size_t i = 0; i < docs.size(); ++i) {
            for (std::size_t j = 0; j < docs.size(); ++j) {
                const double engine = bm25f_score(index, p, docs[i], docs[j]);
                const double oracle = testing::bm25f_oracle(collection, collection[i], collection[j], raw);
                worst = std::max(worst, std::abs(engine - oracle));
                ++checked;
            }
        }
    }
    const double secs = seconds_since(start);
    c.expect(worst < kBm25fTolerance, "max |delta| " + fmt("%.3g", worst));
    c.expect(secs < kBm25fSeconds, "took " + fmt("%.3f", secs) + " s");
    return finish(c, std::to_string(checked) + " pairs, max |delta| = " + fmt("%.2e", worst) + ", " +
                         fmt("%.3f", secs) + " s");
}

// 2 -------------------------------------------------------------------------
Outcome gradient_check() {
    const auto start = Clock::now();
    // Categorical fields vary so every feature weight has a non-zero derivative.
    const char* products[] = {"Spark", "Hadoop"};
    const char* components[] = {"Core", "SQL", "YARN"};
    const char* priorities[] = {"Blocker", "Major", "Minor", "Trivial"};
    const char* versions[] = {"1.0", "2.1", "2.10", "3.0"};
    std::vector<BugReport> reports;
    std::vector<LabeledPair> pairs;
    for (int i = 0; i < 8; ++i) {
        const std::string rare = "rare" + std::to_string(i);
        auto a = report("A" + std::to_string(i), 3 * i, "error in module " + rare + " startup",
                        "common words here " + rare + " stack trace");
        auto b = report("B" + std::to_string(i), 3 * i + 1, rare + " failure in module",
                        "more common words " + rare, a.id);
        auto n = report("C" + std::to_string(i), 3 * i + 2, "error in module startup", "common words here again");
        for (auto* r : {&a, &b, &n}) {
            const auto k = static_cast<std::size_t>(r->created_at);
            r->product = products[k % 2];
            r->component = components[(k / 2) % 3];
            r->type = (k % 2 == 0) ? "Bug" : "Improvement";
            r->priority = priorities[k % 4];
            r->version = versions[(k / 2) % 4];
        }
        pairs.push_back({a.id, b.id, true});
        pairs.push_back({a.id, n.id, false});
        reports.push_back(a);
        reports.push_back(b);
        reports.push_back(n);
    }
    Corpus::Splits splits;
    splits.train_pairs = pairs;
    const Corpus corpus(reports, splits);
    const RepContext ctx(corpus);
    const PairSet set(ctx, pairs);
    const auto couples = all_couples(set);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> positive(0.2, 3.0);
    Checker c;
    double worst = 0.0;
    std::set<std::size_t> nonzero;
    for (int point = 0; point < 10; ++point) {
        RepModel m;
        for (auto& w : m.w) w = positive(rng) - 1.0;
        for (auto* p : {&m.uni, &m.bi}) {
            *p = Bm25fParams{positive(rng), positive(rng), positive(rng), positive(rng), unit(rng), unit(rng)};
        }
        const auto analytic = pairwise_loss_gradient(m, set, couples);
        const auto base = m.to_vector();
        for (std::size_t i = 0; i < base.size(); ++i) {
            auto plus = base, minus = base;
            plus[i] += kGradientStep;
            minus[i] -= kGradientStep;
            const double numeric = (pairwise_loss(RepModel::from_vector(plus), set, couples) -
                                    pairwise_loss(RepModel::from_vector(minus), set, couples)) /
                                   (2 * kGradientStep);
            const double denom = std::max({std::abs(numeric), std::abs(analytic.grad[i]), kGradientFloor});
            const double rel = std::abs(numeric - analytic.grad[i]) / denom;
            worst = std::max(worst, rel);
            if (std::abs(analytic.grad[i]) > 1e-9) nonzero.insert(i);
            c.expect(rel < kGradientRelError, RepModel::parameter_names()[i] + " rel " + fmt("%.3g", rel));
        }
    }
    const double secs = seconds_since(start);
    c.expect(nonzero.size() == RepModel::kNumParams,
             std::to_string(nonzero.size()) + " of 19 parameters had a non-zero derivative");
    c.expect(secs < kGradientSeconds, "took " + fmt("%.3f", secs) + " s");
    return finish(c, "10 points x 19 parameters, max relative error = " + fmt("%.2e", worst) + ", " +
                         fmt("%.3f", secs) + " s");
}

// 3 -------------------------------------------------------------------------
bool brute_hit(const RankedPrediction& p, std::size_t k) {
    for (std::size_t i = 0; i < p.ranked_masters.size() && i < k; ++i) {
        if (p.ranked_masters[i] == p.truth_master) return true;
    }
    return false;
}

Outcome recall_oracle_check() {
    const auto start = Clock::now();
    std::mt19937_64 rng(99);
    Checker c;
    std::size_t instances = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_reports = 10 + rng() % 41;   // 10..50
        const std::size_t n_buckets = 2 + rng() % 9;     // 2..10
        const char* vocab[] = {"crash", "null", "pointer", "timeout", "disk", "full", "ui", "color", "parser",
                               "error", "memory", "leak", "socket", "closed", "login", "fails"};
        std::vector<BugReport> reports;
        std::vector<std::string> master_of_bucket(n_buckets);
        for (std::size_t i = 0; i < n_reports; ++i) {
            const std::size_t b = i < n_buckets ? i : rng() % n_buckets;
            std::string summary, description;
            for (int w = 0; w < 3; ++w) summary += std::string(vocab[(b * 3 + w + rng() % 2) % 16]) + " ";
            for (int w = 0; w < 8; ++w) description += std::string(vocab[rng() % 16]) + " ";
            auto r = report("R" + std::to_string(i), static_cast<Timestamp>(i), summary, description);
            if (i < n_buckets) master_of_bucket[b] = r.id;
            else r.duplicate_of = master_of_bucket[b];
            reports.push_back(std::move(r));
        }
        if (n_reports <= n_buckets) continue;
        const Corpus corpus = with_default_queries(reports, {});
        const RepContext ctx(corpus);
        std::vector<BugReport> queries;
        for (const auto& id : corpus.test_queries()) queries.push_back(corpus.report(id));

        RepModel other;
        other.uni.w_summary = 0.5;
        other.w[1] = 3.0;
        const std::size_t k_max = 1 + rng() % 10;
        const auto a = rank_queries(RepModel{}, ctx, queries, k_max, BucketScoring::max, 1);
        auto b = rank_queries(other, ctx, queries, k_max, BucketScoring::master, 1);
        std::shuffle(b.begin(), b.end(), rng);
        const auto report_a = make_report(a, k_max);
        produced_reports.push_back(report_a);
        produced_reports.push_back(make_report(b, k_max));

        for (std::size_t k = 1; k <= k_max; ++k) {
            std::size_t hits = 0;
            OverlapCounts expected;
            for (const auto& pa : a) {
                hits += brute_hit(pa, k) ? 1 : 0;
                const auto& pb = *std::find_if(b.begin(), b.end(), [&](const auto& p) { return p.query == pa.query; });
                const bool ha = brute_hit(pa, k), hb = brute_hit(pb, k);
                if (ha && hb) ++expected.both;
                else if (ha) ++expected.only_a;
                else if (hb) ++expected.only_b;
                else ++expected.neither;
            }
            const double brute = static_cast<double>(hits) / static_cast<double>(a.size());
            c.expect(recall_rate(a, k) == brute, "trial " + std::to_string(trial) + " recall at k=" + std::to_string(k));
            c.expect(report_a.rr_at_k.at(k) == brute, "trial " + std::to_string(trial) + " report at k=" + std::to_string(k));
            c.expect(overlap_counts(a, b, k) == expected, "trial " + std::to_string(trial) + " overlap at k=" + std::to_string(k));
        }
        ++instances;
    }
    const double secs = seconds_since(start);
    c.expect(instances == 100, std::to_string(instances) + " instances");
    c.expect(secs < kRecallSeconds, "took " + fmt("%.3f", secs) + " s");
    return finish(c, std::to_string(instances) + " random instances, exact agreement, " + fmt("%.3f", secs) + " s");
}

// 4 -------------------------------------------------------------------------
Outcome selection_check() {
    Checker c;
    const std::vector<std::pair<std::string, bool>> cases = {
        {"SELECT * FROM database.schema.table;", true},
        {"[ERROR] Failed to execute goal org.apache.maven.plugins:maven-javadoc-plugin:3.0.1:javadoc (default-cli) "
         "on project hadoop-hdfs: An error has occurred in Javadoc report generation:",
         true},
        {"java.lang.NullPointerException at com.example.MyClass.myMethod(MyClass.java:42)", true},
        {"The save button does not respond when I click it twice.", false},
        {"The docs at https://spark.apache.org/docs/latest describe this.", true},
    };
    for (const auto& [text, expected] : cases) {
        c.expect(matches_content(text) == expected, "'" + text.substr(0, 30) + "...'");
    }
    c.expect(has_dotted_identifier(cases[0].first) && has_dotted_identifier(cases[1].first) &&
                 has_dotted_identifier(cases[2].first),
             "snippets must match the dotted-identifier pattern itself");
    c.expect(!has_dotted_identifier(cases[4].first.substr(0, 12)), "plain prefix");
    c.expect(has_url(cases[4].first) && !has_url(cases[3].first), "url pattern");
    return finish(c, "3 snippets, plain sentence and URL sentence");
}

// 5 -------------------------------------------------------------------------
Outcome features_check() {
    Checker c;
    auto base = [](std::string id, Timestamp at) {
        auto r = report(std::move(id), at, "alpha beta", "gamma");
        r.product = "Spark";
        r.component = "Core";
        r.type = "Bug";
        r.priority = "Blocker";
        r.version = "2.0";
        return r;
    };
    auto d = base("D", 1);
    auto same = base("Q", 2);
    auto differ = base("P", 3);
    differ.product = "Hadoop";
    differ.component = "SQL";
    differ.type = "Improvement";
    differ.priority = "Minor";  // Blocker=1, Minor=4
    differ.version = "2.0";
    auto missing = report("M", 4, "alpha", "gamma");
    const Corpus corpus({d, same, differ, missing});
    const RepContext ctx(corpus);
    const RepModel model;

    const auto fs = ctx.features(model, d, same);
    const auto fd = ctx.features(model, d, differ);
    const auto fm = ctx.features(model, d, missing);
    for (std::size_t i = 2; i < 5; ++i) {
        c.expect(fs[i] == 1.0, "equal field f" + std::to_string(i + 1) + " = " + fmt("%g", fs[i]));
        c.expect(fd[i] == 0.0, "different field f" + std::to_string(i + 1) + " = " + fmt("%g", fd[i]));
        c.expect(fm[i] == 0.0, "missing field f" + std::to_string(i + 1) + " = " + fmt("%g", fm[i]));
    }
    c.expect(fs[5] == 1.0, "same priority f6 = " + fmt("%g", fs[5]));
    c.expect(fd[5] == 0.25, "priority distance 3 gives f6 = " + fmt("%.17g", fd[5]));
    c.expect(fs[6] == 1.0 && fd[6] == 1.0, "same version f7");
    c.expect(fm[5] == 0.0 && fm[6] == 0.0, "missing priority / version");
    return finish(c, "equality, reciprocal distance and missing-field features exact");
}

// 6 -------------------------------------------------------------------------
Outcome tfidf_check() {
    Checker c;
    const char* summaries[] = {"kafka broker common",   "kafka consumer common", "kafka producer common",
                               "spark driver common",   "spark executor common", "hdfs namenode common",
                               "yarn scheduler common", "zookeeper quorum common"};
    std::vector<BugReport> docs;
    for (int i = 0; i < 8; ++i) docs.push_back(report("t" + std::to_string(i), i, summaries[i]));
    const auto stats = FieldIndex::build(docs, NgramOrder::unigram, PrepConfig{});
    // tf * log2(N / (1 + df)) with N = 8 evaluated by hand.
    const std::vector<std::pair<std::string, double>> expected = {
        {"zorblax", 1 * 3.0},                         // df 0: log2(8)
        {"kafka", 2 * 1.0},                           // df 3: log2(2)
        {"spark", 1 * 1.4150374992788437},            // df 2: log2(8/3)
        {"common", 1 * -0.16992500144231237},         // df 8: log2(8/9)
    };
    const auto scored = tfidf_scores("common kafka spark zorblax kafka", Field::summary, stats);
    c.expect(scored.size() == expected.size(), "term count " + std::to_string(scored.size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(scored.size(), expected.size()); ++i) {
        c.expect(scored[i].term == expected[i].first, "rank " + std::to_string(i) + " is " + scored[i].term);
        worst = std::max(worst, std::abs(scored[i].score - expected[i].second));
    }
    c.expect(worst < kTfidfTolerance, "max |delta| " + fmt("%.3g", worst));
    return finish(c, "8-document corpus, max |delta| = " + fmt("%.2e", worst));
}

// 7 -------------------------------------------------------------------------
Outcome rewrite_check() {
    Checker c;
    std::mt19937_64 rng(7);
    auto word = [&] {
        std::string w;
        const std::size_t len = 1 + rng() % 8;
        for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + rng() % 26);
        return w;
    };
    auto maybe = [&]() -> std::optional<std::string> {
        if (rng() % 4 == 0) return std::nullopt;
        return word();
    };
    for (int i = 0; i < 1000; ++i) {
        BugReport r = report("R-" + std::to_string(i), static_cast<Timestamp>(rng() % 1'000'000'000), word(),
                             word() + " " + word());
        r.product = maybe();
        r.component = maybe();
        r.type = maybe();
        r.priority = maybe();
        r.version = maybe();
        if (rng() % 3 == 0) r.duplicate_of = "R-" + std::to_string(rng() % 1000);
        KeywordResult kw;
        for (std::size_t j = rng() % 6; j > 0; --j) kw.summary_kw.push_back(word());
        for (std::size_t j = rng() % 12; j > 0; --j) kw.description_kw.push_back(word());
        const auto out = rewrite_report(r, kw, rng() % 2 == 0);
        auto expected = r;
        expected.summary = out.summary;
        expected.description = out.description;
        // Byte-level comparison of every other field via the JSON serialization.
        c.expect(report_to_json(out) == report_to_json(expected) && out == expected, "report " + r.id);
    }
    KeywordResult degenerate;
    degenerate.summary_kw = {"deprecated methods"};
    for (int i = 0; i < 246; ++i) degenerate.description_kw.push_back("deprecated methods in Java test suites");
    const auto out = rewrite_report(report("X", 1, "s", "d"), degenerate);
    c.expect(out.description == "deprecated methods in Java test suites", "dedup left: " + out.description.substr(0, 80));
    return finish(c, "1000 random reports unchanged outside text; 246 repeats collapse to 1");
}

// 8 -------------------------------------------------------------------------
Outcome llm_fallback_check() {
    Checker c;
    auto transport = ScriptedTransport::replying("NullPointerException, SparkContext, executor, startup");
    ChatClient client(LlmConfig{}, transport, [](std::chrono::milliseconds) {});
    auto r = report("SPARK-1", 1, "NPE at startup", "java.lang.NullPointerException in SparkContext");
    const auto kw = extract_llm(r, PromptTemplate::builtin("final"), client);
    const std::vector<std::string> mixed = {"NullPointerException", "SparkContext", "executor", "startup"};
    c.expect(transport->request_count() == 5, std::to_string(transport->request_count()) + " requests");
    c.expect(kw.summary_kw == mixed && kw.description_kw == mixed, "both fields take the mixed list");
    for (const auto& req : transport->requests()) {
        const auto body = nlohmann::json::parse(req.body);
        c.expect(body.at("temperature").get<double>() == 0.0, "temperature " + body.at("temperature").dump());
        c.expect(body.at("seed").get<std::int64_t>() == 42, "seed " + body.at("seed").dump());
    }
    return finish(c, std::to_string(transport->request_count()) + " requests, temperature 0, seed 42, fallback to both fields");
}

// 9 -------------------------------------------------------------------------
Outcome synthetic_check() {
    const auto start = Clock::now();
    Checker c;
    std::ostringstream log;
    auto run = [&](ExtractorKind kind) {
        const auto corpus = testing::make_synthetic_corpus();
        const RepContext ctx(corpus);
        PipelineConfig cfg;
        cfg.extractor = kind;
        const auto result = run_pipeline(corpus, ctx, RepModel{}, cfg, {.log = &log});
        return std::make_pair(result.report, corpus.test_queries().size());
    };
    const auto [none, n_queries] = run(ExtractorKind::none);
    const auto tfidf = run(ExtractorKind::tfidf).first;
    const auto again = run(ExtractorKind::tfidf).first;
    produced_reports.push_back(none);
    produced_reports.push_back(tfidf);
    const double secs = seconds_since(start);

    c.expect(n_queries == 40, std::to_string(n_queries) + " planted duplicates");
    c.expect(tfidf.rr_at_k.at(10) >= kSyntheticMinRr10, "tfidf RR@10 " + fmt("%.4f", tfidf.rr_at_k.at(10)));
    c.expect(tfidf.rr_at_k.at(1) > none.rr_at_k.at(1), "tfidf RR@1 must exceed none RR@1");
    c.expect(tfidf == again, "second run differs");
    c.expect(secs < kSyntheticSeconds, "took " + fmt("%.3f", secs) + " s");
    return finish(c, "tfidf RR@10 = " + fmt("%.3f", tfidf.rr_at_k.at(10)) + ", RR@1 = " +
                         fmt("%.3f", tfidf.rr_at_k.at(1)) + " vs none RR@1 = " + fmt("%.3f", none.rr_at_k.at(1)) +
                         ", deterministic, " + fmt("%.2f", secs) + " s");
}

// 10 ------------------------------------------------------------------------
Outcome monotonicity_check() {
    Checker c;
    for (std::size_t i = 0; i < produced_reports.size(); ++i) {
        double prev = -1.0;
        for (const auto& [k, rr] : produced_reports[i].rr_at_k) {
            c.expect(rr >= prev, "report " + std::to_string(i) + " drops at k=" + std::to_string(k));
            prev = rr;
        }
    }
    c.expect(produced_reports.size() >= 4, "no reports collected");
    return finish(c, std::to_string(produced_reports.size()) + " reports non-decreasing in k");
}

// 11 ------------------------------------------------------------------------
Outcome dataset_check() {
    const char* env = std::getenv("DBRD_SPARK_DATA");
    if (env == nullptr || *env == '\0') {
        return {Outcome::Status::skip, "set DBRD_SPARK_DATA to a Spark corpus directory to run"};
    }
    Checker c;
    const Corpus corpus = load_corpus(env);
    std::ostringstream log;
    const RepContext ctx(corpus);
    PipelineConfig cfg;
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    const RepModel model = resolve_model(corpus, ctx, cfg, log);
    const auto result = run_pipeline(corpus, ctx, model, cfg, {.log = &log});
    const double rr10 = result.report.rr_at_k.at(10);
    c.expect(std::abs(rr10 - kSparkRr10) <= kSparkRr10Tolerance, "plain RR@10 " + fmt("%.3f", rr10));

    std::size_t selected = 0;
    for (const auto& id : corpus.test_queries()) {
        selected += matches_content(corpus.report(id).description) ? 1 : 0;
    }
    const double rel = std::abs(static_cast<double>(selected) - static_cast<double>(kSparkContentSelected)) /
                       static_cast<double>(kSparkContentSelected);
    c.expect(rel <= kSparkContentTolerance, "content rule selects " + std::to_string(selected));
    return finish(c, "plain RR@10 = " + fmt("%.3f", rr10) + ", content rule selects " + std::to_string(selected) +
                         " of " + std::to_string(corpus.test_queries().size()));
}

}  // namespace
}  // namespace dbrd

int main() {
    using dbrd::Outcome;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"bm25f-oracle", dbrd::bm25f_oracle_check},
        {"gradient-check", dbrd::gradient_check},
        {"recall-oracle", dbrd::recall_oracle_check},
        {"selection-rules", dbrd::selection_check},
        {"categorical-features", dbrd::features_check},
        {"tfidf-scores", dbrd::tfidf_check},
        {"rewrite-contract", dbrd::rewrite_check},
        {"llm-fallback", dbrd::llm_fallback_check},
        {"synthetic-end-to-end", dbrd::synthetic_check},
        {"rr-monotonicity", dbrd::monotonicity_check},
        {"spark-dataset", dbrd::dataset_check},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, check] = criteria[i];
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {Outcome::Status::fail, std::string("exception: ") + e.what()};
        }
        const char* label = outcome.status == Outcome::Status::pass   ? "PASS"
                            : outcome.status == Outcome::Status::skip ? "SKIP"
                                                                      : "FAIL";
        if (outcome.status == Outcome::Status::fail) ++failed;
        std::printf("%s %2zu %-22s %s\n", label, i + 1, name.c_str(), outcome.detail.c_str());
    }
    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}
