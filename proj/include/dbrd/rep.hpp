#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbrd/bm25f.hpp"
#include "dbrd/corpus.hpp"

namespace dbrd {

inline constexpr std::size_t kNumFeatures = 7;

/// f1, f2: BM25F_ext over unigrams / bigrams; f3-f5: product, component and
/// type equality; f6, f7: reciprocal priority / version rank distance.
struct FeatureVector {
    std::array<double, kNumFeatures> f{};

    double operator[](std::size_t i) const { return f[i]; }
    double& operator[](std::size_t i) { return f[i]; }
};

/// The 19 free parameters of REP.
struct RepModel {
    std::array<double, kNumFeatures> w{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    Bm25fParams uni;
    Bm25fParams bi;

    static constexpr std::size_t kNumParams = kNumFeatures + 2 * Bm25fParams::kSize;

    /// Flat layout: w1..w7, then unigram params, then bigram params.
    std::array<double, kNumParams> to_vector() const;
    static RepModel from_vector(std::span<const double, kNumParams> v);
    static std::array<std::string, kNumParams> parameter_names();

    void project() {
        uni.project();
        bi.project();
    }

    bool operator==(const RepModel&) const = default;
};

/// Flat "name = value" text, one parameter per line, in parameter_names() order.
void save_model(const RepModel& model, const std::filesystem::path& path);
RepModel load_model(const std::filesystem::path& path);

inline double rep_score(const RepModel& model, const FeatureVector& fv) {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) s += model.w[i] * fv[i];
    return s;
}

/// Numeric-aware ordering of version labels: "2.10" sorts after "2.9".
bool version_less(std::string_view a, std::string_view b);

/// Maps priority and version labels to integer ranks.
class CategoricalCodec {
  public:
    /// Blocker=1, Critical=2, Major=3, Minor=4, Trivial=5 (case-insensitive).
    static std::map<std::string, int> jira_priorities();

    CategoricalCodec() : priority_order_(jira_priorities()) {}
    CategoricalCodec(std::map<std::string, int> priority_order, std::span<const BugReport> reports);

    /// Uses the Jira priority table and the versions seen in `reports`.
    static CategoricalCodec from_reports(std::span<const BugReport> reports) {
        return CategoricalCodec(jira_priorities(), reports);
    }

    std::optional<int> priority_rank(const std::optional<std::string>& label) const;
    std::optional<int> version_rank(const std::optional<std::string>& label) const;

    const std::map<std::string, int>& priority_order() const { return priority_order_; }
    const std::map<std::string, int>& version_order() const { return version_order_; }

  private:
    std::map<std::string, int> priority_order_;  // keys lowercased
    std::map<std::string, int> version_order_;
};

/// Query-side data reused across every candidate.
struct PreparedQuery {
    ReportId id;
    DocVector uni;
    DocVector bi;
    std::optional<std::string> product;
    std::optional<std::string> component;
    std::optional<std::string> type;
    std::optional<int> priority_rank;
    std::optional<int> version_rank;
};

/// Unigram and bigram indices plus the categorical codec, built once per corpus.
class RepContext {
  public:
    explicit RepContext(const Corpus& corpus, const PrepConfig& cfg = PrepConfig::defaults());

    const Corpus& corpus() const { return *corpus_; }
    const FieldIndex& unigrams() const { return uni_; }
    const FieldIndex& bigrams() const { return bi_; }
    const CategoricalCodec& codec() const { return codec_; }

    /// Vectorizes `q` against the indices. `q` may be a rewritten report.
    PreparedQuery prepare(const BugReport& q) const;

    /// Features of candidate `d` against a prepared query; the textual
    /// features use the model's BM25F_ext parameters.
    FeatureVector features(const RepModel& model, const BugReport& d, const PreparedQuery& q) const;
    FeatureVector features(const RepModel& model, const BugReport& d, const BugReport& q) const {
        return features(model, d, prepare(q));
    }

    /// Features plus d(f1)/d(unigram params) and d(f2)/d(bigram params).
    FeatureVector features_with_gradient(const RepModel& model, const BugReport& d, const PreparedQuery& q,
                                         std::span<double, Bm25fParams::kSize> d_uni,
                                         std::span<double, Bm25fParams::kSize> d_bi) const;

  private:
    FeatureVector categorical(const BugReport& d, const PreparedQuery& q) const;

    const Corpus* corpus_;
    FieldIndex uni_;
    FieldIndex bi_;
    CategoricalCodec codec_;
};

enum class BucketScoring { max, master };

std::string to_string(BucketScoring s);
BucketScoring parse_bucket_scoring(std::string_view text);

struct RankedBucket {
    ReportId master;
    double score = 0.0;

    bool operator==(const RankedBucket&) const = default;
};

/// Ranks the buckets of every report submitted before `query` (by id and
/// creation time), using `query`'s possibly rewritten text. Bucket score is the
/// max over its candidate members, or the master's own score. Ties go to the
/// earlier master. Returns at most k entries.
std::vector<RankedBucket> rank(const RepModel& model, const RepContext& ctx, const BugReport& query, std::size_t k,
                               BucketScoring scoring = BucketScoring::max);

inline std::vector<RankedBucket> rank(const RepModel& model, const RepContext& ctx, const ReportId& query,
                                      std::size_t k, BucketScoring scoring = BucketScoring::max) {
    return rank(model, ctx, ctx.corpus().report(query), k, scoring);
}

}  // namespace dbrd
