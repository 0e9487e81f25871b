#include "dbrd/rep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace dbrd {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view next_segment(std::string_view s, std::size_t& pos) {
    const auto start = pos;
    const bool digits = is_digit(s[pos]);
    while (pos < s.size() && is_digit(s[pos]) == digits) ++pos;
    return s.substr(start, pos - start);
}

int compare_numeric(std::string_view a, std::string_view b) {
    while (a.size() > 1 && a.front() == '0') a.remove_prefix(1);
    while (b.size() > 1 && b.front() == '0') b.remove_prefix(1);
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return a.compare(b);
}

double reciprocal_distance(const std::optional<int>& a, const std::optional<int>& b) {
    if (!a || !b) return 0.0;
    return 1.0 / (1.0 + std::abs(*a - *b));
}

double equal_present(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    return a && b && *a == *b ? 1.0 : 0.0;
}

}  // namespace

bool version_less(std::string_view a, std::string_view b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const bool a_num = is_digit(a[i]);
        const bool b_num = is_digit(b[j]);
        const auto sa = next_segment(a, i);
        const auto sb = next_segment(b, j);
        int c = 0;
        if (a_num && b_num) {
            c = compare_numeric(sa, sb);
        } else if (a_num != b_num) {
            c = a_num ? -1 : 1;  // numbers before text
        } else {
            c = sa.compare(sb);
        }
        if (c != 0) return c < 0;
    }
    if ((i < a.size()) != (j < b.size())) return i >= a.size();
    return a < b;
}

std::map<std::string, int> CategoricalCodec::jira_priorities() {
    return {{"blocker", 1}, {"critical", 2}, {"major", 3}, {"minor", 4}, {"trivial", 5}};
}

CategoricalCodec::CategoricalCodec(std::map<std::string, int> priority_order, std::span<const BugReport> reports) {
    for (auto& [label, rank] : priority_order) priority_order_.emplace(lower(label), rank);

    std::vector<std::string> versions;
    for (const auto& r : reports) {
        if (r.version) versions.push_back(*r.version);
    }
    std::sort(versions.begin(), versions.end(), [](const auto& a, const auto& b) { return version_less(a, b); });
    versions.erase(std::unique(versions.begin(), versions.end()), versions.end());
    for (std::size_t i = 0; i < versions.size(); ++i) version_order_.emplace(versions[i], static_cast<int>(i) + 1);
}

std::optional<int> CategoricalCodec::priority_rank(const std::optional<std::string>& label) const {
    if (!label) return std::nullopt;
    auto it = priority_order_.find(lower(*label));
    if (it == priority_order_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> CategoricalCodec::version_rank(const std::optional<std::string>& label) const {
    if (!label) return std::nullopt;
    auto it = version_order_.find(*label);
    if (it == version_order_.end()) return std::nullopt;
    return it->second;
}

std::array<double, RepModel::kNumParams> RepModel::to_vector() const {
    std::array<double, kNumParams> v{};
    std::copy(w.begin(), w.end(), v.begin());
    const auto u = uni.to_array();
    const auto b = bi.to_array();
    std::copy(u.begin(), u.end(), v.begin() + kNumFeatures);
    std::copy(b.begin(), b.end(), v.begin() + kNumFeatures + Bm25fParams::kSize);
    return v;
}

RepModel RepModel::from_vector(std::span<const double, kNumParams> v) {
    RepModel m;
    std::copy(v.begin(), v.begin() + kNumFeatures, m.w.begin());
    m.uni = Bm25fParams::from_array(v.subspan<kNumFeatures, Bm25fParams::kSize>());
    m.bi = Bm25fParams::from_array(v.subspan<kNumFeatures + Bm25fParams::kSize, Bm25fParams::kSize>());
    return m;
}

std::array<std::string, RepModel::kNumParams> RepModel::parameter_names() {
    std::array<std::string, kNumParams> names;
    for (std::size_t i = 0; i < kNumFeatures; ++i) names[i] = "w" + std::to_string(i + 1);
    for (std::size_t i = 0; i < Bm25fParams::kSize; ++i) {
        names[kNumFeatures + i] = "unigram." + std::string(Bm25fParams::kNames[i]);
        names[kNumFeatures + Bm25fParams::kSize + i] = "bigram." + std::string(Bm25fParams::kNames[i]);
    }
    return names;
}

RepContext::RepContext(const Corpus& corpus, const PrepConfig& cfg)
    : corpus_(&corpus),
      uni_(FieldIndex::build(corpus, NgramOrder::unigram, cfg)),
      bi_(FieldIndex::build(corpus, NgramOrder::bigram, cfg)),
      codec_(CategoricalCodec::from_reports(corpus.reports())) {}

PreparedQuery RepContext::prepare(const BugReport& q) const {
    PreparedQuery p;
    p.id = q.id;
    p.uni = uni_.vectorize(q);
    p.bi = bi_.vectorize(q);
    p.product = q.product;
    p.component = q.component;
    p.type = q.type;
    p.priority_rank = codec_.priority_rank(q.priority);
    p.version_rank = codec_.version_rank(q.version);
    return p;
}

FeatureVector RepContext::categorical(const BugReport& d, const PreparedQuery& q) const {
    FeatureVector fv;
    fv[2] = equal_present(d.product, q.product);
    fv[3] = equal_present(d.component, q.component);
    fv[4] = equal_present(d.type, q.type);
    fv[5] = reciprocal_distance(codec_.priority_rank(d.priority), q.priority_rank);
    fv[6] = reciprocal_distance(codec_.version_rank(d.version), q.version_rank);
    return fv;
}

FeatureVector RepContext::features(const RepModel& model, const BugReport& d, const PreparedQuery& q) const {
    FeatureVector fv = categorical(d, q);
    if (uni_.contains(d.id)) {
        fv[0] = bm25f_score(uni_, model.uni, uni_.doc(d.id), q.uni);
        fv[1] = bm25f_score(bi_, model.bi, bi_.doc(d.id), q.bi);
    } else {
        fv[0] = bm25f_score(uni_, model.uni, uni_.vectorize(d), q.uni);
        fv[1] = bm25f_score(bi_, model.bi, bi_.vectorize(d), q.bi);
    }
    return fv;
}

FeatureVector RepContext::features_with_gradient(const RepModel& model, const BugReport& d, const PreparedQuery& q,
                                                 std::span<double, Bm25fParams::kSize> d_uni,
                                                 std::span<double, Bm25fParams::kSize> d_bi) const {
    FeatureVector fv = categorical(d, q);
    fv[0] = bm25f_score_gradient(uni_, model.uni, uni_.doc(d.id), q.uni, d_uni);
    fv[1] = bm25f_score_gradient(bi_, model.bi, bi_.doc(d.id), q.bi, d_bi);
    return fv;
}

std::string to_string(BucketScoring s) { return s == BucketScoring::max ? "max" : "master"; }

BucketScoring parse_bucket_scoring(std::string_view text) {
    if (text == "max") return BucketScoring::max;
    if (text == "master") return BucketScoring::master;
    throw std::invalid_argument("bucket scoring must be max or master, got '" + std::string(text) + "'");
}

std::vector<RankedBucket> rank(const RepModel& model, const RepContext& ctx, const BugReport& query, std::size_t k,
                               BucketScoring scoring) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    const Corpus& corpus = ctx.corpus();
    const auto candidates = corpus.reports_before(query.id);
    if (candidates.empty()) return {};

    const PreparedQuery q = ctx.prepare(query);
    std::unordered_map<std::string_view, std::size_t> slot;  // master -> index in scored
    std::vector<std::pair<std::size_t, RankedBucket>> scored;  // (master position, bucket)

    for (const auto& d : candidates) {
        const ReportId& master = corpus.master_of(d.id);
        if (scoring == BucketScoring::master && master != d.id) continue;
        const double s = rep_score(model, ctx.features(model, d, q));
        auto [it, inserted] = slot.try_emplace(master, scored.size());
        if (inserted) {
            scored.push_back({corpus.position(master), RankedBucket{master, s}});
        } else {
            auto& best = scored[it->second].second.score;
            best = std::max(best, s);
        }
    }

    const auto cut = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cut), scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second.score != b.second.score) return a.second.score > b.second.score;
                          return a.first < b.first;
                      });
    std::vector<RankedBucket> out;
    out.reserve(cut);
    for (std::size_t i = 0; i < cut; ++i) out.push_back(std::move(scored[i].second));
    return out;
}

}  // namespace dbrd
