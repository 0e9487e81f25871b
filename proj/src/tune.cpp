#include "dbrd/tune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbrd {

namespace {

// log(1 + exp(-m)) without overflow.
double softplus_neg(double margin) {
    if (margin > 0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m)).
double softplus_neg_slope(double margin) {
    if (margin > 0) {
        const double e = std::exp(-margin);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(margin));
}

}  // namespace

PairSet::PairSet(const RepContext& ctx, std::span<const LabeledPair> pairs) : ctx_(&ctx) {
    const Corpus& corpus = ctx.corpus();
    items_.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const BugReport* a = &corpus.report(pair.a);
        const BugReport* b = &corpus.report(pair.b);
        if (chronologically_before(*b, *a)) std::swap(a, b);
        (pair.is_duplicate ? duplicates_ : non_duplicates_).push_back(items_.size());
        items_.push_back(Item{a, ctx.prepare(*b)});
    }
}

double PairSet::score(const RepModel& model, std::size_t i) const {
    const auto& item = items_[i];
    return rep_score(model, ctx_->features(model, *item.candidate, item.query));
}

double PairSet::score_gradient(const RepModel& model, std::size_t i,
                               std::span<double, RepModel::kNumParams> grad) const {
    const auto& item = items_[i];
    std::array<double, Bm25fParams::kSize> d_uni{};
    std::array<double, Bm25fParams::kSize> d_bi{};
    const FeatureVector fv = ctx_->features_with_gradient(model, *item.candidate, item.query, d_uni, d_bi);
    for (std::size_t f = 0; f < kNumFeatures; ++f) grad[f] += fv[f];
    for (std::size_t j = 0; j < Bm25fParams::kSize; ++j) {
        grad[kNumFeatures + j] += model.w[0] * d_uni[j];
        grad[kNumFeatures + Bm25fParams::kSize + j] += model.w[1] * d_bi[j];
    }
    return rep_score(model, fv);
}

std::vector<PairCouple> all_couples(const PairSet& pairs) {
    std::vector<PairCouple> out;
    out.reserve(pairs.duplicates().size() * pairs.non_duplicates().size());
    for (auto d : pairs.duplicates()) {
        for (auto n : pairs.non_duplicates()) out.push_back({d, n});
    }
    return out;
}

std::vector<PairCouple> match_couples(const PairSet& pairs, std::mt19937_64& rng) {
    auto dup = pairs.duplicates();
    auto non = pairs.non_duplicates();
    if (dup.empty() || non.empty()) return {};
    std::shuffle(dup.begin(), dup.end(), rng);
    std::shuffle(non.begin(), non.end(), rng);
    const auto n = std::max(dup.size(), non.size());
    std::vector<PairCouple> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({dup[i % dup.size()], non[i % non.size()]});
    return out;
}

double pairwise_loss(const RepModel& model, const PairSet& pairs, std::span<const PairCouple> couples) {
    if (couples.empty()) throw std::invalid_argument("no pair couples to evaluate");
    // Each pair's score is reused across the couples it belongs to.
    std::vector<double> score(pairs.size(), std::nan(""));
    auto get = [&](std::size_t i) {
        if (std::isnan(score[i])) score[i] = pairs.score(model, i);
        return score[i];
    };
    double total = 0.0;
    for (const auto& c : couples) total += softplus_neg(get(c.dup) - get(c.non));
    return total / static_cast<double>(couples.size());
}

LossGradient pairwise_loss_gradient(const RepModel& model, const PairSet& pairs, std::span<const PairCouple> couples) {
    if (couples.empty()) throw std::invalid_argument("no pair couples to evaluate");
    std::vector<double> score(pairs.size(), 0.0);
    std::vector<ParamVector> grad(pairs.size());
    std::vector<bool> done(pairs.size(), false);
    auto ensure = [&](std::size_t i) {
        if (done[i]) return;
        grad[i].fill(0.0);
        score[i] = pairs.score_gradient(model, i, grad[i]);
        done[i] = true;
    };

    LossGradient out;
    const double scale = 1.0 / static_cast<double>(couples.size());
    for (const auto& c : couples) {
        ensure(c.dup);
        ensure(c.non);
        const double margin = score[c.dup] - score[c.non];
        out.loss += softplus_neg(margin) * scale;
        const double slope = softplus_neg_slope(margin) * scale;
        for (std::size_t p = 0; p < RepModel::kNumParams; ++p) out.grad[p] += slope * (grad[c.dup][p] - grad[c.non][p]);
    }
    return out;
}

TuneResult tune(const RepModel& start, const RepContext& ctx, std::span<const LabeledPair> train,
                std::span<const LabeledPair> valid, const TuneOptions& opts) {
    const PairSet train_set(ctx, train);
    if (train_set.duplicates().empty() || train_set.non_duplicates().empty()) {
        throw std::invalid_argument("tuning needs at least one duplicate and one non-duplicate training pair");
    }
    const PairSet valid_set(ctx, valid);
    const bool use_valid = !valid_set.duplicates().empty() && !valid_set.non_duplicates().empty();
    const PairSet& check_set = use_valid ? valid_set : train_set;
    const auto check_couples = all_couples(check_set);

    RepModel model = start;
    model.project();

    TuneResult result;
    result.model = model;
    result.initial_valid_loss = pairwise_loss(model, check_set, check_couples);
    result.best_valid_loss = result.initial_valid_loss;

    std::mt19937_64 rng(opts.seed);
    ParamVector g_dup{};
    ParamVector g_non{};
    for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
        for (const auto& couple : match_couples(train_set, rng)) {
            g_dup.fill(0.0);
            g_non.fill(0.0);
            const double margin = train_set.score_gradient(model, couple.dup, g_dup) -
                                  train_set.score_gradient(model, couple.non, g_non);
            const double slope = softplus_neg_slope(margin);
            auto params = model.to_vector();
            for (std::size_t p = 0; p < params.size(); ++p) {
                params[p] -= opts.learning_rate * slope * (g_dup[p] - g_non[p]);
            }
            model = RepModel::from_vector(params);
            model.project();
        }
        const double loss = pairwise_loss(model, check_set, check_couples);
        result.valid_loss_per_epoch.push_back(loss);
        if (loss < result.best_valid_loss) {
            result.best_valid_loss = loss;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

}  // namespace dbrd
