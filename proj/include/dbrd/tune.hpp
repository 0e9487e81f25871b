#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dbrd/rep.hpp"

namespace dbrd {

struct TuneOptions {
    double learning_rate = 1e-3;
    std::size_t epochs = 30;
    std::uint64_t seed = 42;  // drives the per-epoch couple matching
};

using ParamVector = std::array<double, RepModel::kNumParams>;

/// Labeled pairs with their query-side data prepared once. In every pair the
/// earlier report plays the candidate and the later one the query.
class PairSet {
  public:
    PairSet(const RepContext& ctx, std::span<const LabeledPair> pairs);

    std::size_t size() const { return items_.size(); }
    const std::vector<std::size_t>& duplicates() const { return duplicates_; }
    const std::vector<std::size_t>& non_duplicates() const { return non_duplicates_; }

    double score(const RepModel& model, std::size_t i) const;
    /// Adds d(score)/d(params) into `grad`.
    double score_gradient(const RepModel& model, std::size_t i, std::span<double, RepModel::kNumParams> grad) const;

  private:
    struct Item {
        const BugReport* candidate;
        PreparedQuery query;
    };

    const RepContext* ctx_;
    std::vector<Item> items_;
    std::vector<std::size_t> duplicates_;
    std::vector<std::size_t> non_duplicates_;
};

/// One duplicate pair matched against one non-duplicate pair (indices into a PairSet).
struct PairCouple {
    std::size_t dup;
    std::size_t non;
};

/// Every duplicate pair against every non-duplicate pair.
std::vector<PairCouple> all_couples(const PairSet& pairs);

/// Shuffles both classes and pairs them position by position, cycling the
/// smaller class, so every pair appears at least once.
std::vector<PairCouple> match_couples(const PairSet& pairs, std::mt19937_64& rng);

struct LossGradient {
    double loss = 0.0;
    ParamVector grad{};
};

/// Mean over couples of log(1 + exp(-(s_dup - s_non))).
double pairwise_loss(const RepModel& model, const PairSet& pairs, std::span<const PairCouple> couples);
LossGradient pairwise_loss_gradient(const RepModel& model, const PairSet& pairs, std::span<const PairCouple> couples);

struct TuneResult {
    RepModel model;
    double initial_valid_loss = 0.0;
    double best_valid_loss = 0.0;
    std::size_t best_epoch = 0;  // 0 means the starting point was never beaten
    std::vector<double> valid_loss_per_epoch;
};

/// Plain SGD over randomly matched couples, projecting parameters onto their
/// valid ranges after every step. Returns the parameters with the lowest
/// validation loss (over all validation couples). When the validation pairs
/// lack a class the training couples are used for checkpointing instead.
TuneResult tune(const RepModel& start, const RepContext& ctx, std::span<const LabeledPair> train,
                std::span<const LabeledPair> valid, const TuneOptions& opts = {});

}  // namespace dbrd
