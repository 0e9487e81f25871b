#pragma once

#include <cstdint>
#include <vector>

#include "dbrd/corpus.hpp"

namespace dbrd::testing {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    std::size_t n_reports = 200;
    std::size_t n_pairs = 40;
    std::size_t n_clusters = 10;
    std::size_t cluster_vocabulary = 40;
    std::size_t noise_per_report = 30;
    std::size_t rare_per_pair = 5;
};

/// Reports whose text is mostly dotted identifiers drawn from topic clusters.
/// Each planted duplicate shares a handful of rare tokens with its master but
/// draws its noise from a different cluster, so untouched text points to the
/// wrong bucket while the rare tokens point to the right one.
Corpus make_synthetic_corpus(const SyntheticOptions& opts = {});

}  // namespace dbrd::testing
