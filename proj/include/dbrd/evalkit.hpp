#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dbrd/corpus.hpp"

namespace dbrd {

struct RankedPrediction {
    ReportId query;
    std::vector<ReportId> ranked_masters;
    ReportId truth_master;
    std::size_t run = 0;

    bool operator==(const RankedPrediction&) const = default;
};

/// True when the truth master is among the first k ranked masters.
bool hit_at(const RankedPrediction& p, std::size_t k);

std::size_t recalled_count(std::span<const RankedPrediction> preds, std::size_t k);

/// N_recalled / N_total at cut-off k. Throws on empty input or k == 0.
double recall_rate(std::span<const RankedPrediction> preds, std::size_t k);

struct OverlapCounts {
    std::size_t only_a = 0;
    std::size_t only_b = 0;
    std::size_t both = 0;
    std::size_t neither = 0;

    std::size_t total() const { return only_a + only_b + both + neither; }
    bool operator==(const OverlapCounts&) const = default;
};

/// Partitions queries by whether each method succeeds at k. Both lists must
/// cover the same query ids (order may differ).
OverlapCounts overlap_counts(std::span<const RankedPrediction> a, std::span<const RankedPrediction> b, std::size_t k);

struct EvalReport {
    std::map<std::size_t, double> rr_at_k;
    std::size_t n_total = 0;  // queries per run
    std::map<std::size_t, std::size_t> n_recalled_at_k;  // summed over runs
    std::vector<RankedPrediction> per_query;
    std::size_t runs_averaged = 1;

    std::size_t k_max() const { return rr_at_k.empty() ? 0 : rr_at_k.rbegin()->first; }
    bool operator==(const EvalReport&) const = default;
};

/// Single-run report for k = 1..k_max.
EvalReport make_report(std::vector<RankedPrediction> preds, std::size_t k_max);

/// Averages RR@k over runs that evaluated the same queries with the same k_max.
EvalReport average_runs(std::span<const EvalReport> runs);

/// Writes the report as one JSON object plus a companion CSV (same stem, .csv)
/// with one row per k: k,rr,n_recalled,n_total.
void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);
std::filesystem::path csv_path_for(const std::filesystem::path& report_path);

/// only_a,only_b,both,neither header plus one row.
void write_overlap_csv(const OverlapCounts& counts, const std::filesystem::path& path);

}  // namespace dbrd
