#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dbrd {

using ReportId = std::string;

/// Milliseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses ISO-8601 date or date-time text ("2019-03-01", "2019-03-01T10:22:05.123+01:00",
/// "2019-03-01 10:22:05Z"). Throws std::invalid_argument on malformed input.
Timestamp parse_timestamp(std::string_view text);

struct BugReport {
    ReportId id;
    Timestamp created_at = 0;
    std::string summary;
    std::string description;
    std::optional<std::string> product;
    std::optional<std::string> component;
    std::optional<std::string> type;
    std::optional<std::string> priority;
    std::optional<std::string> version;
    std::optional<ReportId> duplicate_of;

    bool operator==(const BugReport&) const = default;
};

/// Strict total order over reports: creation time, then id.
inline bool chronologically_before(const BugReport& a, const BugReport& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.id < b.id;
}

struct Bucket {
    ReportId master;
    std::vector<ReportId> members;  // chronological, master first
};

struct LabeledPair {
    ReportId a;
    ReportId b;
    bool is_duplicate = false;
};

class CorpusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Union-find closure over duplicate_of links. Buckets are returned ordered by
/// their master's chronological position. Throws CorpusError on dangling links
/// or link cycles.
std::vector<Bucket> build_buckets(std::span<const BugReport> reports);

/// Immutable collection of bug reports with buckets and evaluation splits.
class Corpus {
  public:
    struct Splits {
        std::vector<LabeledPair> train_pairs;
        std::vector<LabeledPair> valid_pairs;
        std::vector<ReportId> test_queries;
        /// Ids of every report in the test period. Empty means "from the
        /// earliest test query onward".
        std::vector<ReportId> test_reports;
    };

    Corpus() = default;
    explicit Corpus(std::vector<BugReport> reports, Splits splits = {});

    /// Reports in chronological order.
    std::span<const BugReport> reports() const { return reports_; }
    std::span<const Bucket> buckets() const { return buckets_; }
    std::span<const LabeledPair> train_pairs() const { return train_pairs_; }
    std::span<const LabeledPair> valid_pairs() const { return valid_pairs_; }
    std::span<const ReportId> test_queries() const { return test_queries_; }

    std::size_t size() const { return reports_.size(); }
    bool empty() const { return reports_.empty(); }
    bool contains(const ReportId& id) const { return position_.contains(id); }

    /// Chronological position; throws CorpusError on unknown ids.
    std::size_t position(const ReportId& id) const;
    const BugReport& report(const ReportId& id) const { return reports_[position(id)]; }
    const Bucket& bucket_of(const ReportId& id) const;
    const ReportId& master_of(const ReportId& id) const { return bucket_of(id).master; }

    /// Reports strictly earlier than `id`, chronological.
    std::span<const BugReport> reports_before(const ReportId& id) const;

    /// Test-period reports, chronological.
    std::vector<ReportId> test_period() const;

    /// Reports referenced by training or validation pairs; all reports when no pairs exist.
    std::vector<BugReport> training_reports() const;

  private:
    std::vector<BugReport> reports_;
    std::vector<Bucket> buckets_;
    std::vector<LabeledPair> train_pairs_;
    std::vector<LabeledPair> valid_pairs_;
    std::vector<ReportId> test_queries_;
    std::vector<ReportId> test_reports_;
    std::unordered_map<ReportId, std::size_t> position_;
    std::vector<std::size_t> bucket_index_;  // by position
};

/// All reports strictly before `query`, in chronological order.
std::vector<ReportId> candidates_before(const Corpus& corpus, const ReportId& query);

// Ingestion. One JSON object per line; blank lines are skipped.
std::vector<BugReport> read_reports(const std::filesystem::path& path);
std::vector<LabeledPair> read_pairs(const std::filesystem::path& path);
std::vector<ReportId> read_ids(const std::filesystem::path& path);

BugReport report_from_json(std::string_view line);
std::string report_to_json(const BugReport& report);

/// Builds a corpus whose test queries are every non-master report, restricted
/// to splits.test_reports when that list is non-empty.
Corpus with_default_queries(std::vector<BugReport> reports, Corpus::Splits splits);

/// Loads either a single reports file, or a directory containing
/// reports.jsonl and optionally train_pairs.jsonl, valid_pairs.jsonl,
/// test_queries.txt and test_reports.txt. Without test_queries.txt every
/// non-master report becomes a test query.
Corpus load_corpus(const std::filesystem::path& path);

/// Writes a corpus directory readable by load_corpus.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace dbrd
