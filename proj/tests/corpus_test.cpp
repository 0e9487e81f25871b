#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dbrd/corpus.hpp"
#include "fixtures.hpp"

namespace dbrd {
namespace {

using testing::report;
using testing::TempDir;

std::vector<BugReport> three_reports() {
    return {report("A", 1, "first"), report("B", 2, "second"), report("C", 3, "third")};
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    for (const auto& l : lines) out << l << '\n';
}

TEST(BuildBuckets, NoLinksGivesSingletons) {
    auto buckets = build_buckets(three_reports());
    ASSERT_EQ(buckets.size(), 3u);
    for (const auto& b : buckets) {
        ASSERT_EQ(b.members.size(), 1u);
        EXPECT_EQ(b.members.front(), b.master);
    }
}

TEST(BuildBuckets, DirectLinksCloseIntoOneBucket) {
    auto reports = three_reports();
    reports[1].duplicate_of = "A";
    reports[2].duplicate_of = "A";
    auto buckets = build_buckets(reports);
    ASSERT_EQ(buckets.size(), 1u);
    EXPECT_EQ(buckets[0].master, "A");
    EXPECT_EQ(buckets[0].members, (std::vector<ReportId>{"A", "B", "C"}));
}

TEST(BuildBuckets, TransitiveLinks) {
    auto reports = three_reports();
    reports[1].duplicate_of = "A";
    reports[2].duplicate_of = "B";
    auto buckets = build_buckets(reports);
    ASSERT_EQ(buckets.size(), 1u);
    EXPECT_EQ(buckets[0].master, "A");
}

TEST(BuildBuckets, MasterIsEarliestEvenWhenLinkPointsForward) {
    auto reports = three_reports();
    reports[0].duplicate_of = "C";  // the earliest report points at a later one
    auto buckets = build_buckets(reports);
    ASSERT_EQ(buckets.size(), 2u);
    EXPECT_EQ(buckets[0].master, "A");
    EXPECT_EQ(buckets[0].members, (std::vector<ReportId>{"A", "C"}));
}

TEST(BuildBuckets, TimestampTieBrokenById) {
    std::vector<BugReport> reports{report("b", 5, "x", "", "a"), report("a", 5, "y")};
    auto buckets = build_buckets(reports);
    ASSERT_EQ(buckets.size(), 1u);
    EXPECT_EQ(buckets[0].master, "a");
}

TEST(BuildBuckets, DanglingLinkListsOffenders) {
    auto reports = three_reports();
    reports[1].duplicate_of = "Z";
    reports[2].duplicate_of = "Y";
    try {
        build_buckets(reports);
        FAIL() << "expected CorpusError";
    } catch (const CorpusError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("B"), std::string::npos);
        EXPECT_NE(what.find("C"), std::string::npos);
    }
}

TEST(BuildBuckets, CycleIsRejected) {
    auto reports = three_reports();
    reports[0].duplicate_of = "B";
    reports[1].duplicate_of = "C";
    reports[2].duplicate_of = "A";
    EXPECT_THROW(build_buckets(reports), CorpusError);
}

TEST(BuildBuckets, RandomLinksKeepPartitionAndMasterMinimality) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        std::vector<BugReport> reports;
        for (std::size_t i = 0; i < n; ++i) {
            auto r = report("r" + std::to_string(i), static_cast<Timestamp>(rng() % 10), "s");
            reports.push_back(r);
        }
        // Links only point to chronologically earlier reports, so no cycles.
        std::vector<BugReport> sorted = reports;
        std::sort(sorted.begin(), sorted.end(), chronologically_before);
        for (std::size_t i = 1; i < n; ++i) {
            if (rng() % 2) sorted[i].duplicate_of = sorted[rng() % i].id;
        }
        const auto buckets = build_buckets(sorted);
        std::size_t total = 0;
        std::set<ReportId> seen;
        std::map<ReportId, const BugReport*> by_id;
        for (const auto& r : sorted) by_id[r.id] = &r;
        for (const auto& b : buckets) {
            total += b.members.size();
            for (const auto& m : b.members) {
                EXPECT_TRUE(seen.insert(m).second);
                EXPECT_FALSE(chronologically_before(*by_id[m], *by_id[b.master]));
            }
        }
        EXPECT_EQ(total, n);
    }
}

TEST(Corpus, CandidatesBefore) {
    std::vector<BugReport> reports;
    for (int i = 0; i < 5; ++i) reports.push_back(report("R" + std::to_string(i), 10 - i, "s"));
    Corpus corpus(reports);
    EXPECT_TRUE(candidates_before(corpus, "R4").empty());  // earliest
    EXPECT_EQ(candidates_before(corpus, "R2"), (std::vector<ReportId>{"R4", "R3"}));
    EXPECT_THROW(candidates_before(corpus, "nope"), CorpusError);
}

TEST(Corpus, CandidatesIncludeMasterAndAreMonotone) {
    auto reports = three_reports();
    reports[2].duplicate_of = "A";
    Corpus corpus(reports);
    auto cands = candidates_before(corpus, "C");
    EXPECT_NE(std::find(cands.begin(), cands.end(), "A"), cands.end());
    auto earlier = candidates_before(corpus, "B");
    for (const auto& id : earlier) EXPECT_NE(std::find(cands.begin(), cands.end(), id), cands.end());
}

TEST(Corpus, RejectsDuplicateIdsAndBadSplits) {
    EXPECT_THROW(Corpus({report("A", 1, "x"), report("A", 2, "y")}), CorpusError);
    Corpus::Splits bad_pair;
    bad_pair.train_pairs.push_back({"A", "A", true});
    EXPECT_THROW(Corpus(three_reports(), bad_pair), CorpusError);
    Corpus::Splits bad_query;
    bad_query.test_queries.push_back("A");  // a master, not a duplicate
    EXPECT_THROW(Corpus(three_reports(), bad_query), CorpusError);
}

TEST(Corpus, TrainingReportsAreThoseInPairs) {
    Corpus::Splits splits;
    splits.train_pairs.push_back({"A", "B", false});
    Corpus corpus(three_reports(), splits);
    auto training = corpus.training_reports();
    ASSERT_EQ(training.size(), 2u);
    EXPECT_EQ(training[0].id, "A");
    EXPECT_EQ(training[1].id, "B");
    EXPECT_EQ(Corpus(three_reports()).training_reports().size(), 3u);
}

TEST(Timestamp, ParsesCommonForms) {
    EXPECT_EQ(parse_timestamp("1970-01-01"), 0);
    EXPECT_EQ(parse_timestamp("1970-01-02T00:00:00Z"), 86'400'000);
    EXPECT_EQ(parse_timestamp("1970-01-01 00:00:01.5"), 1'500);
    EXPECT_EQ(parse_timestamp("1970-01-01T01:00:00+01:00"), 0);
    EXPECT_EQ(parse_timestamp("1970-01-01T00:00:00-0030"), 1'800'000);
    EXPECT_EQ(parse_timestamp("2020-02-29T12:00:00Z") - parse_timestamp("2020-02-28T12:00:00Z"), 86'400'000);
    EXPECT_THROW(parse_timestamp("2021-02-29"), std::invalid_argument);
    EXPECT_THROW(parse_timestamp("yesterday"), std::invalid_argument);
    EXPECT_THROW(parse_timestamp("2021-01-01T10:00:00Q"), std::invalid_argument);
}

TEST(Ingestion, ThreeRecordsNoLinks) {
    TempDir dir;
    write_lines(dir / "r.jsonl",
                {R"({"bug_id":"A","created_at":"2020-01-01","summary":"a","description":"x"})",
                 "",
                 R"({"bug_id":2,"created_at":"2020-01-02","summary":"b","description":"y","priority":"Major","duplicate_of":null})",
                 R"({"bug_id":"C","created_at":"2020-01-03","summary":"c","description":"z","version":2.1})"});
    const Corpus corpus = load_corpus(dir / "r.jsonl");
    EXPECT_EQ(corpus.size(), 3u);
    EXPECT_EQ(corpus.buckets().size(), 3u);
    EXPECT_TRUE(corpus.test_queries().empty());
    EXPECT_EQ(corpus.report("2").priority, "Major");
    EXPECT_FALSE(corpus.report("A").product.has_value());
    EXPECT_EQ(corpus.report("C").version, "2.1");
}

TEST(Ingestion, MissingIdNamesLine) {
    TempDir dir;
    write_lines(dir / "r.jsonl", {R"({"bug_id":"A","created_at":"2020-01-01","summary":"a","description":"x"})",
                                  R"({"created_at":"2020-01-02","summary":"b","description":"y"})"});
    try {
        load_corpus(dir / "r.jsonl");
        FAIL() << "expected CorpusError";
    } catch (const CorpusError& e) {
        EXPECT_NE(std::string(e.what()).find("missing field bug_id at line 2"), std::string::npos) << e.what();
    }
}

TEST(Ingestion, MalformedLineNamesLine) {
    TempDir dir;
    write_lines(dir / "r.jsonl", {"{not json"});
    try {
        load_corpus(dir / "r.jsonl");
        FAIL();
    } catch (const CorpusError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
}

TEST(Ingestion, DanglingLinkReported) {
    TempDir dir;
    write_lines(dir / "r.jsonl",
                {R"({"bug_id":"A","created_at":"2020-01-01","summary":"a","description":"x","duplicate_of":"Q"})"});
    EXPECT_THROW(load_corpus(dir / "r.jsonl"), CorpusError);
}

TEST(Ingestion, DirectoryRoundTrip) {
    auto reports = three_reports();
    reports[2].duplicate_of = "A";
    reports[1].product = "Core";
    reports[1].created_at = 1'234'567;
    Corpus::Splits splits;
    splits.train_pairs = {{"A", "C", true}, {"A", "B", false}};
    splits.valid_pairs = {{"B", "C", false}};
    splits.test_queries = {"C"};
    const Corpus corpus(reports, splits);

    TempDir dir;
    save_corpus(corpus, dir.path());
    const Corpus loaded = load_corpus(dir.path());
    ASSERT_EQ(loaded.size(), 3u);
    for (const auto& r : corpus.reports()) EXPECT_EQ(loaded.report(r.id), r);
    EXPECT_EQ(loaded.train_pairs().size(), 2u);
    EXPECT_TRUE(loaded.train_pairs()[0].is_duplicate);
    EXPECT_EQ(loaded.valid_pairs().size(), 1u);
    ASSERT_EQ(loaded.test_queries().size(), 1u);
    EXPECT_EQ(loaded.master_of("C"), "A");
}

TEST(Ingestion, DefaultQueriesAreDuplicatesInTestPeriod) {
    TempDir dir;
    write_lines(dir / "reports.jsonl",
                {R"({"bug_id":"A","created_at":"2020-01-01","summary":"a","description":""})",
                 R"({"bug_id":"B","created_at":"2020-01-02","summary":"b","description":"","duplicate_of":"A"})",
                 R"({"bug_id":"C","created_at":"2020-01-03","summary":"c","description":"","duplicate_of":"A"})"});
    EXPECT_EQ(load_corpus(dir.path()).test_queries().size(), 2u);
    write_lines(dir / "test_reports.txt", {"C"});
    const auto corpus = load_corpus(dir.path());
    ASSERT_EQ(corpus.test_queries().size(), 1u);
    EXPECT_EQ(corpus.test_queries()[0], "C");
}

}  // namespace
}  // namespace dbrd
