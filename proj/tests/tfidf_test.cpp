#include <gtest/gtest.h>

#include "dbrd/extract.hpp"
#include "fixtures.hpp"

namespace dbrd {
namespace {

using testing::report;

std::vector<BugReport> eight_docs() {
    const char* summaries[] = {"kafka broker common",   "kafka consumer common", "kafka producer common",
                               "spark driver common",   "spark executor common", "hdfs namenode common",
                               "yarn scheduler common", "zookeeper quorum common"};
    std::vector<BugReport> out;
    for (int i = 0; i < 8; ++i) out.push_back(report("t" + std::to_string(i), i, summaries[i]));
    return out;
}

TEST(Tfidf, Idf) {
    const auto stats = FieldIndex::build(eight_docs(), NgramOrder::unigram, PrepConfig{});
    EXPECT_DOUBLE_EQ(tfidf_idf(stats, "kafka"), 1.0);  // log2(8 / (1 + 3))
    EXPECT_DOUBLE_EQ(tfidf_idf(stats, "unseen"), 3.0);
    EXPECT_LT(tfidf_idf(stats, "common"), 0.0);
}

TEST(Tfidf, HandComputedScores) {
    const auto stats = FieldIndex::build(eight_docs(), NgramOrder::unigram, PrepConfig{});
    const auto scored = tfidf_scores("common kafka spark zorblax kafka", Field::summary, stats);
    ASSERT_EQ(scored.size(), 4u);
    EXPECT_EQ(scored[0].term, "zorblax");
    EXPECT_NEAR(scored[0].score, 3.0, 1e-12);
    EXPECT_EQ(scored[1].term, "kafka");
    EXPECT_NEAR(scored[1].score, 2.0, 1e-12);
    EXPECT_EQ(scored[2].term, "spark");
    EXPECT_NEAR(scored[2].score, 1.4150374992788437, 1e-12);
    EXPECT_EQ(scored[3].term, "common");
    EXPECT_NEAR(scored[3].score, -0.16992500144231237, 1e-12);
}

TEST(Tfidf, TiesKeepFirstOccurrence) {
    const auto stats = FieldIndex::build(eight_docs(), NgramOrder::unigram, PrepConfig{});
    const auto scored = tfidf_scores("quorum broker driver", Field::summary, stats);
    ASSERT_EQ(scored.size(), 3u);
    EXPECT_EQ(scored[0].term, "quorum");
    EXPECT_EQ(scored[1].term, "broker");
    EXPECT_EQ(scored[2].term, "driver");
}

TEST(Tfidf, ExtractPerFieldTopN) {
    const auto stats = FieldIndex::build(eight_docs(), NgramOrder::unigram, PrepConfig{});
    auto r = report("q", 99, "kafka zorblax", "");
    r.product = "Core";
    const auto kw = extract_tfidf(r, stats, 1);
    EXPECT_EQ(kw.summary_kw, (std::vector<std::string>{"zorblax"}));
    EXPECT_TRUE(kw.description_kw.empty());
    EXPECT_EQ(extract_tfidf(r, stats), extract_tfidf(r, stats));
    EXPECT_EQ(extract_tfidf(r, stats, 10).summary_kw.size(), 2u);
}

TEST(Tfidf, RejectsBigramStatistics) {
    const auto stats = FieldIndex::build(eight_docs(), NgramOrder::bigram, PrepConfig{});
    EXPECT_THROW(tfidf_scores("kafka", Field::summary, stats), std::invalid_argument);
}

TEST(Dedup, KeepsFirstOccurrences) {
    std::vector<std::string> v{"b", "a", "b", "c", "a"};
    dedup_keywords(v);
    EXPECT_EQ(v, (std::vector<std::string>{"b", "a", "c"}));
}

}  // namespace
}  // namespace dbrd
