#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "dbrd/bm25f.hpp"
#include "dbrd/corpus.hpp"
#include "dbrd/llm_client.hpp"

namespace dbrd {

struct KeywordResult {
    std::vector<std::string> summary_kw;
    std::vector<std::string> description_kw;
    std::string raw;  // extractor output as received, for audit

    bool operator==(const KeywordResult&) const = default;
};

/// Removes repeated entries, keeping first occurrences in order.
void dedup_keywords(std::vector<std::string>& keywords);

struct ScoredTerm {
    std::string term;
    double score = 0.0;
};

// --- TF-IDF -----------------------------------------------------------------

/// log2(N / (1 + df)) over the documents `stats` was built from.
double tfidf_idf(const FieldIndex& stats, std::string_view term);

/// Unigram candidates of `text` scored tf * log2(N / (1 + df)), best first;
/// ties keep first-occurrence order.
std::vector<ScoredTerm> tfidf_scores(std::string_view text, Field field, const FieldIndex& stats);

/// `stats` must be a unigram index over the training reports.
KeywordResult extract_tfidf(const BugReport& report, const FieldIndex& stats, std::size_t n_best = 10);

// --- YAKE -------------------------------------------------------------------

struct YakeOptions {
    std::size_t max_ngram = 3;
    std::size_t window = 1;            // co-occurrence window for left/right context
    std::size_t min_term_length = 3;   // shorter words are treated as stopwords
};

/// Per-term statistics; `score` is S(w), lower means more important.
struct YakeTerm {
    std::string key;  // lowercased
    std::size_t tf = 0;
    double casing = 0.0;
    double position = 0.0;
    double frequency = 0.0;
    double relatedness = 0.0;
    double spread = 0.0;
    double score = 0.0;
    bool stopword = false;
};

std::vector<YakeTerm> yake_terms(std::string_view text, const YakeOptions& opts = {});

/// 1..max_ngram candidates, lowest score first; score = prod S(w) / (tf * (1 + sum S(w))).
std::vector<ScoredTerm> yake_keywords(std::string_view text, std::size_t n_best, const YakeOptions& opts = {});

KeywordResult extract_yake(const BugReport& report, std::size_t n_best = 10, const YakeOptions& opts = {});

// --- LLM --------------------------------------------------------------------

struct PromptTemplate {
    std::string name;
    std::string body;

    static constexpr std::string_view kSummarySlot = "{{Summary}}";
    static constexpr std::string_view kDescriptionSlot = "{{Description}}";

    /// Throws std::invalid_argument unless each placeholder occurs exactly once.
    void validate() const;
    std::string fill(std::string_view summary, std::string_view description) const;

    /// "final", "concise" or "verbose".
    static PromptTemplate builtin(std::string_view name);
    static std::vector<std::string> builtin_names();
    static PromptTemplate load(std::string name, const std::filesystem::path& path);
};

/// Splits "[a, b]" or "a, b" (also one item per line) into trimmed items.
std::vector<std::string> parse_keyword_list(std::string_view text);

struct ParsedKeywords {
    bool separated = false;  // both "Summary:" and "Description:" sections present
    std::vector<std::string> summary;
    std::vector<std::string> description;
    std::vector<std::string> mixed;  // every keyword when not separated
};

ParsedKeywords parse_keyword_response(std::string_view text);

class ExtractionError : public std::runtime_error {
  public:
    ExtractionError(ReportId id, const std::string& what)
        : std::runtime_error("report " + id + ": " + what), report_id_(std::move(id)) {}
    const ReportId& report_id() const { return report_id_; }

  private:
    ReportId report_id_;
};

struct LlmExtractOptions {
    std::size_t max_attempts = 5;
    bool dedup = true;
};

/// Asks until the reply separates summary and description keywords, at most
/// max_attempts times; after that a mixed list is used for both fields.
KeywordResult extract_llm(const BugReport& report, const PromptTemplate& prompt, CompletionClient& client,
                          const LlmExtractOptions& opts = {});

// --- Rewriting and caching --------------------------------------------------

/// Replaces summary and description with the ", "-joined keywords; every other
/// field is left untouched.
BugReport rewrite_report(const BugReport& report, const KeywordResult& kw, bool dedup = true);

struct CacheKey {
    ReportId report_id;
    std::string template_name;
    std::size_t run = 0;

    auto operator<=>(const CacheKey&) const = default;
};

/// Line-delimited JSON store of keyword results. Appends on put.
class KeywordCache {
  public:
    KeywordCache() = default;  // memory only
    explicit KeywordCache(std::filesystem::path path);

    std::optional<KeywordResult> get(const CacheKey& key) const;
    void put(const CacheKey& key, const KeywordResult& kw);
    std::size_t size() const;

  private:
    std::optional<std::filesystem::path> path_;
    mutable std::mutex mutex_;
    std::map<CacheKey, KeywordResult> entries_;
};

}  // namespace dbrd
