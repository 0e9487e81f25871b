#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dbrd/extract.hpp"

namespace dbrd {

void dedup_keywords(std::vector<std::string>& keywords) {
    std::unordered_set<std::string> seen;
    std::erase_if(keywords, [&](const std::string& k) { return !seen.insert(k).second; });
}

double tfidf_idf(const FieldIndex& stats, std::string_view term) {
    const auto n = static_cast<double>(stats.n_docs());
    return std::log2(n / (1.0 + static_cast<double>(stats.doc_freq(term))));
}

std::vector<ScoredTerm> tfidf_scores(std::string_view text, Field field, const FieldIndex& stats) {
    if (stats.order() != NgramOrder::unigram) throw std::invalid_argument("TF-IDF statistics must be unigram");
    const auto tokens = tokenize(text, stats.prep(), field).tokens;

    std::vector<ScoredTerm> scored;  // first-occurrence order
    std::unordered_map<std::string_view, std::size_t> slot;
    for (const auto& t : tokens) {
        auto [it, inserted] = slot.try_emplace(t, scored.size());
        if (inserted) scored.push_back({t, 0.0});
        scored[it->second].score += 1.0;
    }
    for (auto& s : scored) s.score *= tfidf_idf(stats, s.term);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    return scored;
}

namespace {

std::vector<std::string> top_terms(std::vector<ScoredTerm> scored, std::size_t n_best) {
    if (scored.size() > n_best) scored.resize(n_best);
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (auto& s : scored) out.push_back(std::move(s.term));
    return out;
}

}  // namespace

KeywordResult extract_tfidf(const BugReport& report, const FieldIndex& stats, std::size_t n_best) {
    KeywordResult kw;
    kw.summary_kw = top_terms(tfidf_scores(report.summary, Field::summary, stats), n_best);
    kw.description_kw = top_terms(tfidf_scores(report.description, Field::description, stats), n_best);
    return kw;
}

}  // namespace dbrd
