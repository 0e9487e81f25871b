#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace dbrd::testing {

// Documents as two token lists (summary, description), already tokenized.
struct RawDoc {
    std::vector<std::string> summary;
    std::vector<std::string> description;
};

struct RawParams {
    double k1, k3, w_s, w_d, b_s, b_d;
};

/// Term-at-a-time BM25F_ext written from the formula, with no shared code.
inline double bm25f_oracle(const std::vector<RawDoc>& collection, const RawDoc& d, const RawDoc& q,
                           const RawParams& p) {
    const double n = static_cast<double>(collection.size());
    double avg_s = 0.0, avg_d = 0.0;
    for (const auto& doc : collection) {
        avg_s += static_cast<double>(doc.summary.size());
        avg_d += static_cast<double>(doc.description.size());
    }
    avg_s /= n;
    avg_d /= n;

    auto count = [](const std::vector<std::string>& v, const std::string& t) {
        double c = 0;
        for (const auto& x : v) c += (x == t) ? 1.0 : 0.0;
        return c;
    };
    std::map<std::string, int> query_terms;
    for (const auto& t : q.summary) query_terms[t] = 1;
    for (const auto& t : q.description) query_terms[t] = 1;

    double score = 0.0;
    for (const auto& [t, unused] : query_terms) {
        double df = 0;
        for (const auto& doc : collection) df += (count(doc.summary, t) + count(doc.description, t) > 0) ? 1 : 0;
        if (df == 0) continue;
        const double idf = std::log(n / df);
        const double tf_s = count(d.summary, t);
        const double tf_d = count(d.description, t);
        if (tf_s + tf_d == 0) continue;
        const double norm_s = avg_s > 0 ? 1 - p.b_s + p.b_s * static_cast<double>(d.summary.size()) / avg_s : 1.0;
        const double norm_d = avg_d > 0 ? 1 - p.b_d + p.b_d * static_cast<double>(d.description.size()) / avg_d : 1.0;
        const double tfd = p.w_s * tf_s / norm_s + p.w_d * tf_d / norm_d;
        const double tfq = p.w_s * count(q.summary, t) + p.w_d * count(q.description, t);
        score += idf * tfd / (p.k1 + tfd) * (p.k3 + 1) * tfq / (p.k3 + tfq);
    }
    return score;
}

}  // namespace dbrd::testing
