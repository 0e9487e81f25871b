#include "dbrd/bm25f.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbrd {

void Bm25fParams::project() {
    k1 = std::max(0.0, k1);
    k3 = std::max(0.0, k3);
    w_summary = std::max(0.0, w_summary);
    w_description = std::max(0.0, w_description);
    b_summary = std::clamp(b_summary, 0.0, 1.0);
    b_description = std::clamp(b_description, 0.0, 1.0);
}

std::vector<std::string> FieldIndex::field_terms(std::string_view text, Field field) const {
    auto stream = tokenize(text, prep_, field);
    if (order_ == NgramOrder::unigram) return std::move(stream.tokens);
    return bigrams(stream.tokens);
}

namespace {

// Accumulates per-field counts keyed by term text before ids are known.
using RawCounts = std::unordered_map<std::string, std::array<double, kNumFields>>;

RawCounts count_terms(const FieldIndex& index, const BugReport& report, std::array<double, kNumFields>& length) {
    RawCounts counts;
    const std::array<std::pair<Field, const std::string*>, kNumFields> fields = {
        std::pair{Field::summary, &report.summary}, std::pair{Field::description, &report.description}};
    for (const auto& [field, text] : fields) {
        const auto f = static_cast<std::size_t>(field);
        auto terms = index.field_terms(*text, field);
        length[f] = static_cast<double>(terms.size());
        for (auto& t : terms) counts[std::move(t)][f] += 1.0;
    }
    return counts;
}

void sort_entries(DocVector& v) {
    std::sort(v.entries.begin(), v.entries.end(), [](const auto& a, const auto& b) { return a.term < b.term; });
}

}  // namespace

FieldIndex FieldIndex::build(std::span<const BugReport> reports, NgramOrder order, const PrepConfig& cfg) {
    if (reports.empty()) throw std::invalid_argument("cannot index an empty corpus");

    FieldIndex index;
    index.order_ = order;
    index.prep_ = cfg;
    index.n_docs_ = reports.size();
    index.docs_.reserve(reports.size());

    std::array<double, kNumFields> total_len{};
    for (const auto& report : reports) {
        DocVector vec;
        auto counts = count_terms(index, report, vec.length);
        vec.entries.reserve(counts.size());
        for (auto& [text, tf] : counts) {
            auto [it, inserted] = index.term_ids_.try_emplace(text, static_cast<TermId>(index.terms_.size()));
            if (inserted) {
                index.terms_.push_back(text);
                index.doc_freq_.push_back(0);
            }
            ++index.doc_freq_[it->second];
            vec.entries.push_back({it->second, tf});
        }
        sort_entries(vec);
        for (std::size_t f = 0; f < kNumFields; ++f) total_len[f] += vec.length[f];
        if (!index.doc_pos_.emplace(report.id, index.docs_.size()).second) {
            throw std::invalid_argument("report " + report.id + " indexed twice");
        }
        index.docs_.push_back(std::move(vec));
    }

    for (std::size_t f = 0; f < kNumFields; ++f) total_len[f] /= static_cast<double>(index.n_docs_);
    index.avg_len_ = total_len;

    const auto n = static_cast<double>(index.n_docs_);
    index.idf_.resize(index.doc_freq_.size());
    for (std::size_t t = 0; t < index.doc_freq_.size(); ++t) {
        index.idf_[t] = std::log(n / static_cast<double>(index.doc_freq_[t]));
    }
    return index;
}

std::optional<TermId> FieldIndex::lookup(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
}

std::size_t FieldIndex::doc_freq(std::string_view term) const {
    auto id = lookup(term);
    return id ? doc_freq_[*id] : 0;
}

double FieldIndex::idf(std::string_view term) const {
    auto id = lookup(term);
    return id ? idf_[*id] : 0.0;
}

const DocVector& FieldIndex::doc(const ReportId& id) const {
    auto it = doc_pos_.find(id);
    if (it == doc_pos_.end()) throw std::out_of_range("report " + id + " is not indexed");
    return docs_[it->second];
}

DocVector FieldIndex::vectorize(const BugReport& report) const {
    DocVector vec;
    auto counts = count_terms(*this, report, vec.length);
    for (auto& [text, tf] : counts) {
        auto it = term_ids_.find(text);
        if (it != term_ids_.end()) vec.entries.push_back({it->second, tf});
    }
    sort_entries(vec);
    return vec;
}

namespace {

double score_impl(const FieldIndex& index, const Bm25fParams& p, const DocVector& d, const DocVector& q,
                  double* grad) {
    // Length normalization of d is per document, so hoist it out of the term loop.
    std::array<double, kNumFields> norm{};   // 1 - b + b * len/avg
    std::array<double, kNumFields> ratio{};  // len/avg, 0 when the field is empty corpus-wide
    for (std::size_t f = 0; f < kNumFields; ++f) {
        const double avg = index.avg_len(static_cast<Field>(f));
        const double b = p.field_b(static_cast<Field>(f));
        if (avg > 0.0) {
            ratio[f] = d.length[f] / avg;
            norm[f] = 1.0 - b + b * ratio[f];
        } else {
            norm[f] = 1.0;
        }
    }
    const std::array<double, kNumFields> w = {p.w_summary, p.w_description};

    double total = 0.0;
    auto di = d.entries.begin();
    auto qi = q.entries.begin();
    while (di != d.entries.end() && qi != q.entries.end()) {
        if (di->term < qi->term) {
            ++di;
            continue;
        }
        if (qi->term < di->term) {
            ++qi;
            continue;
        }
        const double idf = index.idf(di->term);
        double tfd = 0.0;
        double tfq = 0.0;
        for (std::size_t f = 0; f < kNumFields; ++f) {
            if (di->tf[f] > 0.0) tfd += w[f] * di->tf[f] / norm[f];
            tfq += w[f] * qi->tf[f];
        }
        const double dsat = p.k1 + tfd;
        const double qsat = p.k3 + tfq;
        const double doc_part = dsat > 0.0 ? tfd / dsat : 0.0;
        const double query_part = qsat > 0.0 ? (p.k3 + 1.0) * tfq / qsat : 0.0;
        total += idf * doc_part * query_part;

        if (grad != nullptr && idf != 0.0) {
            const double d_doc_d_tfd = dsat > 0.0 ? p.k1 / (dsat * dsat) : 0.0;
            const double d_query_d_tfq = qsat > 0.0 ? (p.k3 + 1.0) * p.k3 / (qsat * qsat) : 0.0;
            if (dsat > 0.0) grad[0] += idf * query_part * (-tfd / (dsat * dsat));
            if (qsat > 0.0) grad[1] += idf * doc_part * (tfq * (tfq - 1.0) / (qsat * qsat));
            for (std::size_t f = 0; f < kNumFields; ++f) {
                double d_tfd_d_w = 0.0;
                double d_tfd_d_b = 0.0;
                if (di->tf[f] > 0.0) {
                    d_tfd_d_w = di->tf[f] / norm[f];
                    if (index.avg_len(static_cast<Field>(f)) > 0.0) {
                        d_tfd_d_b = -w[f] * di->tf[f] * (ratio[f] - 1.0) / (norm[f] * norm[f]);
                    }
                }
                grad[2 + f] += idf * (d_doc_d_tfd * d_tfd_d_w * query_part + doc_part * d_query_d_tfq * qi->tf[f]);
                grad[4 + f] += idf * query_part * d_doc_d_tfd * d_tfd_d_b;
            }
        }
        ++di;
        ++qi;
    }
    return total;
}

}  // namespace

double bm25f_score(const FieldIndex& index, const Bm25fParams& params, const DocVector& d, const DocVector& q) {
    return score_impl(index, params, d, q, nullptr);
}

double bm25f_score_gradient(const FieldIndex& index, const Bm25fParams& params, const DocVector& d,
                            const DocVector& q, std::span<double, Bm25fParams::kSize> grad) {
    return score_impl(index, params, d, q, grad.data());
}

double bm25f_score(const FieldIndex& index, const Bm25fParams& params, const BugReport& d, const BugReport& q) {
    return bm25f_score(index, params, index.vectorize(d), index.vectorize(q));
}

}  // namespace dbrd
