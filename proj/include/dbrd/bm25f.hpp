#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dbrd/corpus.hpp"
#include "dbrd/textprep.hpp"

namespace dbrd {

enum class NgramOrder { unigram = 1, bigram = 2 };

/// Six free parameters of one BM25F_ext instance.
struct Bm25fParams {
    double k1 = 2.0;
    double k3 = 1.0;
    double w_summary = 3.0;
    double w_description = 1.0;
    double b_summary = 0.5;
    double b_description = 0.5;

    static constexpr std::size_t kSize = 6;
    static constexpr std::array<std::string_view, kSize> kNames = {
        "k1", "k3", "w_summary", "w_description", "b_summary", "b_description"};

    double field_weight(Field f) const { return f == Field::summary ? w_summary : w_description; }
    double field_b(Field f) const { return f == Field::summary ? b_summary : b_description; }

    std::array<double, kSize> to_array() const {
        return {k1, k3, w_summary, w_description, b_summary, b_description};
    }
    static Bm25fParams from_array(std::span<const double, kSize> v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }

    /// Clamps b into [0,1] and k / field weights to be non-negative.
    void project();

    bool operator==(const Bm25fParams&) const = default;
};

using TermId = std::uint32_t;

/// Term frequencies of one report at one n-gram order, sorted by term id.
struct DocVector {
    struct Entry {
        TermId term;
        std::array<double, kNumFields> tf;
    };
    std::vector<Entry> entries;
    std::array<double, kNumFields> length{};  // token (or bigram) count per field
};

/// Per-field corpus statistics at one n-gram order.
class FieldIndex {
  public:
    static FieldIndex build(std::span<const BugReport> reports, NgramOrder order, const PrepConfig& cfg);
    static FieldIndex build(const Corpus& corpus, NgramOrder order, const PrepConfig& cfg) {
        return build(corpus.reports(), order, cfg);
    }

    NgramOrder order() const { return order_; }
    const PrepConfig& prep() const { return prep_; }
    std::size_t n_docs() const { return n_docs_; }
    std::size_t vocabulary_size() const { return terms_.size(); }

    /// Documents containing the term in either field; 0 for unseen terms.
    std::size_t doc_freq(std::string_view term) const;
    std::size_t doc_freq(TermId term) const { return doc_freq_[term]; }
    double avg_len(Field f) const { return avg_len_[static_cast<std::size_t>(f)]; }

    /// log(N / df), natural log; 0 for unseen terms.
    double idf(std::string_view term) const;
    double idf(TermId term) const { return idf_[term]; }

    const std::string& term(TermId id) const { return terms_[id]; }
    std::optional<TermId> lookup(std::string_view term) const;

    /// Indexed vector of a report that was part of the build set.
    const DocVector& doc(const ReportId& id) const;
    bool contains(const ReportId& id) const { return doc_pos_.contains(id); }

    /// Term frequencies for arbitrary text (e.g. a rewritten query).
    DocVector vectorize(const BugReport& report) const;

    /// The tokens of one field at this index's n-gram order.
    std::vector<std::string> field_terms(std::string_view text, Field field) const;

  private:
    NgramOrder order_ = NgramOrder::unigram;
    PrepConfig prep_;
    std::size_t n_docs_ = 0;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::vector<std::size_t> doc_freq_;
    std::vector<double> idf_;
    std::array<double, kNumFields> avg_len_{};
    std::unordered_map<ReportId, std::size_t> doc_pos_;
    std::vector<DocVector> docs_;
};

/// BM25F_ext similarity of candidate `d` to query `q`:
///
///   sum over shared terms t of  idf(t) * TFD/(k1 + TFD) * (k3 + 1) TFQ/(k3 + TFQ)
///   TFD = sum_f w_f tf(d,f,t) / (1 - b_f + b_f len(d,f)/avg_len(f))
///   TFQ = sum_f w_f tf(q,f,t)
///
/// A field whose average length is 0 uses a normalization denominator of 1.
double bm25f_score(const FieldIndex& index, const Bm25fParams& params, const DocVector& d, const DocVector& q);

/// Same score, plus its partial derivatives with respect to the six parameters
/// (in Bm25fParams::kNames order) accumulated into `grad`.
double bm25f_score_gradient(const FieldIndex& index, const Bm25fParams& params, const DocVector& d,
                            const DocVector& q, std::span<double, Bm25fParams::kSize> grad);

double bm25f_score(const FieldIndex& index, const Bm25fParams& params, const BugReport& d, const BugReport& q);

}  // namespace dbrd
