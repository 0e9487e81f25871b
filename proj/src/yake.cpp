#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dbrd/extract.hpp"

// Single-document keyword extraction after YAKE (Campos et al.): five
// statistical features per term combined into S(w), then 1..n-gram candidates
// scored from their member terms. Lower scores are better throughout.

namespace dbrd {

namespace {

bool is_alnum(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
}

struct Token {
    std::string surface;
    std::string key;
    std::size_t sentence = 0;
    std::size_t chunk = 0;        // global chunk index; candidates never cross chunks
    std::size_t in_sentence = 0;  // position within its sentence
    bool stop = false;
    bool numeric = false;
    bool acronym = false;
    bool capitalized = false;
};

struct Document {
    std::vector<Token> tokens;
    std::size_t sentences = 0;
};

bool is_numeric(std::string_view s) {
    bool digit = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if (c != '.' && c != ',') return false;
    }
    return digit;
}

bool is_acronym(std::string_view s) {
    std::size_t letters = 0;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalpha(u)) {
            if (!std::isupper(u)) return false;
            ++letters;
        }
    }
    return letters >= 2;
}

Document segment(std::string_view text, const YakeOptions& opts) {
    const auto& stopwords = english_stopwords();
    Document doc;
    std::size_t chunk = 0;
    std::size_t sentence = 0;
    std::size_t in_sentence = 0;
    bool sentence_open = false;
    bool chunk_open = false;

    auto close_chunk = [&] {
        if (chunk_open) ++chunk;
        chunk_open = false;
    };
    auto close_sentence = [&] {
        close_chunk();
        if (sentence_open) ++sentence;
        sentence_open = false;
        in_sentence = 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\n') {
            close_sentence();
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        std::string_view word = text.substr(i, end - i);
        i = end;

        std::size_t lead = 0;
        while (lead < word.size() && !is_alnum(word[lead])) ++lead;
        std::size_t trail = word.size();
        while (trail > lead && !is_alnum(word[trail - 1])) --trail;
        if (lead > 0) close_chunk();
        if (lead < trail) {
            Token t;
            t.surface = std::string(word.substr(lead, trail - lead));
            t.key = t.surface;
            for (auto& c : t.key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            t.sentence = sentence;
            t.chunk = chunk;
            t.in_sentence = in_sentence++;
            t.stop = stopwords.contains(t.key) || t.key.size() < opts.min_term_length;
            t.numeric = is_numeric(t.surface);
            t.acronym = is_acronym(t.surface);
            t.capitalized = !t.acronym && t.in_sentence > 0 &&
                            std::isupper(static_cast<unsigned char>(t.surface.front()));
            doc.tokens.push_back(std::move(t));
            sentence_open = true;
            chunk_open = true;
        }
        const std::string_view tail = word.substr(trail);
        if (!tail.empty()) {
            close_chunk();
            const char last = tail.back();
            if (last == '.' || last == '!' || last == '?') close_sentence();
        }
    }
    close_sentence();
    doc.sentences = sentence;
    return doc;
}

struct TermAccumulator {
    YakeTerm term;
    std::size_t tf_acronym = 0;
    std::size_t tf_capitalized = 0;
    std::set<std::size_t> sentences;
    std::vector<std::string> left;
    std::vector<std::string> right;
};

double dispersion(const std::vector<std::string>& neighbours) {
    if (neighbours.empty()) return 0.0;
    const std::set<std::string> distinct(neighbours.begin(), neighbours.end());
    return static_cast<double>(distinct.size()) / static_cast<double>(neighbours.size());
}

double median(const std::set<std::size_t>& values) {
    std::vector<std::size_t> v(values.begin(), values.end());
    const auto n = v.size();
    if (n % 2 == 1) return static_cast<double>(v[n / 2]);
    return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

std::vector<YakeTerm> compute_terms(const Document& doc, const YakeOptions& opts,
                                    std::unordered_map<std::string, std::size_t>* index_out) {
    std::vector<TermAccumulator> acc;
    std::unordered_map<std::string, std::size_t> index;
    const auto& toks = doc.tokens;
    for (std::size_t p = 0; p < toks.size(); ++p) {
        const auto& t = toks[p];
        auto [it, inserted] = index.try_emplace(t.key, acc.size());
        if (inserted) {
            acc.emplace_back();
            acc.back().term.key = t.key;
            acc.back().term.stopword = t.stop;
        }
        auto& a = acc[it->second];
        ++a.term.tf;
        if (t.acronym) ++a.tf_acronym;
        if (t.capitalized) ++a.tf_capitalized;
        a.sentences.insert(t.sentence);
        for (std::size_t w = 1; w <= opts.window; ++w) {
            if (p >= w && toks[p - w].chunk == t.chunk) a.left.push_back(toks[p - w].key);
            if (p + w < toks.size() && toks[p + w].chunk == t.chunk) a.right.push_back(toks[p + w].key);
        }
    }

    double max_tf = 0.0;
    std::vector<double> valid_tf;
    for (const auto& a : acc) {
        max_tf = std::max(max_tf, static_cast<double>(a.term.tf));
        if (!a.term.stopword) valid_tf.push_back(static_cast<double>(a.term.tf));
    }
    double mean = 0.0;
    double stdev = 0.0;
    if (!valid_tf.empty()) {
        mean = std::accumulate(valid_tf.begin(), valid_tf.end(), 0.0) / static_cast<double>(valid_tf.size());
        double var = 0.0;
        for (double v : valid_tf) var += (v - mean) * (v - mean);
        stdev = std::sqrt(var / static_cast<double>(valid_tf.size()));
    }
    const double freq_norm = mean + stdev > 0.0 ? mean + stdev : 1.0;

    std::vector<YakeTerm> out;
    out.reserve(acc.size());
    for (auto& a : acc) {
        auto& t = a.term;
        const double tf = static_cast<double>(t.tf);
        t.casing = static_cast<double>(std::max(a.tf_acronym, a.tf_capitalized)) / (1.0 + std::log(tf));
        t.position = std::log(std::log(3.0 + median(a.sentences)));
        t.frequency = tf / freq_norm;
        t.relatedness = 1.0 + (dispersion(a.left) + dispersion(a.right)) * tf / max_tf;
        t.spread = static_cast<double>(a.sentences.size()) / static_cast<double>(doc.sentences);
        t.score = (t.relatedness * t.position) /
                  (t.casing + t.frequency / t.relatedness + t.spread / t.relatedness);
        out.push_back(std::move(t));
    }
    if (index_out) *index_out = std::move(index);
    return out;
}

}  // namespace

std::vector<YakeTerm> yake_terms(std::string_view text, const YakeOptions& opts) {
    const Document doc = segment(text, opts);
    if (doc.tokens.empty()) return {};
    return compute_terms(doc, opts, nullptr);
}

std::vector<ScoredTerm> yake_keywords(std::string_view text, std::size_t n_best, const YakeOptions& opts) {
    const Document doc = segment(text, opts);
    if (doc.tokens.empty() || n_best == 0) return {};
    std::unordered_map<std::string, std::size_t> term_index;
    const auto terms = compute_terms(doc, opts, &term_index);

    struct Candidate {
        std::string surface;
        double product = 1.0;
        double sum = 0.0;
        std::size_t tf = 0;
    };
    std::vector<Candidate> candidates;  // first-occurrence order
    std::unordered_map<std::string, std::size_t> slot;

    const auto& toks = doc.tokens;
    for (std::size_t s = 0; s < toks.size(); ++s) {
        for (std::size_t n = 1; n <= opts.max_ngram && s + n <= toks.size(); ++n) {
            const auto& last = toks[s + n - 1];
            if (last.chunk != toks[s].chunk) break;
            if (last.numeric) break;
            if (toks[s].stop || toks[s].numeric) break;
            if (last.stop) continue;

            std::string key;
            std::string surface;
            for (std::size_t p = s; p < s + n; ++p) {
                if (p > s) {
                    key += ' ';
                    surface += ' ';
                }
                key += toks[p].key;
                surface += toks[p].surface;
            }
            auto [it, inserted] = slot.try_emplace(key, candidates.size());
            if (inserted) {
                Candidate c;
                c.surface = std::move(surface);
                for (std::size_t p = s; p < s + n; ++p) {
                    if (toks[p].stop) continue;
                    const double sw = terms[term_index.at(toks[p].key)].score;
                    c.product *= sw;
                    c.sum += sw;
                }
                candidates.push_back(std::move(c));
            }
            ++candidates[it->second].tf;
        }
    }

    std::vector<ScoredTerm> scored;
    scored.reserve(candidates.size());
    for (auto& c : candidates) {
        scored.push_back({std::move(c.surface), c.product / (static_cast<double>(c.tf) * (1.0 + c.sum))});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
    if (scored.size() > n_best) scored.resize(n_best);
    return scored;
}

KeywordResult extract_yake(const BugReport& report, std::size_t n_best, const YakeOptions& opts) {
    KeywordResult kw;
    for (auto& s : yake_keywords(report.summary, n_best, opts)) kw.summary_kw.push_back(std::move(s.term));
    for (auto& s : yake_keywords(report.description, n_best, opts)) kw.description_kw.push_back(std::move(s.term));
    return kw;
}

}  // namespace dbrd
