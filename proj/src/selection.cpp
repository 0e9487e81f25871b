#include "dbrd/selection.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace dbrd {

namespace {

bool is_word(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) || c == '_');
}

// ECMAScript \s: ASCII whitespace (non-ASCII bytes count as \S).
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

void SelectionRule::validate() const {
    if (uses_length() != length_threshold.has_value()) {
        throw std::invalid_argument(uses_length() ? "length rule needs a threshold"
                                                  : "threshold given for a rule without a length test");
    }
}

RuleKind parse_rule_kind(std::string_view text) {
    if (text == "none") return RuleKind::none;
    if (text == "content") return RuleKind::content;
    if (text == "length") return RuleKind::length;
    if (text == "both" || text == "length_or_content") return RuleKind::length_or_content;
    throw std::invalid_argument("unknown selection rule '" + std::string(text) + "'");
}

std::string to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::none:
            return "none";
        case RuleKind::content:
            return "content";
        case RuleKind::length:
            return "length";
        case RuleKind::length_or_content:
            return "both";
    }
    return "none";
}

// A match of \w+\.\w+\.\w{1,} exists iff some '.' has a word character before
// it and is followed by a word run that ends in another '.' followed by a word
// character.
bool has_dotted_identifier(std::string_view text) {
    const std::size_t n = text.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (text[i] != '.' || !is_word(text[i - 1])) continue;
        std::size_t j = i + 1;
        while (j < n && is_word(text[j])) ++j;
        if (j == i + 1) continue;
        if (j + 1 < n && text[j] == '.' && is_word(text[j + 1])) return true;
        // The word run after i cannot start a later match's middle segment unless
        // it ends at a '.', which was just ruled out; skip ahead.
        i = j - 1;
    }
    return false;
}

bool has_url(std::string_view text) {
    for (std::size_t pos = text.find("http"); pos != std::string_view::npos; pos = text.find("http", pos + 1)) {
        std::size_t j = pos + 4;
        if (j < text.size() && text[j] == 's') ++j;
        if (text.substr(j, 3) == "://" && j + 3 < text.size() && !is_space(text[j + 3])) return true;
    }
    return false;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

std::size_t length_threshold(std::span<const BugReport> train_reports) {
    if (train_reports.empty()) throw std::invalid_argument("length threshold needs at least one training report");
    std::vector<std::size_t> lengths;
    lengths.reserve(train_reports.size());
    for (const auto& r : train_reports) lengths.push_back(word_count(r.description));
    std::sort(lengths.begin(), lengths.end());
    // Nearest rank: ceil(0.75 n), 1-based.
    const std::size_t rank = (3 * lengths.size() + 3) / 4;
    return lengths[rank - 1];
}

bool is_selected(const BugReport& report, const SelectionRule& rule) {
    switch (rule.kind) {
        case RuleKind::none:
            return true;
        case RuleKind::content:
            return matches_content(report.description);
        case RuleKind::length:
            return word_count(report.description) > rule.length_threshold.value();
        case RuleKind::length_or_content:
            return word_count(report.description) > rule.length_threshold.value() ||
                   matches_content(report.description);
    }
    return false;
}

std::vector<BugReport> select(std::span<const BugReport> reports, const SelectionRule& rule) {
    rule.validate();
    std::vector<BugReport> out;
    for (const auto& r : reports) {
        if (is_selected(r, rule)) out.push_back(r);
    }
    return out;
}

}  // namespace dbrd
