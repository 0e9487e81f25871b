#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbrd/corpus.hpp"

namespace dbrd {

enum class RuleKind { none, content, length, length_or_content };

struct SelectionRule {
    RuleKind kind = RuleKind::none;
    std::optional<std::size_t> length_threshold;  // words; set iff kind involves length

    bool uses_length() const { return kind == RuleKind::length || kind == RuleKind::length_or_content; }
    bool uses_content() const { return kind == RuleKind::content || kind == RuleKind::length_or_content; }
    /// Throws std::invalid_argument when the threshold presence does not match the kind.
    void validate() const;
};

/// Accepts none, content, length, both (alias length_or_content).
RuleKind parse_rule_kind(std::string_view text);
std::string to_string(RuleKind kind);

/// `\w+\.\w+\.\w{1,}` anywhere in the text, with \w = [A-Za-z0-9_].
bool has_dotted_identifier(std::string_view text);
/// `https?://\S+` anywhere in the text.
bool has_url(std::string_view text);
inline bool matches_content(std::string_view description) {
    return has_dotted_identifier(description) || has_url(description);
}

/// Whitespace-delimited word count.
std::size_t word_count(std::string_view text);

/// Nearest-rank 75th percentile of description word counts. Throws on an empty set.
std::size_t length_threshold(std::span<const BugReport> train_reports);

bool is_selected(const BugReport& report, const SelectionRule& rule);

/// Order-preserving filter.
std::vector<BugReport> select(std::span<const BugReport> reports, const SelectionRule& rule);

}  // namespace dbrd
