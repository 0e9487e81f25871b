#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbrd/extract.hpp"

namespace dbrd {

namespace {

constexpr std::string_view kOutputFormat =
    "Output format:\n"
    "Summary: [Selected Keywords]\n"
    "Description: [Selected Keywords]\n"
    "\n"
    "Summary: {{Summary}}\n"
    "Description: {{Description}}";

std::string final_template() {
    return std::string(
               "Identify keywords from the summary and description of the bug report that can be used to detect "
               "duplicates.\n") +
           std::string(kOutputFormat);
}

std::string concise_template() {
    return std::string("Identify keywords from the bug report to detect duplicates.\n\n") + std::string(kOutputFormat);
}

std::string verbose_template() {
    return std::string(
               "Review the summary and description of the bug report to identify specific keywords that can be used "
               "as criteria for detecting duplicate reports. Consider the language used, technical terms, and any "
               "unique identifiers mentioned in the report.\n\n") +
           std::string(kOutputFormat);
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

void PromptTemplate::validate() const {
    if (count_occurrences(body, kSummarySlot) != 1 || count_occurrences(body, kDescriptionSlot) != 1) {
        throw std::invalid_argument("prompt template '" + name + "' must contain {{Summary}} and {{Description}} exactly once");
    }
}

std::string PromptTemplate::fill(std::string_view summary, std::string_view description) const {
    validate();
    const auto s = body.find(kSummarySlot);
    const auto d = body.find(kDescriptionSlot);
    // Substitute in one pass so report text containing a placeholder is left alone.
    const bool summary_first = s < d;
    const auto first = summary_first ? s : d;
    const auto second = summary_first ? d : s;
    const auto first_len = (summary_first ? kSummarySlot : kDescriptionSlot).size();
    const auto second_len = (summary_first ? kDescriptionSlot : kSummarySlot).size();
    std::string out;
    out.reserve(body.size() + summary.size() + description.size());
    out.append(body, 0, first);
    out.append(summary_first ? summary : description);
    out.append(body, first + first_len, second - first - first_len);
    out.append(summary_first ? description : summary);
    out.append(body, second + second_len);
    return out;
}

PromptTemplate PromptTemplate::builtin(std::string_view name) {
    if (name == "final") return {"final", final_template()};
    if (name == "concise") return {"concise", concise_template()};
    if (name == "verbose") return {"verbose", verbose_template()};
    throw std::invalid_argument("unknown prompt template '" + std::string(name) + "'");
}

std::vector<std::string> PromptTemplate::builtin_names() { return {"final", "concise", "verbose"}; }

PromptTemplate PromptTemplate::load(std::string name, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open prompt template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    PromptTemplate t{std::move(name), ss.str()};
    t.validate();
    return t;
}

std::vector<std::string> parse_keyword_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    auto emit = [&](std::string_view item) {
        item = trim(item);
        // Bullets, list brackets and quotes around an item.
        while (!item.empty() && (item.front() == '[' || item.front() == '-' || item.front() == '*' ||
                                 item.front() == '"' || item.front() == '\'' || item.front() == '`')) {
            item.remove_prefix(1);
            item = trim(item);
        }
        while (!item.empty() && (item.back() == ']' || item.back() == '"' || item.back() == '\'' ||
                                 item.back() == '`' || item.back() == '.')) {
            item.remove_suffix(1);
            item = trim(item);
        }
        if (!item.empty()) out.emplace_back(item);
    };
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',' || text[i] == '\n') {
            emit(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

namespace {

enum class Section { none, summary, description };

// Recognizes "Summary:", "**Summary:**", "- Description:" and the like.
// On a match, `rest` receives the text after the colon.
Section label_of(std::string_view line, std::string_view& rest) {
    auto s = trim(line);
    while (!s.empty() && (s.front() == '*' || s.front() == '-' || s.front() == '#' || s.front() == '_')) {
        s.remove_prefix(1);
    }
    s = trim(s);
    for (auto [label, section] : {std::pair{std::string_view("summary"), Section::summary},
                                  std::pair{std::string_view("description"), Section::description}}) {
        if (s.size() < label.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < label.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(s[i])) != label[i]) {
                same = false;
                break;
            }
        }
        if (!same) continue;
        auto after = s.substr(label.size());
        while (!after.empty() && (after.front() == '*' || after.front() == '_' || after.front() == ' ')) {
            after.remove_prefix(1);
        }
        if (after.empty() || after.front() != ':') continue;
        after.remove_prefix(1);
        while (!after.empty() && (after.front() == '*' || after.front() == '_')) after.remove_prefix(1);
        rest = after;
        return section;
    }
    return Section::none;
}

}  // namespace

ParsedKeywords parse_keyword_response(std::string_view text) {
    std::string summary_text;
    std::string description_text;
    std::string unlabeled;
    bool saw_summary = false;
    bool saw_description = false;
    Section current = Section::none;

    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        std::string_view rest;
        const Section label = label_of(line, rest);
        if (label != Section::none) {
            current = label;
            (label == Section::summary ? saw_summary : saw_description) = true;
        } else {
            rest = line;
        }
        auto& sink = current == Section::summary       ? summary_text
                     : current == Section::description ? description_text
                                                       : unlabeled;
        sink += rest;
        sink += '\n';
        start = end + 1;
    }

    ParsedKeywords parsed;
    parsed.separated = saw_summary && saw_description;
    if (parsed.separated) {
        parsed.summary = parse_keyword_list(summary_text);
        parsed.description = parse_keyword_list(description_text);
    } else {
        parsed.mixed = parse_keyword_list(unlabeled + summary_text + description_text);
    }
    return parsed;
}

KeywordResult extract_llm(const BugReport& report, const PromptTemplate& prompt, CompletionClient& client,
                          const LlmExtractOptions& opts) {
    const std::string text = prompt.fill(report.summary, report.description);
    std::vector<std::string> fallback;
    std::string fallback_raw;
    std::string last_raw;
    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, opts.max_attempts); ++attempt) {
        std::string reply;
        try {
            reply = client.complete(text);
        } catch (const std::exception& e) {
            throw ExtractionError(report.id, e.what());
        }
        last_raw = reply;
        auto parsed = parse_keyword_response(reply);
        if (parsed.separated) {
            KeywordResult kw{std::move(parsed.summary), std::move(parsed.description), std::move(reply)};
            if (opts.dedup) {
                dedup_keywords(kw.summary_kw);
                dedup_keywords(kw.description_kw);
            }
            return kw;
        }
        if (!parsed.mixed.empty()) {
            fallback = std::move(parsed.mixed);
            fallback_raw = std::move(reply);
        }
    }
    if (fallback.empty()) throw ExtractionError(report.id, "no keywords in any of the replies; last reply: " + last_raw);
    if (opts.dedup) dedup_keywords(fallback);
    return KeywordResult{fallback, fallback, std::move(fallback_raw)};
}

BugReport rewrite_report(const BugReport& report, const KeywordResult& kw, bool dedup) {
    BugReport out = report;
    auto summary = kw.summary_kw;
    auto description = kw.description_kw;
    if (dedup) {
        dedup_keywords(summary);
        dedup_keywords(description);
    }
    out.summary = join(summary, ", ");
    out.description = join(description, ", ");
    return out;
}

KeywordCache::KeywordCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            CacheKey key{j.at("report_id").get<std::string>(), j.at("template").get<std::string>(),
                         j.at("run").get<std::size_t>()};
            KeywordResult kw{j.at("summary_kw").get<std::vector<std::string>>(),
                             j.at("description_kw").get<std::vector<std::string>>(), j.value("raw", std::string())};
            entries_[std::move(key)] = std::move(kw);
        } catch (const std::exception& e) {
            throw std::runtime_error(path_->string() + ":" + std::to_string(line_no) + ": bad cache record: " + e.what());
        }
    }
}

std::optional<KeywordResult> KeywordCache::get(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void KeywordCache::put(const CacheKey& key, const KeywordResult& kw) {
    std::lock_guard lock(mutex_);
    entries_[key] = kw;
    if (!path_) return;
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to keyword cache " + path_->string());
    out << nlohmann::json{{"report_id", key.report_id},   {"template", key.template_name},
                          {"run", key.run},               {"summary_kw", kw.summary_kw},
                          {"description_kw", kw.description_kw}, {"raw", kw.raw}}
               .dump()
        << '\n';
}

std::size_t KeywordCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace dbrd
