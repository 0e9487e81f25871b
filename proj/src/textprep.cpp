#include "dbrd/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace dbrd {

namespace {

bool is_token_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::isalnum(u);
}

}  // namespace

PrepConfig PrepConfig::defaults() {
    PrepConfig cfg;
    cfg.stopwords = english_stopwords();
    return cfg;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword list " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        auto word = line.substr(first, last - first + 1);
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.insert(std::move(word));
    }
    return out;
}

TokenStream tokenize(std::string_view text, const PrepConfig& cfg, Field field) {
    TokenStream out;
    out.field = field;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_token_char(text[i])) ++i;
        const auto start = i;
        while (i < text.size() && is_token_char(text[i])) ++i;
        if (start == i) continue;

        std::string token(text.substr(start, i - start));
        if (cfg.lowercase) {
            for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        if (cfg.stopwords.contains(token)) continue;
        if (cfg.stemming) token = porter_stem(token);
        if (!token.empty()) out.tokens.push_back(std::move(token));
    }
    return out;
}

std::vector<std::string> bigrams(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    if (tokens.size() < 2) return out;
    out.reserve(tokens.size() - 1);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        std::string joined;
        joined.reserve(tokens[i].size() + kBigramSeparator.size() + tokens[i + 1].size());
        joined += tokens[i];
        joined += kBigramSeparator;
        joined += tokens[i + 1];
        out.push_back(std::move(joined));
    }
    return out;
}

}  // namespace dbrd
