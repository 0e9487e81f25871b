#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace dbrd {

enum class Field { summary = 0, description = 1 };
inline constexpr std::size_t kNumFields = 2;

/// Joins the two halves of a bigram. Tokens are ASCII alphanumeric, so this
/// never occurs inside a unigram.
inline constexpr std::string_view kBigramSeparator = "▸";

struct PrepConfig {
    bool lowercase = true;
    std::unordered_set<std::string> stopwords;
    bool stemming = false;

    /// Lowercasing on, English stopwords, no stemming.
    static PrepConfig defaults();
};

struct TokenStream {
    std::vector<std::string> tokens;
    Field field = Field::summary;
};

const std::unordered_set<std::string>& english_stopwords();

/// One term per line; blank lines and lines starting with '#' are ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Splits on runs of non-alphanumeric characters, then lowercases, drops
/// stopwords and stems as configured.
TokenStream tokenize(std::string_view text, const PrepConfig& cfg, Field field = Field::summary);

std::vector<std::string> bigrams(const std::vector<std::string>& tokens);
inline std::vector<std::string> bigrams(const TokenStream& stream) { return bigrams(stream.tokens); }

/// Porter (1980) suffix-stripping stemmer over lowercase ASCII words.
std::string porter_stem(std::string_view word);

}  // namespace dbrd
