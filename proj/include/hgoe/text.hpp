#pragma once

// Tokenization and stopword filtering shared by every module that turns raw
// text into terms: keyword extraction, query parsing, entity-name matching
// and the inverted-index baseline.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hgoe {

/// Bundled English stopword list, version 1. Changing it changes every index
/// built from it, so bump `kStopwordListVersion` together with the list.
inline constexpr int kStopwordListVersion = 1;

inline constexpr std::array<std::string_view, 179> kStopwords = {
    "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an",
    "and", "any", "are", "aren", "aren't", "as", "at", "be", "because", "been",
    "before", "being", "below", "between", "both", "but", "by", "can", "couldn", "couldn't",
    "d", "did", "didn", "didn't", "do", "does", "doesn", "doesn't", "doing", "don",
    "don't", "down", "during", "each", "few", "for", "from", "further", "had", "hadn",
    "hadn't", "has", "hasn", "hasn't", "have", "haven", "haven't", "having", "he", "her",
    "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in",
    "into", "is", "isn", "isn't", "it", "it's", "its", "itself", "just", "ll",
    "m", "ma", "me", "mightn", "mightn't", "more", "most", "mustn", "mustn't", "my",
    "myself", "needn", "needn't", "no", "nor", "not", "now", "o", "of", "off",
    "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over",
    "own", "re", "s", "same", "shan", "shan't", "she", "she's", "should", "should've",
    "shouldn", "shouldn't", "so", "some", "such", "t", "than", "that", "that'll", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "to", "too", "under", "until", "up", "ve", "very", "was", "wasn",
    "wasn't", "we", "were", "weren", "weren't", "what", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "won", "won't", "wouldn", "wouldn't", "y",
    "you", "you'd", "you'll", "you're", "you've", "your", "yours", "yourself", "yourselves",
};

namespace detail {

inline const std::vector<std::string_view>& sorted_stopwords() {
    static const std::vector<std::string_view> sorted = [] {
        std::vector<std::string_view> v(kStopwords.begin(), kStopwords.end());
        std::sort(v.begin(), v.end());
        return v;
    }();
    return sorted;
}

// Bytes >= 0x80 belong to multi-byte UTF-8 sequences and are kept inside
// tokens, so non-ASCII letters never split a word.
inline bool is_word_byte(unsigned char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline std::size_t codepoint_length(std::string_view s) noexcept {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

} // namespace detail

inline bool is_stopword(std::string_view token) {
    const auto& words = detail::sorted_stopwords();
    return std::binary_search(words.begin(), words.end(), token);
}

struct TokenizerOptions {
    /// Tokens shorter than this many code points are dropped.
    std::size_t min_token_length = 2;
    bool remove_stopwords = true;
};

/// Lowercases ASCII letters and splits on every non-alphanumeric byte. No
/// filtering is applied.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (detail::is_word_byte(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

/// Lowercase, tokenize, drop stopwords and short tokens. Order and duplicates
/// are preserved.
inline std::vector<std::string> preprocess(std::string_view text, const TokenizerOptions& options = {}) {
    auto tokens = tokenize(text);
    std::erase_if(tokens, [&](const std::string& t) {
        return detail::codepoint_length(t) < options.min_token_length ||
               (options.remove_stopwords && is_stopword(t));
    });
    return tokens;
}

inline std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

} // namespace hgoe
