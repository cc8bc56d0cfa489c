#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fncstance::text {

using TokenSequence = std::vector<std::string>;

// Lowercases ASCII letters; every byte outside [a-z0-9] is a token boundary.
TokenSequence tokenize(std::string_view text);

std::string join(const TokenSequence& tokens);

// tokens joined by single spaces.
std::string normalize(std::string_view text);

enum class GramUnit { Char, Word };

inline constexpr std::size_t kMinCharGram = 2;
inline constexpr std::size_t kMaxCharGram = 16;
inline constexpr std::size_t kMinWordGram = 2;
inline constexpr std::size_t kMaxWordGram = 6;

struct NgramMultiset {
    std::size_t n = 0;
    GramUnit unit = GramUnit::Char;
    // Word grams are keyed by their tokens joined with single spaces.
    std::map<std::string, std::size_t, std::less<>> grams;

    bool empty() const { return grams.empty(); }
    std::size_t total() const;

    friend bool operator==(const NgramMultiset&, const NgramMultiset&) = default;
};

// Character grams of normalize(text). n must be in [2, 16].
NgramMultiset char_ngrams(std::string_view text, std::size_t n);

// Character grams of text taken verbatim (caller already normalized it).
NgramMultiset char_ngrams_normalized(std::string_view normalized, std::size_t n);

// Contiguous token windows. n must be in [2, 6].
NgramMultiset word_ngrams(const TokenSequence& tokens, std::size_t n);

// Fraction of distinct query grams that also occur in target; 0 for an empty
// query.
double overlap_ratio(const NgramMultiset& query, const NgramMultiset& target);

}  // namespace fncstance::text
