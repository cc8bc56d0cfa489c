#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "fncstance/corpus.hpp"
#include "fncstance/text.hpp"
#include "fncstance/vocabulary.hpp"

namespace fncstance {

// Slot layout of the 50-wide hand-crafted block.
namespace ext_layout {
inline constexpr std::size_t kCharGrams = 0;        // n = 2..16 against the whole body
inline constexpr std::size_t kCharGramsEarly = 15;  // n = 2..16 against the body lead
inline constexpr std::size_t kWordGrams = 30;       // n = 2..6 against the whole body
inline constexpr std::size_t kWordGramsEarly = 35;  // n = 2..6 against the body lead
inline constexpr std::size_t kWeightedTfidf = 40;
inline constexpr std::size_t kTfidfCosine = 41;
inline constexpr std::size_t kHeadlinePolarity = 42;
inline constexpr std::size_t kBodyPolarity = 43;
inline constexpr std::size_t kRefuting = 44;        // 6 core lexicon counts
inline constexpr std::size_t kSize = 50;
}  // namespace ext_layout

// Number of leading normalized body characters used for the "early" slots.
inline constexpr std::size_t kEarlyBodyChars = 256;
inline constexpr std::size_t kCoreLexiconSize = 6;
inline constexpr double kRefutingClip = 5.0;

using ExternalFeatures = std::array<double, ext_layout::kSize>;

class PolarityLexicon {
public:
    // fake, fraud, hoax, false, deny, denies, not, despite, nope, doubt,
    // doubts, bogus, debunk, pranks, retract
    static PolarityLexicon default_lexicon();

    // One word per line, '#' lines and blank lines ignored. The first six
    // words form the core block.
    static PolarityLexicon load(const std::string& path);

    // Throws ParameterError on duplicates, non-normalized words, or fewer than
    // six entries.
    explicit PolarityLexicon(std::vector<std::string> words);

    const std::vector<std::string>& words() const { return words_; }
    bool contains(const std::string& token) const;

private:
    std::vector<std::string> words_;
};

// Occurrences of any lexicon word, modulo 2.
int polarity(const text::TokenSequence& tokens, const PolarityLexicon& lexicon);

// Counts of the six core words in the headline, each clipped to [0, 5].
std::array<double, kCoreLexiconSize> refuting_block(const text::TokenSequence& headline_tokens,
                                                    const PolarityLexicon& lexicon);

// Everything about a body that the external block needs, computed once and
// shared across all headlines paired with that body.
struct BodyProfile {
    using GramSet = std::unordered_set<std::string>;

    std::string normalized;
    std::string early;  // first kEarlyBodyChars characters of `normalized`
    // Distinct grams, indexed by n - 2.
    std::array<GramSet, text::kMaxCharGram - 1> char_grams;
    std::array<GramSet, text::kMaxCharGram - 1> char_grams_early;
    std::array<GramSet, text::kMaxWordGram - 1> word_grams;
    std::array<GramSet, text::kMaxWordGram - 1> word_grams_early;
    std::vector<double> tf;  // raw TF over the vocabulary, empty if none given
    double tfidf_norm = 0.0;
    int polarity = 0;
};

BodyProfile make_body_profile(const std::string& body, const Vocabulary* vocab,
                              const PolarityLexicon& lexicon);

// 40 n-gram overlap slots (char whole, char early, word whole, word early).
std::array<double, 40> ngram_block(const StancePair& pair);

double weighted_tfidf_score(const StancePair& pair, const Vocabulary& vocab);
double tfidf_cosine(const StancePair& pair, const Vocabulary& vocab);

ExternalFeatures external_features(const StancePair& pair, const Vocabulary& vocab,
                                   const PolarityLexicon& lexicon);

// Same result as external_features, reusing a precomputed body profile.
ExternalFeatures external_features(const std::string& headline, const BodyProfile& body,
                                   const Vocabulary& vocab, const PolarityLexicon& lexicon);

}  // namespace fncstance
