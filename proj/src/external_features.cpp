#include "fncstance/external_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "fncstance/error.hpp"

namespace fncstance {

PolarityLexicon PolarityLexicon::default_lexicon() {
    return PolarityLexicon({"fake", "fraud", "hoax", "false", "deny", "denies", "not", "despite",
                            "nope", "doubt", "doubts", "bogus", "debunk", "pranks", "retract"});
}

PolarityLexicon::PolarityLexicon(std::vector<std::string> words) : words_(std::move(words)) {
    if (words_.size() < kCoreLexiconSize) {
        throw ParameterError("lexicon needs at least " + std::to_string(kCoreLexiconSize) +
                             " words, got " + std::to_string(words_.size()));
    }
    std::set<std::string_view> seen;
    for (const auto& w : words_) {
        if (w.empty() || text::normalize(w) != w || w.find(' ') != std::string::npos) {
            throw ParameterError("lexicon word '" + w + "' is not a lowercase alphanumeric token");
        }
        if (!seen.insert(w).second) throw ParameterError("duplicate lexicon word '" + w + "'");
    }
}

PolarityLexicon PolarityLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open lexicon " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t");
        words.push_back(line.substr(first, last - first + 1));
    }
    return PolarityLexicon(std::move(words));
}

bool PolarityLexicon::contains(const std::string& token) const {
    return std::find(words_.begin(), words_.end(), token) != words_.end();
}

int polarity(const text::TokenSequence& tokens, const PolarityLexicon& lexicon) {
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (lexicon.contains(t)) ++hits;
    }
    return static_cast<int>(hits % 2);
}

std::array<double, kCoreLexiconSize> refuting_block(const text::TokenSequence& headline_tokens,
                                                    const PolarityLexicon& lexicon) {
    std::array<double, kCoreLexiconSize> counts{};
    for (const auto& t : headline_tokens) {
        for (std::size_t k = 0; k < kCoreLexiconSize; ++k) {
            if (t == lexicon.words()[k]) counts[k] += 1.0;
        }
    }
    for (double& c : counts) c = std::min(c, kRefutingClip);
    return counts;
}

namespace {

void char_gram_set(std::string_view normalized, std::size_t n, BodyProfile::GramSet& out) {
    for (std::size_t i = 0; i + n <= normalized.size(); ++i) {
        out.emplace(normalized.substr(i, n));
    }
}

std::string word_gram(const text::TokenSequence& tokens, std::size_t start, std::size_t n) {
    std::string gram = tokens[start];
    for (std::size_t k = 1; k < n; ++k) {
        gram.push_back(' ');
        gram += tokens[start + k];
    }
    return gram;
}

void word_gram_set(const text::TokenSequence& tokens, std::size_t n, BodyProfile::GramSet& out) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) out.insert(word_gram(tokens, i, n));
}

// Distinct-query coverage, the same quantity text::overlap_ratio computes.
double coverage(const std::set<std::string>& query, const BodyProfile::GramSet& target) {
    if (query.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& g : query) {
        if (target.contains(g)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(query.size());
}

std::map<std::size_t, double> headline_counts(const text::TokenSequence& tokens,
                                              const Vocabulary& vocab) {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokens) {
        if (auto i = vocab.index_of(t)) counts[*i] += 1.0;
    }
    return counts;
}

void fill_ngram_slots(const std::string& headline_normalized,
                      const text::TokenSequence& headline_tokens, const BodyProfile& body,
                      double* out) {
    for (std::size_t n = text::kMinCharGram; n <= text::kMaxCharGram; ++n) {
        std::set<std::string> query;
        for (std::size_t i = 0; i + n <= headline_normalized.size(); ++i) {
            query.emplace(headline_normalized.substr(i, n));
        }
        out[ext_layout::kCharGrams + n - 2] = coverage(query, body.char_grams[n - 2]);
        out[ext_layout::kCharGramsEarly + n - 2] = coverage(query, body.char_grams_early[n - 2]);
    }
    for (std::size_t n = text::kMinWordGram; n <= text::kMaxWordGram; ++n) {
        std::set<std::string> query;
        for (std::size_t i = 0; i + n <= headline_tokens.size(); ++i) {
            query.insert(word_gram(headline_tokens, i, n));
        }
        out[ext_layout::kWordGrams + n - 2] = coverage(query, body.word_grams[n - 2]);
        out[ext_layout::kWordGramsEarly + n - 2] = coverage(query, body.word_grams_early[n - 2]);
    }
}

double weighted_tfidf(const std::map<std::size_t, double>& headline, const BodyProfile& body,
                      const Vocabulary& vocab) {
    double covered = 0.0;
    double total = 0.0;
    for (const auto& [i, _] : headline) {
        const double w = vocab.idf(i);
        total += w;
        if (body.tf[i] > 0.0) covered += w;
    }
    return total > 0.0 ? covered / total : 0.0;
}

double cosine(const std::map<std::size_t, double>& headline, const BodyProfile& body,
              const Vocabulary& vocab) {
    double dot = 0.0;
    double norm2 = 0.0;
    for (const auto& [i, count] : headline) {
        const double idf = vocab.idf(i);
        const double h = count * idf;
        norm2 += h * h;
        dot += h * body.tf[i] * idf;
    }
    if (norm2 <= 0.0 || body.tfidf_norm <= 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(norm2) * body.tfidf_norm), 0.0, 1.0);
}

}  // namespace

BodyProfile make_body_profile(const std::string& body, const Vocabulary* vocab,
                              const PolarityLexicon& lexicon) {
    BodyProfile p;
    const auto tokens = text::tokenize(body);
    p.normalized = text::join(tokens);
    p.early = p.normalized.substr(0, std::min(kEarlyBodyChars, p.normalized.size()));
    const auto early_tokens = text::tokenize(p.early);
    for (std::size_t n = text::kMinCharGram; n <= text::kMaxCharGram; ++n) {
        char_gram_set(p.normalized, n, p.char_grams[n - 2]);
        char_gram_set(p.early, n, p.char_grams_early[n - 2]);
    }
    for (std::size_t n = text::kMinWordGram; n <= text::kMaxWordGram; ++n) {
        word_gram_set(tokens, n, p.word_grams[n - 2]);
        word_gram_set(early_tokens, n, p.word_grams_early[n - 2]);
    }
    if (vocab) {
        p.tf = tf_vector(tokens, *vocab);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < vocab->size(); ++i) {
            const double v = p.tf[i] * vocab->idf(i);
            norm2 += v * v;
        }
        p.tfidf_norm = std::sqrt(norm2);
    }
    p.polarity = polarity(tokens, lexicon);
    return p;
}

std::array<double, 40> ngram_block(const StancePair& pair) {
    const auto body = make_body_profile(pair.body(), nullptr, PolarityLexicon::default_lexicon());
    const auto tokens = text::tokenize(pair.headline);
    std::array<double, 40> out{};
    fill_ngram_slots(text::join(tokens), tokens, body, out.data());
    return out;
}

double weighted_tfidf_score(const StancePair& pair, const Vocabulary& vocab) {
    const auto body = make_body_profile(pair.body(), &vocab, PolarityLexicon::default_lexicon());
    return weighted_tfidf(headline_counts(text::tokenize(pair.headline), vocab), body, vocab);
}

double tfidf_cosine(const StancePair& pair, const Vocabulary& vocab) {
    const auto body = make_body_profile(pair.body(), &vocab, PolarityLexicon::default_lexicon());
    return cosine(headline_counts(text::tokenize(pair.headline), vocab), body, vocab);
}

ExternalFeatures external_features(const std::string& headline, const BodyProfile& body,
                                   const Vocabulary& vocab, const PolarityLexicon& lexicon) {
    if (body.tf.size() != vocab.capacity()) {
        throw ParameterError("body profile was built without this vocabulary");
    }
    ExternalFeatures out{};
    const auto tokens = text::tokenize(headline);
    fill_ngram_slots(text::join(tokens), tokens, body, out.data());

    const auto counts = headline_counts(tokens, vocab);
    out[ext_layout::kWeightedTfidf] = weighted_tfidf(counts, body, vocab);
    out[ext_layout::kTfidfCosine] = cosine(counts, body, vocab);
    out[ext_layout::kHeadlinePolarity] = polarity(tokens, lexicon);
    out[ext_layout::kBodyPolarity] = body.polarity;
    const auto refuting = refuting_block(tokens, lexicon);
    std::copy(refuting.begin(), refuting.end(), out.begin() + ext_layout::kRefuting);
    return out;
}

ExternalFeatures external_features(const StancePair& pair, const Vocabulary& vocab,
                                   const PolarityLexicon& lexicon) {
    return external_features(pair.headline, make_body_profile(pair.body(), &vocab, lexicon), vocab,
                             lexicon);
}

}  // namespace fncstance
