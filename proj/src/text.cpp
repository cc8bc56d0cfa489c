#include "fncstance/text.hpp"

#include <algorithm>
#include <set>

#include "fncstance/error.hpp"

namespace fncstance::text {

namespace {

constexpr bool is_token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

constexpr char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

void check_range(std::size_t n, std::size_t lo, std::size_t hi, const char* what) {
    if (n < lo || n > hi) {
        throw ParameterError(std::string(what) + " n=" + std::to_string(n) + " outside [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string current;
    for (char raw : text) {
        const char c = lower(raw);
        if (is_token_char(c)) {
            current.push_back(c);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string join(const TokenSequence& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string normalize(std::string_view text) { return join(tokenize(text)); }

std::size_t NgramMultiset::total() const {
    std::size_t sum = 0;
    for (const auto& [_, c] : grams) sum += c;
    return sum;
}

NgramMultiset char_ngrams_normalized(std::string_view normalized, std::size_t n) {
    check_range(n, kMinCharGram, kMaxCharGram, "char n-gram");
    NgramMultiset out{n, GramUnit::Char, {}};
    for (std::size_t i = 0; i + n <= normalized.size(); ++i) {
        auto gram = normalized.substr(i, n);
        auto it = out.grams.find(gram);
        if (it == out.grams.end()) {
            out.grams.emplace(std::string(gram), 1);
        } else {
            ++it->second;
        }
    }
    return out;
}

NgramMultiset char_ngrams(std::string_view text, std::size_t n) {
    check_range(n, kMinCharGram, kMaxCharGram, "char n-gram");
    return char_ngrams_normalized(normalize(text), n);
}

NgramMultiset word_ngrams(const TokenSequence& tokens, std::size_t n) {
    check_range(n, kMinWordGram, kMaxWordGram, "word n-gram");
    NgramMultiset out{n, GramUnit::Word, {}};
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
            gram.push_back(' ');
            gram += tokens[i + k];
        }
        ++out.grams[gram];
    }
    return out;
}

double overlap_ratio(const NgramMultiset& query, const NgramMultiset& target) {
    if (query.n != target.n || query.unit != target.unit) {
        throw ParameterError("overlap_ratio: n-gram multisets differ in n or unit");
    }
    if (query.grams.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& [gram, _] : query.grams) {
        if (target.grams.contains(gram)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(query.grams.size());
}

}  // namespace fncstance::text
