#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fncstance/corpus.hpp"
#include "fncstance/text.hpp"

namespace fncstance {

inline constexpr std::size_t kDefaultVocabularyCapacity = 5000;

// Frequency-capped unigram vocabulary with document frequencies. Immutable
// once constructed.
class Vocabulary {
public:
    struct Entry {
        std::string token;
        std::size_t document_frequency = 0;
    };

    // Picks the `capacity` most frequent tokens over every pair headline and
    // every distinct body, ties broken lexicographically. Each headline and
    // each distinct body is one document.
    static Vocabulary build(const Corpus& training_corpus, std::size_t capacity);

    // entries[i] receives index i. Throws FormatError on duplicates or when
    // entries exceed capacity.
    Vocabulary(std::size_t capacity, std::size_t num_documents, std::vector<Entry> entries);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t num_documents() const { return num_documents_; }

    std::optional<std::size_t> index_of(std::string_view token) const;
    const std::string& token(std::size_t index) const { return entries_.at(index).token; }
    std::size_t document_frequency(std::size_t index) const {
        return entries_.at(index).document_frequency;
    }

    // ln((N + 1) / (df + 1)) + 1
    double idf(std::size_t index) const;

    const std::vector<Entry>& entries() const { return entries_; }

    // "VOCAB1\t<capacity>\t<num_documents>" then "token\tindex\tdf" per line.
    void write(std::ostream& out) const;
    void save(const std::string& path) const;
    static Vocabulary read(std::istream& in);
    static Vocabulary load(const std::string& path);

    friend bool operator==(const Vocabulary& a, const Vocabulary& b);

private:
    std::size_t capacity_ = 0;
    std::size_t num_documents_ = 0;
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

// Raw term counts over the vocabulary; out-of-vocabulary tokens are dropped.
// Length is vocab.capacity().
std::vector<double> tf_vector(const text::TokenSequence& tokens, const Vocabulary& vocab);

// Headline TF followed by body TF, length 2 * capacity.
std::vector<double> statistical_feature(const StancePair& pair, const Vocabulary& vocab);

}  // namespace fncstance
