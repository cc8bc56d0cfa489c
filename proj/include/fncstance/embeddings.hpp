#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fncstance {

inline constexpr std::size_t kSkipThoughtDim = 4800;

using SentenceEmbedding = std::vector<double>;

// Precomputed sentence vectors keyed by normalized text.
//
// Binary file: "STVEC1", u32 record count, u32 dimension, then per record
// u32 key length, key bytes, dimension little-endian float32 values.
// Text file: "STVEC-TXT\t<dim>" header, then "key\tv1 v2 ..." per line.
class EmbeddingStore {
public:
    explicit EmbeddingStore(std::size_t dimension) : dimension_(dimension) {}

    // Detects the format from the leading bytes.
    static EmbeddingStore load(const std::string& path);

    void save_binary(const std::string& path) const;
    void save_text(const std::string& path) const;

    // Throws FormatError on a duplicate key or wrong dimension.
    void insert(std::string key, SentenceEmbedding values);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return entries_.size(); }

    // Exact lookup by key.
    const SentenceEmbedding* find_key(std::string_view key) const;
    // Looks up text::normalize(text).
    const SentenceEmbedding* find_text(std::string_view text) const;

    const std::map<std::string, SentenceEmbedding, std::less<>>& entries() const {
        return entries_;
    }

private:
    std::size_t dimension_;
    std::map<std::string, SentenceEmbedding, std::less<>> entries_;
};

// Sum of per-token unit vectors drawn from a splitmix64 stream seeded by
// (fnv1a64(token), seed), normalized to unit length. Empty text gives zeros.
SentenceEmbedding fallback_embed(std::string_view text, std::size_t dimension, std::uint64_t seed);

// Either a loaded store or the fallback embedder.
class SentenceEncoder {
public:
    static SentenceEncoder from_store(EmbeddingStore store);
    static SentenceEncoder fallback(std::size_t dimension, std::uint64_t seed);

    std::size_t dimension() const;
    bool is_fallback() const { return !store_.has_value(); }

    // Throws MissingEmbeddingError naming the normalized key.
    SentenceEmbedding encode(std::string_view text) const;

private:
    SentenceEncoder() = default;
    std::optional<EmbeddingStore> store_;
    std::size_t dimension_ = kSkipThoughtDim;
    std::uint64_t seed_ = 0;
};

struct NeuralFeatures {
    std::vector<double> product;        // u[i] * v[i]
    std::vector<double> abs_difference; // |u[i] - v[i]|
};

NeuralFeatures neural_features(const SentenceEmbedding& body, const SentenceEmbedding& headline);

}  // namespace fncstance
