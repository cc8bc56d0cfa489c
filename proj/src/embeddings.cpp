#include "fncstance/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "binary_io.hpp"
#include "fncstance/error.hpp"
#include "fncstance/text.hpp"

namespace fncstance {

namespace {

constexpr std::string_view kBinaryMagic = "STVEC1";
constexpr std::string_view kTextMagic = "STVEC-TXT";

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::size_t parse_dim(std::string_view s, const std::string& path) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
        throw FormatError(path + ": bad dimension '" + std::string(s) + "'");
    }
    return v;
}

EmbeddingStore load_text(std::istream& in, const std::string& path) {
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != kTextMagic) {
        throw FormatError(path + ": bad text embedding header");
    }
    EmbeddingStore store(parse_dim(std::string_view(line).substr(tab + 1), path));
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto sep = line.find('\t');
        if (sep == std::string::npos) throw FormatError(path + ": record without tab separator");
        std::string key = line.substr(0, sep);
        SentenceEmbedding values;
        values.reserve(store.dimension());
        std::string_view rest = std::string_view(line).substr(sep + 1);
        while (!rest.empty()) {
            while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
            if (rest.empty()) break;
            auto end = rest.find(' ');
            auto tok = rest.substr(0, end);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
                throw FormatError(path + ": bad number in record '" + key + "'");
            }
            values.push_back(v);
            rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
        }
        store.insert(std::move(key), std::move(values));
    }
    return store;
}

EmbeddingStore load_binary(std::istream& in, const std::string& path) {
    io::expect_magic(in, kBinaryMagic, path);
    const auto count = io::get<std::uint32_t>(in, "record count");
    const auto dim = io::get<std::uint32_t>(in, "dimension");
    if (dim == 0) throw FormatError(path + ": zero dimension");
    EmbeddingStore store(dim);
    for (std::uint32_t r = 0; r < count; ++r) {
        std::string key = io::get_string(in, "record key");
        SentenceEmbedding values(dim);
        try {
            for (auto& v : values) v = io::get_f32(in, "record values");
        } catch (const FormatError&) {
            throw FormatError(path + ": record '" + key + "' has fewer than " +
                              std::to_string(dim) + " values");
        }
        store.insert(std::move(key), std::move(values));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError(path + ": trailing bytes after " + std::to_string(count) + " records");
    }
    return store;
}

}  // namespace

EmbeddingStore EmbeddingStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open embedding store " + path);
    char first = static_cast<char>(in.peek());
    if (first == 'S') {
        std::string head(kTextMagic.size(), '\0');
        in.read(head.data(), static_cast<std::streamsize>(head.size()));
        in.clear();
        in.seekg(0);
        if (head == kTextMagic) return load_text(in, path);
    }
    return load_binary(in, path);
}

void EmbeddingStore::insert(std::string key, SentenceEmbedding values) {
    if (values.size() != dimension_) {
        throw FormatError("embedding '" + key + "' has dimension " + std::to_string(values.size()) +
                          ", store dimension is " + std::to_string(dimension_));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw FormatError("embedding '" + key + "' has a non-finite entry");
    }
    auto [it, inserted] = entries_.try_emplace(std::move(key), std::move(values));
    if (!inserted) throw FormatError("duplicate embedding key '" + it->first + "'");
}

const SentenceEmbedding* EmbeddingStore::find_key(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

const SentenceEmbedding* EmbeddingStore::find_text(std::string_view text) const {
    return find_key(text::normalize(text));
}

void EmbeddingStore::save_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out.write(kBinaryMagic.data(), kBinaryMagic.size());
    io::put(out, static_cast<std::uint32_t>(entries_.size()));
    io::put(out, static_cast<std::uint32_t>(dimension_));
    for (const auto& [key, values] : entries_) {
        io::put_string(out, key);
        for (double v : values) io::put_f32(out, static_cast<float>(v));
    }
}

void EmbeddingStore::save_text(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << kTextMagic << '\t' << dimension_ << '\n';
    out << std::setprecision(9);
    for (const auto& [key, values] : entries_) {
        out << key << '\t';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ' ';
            out << values[i];
        }
        out << '\n';
    }
}

SentenceEmbedding fallback_embed(std::string_view text, std::size_t dimension, std::uint64_t seed) {
    if (dimension == 0) throw ParameterError("embedding dimension must be at least 1");
    SentenceEmbedding sum(dimension, 0.0);
    std::vector<double> token_vec(dimension);
    std::uint64_t seed_state = seed;
    const std::uint64_t seed_mix = splitmix64(seed_state);
    for (const auto& token : text::tokenize(text)) {
        std::uint64_t state = fnv1a64(token) ^ seed_mix;
        double norm2 = 0.0;
        for (auto& v : token_vec) {
            v = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
            norm2 += v * v;
        }
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < dimension; ++i) sum[i] += token_vec[i] * inv;
    }
    double norm2 = 0.0;
    for (double v : sum) norm2 += v * v;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : sum) v *= inv;
    }
    return sum;
}

SentenceEncoder SentenceEncoder::from_store(EmbeddingStore store) {
    SentenceEncoder e;
    e.dimension_ = store.dimension();
    e.store_ = std::move(store);
    return e;
}

SentenceEncoder SentenceEncoder::fallback(std::size_t dimension, std::uint64_t seed) {
    if (dimension == 0) throw ParameterError("embedding dimension must be at least 1");
    SentenceEncoder e;
    e.dimension_ = dimension;
    e.seed_ = seed;
    return e;
}

std::size_t SentenceEncoder::dimension() const { return dimension_; }

SentenceEmbedding SentenceEncoder::encode(std::string_view text) const {
    if (!store_) return fallback_embed(text, dimension_, seed_);
    const std::string key = text::normalize(text);
    if (const auto* v = store_->find_key(key)) return *v;
    throw MissingEmbeddingError("no embedding for key '" + key + "'");
}

NeuralFeatures neural_features(const SentenceEmbedding& body, const SentenceEmbedding& headline) {
    if (body.size() != headline.size()) {
        throw ParameterError("embedding dimensions differ: " + std::to_string(body.size()) + " vs " +
                             std::to_string(headline.size()));
    }
    NeuralFeatures f;
    f.product.resize(body.size());
    f.abs_difference.resize(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        f.product[i] = body[i] * headline[i];
        f.abs_difference[i] = std::abs(body[i] - headline[i]);
    }
    return f;
}

}  // namespace fncstance
