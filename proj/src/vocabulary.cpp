#include "fncstance/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "fncstance/error.hpp"

namespace fncstance {

namespace {

struct TokenStats {
    std::size_t occurrences = 0;
    std::size_t documents = 0;
};

void count_document(const text::TokenSequence& tokens,
                    std::unordered_map<std::string, TokenStats>& stats) {
    std::set<std::string_view> seen;
    for (const auto& t : tokens) {
        auto& s = stats[t];
        ++s.occurrences;
        if (seen.insert(t).second) ++s.documents;
    }
}

std::size_t parse_size(std::string_view field, std::string_view what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw FormatError("vocabulary: bad " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

Vocabulary Vocabulary::build(const Corpus& training_corpus, std::size_t capacity) {
    if (training_corpus.empty()) throw ParameterError("cannot build a vocabulary from an empty corpus");
    if (capacity == 0) throw ParameterError("vocabulary capacity must be at least 1");

    std::unordered_map<std::string, TokenStats> stats;
    std::size_t documents = 0;
    for (const auto& p : training_corpus.pairs) {
        count_document(text::tokenize(p.headline), stats);
        ++documents;
    }
    std::set<BodyId> used;
    for (const auto& p : training_corpus.pairs) used.insert(p.body_id);
    for (BodyId id : used) {
        count_document(text::tokenize(*training_corpus.bodies.at(id)), stats);
        ++documents;
    }

    std::vector<std::pair<std::string, TokenStats>> ranked(stats.begin(), stats.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.occurrences != b.second.occurrences) {
            return a.second.occurrences > b.second.occurrences;
        }
        return a.first < b.first;
    });
    if (ranked.size() > capacity) ranked.resize(capacity);

    std::vector<Entry> entries;
    entries.reserve(ranked.size());
    for (auto& [token, s] : ranked) entries.push_back({std::move(token), s.documents});
    return Vocabulary(capacity, documents, std::move(entries));
}

Vocabulary::Vocabulary(std::size_t capacity, std::size_t num_documents, std::vector<Entry> entries)
    : capacity_(capacity), num_documents_(num_documents), entries_(std::move(entries)) {
    if (entries_.size() > capacity_) {
        throw FormatError("vocabulary holds " + std::to_string(entries_.size()) +
                          " tokens but capacity is " + std::to_string(capacity_));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].token.empty()) throw FormatError("vocabulary: empty token");
        if (!index_.emplace(entries_[i].token, i).second) {
            throw FormatError("vocabulary: duplicate token '" + entries_[i].token + "'");
        }
    }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t index) const {
    const double n = static_cast<double>(num_documents_);
    const double df = static_cast<double>(document_frequency(index));
    return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

void Vocabulary::write(std::ostream& out) const {
    out << "VOCAB1\t" << capacity_ << '\t' << num_documents_ << '\n';
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out << entries_[i].token << '\t' << i << '\t' << entries_[i].document_frequency << '\n';
    }
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    write(out);
}

Vocabulary Vocabulary::read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("vocabulary: missing header");
    auto header = split_tabs(line);
    if (header.size() != 3 || header[0] != "VOCAB1") throw FormatError("vocabulary: bad header");
    const std::size_t capacity = parse_size(header[1], "capacity");
    const std::size_t docs = parse_size(header[2], "document count");

    std::vector<Entry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parts = split_tabs(line);
        if (parts.size() != 3) throw FormatError("vocabulary: malformed line '" + line + "'");
        const std::size_t index = parse_size(parts[1], "index");
        if (index != entries.size()) {
            throw FormatError("vocabulary: index " + std::to_string(index) + " out of sequence");
        }
        entries.push_back({std::string(parts[0]), parse_size(parts[2], "document frequency")});
    }
    return Vocabulary(capacity, docs, std::move(entries));
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return read(in);
}

bool operator==(const Vocabulary& a, const Vocabulary& b) {
    if (a.capacity_ != b.capacity_ || a.num_documents_ != b.num_documents_ ||
        a.entries_.size() != b.entries_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].token != b.entries_[i].token ||
            a.entries_[i].document_frequency != b.entries_[i].document_frequency) {
            return false;
        }
    }
    return true;
}

std::vector<double> tf_vector(const text::TokenSequence& tokens, const Vocabulary& vocab) {
    std::vector<double> tf(vocab.capacity(), 0.0);
    for (const auto& t : tokens) {
        if (auto i = vocab.index_of(t)) tf[*i] += 1.0;
    }
    return tf;
}

std::vector<double> statistical_feature(const StancePair& pair, const Vocabulary& vocab) {
    std::vector<double> out = tf_vector(text::tokenize(pair.headline), vocab);
    const auto body = tf_vector(text::tokenize(pair.body()), vocab);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

}  // namespace fncstance
