#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fncstance/stance.hpp"

namespace fncstance {

using BodyId = std::int64_t;

// One headline/body example. The body text is shared between all pairs that
// reference the same body id.
struct StancePair {
    std::string headline;
    BodyId body_id = 0;
    std::shared_ptr<const std::string> body_text;
    std::optional<Stance> stance;

    const std::string& body() const;

    friend bool operator==(const StancePair& a, const StancePair& b);
};

StancePair make_pair(std::string headline, BodyId body_id, std::string body,
                     std::optional<Stance> stance = std::nullopt);

using LabelHistogram = std::array<std::size_t, kNumStances>;

struct Corpus {
    std::vector<StancePair> pairs;
    std::map<BodyId, std::shared_ptr<const std::string>> bodies;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }

    // Adds a body; throws SchemaError on a conflicting duplicate id.
    void add_body(BodyId id, std::string text);
    // Appends a pair whose body must already be registered (JoinError otherwise).
    void add_pair(std::string headline, BodyId id, std::optional<Stance> stance);

    friend bool operator==(const Corpus& a, const Corpus& b);
};

enum class LabelPolicy { Required, Optional };

// Joins a stances CSV (Headline, Body ID[, Stance]) with a bodies CSV
// (Body ID, articleBody). Row order follows the stances file. With
// LabelPolicy::Optional a missing Stance column yields unlabeled pairs.
Corpus load_corpus(const std::string& stances_path, const std::string& bodies_path,
                   LabelPolicy policy = LabelPolicy::Required);

// Same as load_corpus, from in-memory CSV text.
Corpus parse_corpus(std::string_view stances_csv, std::string_view bodies_csv,
                    LabelPolicy policy = LabelPolicy::Required);

// Writes the two-file CSV form. Unlabeled corpora omit the Stance column.
void save_corpus(const Corpus& corpus, const std::string& stances_path,
                 const std::string& bodies_path);

// Counts labeled pairs per stance; unlabeled pairs are not counted.
LabelHistogram label_histogram(const Corpus& corpus);

// Body-disjoint deterministic split, returned as (train, validation).
//
// Distinct body ids are sorted ascending and shuffled by Fisher-Yates driven
// by std::mt19937_64(seed): for i = n-1 down to 1, j = rng() % (i + 1),
// swap(ids[i], ids[j]). Walking the shuffled ids, a body goes to validation
// when 2 * (validation_pairs) + body_pairs < 2 * fraction * total_pairs,
// i.e. when taking it moves the validation count closer to its target.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double validation_fraction,
                                std::uint64_t seed);

}  // namespace fncstance
