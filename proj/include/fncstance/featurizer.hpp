#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fncstance/corpus.hpp"
#include "fncstance/embeddings.hpp"
#include "fncstance/external_features.hpp"
#include "fncstance/feature_bundle.hpp"
#include "fncstance/vocabulary.hpp"

namespace fncstance {

struct BlockDims {
    std::size_t neural = 0;
    std::size_t statistical = 0;
    std::size_t external = 0;

    friend bool operator==(const BlockDims&, const BlockDims&) = default;
};

// Turns stance pairs into feature bundles for the enabled branches.
class Featurizer {
public:
    // `encoder` is required when the neural branch is enabled.
    Featurizer(BranchSet branches, Vocabulary vocab, PolarityLexicon lexicon,
               std::optional<SentenceEncoder> encoder);

    const BranchSet& branches() const { return branches_; }
    BlockDims dims() const;
    const Vocabulary& vocabulary() const { return vocab_; }

    FeatureBundle featurize(const StancePair& pair) const;

    // Output order follows corpus.pairs. Bodies are processed once each.
    // Before any work, every needed embedding key is checked in pair order and
    // the first missing one is reported.
    std::vector<FeatureBundle> featurize(const Corpus& corpus) const;

private:
    BranchSet branches_;
    Vocabulary vocab_;
    PolarityLexicon lexicon_;
    std::optional<SentenceEncoder> encoder_;
};

std::string pair_key(const StancePair& pair);

// Feature cache: "FNCFEAT1", u32 block count, per block (u32 name length,
// name, u32 dim) in the order neural, stat, ext; u64 record count; per record
// u32 key length, key, the enabled blocks as little-endian float64, and one
// label byte (stance index, 0xFF when unlabeled).
struct FeatureCache {
    BranchSet branches;
    BlockDims dims;
    std::vector<FeatureBundle> bundles;
};

void write_feature_cache(const std::string& path, const BranchSet& branches, const BlockDims& dims,
                         const std::vector<FeatureBundle>& bundles);
FeatureCache read_feature_cache(const std::string& path);

}  // namespace fncstance
