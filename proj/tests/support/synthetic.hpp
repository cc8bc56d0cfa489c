#pragma once

// Deterministic FNC-format corpora for tests: topic-specific bodies and
// headlines whose stance is signalled by lexical overlap and cue words.

#include <cstddef>
#include <cstdint>
#include <string>

#include "fncstance/corpus.hpp"
#include "fncstance/eval.hpp"

namespace fncstance::testing {

struct SyntheticOptions {
    std::size_t pairs = 500;
    std::size_t bodies = 50;
    std::uint64_t seed = 1;
};

Corpus synthetic_corpus(const SyntheticOptions& options);

struct CorpusFiles {
    std::string stances;
    std::string bodies;
};

CorpusFiles write_synthetic_corpus(const std::string& dir, const std::string& prefix,
                                   const SyntheticOptions& options);

// Fresh empty directory under the system temp dir.
std::string scratch_dir(const std::string& name);

std::string read_bytes(const std::string& path);

// Reference 4x4 confusion matrix over the FNC-1 test set, used by the metric checks
// (gold rows, predicted columns, order agree/disagree/discuss/unrelated).
eval::ConfusionMatrix reference_confusion();

}  // namespace fncstance::testing
