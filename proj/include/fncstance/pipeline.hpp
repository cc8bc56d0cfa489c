#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "fncstance/embeddings.hpp"
#include "fncstance/eval.hpp"
#include "fncstance/feature_bundle.hpp"
#include "fncstance/nn.hpp"
#include "fncstance/vocabulary.hpp"

namespace fncstance {

// Resolved settings for one run of the command-line pipeline.
struct RunConfig {
    std::string train_stances;
    std::string train_bodies;
    std::string test_stances;
    std::string test_bodies;

    std::string embeddings;                    // store file, or empty with fallback_seed set
    std::optional<std::uint64_t> fallback_seed;
    std::size_t embedding_dim = kSkipThoughtDim;
    std::string lexicon;                       // empty: built-in list

    std::string cache_dir = "fnc_cache";
    std::string checkpoint;                    // empty: <cache_dir>/model.ckpt
    std::string output_dir;                    // empty: <cache_dir>

    std::size_t vocabulary_capacity = kDefaultVocabularyCapacity;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;

    BranchSet branches;
    nn::FusionHyperparameters hyper;
    nn::TrainConfig training;

    std::string checkpoint_path() const;
    std::string history_path() const;
    std::string output_path(const std::string& file) const;
    std::string cache_path(const std::string& file) const;
};

// Cache file names inside cache_dir.
inline constexpr const char* kVocabularyFile = "vocab.tsv";
inline constexpr const char* kTrainCacheFile = "train.fncfeat";
inline constexpr const char* kValidationCacheFile = "validation.fncfeat";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kReportTableFile = "report.txt";
inline constexpr const char* kReportValuesFile = "report.kv";

// Loads and splits the training corpus, builds the vocabulary from the
// training side, and writes vocab.tsv plus the train and validation caches.
void cmd_featurize(const RunConfig& config);

// Trains on the cached features (featurizing first when the cache is absent),
// then writes the checkpoint and the epoch history.
nn::TrainResult cmd_train(const RunConfig& config);

// Featurizes the labeled test files with the cached vocabulary, predicts with
// the checkpoint, and writes predictions plus both report files.
eval::EvalReport cmd_evaluate(const RunConfig& config);

// Report-only mode: reads a stored confusion matrix and writes the reports.
eval::EvalReport cmd_report_confusion(const std::string& confusion_path,
                                      const std::string& output_dir);

// Scores a predictions CSV against a gold CSV (both Headline, Body ID, Stance)
// and writes the report files into output_dir when it is non-empty.
eval::EvalReport cmd_score(const std::string& gold_csv, const std::string& pred_csv,
                           const std::string& output_dir);

void write_reports(const eval::EvalReport& report, const std::string& output_dir);

}  // namespace fncstance
