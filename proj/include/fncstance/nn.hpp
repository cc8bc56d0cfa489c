#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fncstance/feature_bundle.hpp"
#include "fncstance/random.hpp"
#include "fncstance/stance.hpp"

namespace fncstance::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Activation { Sigmoid, Relu, Softmax, Identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
    Activation activation = Activation::Identity;
    // Probability of keeping a unit of this layer's output in Train mode.
    double dropout_keep = 1.0;
    // Penalty l2 * ||weights||^2 (biases are not penalized).
    double l2 = 0.0;

    std::size_t inputs() const { return static_cast<std::size_t>(weights.cols()); }
    std::size_t outputs() const { return static_cast<std::size_t>(weights.rows()); }
};

struct Branch {
    std::string name;
    std::size_t input_dim = 0;
    std::vector<DenseLayer> layers;

    std::size_t output_dim() const;
};

// Parallel branches whose outputs are concatenated (in branch order) and fed
// to a single softmax layer.
struct MlpModel {
    std::vector<Branch> branches;
    DenseLayer head;

    // Canonical parameter order: branches in order, layers in order, head last.
    std::vector<DenseLayer*> layers();
    std::vector<const DenseLayer*> layers() const;
    // "neural[0]", ..., "head"
    std::vector<std::string> layer_names() const;

    std::size_t parameter_count() const;
    const Branch* find_branch(std::string_view name) const;
};

struct LayerSpec {
    std::size_t width = 0;
    Activation activation = Activation::Identity;
    double dropout_keep = 1.0;
    double l2 = 0.0;
};

struct BranchSpec {
    std::string name;
    std::size_t input_dim = 0;
    std::vector<LayerSpec> layers;
};

struct Architecture {
    std::vector<BranchSpec> branches;
    std::size_t num_classes = kNumStances;
};

// Layer hyperparameters of the three branches. Dropout values are drop rates.
struct BranchHyperparameters {
    std::vector<std::size_t> widths;
    Activation activation = Activation::Relu;
    double first_layer_dropout = 0.0;
    double first_layer_l2 = 0.0;
};

struct FusionHyperparameters {
    BranchHyperparameters neural{{500, 100}, Activation::Sigmoid, 0.2, 1e-8};
    BranchHyperparameters external{{50}, Activation::Relu, 0.0, 0.0};
    BranchHyperparameters statistical{{500, 50}, Activation::Relu, 0.4, 5e-5};
};

// Branch order neural, ext, stat; disabled branches are omitted.
Architecture fusion_architecture(const BranchSet& branches, std::size_t neural_dim,
                                 std::size_t statistical_dim, std::size_t external_dim,
                                 const FusionHyperparameters& hp = {});

// Uniform Glorot weights from the seeded generator, zero biases.
MlpModel init_model(const Architecture& arch, std::uint64_t seed);
MlpModel zero_model(const Architecture& arch);

// Column-major batch for one branch: one column per sample. Mostly-zero inputs
// are carried as a sparse matrix.
struct BranchBatch {
    Matrix dense;
    SparseMatrix sparse;
    bool is_sparse = false;

    Eigen::Index rows() const { return is_sparse ? sparse.rows() : dense.rows(); }
    Eigen::Index cols() const { return is_sparse ? sparse.cols() : dense.cols(); }
};

using Batch = std::vector<BranchBatch>;  // one entry per model branch

// Inputs whose nonzero fraction is below this are packed sparse.
inline constexpr double kSparseDensity = 0.1;

// Gathers each model branch's block from the bundles. Throws ShapeError naming
// the branch on a width mismatch.
Batch make_batch(const MlpModel& model, std::span<const FeatureBundle* const> bundles);

enum class Mode { Train, Infer };

struct LayerCache {
    Matrix pre;       // W x + b
    Matrix act;       // activation(pre)
    Matrix mask;      // inverted dropout mask (empty when no dropout applied)
    Matrix out;       // act * mask, the input of the next layer
};

struct ForwardCache {
    std::size_t batch_size = 0;
    std::vector<std::vector<LayerCache>> branches;
    Matrix fused;  // concatenated branch outputs, the head input
    LayerCache head;
};

struct ForwardResult {
    Matrix probabilities;  // num_classes x batch
    ForwardCache cache;
};

// Train mode draws inverted-dropout masks from `rng` (required then); Infer
// mode applies no dropout and ignores `rng`.
ForwardResult forward(const MlpModel& model, const Batch& batch, Mode mode, Rng* rng = nullptr);

// Clamped at 1e-12 before the log.
inline constexpr double kProbabilityFloor = 1e-12;

double cross_entropy(const Vector& probabilities, Stance gold);
double l2_penalty(const MlpModel& model);
// -ln p[gold] + sum of layer penalties.
double loss(const Vector& probabilities, Stance gold, const MlpModel& model);
// Mean cross-entropy over the batch plus the penalty.
double batch_loss(const Matrix& probabilities, std::span<const Stance> golds,
                  const MlpModel& model);

struct LayerGradient {
    Matrix weights;
    Vector bias;
};

struct Gradients {
    std::vector<LayerGradient> layers;  // canonical layer order
};

// Gradient of batch_loss. Reuses the dropout masks recorded in `cache`.
// Throws ShapeError when the cache does not belong to this model and batch.
Gradients backward(const MlpModel& model, const Batch& batch, const ForwardCache& cache,
                   std::span<const Stance> golds);

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<LayerGradient> first_moment;
    std::vector<LayerGradient> second_moment;
    std::uint64_t step_count = 0;

    static AdamState for_model(const MlpModel& model, AdamConfig config = {});
};

// Bias-corrected Adam. Throws NumericError naming the layer if any gradient
// entry is not finite; the model is untouched in that case.
void adam_step(MlpModel& model, const Gradients& gradients, AdamState& state);

// Argmax with ties going to the earlier stance.
Stance argmax_stance(const Vector& probabilities);

Stance predict(const MlpModel& model, const FeatureBundle& bundle);
std::vector<Stance> predict_all(const MlpModel& model, std::span<const FeatureBundle> bundles,
                                std::size_t chunk = 256);

struct TrainConfig {
    std::size_t batch_size = 100;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    std::uint64_t seed = 0;
    AdamConfig adam;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean of per-batch losses
    double train_accuracy = 0.0;
    std::optional<double> validation_score;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
};

using ValidationScorer = std::function<double(const MlpModel&)>;

// Mini-batch Adam with per-epoch seeded shuffling. With a validation set (or
// an explicit scorer) training stops once the score has not improved for
// `patience` epochs and the best-scoring model is returned; otherwise it runs
// max_epochs and returns the final model. The default scorer is the official
// weighted FNC score on `validation`.
TrainResult train(MlpModel model, std::span<const FeatureBundle> training,
                  std::span<const FeatureBundle> validation, const TrainConfig& config,
                  ValidationScorer scorer = {});

// "MLPCKPT1", u32 descriptor length, descriptor text, then parameters as
// little-endian float64 in canonical layer order (weights row-major, bias).
void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);
std::string architecture_descriptor(const MlpModel& model);

}  // namespace fncstance::nn
