#include "fncstance/nn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "fncstance/error.hpp"

namespace fncstance::nn {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    for (auto a : {Activation::Sigmoid, Activation::Relu, Activation::Softmax, Activation::Identity}) {
        if (name == to_string(a)) return a;
    }
    throw ParameterError("unknown activation '" + std::string(name) + "'");
}

std::size_t Branch::output_dim() const { return layers.empty() ? input_dim : layers.back().outputs(); }

std::vector<DenseLayer*> MlpModel::layers() {
    std::vector<DenseLayer*> out;
    for (auto& b : branches) {
        for (auto& l : b.layers) out.push_back(&l);
    }
    out.push_back(&head);
    return out;
}

std::vector<const DenseLayer*> MlpModel::layers() const {
    std::vector<const DenseLayer*> out;
    for (const auto& b : branches) {
        for (const auto& l : b.layers) out.push_back(&l);
    }
    out.push_back(&head);
    return out;
}

std::vector<std::string> MlpModel::layer_names() const {
    std::vector<std::string> out;
    for (const auto& b : branches) {
        for (std::size_t i = 0; i < b.layers.size(); ++i) {
            out.push_back(b.name + "[" + std::to_string(i) + "]");
        }
    }
    out.emplace_back("head");
    return out;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto* l : layers()) n += static_cast<std::size_t>(l->weights.size() + l->bias.size());
    return n;
}

const Branch* MlpModel::find_branch(std::string_view name) const {
    for (const auto& b : branches) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

namespace {

void check_architecture(const Architecture& arch) {
    if (arch.branches.empty()) throw ShapeError("architecture has no branches");
    if (arch.num_classes == 0) throw ShapeError("architecture has no output classes");
    for (const auto& b : arch.branches) {
        if (b.input_dim == 0) throw ShapeError("branch '" + b.name + "' has zero input width");
        for (const auto& l : b.layers) {
            if (l.width == 0) throw ShapeError("branch '" + b.name + "' has a zero-width layer");
            if (l.activation == Activation::Softmax) {
                throw ShapeError("softmax is only allowed in the fusion head (branch '" + b.name + "')");
            }
            if (!(l.dropout_keep > 0.0 && l.dropout_keep <= 1.0)) {
                throw ShapeError("dropout keep probability must lie in (0, 1]");
            }
            if (!(l.l2 >= 0.0)) throw ShapeError("L2 coefficient must be non-negative");
        }
    }
}

DenseLayer make_layer(std::size_t in, const LayerSpec& spec) {
    DenseLayer l;
    l.weights = Matrix::Zero(static_cast<Eigen::Index>(spec.width), static_cast<Eigen::Index>(in));
    l.bias = Vector::Zero(static_cast<Eigen::Index>(spec.width));
    l.activation = spec.activation;
    l.dropout_keep = spec.dropout_keep;
    l.l2 = spec.l2;
    return l;
}

void apply_activation(Activation a, const Matrix& pre, Matrix& act) {
    switch (a) {
        case Activation::Sigmoid:
            act = pre.unaryExpr([](double z) {
                // Split by sign so exp never overflows.
                if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
                const double e = std::exp(z);
                return e / (1.0 + e);
            });
            break;
        case Activation::Relu:
            act = pre.cwiseMax(0.0);
            break;
        case Activation::Identity:
            act = pre;
            break;
        case Activation::Softmax: {
            act.resize(pre.rows(), pre.cols());
            for (Eigen::Index c = 0; c < pre.cols(); ++c) {
                const double m = pre.col(c).maxCoeff();
                act.col(c) = (pre.col(c).array() - m).exp().matrix();
                act.col(c) /= act.col(c).sum();
            }
            break;
        }
    }
}

// d act / d pre, elementwise (not valid for softmax).
Matrix activation_derivative(Activation a, const LayerCache& c) {
    switch (a) {
        case Activation::Sigmoid:
            return (c.act.array() * (1.0 - c.act.array())).matrix();
        case Activation::Relu:
            return (c.pre.array() > 0.0).cast<double>().matrix();
        case Activation::Identity:
            return Matrix::Ones(c.pre.rows(), c.pre.cols());
        case Activation::Softmax:
            break;
    }
    throw ShapeError("softmax derivative requested outside the fusion head");
}

void run_layer(const DenseLayer& layer, const BranchBatch* input, const Matrix* prev, Mode mode,
               Rng* rng, LayerCache& c) {
    if (input) {
        if (input->is_sparse) {
            c.pre = layer.weights * input->sparse;
        } else {
            c.pre.noalias() = layer.weights * input->dense;
        }
    } else {
        c.pre.noalias() = layer.weights * (*prev);
    }
    c.pre.colwise() += layer.bias;
    apply_activation(layer.activation, c.pre, c.act);
    if (mode == Mode::Train && layer.dropout_keep < 1.0) {
        const double keep = layer.dropout_keep;
        c.mask.resize(c.act.rows(), c.act.cols());
        for (Eigen::Index j = 0; j < c.mask.cols(); ++j) {
            for (Eigen::Index i = 0; i < c.mask.rows(); ++i) {
                c.mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        c.out = c.act.cwiseProduct(c.mask);
    } else {
        c.mask.resize(0, 0);
        c.out = c.act;
    }
}

Eigen::Index batch_columns(const MlpModel& model, const Batch& batch) {
    if (batch.size() != model.branches.size()) {
        throw ShapeError("batch has " + std::to_string(batch.size()) + " branch inputs, model has " +
                         std::to_string(model.branches.size()) + " branches");
    }
    const Eigen::Index cols = batch.empty() ? 0 : batch.front().cols();
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& branch = model.branches[b];
        if (static_cast<std::size_t>(batch[b].rows()) != branch.input_dim) {
            throw ShapeError("branch '" + branch.name + "' expects " +
                             std::to_string(branch.input_dim) + " inputs, batch has " +
                             std::to_string(batch[b].rows()));
        }
        if (batch[b].cols() != cols) throw ShapeError("branch inputs disagree on batch size");
    }
    return cols;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Architecture fusion_architecture(const BranchSet& branches, std::size_t neural_dim,
                                 std::size_t statistical_dim, std::size_t external_dim,
                                 const FusionHyperparameters& hp) {
    if (!branches.any()) throw ConfigError("at least one feature branch must be enabled");
    auto make = [](std::string name, std::size_t input, const BranchHyperparameters& h) {
        BranchSpec spec{std::move(name), input, {}};
        for (std::size_t i = 0; i < h.widths.size(); ++i) {
            LayerSpec l{h.widths[i], h.activation, 1.0, 0.0};
            if (i == 0) {
                l.dropout_keep = 1.0 - h.first_layer_dropout;
                l.l2 = h.first_layer_l2;
            }
            spec.layers.push_back(l);
        }
        return spec;
    };
    Architecture arch;
    if (branches.neural) arch.branches.push_back(make(std::string(kNeuralBranch), neural_dim, hp.neural));
    if (branches.external) {
        arch.branches.push_back(make(std::string(kExternalBranch), external_dim, hp.external));
    }
    if (branches.statistical) {
        arch.branches.push_back(make(std::string(kStatisticalBranch), statistical_dim, hp.statistical));
    }
    return arch;
}

MlpModel zero_model(const Architecture& arch) {
    check_architecture(arch);
    MlpModel m;
    std::size_t fused = 0;
    for (const auto& spec : arch.branches) {
        Branch b{spec.name, spec.input_dim, {}};
        std::size_t in = spec.input_dim;
        for (const auto& l : spec.layers) {
            b.layers.push_back(make_layer(in, l));
            in = l.width;
        }
        fused += in;
        m.branches.push_back(std::move(b));
    }
    m.head = make_layer(fused, LayerSpec{arch.num_classes, Activation::Softmax, 1.0, 0.0});
    return m;
}

MlpModel init_model(const Architecture& arch, std::uint64_t seed) {
    MlpModel m = zero_model(arch);
    Rng rng(seed);
    for (DenseLayer* l : m.layers()) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l->inputs() + l->outputs()));
        for (Eigen::Index r = 0; r < l->weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l->weights.cols(); ++c) {
                l->weights(r, c) = rng.uniform(-limit, limit);
            }
        }
    }
    return m;
}

Batch make_batch(const MlpModel& model, std::span<const FeatureBundle* const> bundles) {
    Batch batch;
    batch.reserve(model.branches.size());
    const auto cols = static_cast<Eigen::Index>(bundles.size());
    for (const auto& branch : model.branches) {
        const auto rows = static_cast<Eigen::Index>(branch.input_dim);
        BranchBatch bb;
        bb.dense.resize(rows, cols);
        std::size_t nonzeros = 0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto& values = bundles[static_cast<std::size_t>(j)]->block(branch.name);
            if (values.size() != branch.input_dim) {
                throw ShapeError("branch '" + branch.name + "' expects " +
                                 std::to_string(branch.input_dim) + " features, bundle '" +
                                 bundles[static_cast<std::size_t>(j)]->key + "' has " +
                                 std::to_string(values.size()));
            }
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double v = values[static_cast<std::size_t>(i)];
                bb.dense(i, j) = v;
                if (v != 0.0) ++nonzeros;
            }
        }
        const double density =
            rows * cols == 0 ? 1.0 : static_cast<double>(nonzeros) / static_cast<double>(rows * cols);
        if (density < kSparseDensity) {
            bb.sparse = bb.dense.sparseView();
            bb.sparse.makeCompressed();
            bb.dense.resize(0, 0);
            bb.is_sparse = true;
        }
        batch.push_back(std::move(bb));
    }
    return batch;
}

ForwardResult forward(const MlpModel& model, const Batch& batch, Mode mode, Rng* rng) {
    const Eigen::Index cols = batch_columns(model, batch);
    if (mode == Mode::Train && !rng) throw ParameterError("Train mode needs a random generator");

    ForwardResult result;
    ForwardCache& cache = result.cache;
    cache.batch_size = static_cast<std::size_t>(cols);
    cache.branches.resize(model.branches.size());

    Eigen::Index fused_rows = 0;
    for (std::size_t b = 0; b < model.branches.size(); ++b) {
        const auto& branch = model.branches[b];
        auto& layers = cache.branches[b];
        layers.resize(branch.layers.size());
        for (std::size_t l = 0; l < branch.layers.size(); ++l) {
            run_layer(branch.layers[l], l == 0 ? &batch[b] : nullptr,
                      l == 0 ? nullptr : &layers[l - 1].out, mode, rng, layers[l]);
        }
        fused_rows += static_cast<Eigen::Index>(branch.output_dim());
    }

    cache.fused.resize(fused_rows, cols);
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < model.branches.size(); ++b) {
        const auto& branch = model.branches[b];
        const auto width = static_cast<Eigen::Index>(branch.output_dim());
        if (branch.layers.empty()) {
            cache.fused.middleRows(offset, width) =
                batch[b].is_sparse ? Matrix(batch[b].sparse) : batch[b].dense;
        } else {
            cache.fused.middleRows(offset, width) = cache.branches[b].back().out;
        }
        offset += width;
    }
    if (static_cast<std::size_t>(fused_rows) != model.head.inputs()) {
        throw ShapeError("fusion head expects " + std::to_string(model.head.inputs()) +
                         " inputs, branches produce " + std::to_string(fused_rows));
    }
    run_layer(model.head, nullptr, &cache.fused, Mode::Infer, nullptr, cache.head);
    result.probabilities = cache.head.act;
    return result;
}

double cross_entropy(const Vector& probabilities, Stance gold) {
    const double p = probabilities(static_cast<Eigen::Index>(index_of(gold)));
    return -std::log(std::max(p, kProbabilityFloor));
}

double l2_penalty(const MlpModel& model) {
    double sum = 0.0;
    for (const auto* l : model.layers()) {
        if (l->l2 > 0.0) sum += l->l2 * l->weights.squaredNorm();
    }
    return sum;
}

double loss(const Vector& probabilities, Stance gold, const MlpModel& model) {
    return cross_entropy(probabilities, gold) + l2_penalty(model);
}

double batch_loss(const Matrix& probabilities, std::span<const Stance> golds, const MlpModel& model) {
    if (static_cast<std::size_t>(probabilities.cols()) != golds.size() || golds.empty()) {
        throw ShapeError("batch_loss: probabilities and labels disagree on batch size");
    }
    double ce = 0.0;
    for (std::size_t j = 0; j < golds.size(); ++j) {
        ce += cross_entropy(probabilities.col(static_cast<Eigen::Index>(j)), golds[j]);
    }
    return ce / static_cast<double>(golds.size()) + l2_penalty(model);
}

Gradients backward(const MlpModel& model, const Batch& batch, const ForwardCache& cache,
                   std::span<const Stance> golds) {
    const Eigen::Index cols = batch_columns(model, batch);
    if (cache.batch_size != static_cast<std::size_t>(cols) || golds.size() != cache.batch_size ||
        cache.branches.size() != model.branches.size() ||
        cache.head.act.rows() != static_cast<Eigen::Index>(model.head.outputs()) ||
        cache.fused.rows() != static_cast<Eigen::Index>(model.head.inputs())) {
        throw ShapeError("stale forward cache: shapes do not match the model and batch");
    }
    for (std::size_t b = 0; b < model.branches.size(); ++b) {
        const auto& layers = model.branches[b].layers;
        if (cache.branches[b].size() != layers.size()) throw ShapeError("stale forward cache");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (cache.branches[b][l].pre.rows() != static_cast<Eigen::Index>(layers[l].outputs()) ||
                cache.branches[b][l].pre.cols() != cols) {
                throw ShapeError("stale forward cache for branch '" + model.branches[b].name + "'");
            }
        }
    }

    const double inv_batch = 1.0 / static_cast<double>(cols);
    Matrix d_pre = cache.head.act;
    for (std::size_t j = 0; j < golds.size(); ++j) {
        d_pre(static_cast<Eigen::Index>(index_of(golds[j])), static_cast<Eigen::Index>(j)) -= 1.0;
    }
    d_pre *= inv_batch;

    Gradients grads;
    std::vector<LayerGradient> branch_grads;
    LayerGradient head_grad;
    head_grad.weights.noalias() = d_pre * cache.fused.transpose();
    if (model.head.l2 > 0.0) head_grad.weights += 2.0 * model.head.l2 * model.head.weights;
    head_grad.bias = d_pre.rowwise().sum();
    const Matrix d_fused = model.head.weights.transpose() * d_pre;

    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < model.branches.size(); ++b) {
        const auto& branch = model.branches[b];
        const auto width = static_cast<Eigen::Index>(branch.output_dim());
        Matrix d_out = d_fused.middleRows(offset, width);
        offset += width;

        std::vector<LayerGradient> layer_grads(branch.layers.size());
        for (std::size_t l = branch.layers.size(); l-- > 0;) {
            const auto& layer = branch.layers[l];
            const auto& c = cache.branches[b][l];
            Matrix d_act = c.mask.size() ? Matrix(d_out.cwiseProduct(c.mask)) : d_out;
            Matrix dz = d_act.cwiseProduct(activation_derivative(layer.activation, c));

            auto& g = layer_grads[l];
            if (l == 0) {
                if (batch[b].is_sparse) {
                    g.weights = dz * batch[b].sparse.transpose();
                } else {
                    g.weights.noalias() = dz * batch[b].dense.transpose();
                }
            } else {
                g.weights.noalias() = dz * cache.branches[b][l - 1].out.transpose();
                d_out.noalias() = layer.weights.transpose() * dz;
            }
            if (layer.l2 > 0.0) g.weights += 2.0 * layer.l2 * layer.weights;
            g.bias = dz.rowwise().sum();
        }
        for (auto& g : layer_grads) grads.layers.push_back(std::move(g));
    }
    grads.layers.push_back(std::move(head_grad));
    return grads;
}

AdamState AdamState::for_model(const MlpModel& model, AdamConfig config) {
    AdamState s;
    s.config = config;
    for (const auto* l : model.layers()) {
        LayerGradient zero{Matrix::Zero(l->weights.rows(), l->weights.cols()),
                           Vector::Zero(l->bias.size())};
        s.first_moment.push_back(zero);
        s.second_moment.push_back(std::move(zero));
    }
    return s;
}

void adam_step(MlpModel& model, const Gradients& gradients, AdamState& state) {
    auto layers = model.layers();
    if (gradients.layers.size() != layers.size() || state.first_moment.size() != layers.size()) {
        throw ShapeError("adam_step: gradient/state layer count does not match the model");
    }
    const auto names = model.layer_names();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& g = gradients.layers[i];
        if (g.weights.rows() != layers[i]->weights.rows() ||
            g.weights.cols() != layers[i]->weights.cols() || g.bias.size() != layers[i]->bias.size()) {
            throw ShapeError("adam_step: gradient shape mismatch in layer " + names[i]);
        }
        if (!g.weights.allFinite() || !g.bias.allFinite()) {
            throw NumericError("non-finite gradient in layer " + names[i]);
        }
    }

    ++state.step_count;
    const auto& cfg = state.config;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);

    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square()).matrix();
        param.array() -= cfg.learning_rate * (m.array() / c1) /
                         ((v.array() / c2).sqrt() + cfg.epsilon);
    };
    for (std::size_t i = 0; i < layers.size(); ++i) {
        update(layers[i]->weights, gradients.layers[i].weights, state.first_moment[i].weights,
               state.second_moment[i].weights);
        update(layers[i]->bias, gradients.layers[i].bias, state.first_moment[i].bias,
               state.second_moment[i].bias);
    }
}

Stance argmax_stance(const Vector& probabilities) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probabilities.size() && i < static_cast<Eigen::Index>(kNumStances); ++i) {
        if (probabilities(i) > probabilities(best)) best = i;
    }
    return static_cast<Stance>(best);
}

Stance predict(const MlpModel& model, const FeatureBundle& bundle) {
    const FeatureBundle* ptr = &bundle;
    const auto batch = make_batch(model, std::span<const FeatureBundle* const>(&ptr, 1));
    return argmax_stance(forward(model, batch, Mode::Infer).probabilities.col(0));
}

std::vector<Stance> predict_all(const MlpModel& model, std::span<const FeatureBundle> bundles,
                                std::size_t chunk) {
    std::vector<Stance> out;
    out.reserve(bundles.size());
    chunk = std::max<std::size_t>(chunk, 1);
    std::vector<const FeatureBundle*> ptrs;
    for (std::size_t start = 0; start < bundles.size(); start += chunk) {
        ptrs.clear();
        for (std::size_t i = start; i < std::min(bundles.size(), start + chunk); ++i) {
            ptrs.push_back(&bundles[i]);
        }
        const auto probs = forward(model, make_batch(model, ptrs), Mode::Infer).probabilities;
        for (Eigen::Index j = 0; j < probs.cols(); ++j) out.push_back(argmax_stance(probs.col(j)));
    }
    return out;
}

std::string architecture_descriptor(const MlpModel& model) {
    std::string d = "branches " + std::to_string(model.branches.size()) + "\n";
    auto layer_line = [](const char* tag, const DenseLayer& l) {
        return std::string(tag) + " " + std::to_string(l.inputs()) + " " + std::to_string(l.outputs()) +
               " " + std::string(to_string(l.activation)) + " " + format_double(l.dropout_keep) + " " +
               format_double(l.l2) + "\n";
    };
    for (const auto& b : model.branches) {
        d += "branch " + b.name + " " + std::to_string(b.input_dim) + " " +
             std::to_string(b.layers.size()) + "\n";
        for (const auto& l : b.layers) d += layer_line("layer", l);
    }
    d += layer_line("head", model.head);
    return d;
}

}  // namespace fncstance::nn
