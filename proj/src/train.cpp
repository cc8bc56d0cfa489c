#include <algorithm>
#include <limits>
#include <numeric>

#include "fncstance/error.hpp"
#include "fncstance/eval.hpp"
#include "fncstance/nn.hpp"

namespace fncstance::nn {

namespace {

double official_score(const MlpModel& model, std::span<const FeatureBundle> bundles) {
    const auto preds = predict_all(model, bundles);
    std::vector<Stance> golds;
    golds.reserve(bundles.size());
    for (const auto& b : bundles) {
        if (!b.label) throw ConfigError("validation bundle '" + b.key + "' has no label");
        golds.push_back(*b.label);
    }
    return eval::score_official_weighted(eval::confusion(golds, preds));
}

}  // namespace

TrainResult train(MlpModel model, std::span<const FeatureBundle> training,
                  std::span<const FeatureBundle> validation, const TrainConfig& config,
                  ValidationScorer scorer) {
    if (training.empty()) throw ConfigError("training set is empty");
    if (config.batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (config.patience == 0) throw ConfigError("patience must be at least 1");
    for (const auto& b : training) {
        if (!b.label) throw ConfigError("training bundle '" + b.key + "' has no label");
    }
    if (!scorer && !validation.empty()) {
        scorer = [validation](const MlpModel& m) { return official_score(m, validation); };
    }

    Rng rng(config.seed);
    AdamState adam = AdamState::for_model(model, config.adam);
    std::vector<std::size_t> order(training.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t stale_epochs = 0;
    std::vector<const FeatureBundle*> ptrs;
    std::vector<Stance> golds;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            ptrs.clear();
            golds.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
                ptrs.push_back(&training[order[i]]);
                golds.push_back(*training[order[i]].label);
            }
            const Batch batch = make_batch(model, ptrs);
            const ForwardResult fr = forward(model, batch, Mode::Train, &rng);
            loss_sum += batch_loss(fr.probabilities, golds, model);
            ++batches;
            for (std::size_t j = 0; j < golds.size(); ++j) {
                if (argmax_stance(fr.probabilities.col(static_cast<Eigen::Index>(j))) == golds[j]) {
                    ++correct;
                }
            }
            adam_step(model, backward(model, batch, fr.cache, golds), adam);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(training.size());
        if (scorer) {
            const double score = scorer(model);
            rec.validation_score = score;
            if (score > best_score) {
                best_score = score;
                result.model = model;
                result.best_epoch = epoch;
                stale_epochs = 0;
            } else {
                ++stale_epochs;
            }
        }
        result.history.push_back(rec);
        if (scorer && stale_epochs >= config.patience) break;
    }

    if (!scorer || result.best_epoch == 0) {
        result.model = std::move(model);
        result.best_epoch = result.history.size();
    }
    return result;
}

}  // namespace fncstance::nn
