// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fncstance/eval.hpp"
#include "fncstance/featurizer.hpp"
#include "fncstance/nn.hpp"
#include "fncstance/pipeline.hpp"
#include "synthetic.hpp"

using namespace fncstance;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.skipped && secs > budget_s) {
        o.pass = false;
        o.detail += " [over the " + std::to_string(budget_s) + " s budget]";
    }
    const char* tag = o.skipped ? "SKIP" : o.pass ? "PASS" : "FAIL";
    if (!o.skipped && !o.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.2f s)\n", tag, id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

Outcome metric_fidelity() {
    const auto r = eval::report(testing::reference_confusion());
    const double targets[4] = {43.82, 6.31, 85.68, 98.04};
    bool ok = within(r.score_official_weighted, 83.08, 0.02) &&
              within(r.overall_accuracy, 89.29, 0.02);
    std::string d = "official=" + fmt("%.3f", r.score_official_weighted) +
                    " overall=" + fmt("%.3f", r.overall_accuracy) + " class=";
    for (std::size_t i = 0; i < 4; ++i) {
        ok = ok && within(r.class_accuracy[i], targets[i], 0.01);
        d += fmt(i ? "/%.3f" : "%.3f", r.class_accuracy[i]);
    }
    return {ok, false, d};
}

Outcome metric_discrepancy() {
    const auto r = eval::report(testing::reference_confusion());
    std::ostringstream kv;
    eval::write_key_values(kv, r);
    const bool flagged = kv.str().find("score_variants_differ=1\n") != std::string::npos;
    const bool ok = within(r.score_accuracy_mix, 74.15, 0.05) && flagged;
    return {ok, false,
            "literal=" + fmt("%.3f", r.score_accuracy_mix) + " gap=" +
                fmt("%.3f", r.score_variant_gap()) + (flagged ? " flagged" : " not flagged")};
}

Outcome degenerate_predictor() {
    const auto gold = testing::reference_confusion();
    eval::ConfusionMatrix cm;
    for (Stance s : kAllStances) cm.add(s, Stance::Unrelated, gold.row_total(s));
    const double score = eval::score_official_weighted(cm);
    return {within(score, 39.37, 0.02), false, "official=" + fmt("%.3f", score)};
}

Outcome dimensional_contract() {
    const Corpus train = testing::synthetic_corpus({400, 40, 21});
    const Vocabulary vocab = Vocabulary::build(train, kDefaultVocabularyCapacity);
    const Featurizer f(BranchSet{}, vocab, PolarityLexicon::default_lexicon(),
                       SentenceEncoder::fallback(kSkipThoughtDim, 3));
    // Random pairs: headlines and bodies drawn from unrelated generator seeds,
    // paired arbitrarily, plus empty and punctuation-only texts.
    const Corpus a = testing::synthetic_corpus({1000, 100, 77});
    const Corpus b = testing::synthetic_corpus({1000, 100, 78});
    Corpus pairs;
    Rng rng(5);
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto id = static_cast<BodyId>(i);
        std::string body = i % 97 == 0 ? "..." : b.pairs[rng.next() % b.size()].body();
        pairs.add_body(id, body);
        std::string head = i % 89 == 0 ? "?!" : a.pairs[i].headline;
        pairs.add_pair(head, id, std::nullopt);
    }
    const auto bundles = f.featurize(pairs);
    std::size_t bad = 0;
    for (const auto& x : bundles) {
        bad += x.neural.size() != 9600 || x.statistical.size() != 10000 || x.external.size() != 50;
    }
    const BlockDims d = f.dims();
    const bool ok = bad == 0 && bundles.size() == 1000 && d == BlockDims{9600, 10000, 50};
    return {ok, false,
            std::to_string(bundles.size()) + " pairs, dims " + std::to_string(d.neural) + "/" +
                std::to_string(d.statistical) + "/" + std::to_string(d.external) + ", " +
                std::to_string(bad) + " mismatches"};
}

Outcome gradient_check() {
    nn::FusionHyperparameters hp;
    hp.neural = {{8, 4}, nn::Activation::Sigmoid, 0.2, 1e-2};
    hp.external = {{4}, nn::Activation::Relu, 0.0, 0.0};
    hp.statistical = {{8, 4}, nn::Activation::Relu, 0.4, 5e-2};
    nn::MlpModel model = nn::init_model(nn::fusion_architecture(BranchSet{}, 12, 16, 5, hp), 7);

    Rng rng(8);
    std::vector<FeatureBundle> data(8);
    std::vector<Stance> golds;
    for (auto& b : data) {
        b.neural.resize(12);
        b.statistical.resize(16);
        b.external.resize(5);
        for (auto& x : b.neural) x = rng.uniform(-1, 1);
        for (auto& x : b.statistical) x = rng.uniform(0, 3);
        for (auto& x : b.external) x = rng.uniform(0, 1);
        golds.push_back(static_cast<Stance>(rng.next() % 4));
    }
    std::vector<const FeatureBundle*> ptrs;
    for (const auto& b : data) ptrs.push_back(&b);
    const auto batch = nn::make_batch(model, ptrs);
    // Infer mode: dropout masked off for the check.
    const auto fr = nn::forward(model, batch, nn::Mode::Infer);
    const auto grads = nn::backward(model, batch, fr.cache, golds);

    auto layers = model.layers();
    std::size_t checked = 0, with_dropout = 0, with_l2 = 0;
    double worst = 0.0;
    constexpr double h = 1e-6;
    constexpr std::size_t per_layer = 45;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& W = layers[l]->weights;
        const std::size_t n = static_cast<std::size_t>(W.size() + layers[l]->bias.size());
        for (std::size_t k = 0; k < std::min(n, per_layer); ++k) {
            const std::size_t flat = static_cast<std::size_t>(rng.next() % n);
            double* param;
            double analytic;
            if (flat < static_cast<std::size_t>(W.size())) {
                const auto r = static_cast<Eigen::Index>(flat / W.cols());
                const auto c = static_cast<Eigen::Index>(flat % W.cols());
                param = &W(r, c);
                analytic = grads.layers[l].weights(r, c);
            } else {
                const auto r = static_cast<Eigen::Index>(flat - W.size());
                param = &layers[l]->bias(r);
                analytic = grads.layers[l].bias(r);
            }
            const double saved = *param;
            *param = saved + h;
            const double up = nn::batch_loss(nn::forward(model, batch, nn::Mode::Infer).probabilities,
                                             golds, model);
            *param = saved - h;
            const double down = nn::batch_loss(
                nn::forward(model, batch, nn::Mode::Infer).probabilities, golds, model);
            *param = saved;
            const double numeric = (up - down) / (2 * h);
            const double rel = std::abs(analytic - numeric) /
                               std::max(1e-4, std::abs(analytic) + std::abs(numeric));
            worst = std::max(worst, rel);
            ++checked;
            with_dropout += layers[l]->dropout_keep < 1.0;
            with_l2 += layers[l]->l2 > 0.0;
        }
    }
    const bool ok = worst < 1e-4 && checked >= 200 && with_dropout > 0 && with_l2 > 0;
    return {ok, false,
            std::to_string(checked) + " params (" + std::to_string(with_dropout) +
                " in dropout layers, " + std::to_string(with_l2) +
                " in L2 layers), max rel err " + fmt("%.2e", worst)};
}

Outcome training_sanity() {
    // Four well separated clusters; every branch sees the class signal.
    Rng rng(12);
    std::vector<FeatureBundle> data;
    for (std::size_t i = 0; i < 200; ++i) {
        const std::size_t cls = i % 4;
        FeatureBundle b;
        b.key = std::to_string(i);
        b.neural.resize(12);
        b.statistical.resize(16);
        b.external.resize(5);
        for (std::size_t k = 0; k < 12; ++k) b.neural[k] = (k % 4 == cls ? 1.0 : 0.0) + rng.uniform(-0.2, 0.2);
        for (std::size_t k = 0; k < 16; ++k) b.statistical[k] = (k % 4 == cls ? 2.0 : 0.0) + rng.uniform(0, 0.3);
        for (std::size_t k = 0; k < 5; ++k) b.external[k] = (k == cls ? 1.0 : 0.0) + rng.uniform(0, 0.2);
        b.label = static_cast<Stance>(cls);
        data.push_back(std::move(b));
    }
    // Default layers and optimizer, toy input widths.
    const auto arch = nn::fusion_architecture(BranchSet{}, 12, 16, 5);
    nn::TrainConfig cfg;  // Adam lr 0.001, batch 100, 50 epochs
    cfg.seed = 1;
    std::size_t reached = 0;
    std::size_t epoch = 0;
    double best = 0.0;
    auto scorer = [&](const nn::MlpModel& m) {
        const auto preds = nn::predict_all(m, data);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < data.size(); ++i) correct += preds[i] == *data[i].label;
        const double acc = static_cast<double>(correct) / static_cast<double>(data.size());
        ++epoch;
        if (acc >= 0.95 && reached == 0) reached = epoch;
        best = std::max(best, acc);
        return acc;
    };
    cfg.patience = cfg.max_epochs;
    const auto result = nn::train(nn::init_model(arch, 2), data, {}, cfg, scorer);
    const bool ok = reached > 0 && reached <= 50;
    return {ok, false,
            "best train accuracy " + fmt("%.3f", best) +
                (reached ? ", >= 95% at epoch " + std::to_string(reached) : ", never reached 95%") +
                " of " + std::to_string(result.history.size())};
}

Outcome determinism() {
    const auto dir = testing::scratch_dir("acceptance_determinism");
    const auto train = testing::write_synthetic_corpus(dir, "train", {500, 50, 1});
    const auto test = testing::write_synthetic_corpus(dir, "test", {200, 20, 2});
    auto config_for = [&](const std::string& name) {
        RunConfig c;
        c.train_stances = train.stances;
        c.train_bodies = train.bodies;
        c.test_stances = test.stances;
        c.test_bodies = test.bodies;
        c.fallback_seed = 11;
        c.cache_dir = dir + "/" + name;
        c.seed = 4;
        return c;
    };
    std::vector<std::string> files{kTrainCacheFile, kValidationCacheFile, kVocabularyFile,
                                   "model.ckpt", "model.ckpt.history.tsv", kPredictionsFile,
                                   kReportValuesFile};
    std::vector<std::string> first;
    std::string detail;
    for (const char* name : {"run1", "run2"}) {
        const RunConfig c = config_for(name);
        cmd_featurize(c);
        const auto trained = cmd_train(c);
        const auto report = cmd_evaluate(c);
        if (first.empty()) {
            for (const auto& f : files) first.push_back(testing::read_bytes(c.cache_path(f)));
            detail = std::to_string(trained.history.size()) + " epochs, test official " +
                     fmt("%.2f", report.score_official_weighted);
        } else {
            std::size_t differ = 0;
            std::string which;
            for (std::size_t i = 0; i < files.size(); ++i) {
                const auto bytes = testing::read_bytes(c.cache_path(files[i]));
                if (bytes != first[i] || bytes.empty()) {
                    ++differ;
                    which += " " + files[i];
                }
            }
            detail += ", " + std::to_string(files.size() - differ) + "/" +
                      std::to_string(files.size()) + " files identical" + which;
            return {differ == 0, false, detail};
        }
    }
    return {false, false, "unreachable"};
}

Outcome full_data_ordering() {
    const char* env = std::getenv("FNC1_DIR");
    if (env == nullptr) {
        return {false, true, "FNC1_DIR not set; FNC-1 data not available in this environment"};
    }
    const std::string dir = env;
    auto score_for = [&](const char* branches) {
        RunConfig c;
        c.train_stances = dir + "/train_stances.csv";
        c.train_bodies = dir + "/train_bodies.csv";
        c.fallback_seed = 1;
        c.branches = BranchSet::parse(branches);
        c.cache_dir = (fs::temp_directory_path() / ("fncstance_fnc1_" + std::string(branches))).string();
        fs::remove_all(c.cache_dir);
        const auto r = cmd_train(c);
        double best = 0.0;
        for (const auto& e : r.history) best = std::max(best, e.validation_score.value_or(0.0));
        return best;
    };
    const double combined = score_for("neural,stat,ext");
    const double ext_only = score_for("ext");
    const double stat_only = score_for("stat");
    return {combined > ext_only && combined > stat_only, false,
            "validation official: combined " + fmt("%.2f", combined) + ", ext-only " +
                fmt("%.2f", ext_only) + ", stat-only " + fmt("%.2f", stat_only)};
}

}  // namespace

int main() {
    run(1, "metric fidelity", 1.0, metric_fidelity);
    run(2, "metric discrepancy", 1.0, metric_discrepancy);
    run(3, "degenerate predictor", 1.0, degenerate_predictor);
    run(4, "dimensional contract", 30.0, dimensional_contract);
    run(5, "gradient correctness", 60.0, gradient_check);
    run(6, "training sanity", 60.0, training_sanity);
    run(7, "determinism", 300.0, determinism);
    run(8, "combined beats single-branch ablations", 1e9, full_data_ordering);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
