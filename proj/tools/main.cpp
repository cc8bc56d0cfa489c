// fncstance: featurize / train / evaluate / score for headline-body stance
// detection.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fncstance/error.hpp"
#include "fncstance/eval.hpp"
#include "fncstance/pipeline.hpp"

namespace {

std::vector<std::size_t> parse_widths(const std::string& list) {
    std::vector<std::size_t> widths;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || v == 0) {
            throw fncstance::ConfigError("bad layer width list '" + list + "'");
        }
        widths.push_back(v);
    }
    if (widths.empty()) throw fncstance::ConfigError("empty layer width list");
    return widths;
}

std::uint64_t parse_fallback(const std::string& spec) {
    std::string_view v = spec;
    if (v.starts_with("seed=")) v.remove_prefix(5);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw fncstance::ConfigError("--fallback-embedder expects seed=<int>, got '" + spec + "'");
    }
    return seed;
}

std::string join_widths(const std::vector<std::size_t>& w) {
    std::string s;
    for (auto x : w) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fncstance;

    CLI::App app{"Stance detection for headline/body pairs (FNC-1 format)"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML run configuration; command-line flags win");

    RunConfig cfg;
    std::string branches = cfg.branches.to_string();
    std::string fallback;
    std::string dump_config;
    std::uint64_t seed = 0;
    std::string neural_widths = join_widths(cfg.hyper.neural.widths);
    std::string stat_widths = join_widths(cfg.hyper.statistical.widths);
    std::string ext_widths = join_widths(cfg.hyper.external.widths);
    std::string neural_act{nn::to_string(cfg.hyper.neural.activation)};
    std::string stat_act{nn::to_string(cfg.hyper.statistical.activation)};
    std::string ext_act{nn::to_string(cfg.hyper.external.activation)};

    app.add_option("--train-stances", cfg.train_stances, "Training stances CSV");
    app.add_option("--train-bodies", cfg.train_bodies, "Training bodies CSV");
    app.add_option("--test-stances", cfg.test_stances, "Labeled test stances CSV");
    app.add_option("--test-bodies", cfg.test_bodies, "Test bodies CSV");
    app.add_option("--embeddings", cfg.embeddings, "Sentence embedding store (STVEC1 or STVEC-TXT)");
    app.add_option("--fallback-embedder", fallback,
                   "Use the hashed fallback embedder: seed=<int>");
    app.add_option("--embedding-dim", cfg.embedding_dim, "Fallback embedding dimension")
        ->capture_default_str();
    app.add_option("--lexicon", cfg.lexicon, "Refuting-word lexicon file");
    app.add_option("--cache-dir", cfg.cache_dir, "Feature cache directory")->capture_default_str();
    app.add_option("--checkpoint", cfg.checkpoint, "Model checkpoint path");
    app.add_option("--output-dir", cfg.output_dir, "Directory for predictions and reports");
    app.add_option("--seed", seed, "Seed for splitting, initialization, shuffling and dropout")
        ->capture_default_str();
    app.add_option("--branches", branches, "Enabled feature branches: neural,stat,ext")
        ->capture_default_str();
    app.add_option("--vocab-size", cfg.vocabulary_capacity, "TF vocabulary capacity")
        ->capture_default_str();
    app.add_option("--validation-fraction", cfg.validation_fraction,
                   "Fraction of training pairs held out (split by body)")
        ->capture_default_str();
    app.add_option("--learning-rate", cfg.training.adam.learning_rate)->capture_default_str();
    app.add_option("--batch-size", cfg.training.batch_size)->capture_default_str();
    app.add_option("--epochs", cfg.training.max_epochs)->capture_default_str();
    app.add_option("--patience", cfg.training.patience)->capture_default_str();
    app.add_option("--neural-widths", neural_widths)->capture_default_str();
    app.add_option("--neural-activation", neural_act)->capture_default_str();
    app.add_option("--neural-dropout", cfg.hyper.neural.first_layer_dropout)->capture_default_str();
    app.add_option("--neural-l2", cfg.hyper.neural.first_layer_l2)->capture_default_str();
    app.add_option("--ext-widths", ext_widths)->capture_default_str();
    app.add_option("--ext-activation", ext_act)->capture_default_str();
    app.add_option("--ext-dropout", cfg.hyper.external.first_layer_dropout)->capture_default_str();
    app.add_option("--ext-l2", cfg.hyper.external.first_layer_l2)->capture_default_str();
    app.add_option("--stat-widths", stat_widths)->capture_default_str();
    app.add_option("--stat-activation", stat_act)->capture_default_str();
    app.add_option("--stat-dropout", cfg.hyper.statistical.first_layer_dropout)
        ->capture_default_str();
    app.add_option("--stat-l2", cfg.hyper.statistical.first_layer_l2)->capture_default_str();
    app.add_option("--dump-config", dump_config,
                   "Write the effective configuration (defaults resolved) to this file")
        ->configurable(false);

    auto* featurize = app.add_subcommand("featurize", "Split the training data and cache features")
                          ->fallthrough();
    auto* train = app.add_subcommand("train", "Train the fusion MLP on cached features")->fallthrough();
    auto* evaluate =
        app.add_subcommand("evaluate", "Predict and score the test files")->fallthrough();
    std::string confusion_file;
    evaluate->add_option("--confusion", confusion_file,
                         "Report-only mode: score a stored 4x4 confusion matrix")
        ->configurable(false);
    auto* score = app.add_subcommand("score", "Score a predictions CSV against a gold CSV")
                      ->fallthrough();
    std::string gold_csv, pred_csv;
    score->add_option("gold", gold_csv, "Gold stances CSV")->required()->configurable(false);
    score->add_option("predictions", pred_csv, "Predicted stances CSV")->required()->configurable(false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!dump_config.empty()) {
            std::ofstream out(dump_config);
            out << app.config_to_str(true, false);
            if (!out) throw ConfigError("cannot write " + dump_config);
        }

        cfg.seed = seed;
        cfg.branches = BranchSet::parse(branches);
        if (!fallback.empty()) cfg.fallback_seed = parse_fallback(fallback);
        cfg.hyper.neural.widths = parse_widths(neural_widths);
        cfg.hyper.statistical.widths = parse_widths(stat_widths);
        cfg.hyper.external.widths = parse_widths(ext_widths);
        cfg.hyper.neural.activation = nn::parse_activation(neural_act);
        cfg.hyper.statistical.activation = nn::parse_activation(stat_act);
        cfg.hyper.external.activation = nn::parse_activation(ext_act);

        if (featurize->parsed()) {
            cmd_featurize(cfg);
            std::cout << "features written to " << cfg.cache_dir << '\n';
        } else if (train->parsed()) {
            const auto result = cmd_train(cfg);
            for (const auto& r : result.history) {
                std::cout << "epoch " << r.epoch << "  loss " << r.train_loss << "  train_acc "
                          << r.train_accuracy;
                if (r.validation_score) std::cout << "  val_score " << *r.validation_score;
                std::cout << '\n';
            }
            std::cout << "best epoch " << result.best_epoch << ", checkpoint "
                      << cfg.checkpoint_path() << '\n';
        } else if (evaluate->parsed()) {
            const auto report = confusion_file.empty()
                                    ? cmd_evaluate(cfg)
                                    : cmd_report_confusion(confusion_file,
                                                           cfg.output_dir.empty() ? cfg.cache_dir
                                                                                  : cfg.output_dir);
            eval::write_table(std::cout, report);
        } else if (score->parsed()) {
            const auto report = cmd_score(gold_csv, pred_csv, cfg.output_dir);
            eval::write_table(std::cout, report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
