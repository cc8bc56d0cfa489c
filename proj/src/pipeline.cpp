#include "fncstance/pipeline.hpp"

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>

#include "fncstance/corpus.hpp"
#include "fncstance/csv.hpp"
#include "fncstance/error.hpp"
#include "fncstance/external_features.hpp"
#include "fncstance/featurizer.hpp"

namespace fs = std::filesystem;

namespace fncstance {

std::string RunConfig::cache_path(const std::string& file) const {
    return (fs::path(cache_dir) / file).string();
}

std::string RunConfig::checkpoint_path() const {
    return checkpoint.empty() ? cache_path("model.ckpt") : checkpoint;
}

std::string RunConfig::history_path() const { return checkpoint_path() + ".history.tsv"; }

std::string RunConfig::output_path(const std::string& file) const {
    return (fs::path(output_dir.empty() ? cache_dir : output_dir) / file).string();
}

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string(what) + " path is not set");
    if (!fs::exists(path)) throw ConfigError(std::string(what) + " '" + path + "' does not exist");
}

PolarityLexicon lexicon_for(const RunConfig& config) {
    if (config.lexicon.empty()) return PolarityLexicon::default_lexicon();
    require_file(config.lexicon, "lexicon");
    return PolarityLexicon::load(config.lexicon);
}

std::optional<SentenceEncoder> encoder_for(const RunConfig& config) {
    if (!config.branches.neural) return std::nullopt;
    if (!config.embeddings.empty()) {
        require_file(config.embeddings, "embedding store");
        return SentenceEncoder::from_store(EmbeddingStore::load(config.embeddings));
    }
    if (config.fallback_seed) {
        return SentenceEncoder::fallback(config.embedding_dim, *config.fallback_seed);
    }
    throw ConfigError("neural branch needs --embeddings or --fallback-embedder");
}

Featurizer make_featurizer(const RunConfig& config, Vocabulary vocab) {
    return Featurizer(config.branches, std::move(vocab), lexicon_for(config), encoder_for(config));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_history(const std::string& path, const nn::TrainResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "epoch\ttrain_loss\ttrain_accuracy\tvalidation_score\n";
    for (const auto& r : result.history) {
        out << r.epoch << '\t' << format_double(r.train_loss) << '\t'
            << format_double(r.train_accuracy) << '\t'
            << (r.validation_score ? format_double(*r.validation_score) : std::string("-")) << '\n';
    }
    out << "# best_epoch=" << result.best_epoch << '\n';
}

void check_cache(const FeatureCache& cache, const RunConfig& config, const std::string& path) {
    if (!(cache.branches == config.branches)) {
        throw ConfigError(path + " holds branches '" + cache.branches.to_string() +
                          "' but the configuration enables '" + config.branches.to_string() + "'");
    }
}

std::vector<Stance> golds_of(const Corpus& corpus) {
    std::vector<Stance> out;
    out.reserve(corpus.size());
    for (const auto& p : corpus.pairs) out.push_back(*p.stance);
    return out;
}

}  // namespace

void write_reports(const eval::EvalReport& report, const std::string& output_dir) {
    fs::create_directories(output_dir);
    std::ofstream table(fs::path(output_dir) / kReportTableFile, std::ios::binary);
    eval::write_table(table, report);
    std::ofstream kv(fs::path(output_dir) / kReportValuesFile, std::ios::binary);
    eval::write_key_values(kv, report);
    if (!table || !kv) throw ConfigError("cannot write reports into " + output_dir);
}

void cmd_featurize(const RunConfig& config) {
    if (!config.branches.any()) throw ConfigError("at least one feature branch must be enabled");
    require_file(config.train_stances, "training stances");
    require_file(config.train_bodies, "training bodies");

    const Corpus corpus = load_corpus(config.train_stances, config.train_bodies);
    if (corpus.empty()) throw ConfigError("training corpus '" + config.train_stances + "' is empty");
    auto [train_side, validation_side] = split(corpus, config.validation_fraction, config.seed);

    Vocabulary vocab = Vocabulary::build(train_side, config.vocabulary_capacity);
    fs::create_directories(config.cache_dir);
    vocab.save(config.cache_path(kVocabularyFile));

    const Featurizer featurizer = make_featurizer(config, std::move(vocab));
    write_feature_cache(config.cache_path(kTrainCacheFile), config.branches, featurizer.dims(),
                        featurizer.featurize(train_side));
    write_feature_cache(config.cache_path(kValidationCacheFile), config.branches,
                        featurizer.dims(), featurizer.featurize(validation_side));
}

nn::TrainResult cmd_train(const RunConfig& config) {
    if (!fs::exists(config.cache_path(kTrainCacheFile)) ||
        !fs::exists(config.cache_path(kValidationCacheFile))) {
        cmd_featurize(config);
    }
    const FeatureCache train_cache = read_feature_cache(config.cache_path(kTrainCacheFile));
    const FeatureCache validation_cache = read_feature_cache(config.cache_path(kValidationCacheFile));
    check_cache(train_cache, config, config.cache_path(kTrainCacheFile));
    check_cache(validation_cache, config, config.cache_path(kValidationCacheFile));
    if (!(train_cache.dims == validation_cache.dims)) {
        throw ShapeError("train and validation caches disagree on block widths");
    }

    const auto arch = nn::fusion_architecture(config.branches, train_cache.dims.neural,
                                              train_cache.dims.statistical,
                                              train_cache.dims.external, config.hyper);
    nn::TrainConfig tc = config.training;
    tc.seed = config.seed;
    auto result = nn::train(nn::init_model(arch, config.seed), train_cache.bundles,
                            validation_cache.bundles, tc);

    const fs::path ckpt(config.checkpoint_path());
    if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
    nn::save_checkpoint(result.model, ckpt.string());
    write_history(config.history_path(), result);
    return result;
}

eval::EvalReport cmd_evaluate(const RunConfig& config) {
    require_file(config.test_stances, "test stances");
    require_file(config.test_bodies, "test bodies");
    require_file(config.checkpoint_path(), "checkpoint");
    require_file(config.cache_path(kVocabularyFile), "vocabulary");

    const Corpus test = load_corpus(config.test_stances, config.test_bodies);
    if (test.empty()) throw ConfigError("test file '" + config.test_stances + "' has no pairs");

    const nn::MlpModel model = nn::load_checkpoint(config.checkpoint_path());
    const Featurizer featurizer =
        make_featurizer(config, Vocabulary::load(config.cache_path(kVocabularyFile)));
    for (const auto& branch : model.branches) {
        const BlockDims d = featurizer.dims();
        const std::size_t have = branch.name == kNeuralBranch        ? d.neural
                                 : branch.name == kStatisticalBranch ? d.statistical
                                 : branch.name == kExternalBranch    ? d.external
                                                                     : 0;
        if (have != branch.input_dim) {
            throw ShapeError("checkpoint branch '" + branch.name + "' expects " +
                             std::to_string(branch.input_dim) + " features, configuration yields " +
                             std::to_string(have));
        }
    }
    if (model.branches.size() !=
        static_cast<std::size_t>(config.branches.neural) + config.branches.statistical +
            config.branches.external) {
        throw ShapeError("checkpoint branches do not match the enabled feature branches");
    }

    const auto bundles = featurizer.featurize(test);
    const auto preds = nn::predict_all(model, bundles);

    const std::string out_dir = config.output_dir.empty() ? config.cache_dir : config.output_dir;
    fs::create_directories(out_dir);
    std::ofstream pred_out(config.output_path(kPredictionsFile), std::ios::binary);
    pred_out << csv::format_row({"Headline", "Body ID", "Stance"});
    for (std::size_t i = 0; i < test.size(); ++i) {
        pred_out << csv::format_row({test.pairs[i].headline, std::to_string(test.pairs[i].body_id),
                                     std::string(to_string(preds[i]))});
    }
    if (!pred_out) throw ConfigError("cannot write predictions into " + out_dir);

    const auto report = eval::report(golds_of(test), preds);
    write_reports(report, out_dir);
    return report;
}

eval::EvalReport cmd_report_confusion(const std::string& confusion_path,
                                      const std::string& output_dir) {
    require_file(confusion_path, "confusion matrix");
    std::ifstream in(confusion_path);
    const auto cm = eval::read_confusion(in);
    if (cm.total() == 0) throw ConfigError("confusion matrix is empty");
    const auto report = eval::report(cm);
    if (!output_dir.empty()) write_reports(report, output_dir);
    return report;
}

namespace {

struct LabeledRow {
    std::string headline;
    std::string body_id;
    Stance stance;
};

std::vector<LabeledRow> read_labeled_rows(const std::string& path) {
    require_file(path, "stance file");
    auto rows = csv::read_file(path);
    std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r[0].empty(); });
    if (rows.empty()) throw SchemaError(path + ": missing header row");
    const auto& header = rows.front();
    auto col = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw SchemaError(path + ": missing column '" + std::string(name) + "'");
    };
    const auto h = col("Headline"), b = col("Body ID"), s = col("Stance");
    std::vector<LabeledRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw SchemaError(path + " row " + std::to_string(r) + ": wrong field count");
        }
        try {
            out.push_back({rows[r][h], rows[r][b], parse_stance(rows[r][s])});
        } catch (const LabelError& e) {
            throw LabelError(path + " row " + std::to_string(r) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

eval::EvalReport cmd_score(const std::string& gold_csv, const std::string& pred_csv,
                           const std::string& output_dir) {
    const auto gold = read_labeled_rows(gold_csv);
    const auto pred = read_labeled_rows(pred_csv);
    if (gold.empty()) throw ConfigError(gold_csv + " has no pairs");

    // Duplicate (headline, body id) keys are matched in file order.
    std::map<std::pair<std::string, std::string>, std::deque<Stance>> predicted;
    for (const auto& r : pred) predicted[{r.headline, r.body_id}].push_back(r.stance);

    std::vector<Stance> golds;
    std::vector<Stance> preds;
    for (const auto& r : gold) {
        auto it = predicted.find({r.headline, r.body_id});
        if (it == predicted.end() || it->second.empty()) {
            throw ConfigError("no prediction for gold key (Body ID " + r.body_id + ", Headline '" +
                              r.headline + "')");
        }
        golds.push_back(r.stance);
        preds.push_back(it->second.front());
        it->second.pop_front();
    }
    for (const auto& r : pred) {
        auto it = predicted.find({r.headline, r.body_id});
        if (!it->second.empty()) {
            throw ConfigError("prediction key (Body ID " + r.body_id + ", Headline '" + r.headline +
                              "') is not in the gold file");
        }
    }

    const auto report = eval::report(golds, preds);
    if (!output_dir.empty()) write_reports(report, output_dir);
    return report;
}

}  // namespace fncstance
