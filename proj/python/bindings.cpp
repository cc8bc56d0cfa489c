#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fncstance/corpus.hpp"
#include "fncstance/embeddings.hpp"
#include "fncstance/error.hpp"
#include "fncstance/eval.hpp"
#include "fncstance/external_features.hpp"
#include "fncstance/featurizer.hpp"
#include "fncstance/nn.hpp"
#include "fncstance/pipeline.hpp"
#include "fncstance/text.hpp"
#include "fncstance/vocabulary.hpp"

namespace py = pybind11;
using namespace fncstance;

namespace {

std::vector<double> probabilities(const nn::MlpModel& model, const std::vector<double>& neural,
                                  const std::vector<double>& statistical,
                                  const std::vector<double>& external) {
    FeatureBundle b;
    b.key = "python";
    b.neural = neural;
    b.statistical = statistical;
    b.external = external;
    const FeatureBundle* ptr = &b;
    const auto batch = nn::make_batch(model, std::span<const FeatureBundle* const>(&ptr, 1));
    const nn::Vector p = nn::forward(model, batch, nn::Mode::Infer).probabilities.col(0);
    return {p.data(), p.data() + p.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Headline/body stance detection: features, scoring and the fusion MLP";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "FncError", PyExc_RuntimeError);

    py::enum_<Stance>(m, "Stance")
        .value("Agree", Stance::Agree)
        .value("Disagree", Stance::Disagree)
        .value("Discuss", Stance::Discuss)
        .value("Unrelated", Stance::Unrelated);
    m.def("parse_stance", &parse_stance, py::arg("label"));
    m.def("stance_name", [](Stance s) { return std::string(to_string(s)); });

    // text
    m.def("tokenize", &text::tokenize, py::arg("text"));
    m.def("normalize", &text::normalize, py::arg("text"));
    py::enum_<text::GramUnit>(m, "GramUnit")
        .value("Char", text::GramUnit::Char)
        .value("Word", text::GramUnit::Word);
    py::class_<text::NgramMultiset>(m, "NgramMultiset")
        .def_readonly("n", &text::NgramMultiset::n)
        .def_readonly("unit", &text::NgramMultiset::unit)
        .def_property_readonly("grams", [](const text::NgramMultiset& g) {
            return std::map<std::string, std::size_t>(g.grams.begin(), g.grams.end());
        })
        .def("total", &text::NgramMultiset::total);
    m.def("char_ngrams", &text::char_ngrams, py::arg("text"), py::arg("n"));
    m.def("word_ngrams", &text::word_ngrams, py::arg("tokens"), py::arg("n"));
    m.def("overlap_ratio", &text::overlap_ratio, py::arg("query"), py::arg("target"));

    // corpus
    py::class_<StancePair>(m, "StancePair")
        .def(py::init([](std::string headline, BodyId body_id, std::string body,
                         std::optional<Stance> stance) {
                 return make_pair(std::move(headline), body_id, std::move(body), stance);
             }),
             py::arg("headline"), py::arg("body_id"), py::arg("body"), py::arg("stance") = py::none())
        .def_readonly("headline", &StancePair::headline)
        .def_readonly("body_id", &StancePair::body_id)
        .def_property_readonly("body", &StancePair::body)
        .def_readonly("stance", &StancePair::stance);
    py::class_<Corpus>(m, "Corpus")
        .def(py::init<>())
        .def_readonly("pairs", &Corpus::pairs)
        .def("__len__", &Corpus::size)
        .def_property_readonly("body_ids", [](const Corpus& c) {
            std::vector<BodyId> ids;
            for (const auto& [id, _] : c.bodies) ids.push_back(id);
            return ids;
        })
        .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });
    m.def("load_corpus",
          [](const std::string& stances, const std::string& bodies, bool require_labels) {
              return load_corpus(stances, bodies,
                                 require_labels ? LabelPolicy::Required : LabelPolicy::Optional);
          },
          py::arg("stances_path"), py::arg("bodies_path"), py::arg("require_labels") = true);
    m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("stances_path"),
          py::arg("bodies_path"));
    m.def("split", &split, py::arg("corpus"), py::arg("validation_fraction"), py::arg("seed"));
    m.def("label_histogram", [](const Corpus& c) {
        std::map<std::string, std::size_t> out;
        const auto h = label_histogram(c);
        for (Stance s : kAllStances) out[std::string(to_string(s))] = h[index_of(s)];
        return out;
    });

    // statistical features
    py::class_<Vocabulary>(m, "Vocabulary")
        .def_static("build", &Vocabulary::build, py::arg("corpus"),
                    py::arg("capacity") = kDefaultVocabularyCapacity)
        .def_static("load", &Vocabulary::load, py::arg("path"))
        .def("save", &Vocabulary::save, py::arg("path"))
        .def_property_readonly("capacity", &Vocabulary::capacity)
        .def_property_readonly("num_documents", &Vocabulary::num_documents)
        .def("__len__", &Vocabulary::size)
        .def("index_of", &Vocabulary::index_of, py::arg("token"))
        .def("token", &Vocabulary::token, py::arg("index"))
        .def("idf", &Vocabulary::idf, py::arg("index"));
    m.def("tf_vector", &tf_vector, py::arg("tokens"), py::arg("vocab"));
    m.def("statistical_feature", &statistical_feature, py::arg("pair"), py::arg("vocab"));

    // external features
    py::class_<PolarityLexicon>(m, "PolarityLexicon")
        .def(py::init<std::vector<std::string>>(), py::arg("words"))
        .def_static("default", &PolarityLexicon::default_lexicon)
        .def_static("load", &PolarityLexicon::load, py::arg("path"))
        .def_property_readonly("words", &PolarityLexicon::words);
    m.def("polarity", &polarity, py::arg("tokens"), py::arg("lexicon"));
    m.def("refuting_block", &refuting_block, py::arg("headline_tokens"), py::arg("lexicon"));
    m.def("ngram_block", &ngram_block, py::arg("pair"));
    m.def("weighted_tfidf_score", &weighted_tfidf_score, py::arg("pair"), py::arg("vocab"));
    m.def("tfidf_cosine", &tfidf_cosine, py::arg("pair"), py::arg("vocab"));
    m.def("external_features",
          py::overload_cast<const StancePair&, const Vocabulary&, const PolarityLexicon&>(
              &external_features),
          py::arg("pair"), py::arg("vocab"), py::arg("lexicon"));

    // neural features
    py::class_<EmbeddingStore>(m, "EmbeddingStore")
        .def(py::init<std::size_t>(), py::arg("dimension"))
        .def_static("load", &EmbeddingStore::load, py::arg("path"))
        .def("insert", &EmbeddingStore::insert, py::arg("key"), py::arg("values"))
        .def("save_binary", &EmbeddingStore::save_binary, py::arg("path"))
        .def("save_text", &EmbeddingStore::save_text, py::arg("path"))
        .def_property_readonly("dimension", &EmbeddingStore::dimension)
        .def("__len__", &EmbeddingStore::size)
        .def("find_text", [](const EmbeddingStore& s, const std::string& text) -> std::optional<SentenceEmbedding> {
            if (const auto* v = s.find_text(text)) return *v;
            return std::nullopt;
        });
    m.def("fallback_embed", &fallback_embed, py::arg("text"), py::arg("dimension") = kSkipThoughtDim,
          py::arg("seed") = 0);
    m.def("neural_features",
          [](const SentenceEmbedding& body, const SentenceEmbedding& headline) {
              auto f = neural_features(body, headline);
              return py::make_tuple(f.product, f.abs_difference);
          },
          py::arg("body"), py::arg("headline"));

    // evaluation
    py::class_<eval::ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init<>())
        .def(py::init([](const std::array<std::array<std::uint64_t, 4>, 4>& counts) {
            eval::ConfusionMatrix cm;
            cm.counts = counts;
            return cm;
        }))
        .def_readonly("counts", &eval::ConfusionMatrix::counts)
        .def("total", &eval::ConfusionMatrix::total)
        .def("__add__", [](const eval::ConfusionMatrix& a, const eval::ConfusionMatrix& b) { return a + b; });
    m.def("confusion",
          [](const std::vector<Stance>& golds, const std::vector<Stance>& preds) {
              return eval::confusion(golds, preds);
          },
          py::arg("golds"), py::arg("preds"));
    m.def("score_accuracy_mix", &eval::score_accuracy_mix, py::arg("confusion"));
    m.def("score_official_weighted", &eval::score_official_weighted, py::arg("confusion"));
    py::class_<eval::EvalReport>(m, "EvalReport")
        .def_readonly("confusion", &eval::EvalReport::confusion)
        .def_readonly("class_accuracy", &eval::EvalReport::class_accuracy)
        .def_readonly("empty_class", &eval::EvalReport::empty_class)
        .def_readonly("overall_accuracy", &eval::EvalReport::overall_accuracy)
        .def_readonly("score_accuracy_mix", &eval::EvalReport::score_accuracy_mix)
        .def_readonly("score_official_weighted", &eval::EvalReport::score_official_weighted)
        .def_property_readonly("score_variant_gap", &eval::EvalReport::score_variant_gap);
    m.def("report", py::overload_cast<const eval::ConfusionMatrix&>(&eval::report),
          py::arg("confusion"));
    m.def("score_files", &cmd_score, py::arg("gold_csv"), py::arg("pred_csv"),
          py::arg("output_dir") = "");

    // model
    py::class_<nn::MlpModel>(m, "MlpModel")
        .def_property_readonly("descriptor", &nn::architecture_descriptor)
        .def_property_readonly("parameter_count", &nn::MlpModel::parameter_count)
        .def("predict_proba", &probabilities, py::arg("neural") = std::vector<double>{},
             py::arg("statistical") = std::vector<double>{},
             py::arg("external") = std::vector<double>{})
        .def("predict",
             [](const nn::MlpModel& model, const std::vector<double>& neural,
                const std::vector<double>& statistical, const std::vector<double>& external) {
                 const auto p = probabilities(model, neural, statistical, external);
                 return nn::argmax_stance(Eigen::Map<const nn::Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
             },
             py::arg("neural") = std::vector<double>{},
             py::arg("statistical") = std::vector<double>{},
             py::arg("external") = std::vector<double>{});
    m.def("load_checkpoint", &nn::load_checkpoint, py::arg("path"));
}
