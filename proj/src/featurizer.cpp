#include "fncstance/featurizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "binary_io.hpp"
#include "fncstance/error.hpp"

namespace fncstance {

namespace {

constexpr std::string_view kCacheMagic = "FNCFEAT1";
constexpr std::uint8_t kNoLabel = 0xFF;

}  // namespace

BranchSet BranchSet::parse(std::string_view list) {
    BranchSet b{false, false, false};
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        auto name = list.substr(start, end == std::string_view::npos ? end : end - start);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (name == kNeuralBranch) {
            b.neural = true;
        } else if (name == kStatisticalBranch) {
            b.statistical = true;
        } else if (name == kExternalBranch) {
            b.external = true;
        } else if (!name.empty()) {
            throw ConfigError("unknown branch '" + std::string(name) + "' (expected neural, stat, ext)");
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (!b.any()) throw ConfigError("at least one feature branch must be enabled");
    return b;
}

std::string BranchSet::to_string() const {
    std::string out;
    auto add = [&](bool on, std::string_view name) {
        if (!on) return;
        if (!out.empty()) out.push_back(',');
        out += name;
    };
    add(neural, kNeuralBranch);
    add(statistical, kStatisticalBranch);
    add(external, kExternalBranch);
    return out;
}

const std::vector<double>& FeatureBundle::block(std::string_view branch) const {
    if (branch == kNeuralBranch) return neural;
    if (branch == kStatisticalBranch) return statistical;
    if (branch == kExternalBranch) return external;
    throw ShapeError("unknown feature branch '" + std::string(branch) + "'");
}

std::string pair_key(const StancePair& pair) {
    return std::to_string(pair.body_id) + "|" + pair.headline;
}

Featurizer::Featurizer(BranchSet branches, Vocabulary vocab, PolarityLexicon lexicon,
                       std::optional<SentenceEncoder> encoder)
    : branches_(branches),
      vocab_(std::move(vocab)),
      lexicon_(std::move(lexicon)),
      encoder_(std::move(encoder)) {
    if (!branches_.any()) throw ConfigError("at least one feature branch must be enabled");
    if (branches_.neural && !encoder_) {
        throw ConfigError("neural branch enabled without an embedding store or fallback embedder");
    }
}

BlockDims Featurizer::dims() const {
    BlockDims d;
    if (branches_.neural) d.neural = 2 * encoder_->dimension();
    if (branches_.statistical) d.statistical = 2 * vocab_.capacity();
    if (branches_.external) d.external = ext_layout::kSize;
    return d;
}

FeatureBundle Featurizer::featurize(const StancePair& pair) const {
    Corpus single;
    single.bodies.emplace(pair.body_id, pair.body_text);
    single.pairs.push_back(pair);
    return std::move(featurize(single).front());
}

std::vector<FeatureBundle> Featurizer::featurize(const Corpus& corpus) const {
    if (branches_.neural && !encoder_->is_fallback()) {
        // Report the first missing key in pair order before doing any work.
        for (const auto& p : corpus.pairs) {
            encoder_->encode(p.headline);
            encoder_->encode(p.body());
        }
    }

    std::vector<FeatureBundle> out(corpus.size());
    std::map<BodyId, std::vector<std::size_t>> by_body;
    for (std::size_t i = 0; i < corpus.size(); ++i) by_body[corpus.pairs[i].body_id].push_back(i);

    for (const auto& [body_id, indices] : by_body) {
        const std::string& body = corpus.pairs[indices.front()].body();
        const auto body_tokens = text::tokenize(body);

        std::optional<BodyProfile> profile;
        if (branches_.external) profile = make_body_profile(body, &vocab_, lexicon_);
        std::vector<double> body_tf;
        if (branches_.statistical) body_tf = tf_vector(body_tokens, vocab_);
        SentenceEmbedding body_embedding;
        if (branches_.neural) body_embedding = encoder_->encode(body);

        for (std::size_t i : indices) {
            const StancePair& p = corpus.pairs[i];
            FeatureBundle& b = out[i];
            b.key = pair_key(p);
            b.label = p.stance;
            if (branches_.neural) {
                auto nf = neural_features(body_embedding, encoder_->encode(p.headline));
                b.neural = std::move(nf.product);
                b.neural.insert(b.neural.end(), nf.abs_difference.begin(), nf.abs_difference.end());
            }
            if (branches_.statistical) {
                b.statistical = tf_vector(text::tokenize(p.headline), vocab_);
                b.statistical.insert(b.statistical.end(), body_tf.begin(), body_tf.end());
            }
            if (branches_.external) {
                const auto ext = external_features(p.headline, *profile, vocab_, lexicon_);
                b.external.assign(ext.begin(), ext.end());
            }
        }
    }
    return out;
}

void write_feature_cache(const std::string& path, const BranchSet& branches, const BlockDims& dims,
                         const std::vector<FeatureBundle>& bundles) {
    std::vector<std::pair<std::string_view, std::size_t>> blocks;
    if (branches.neural) blocks.emplace_back(kNeuralBranch, dims.neural);
    if (branches.statistical) blocks.emplace_back(kStatisticalBranch, dims.statistical);
    if (branches.external) blocks.emplace_back(kExternalBranch, dims.external);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out.write(kCacheMagic.data(), kCacheMagic.size());
    io::put(out, static_cast<std::uint32_t>(blocks.size()));
    for (const auto& [name, dim] : blocks) {
        io::put_string(out, name);
        io::put(out, static_cast<std::uint32_t>(dim));
    }
    io::put(out, static_cast<std::uint64_t>(bundles.size()));
    for (const auto& b : bundles) {
        io::put_string(out, b.key);
        for (const auto& [name, dim] : blocks) {
            const auto& values = b.block(name);
            if (values.size() != dim) {
                throw ShapeError("bundle '" + b.key + "' block " + std::string(name) + " has " +
                                 std::to_string(values.size()) + " values, header says " +
                                 std::to_string(dim));
            }
            for (double v : values) io::put_f64(out, v);
        }
        out.put(static_cast<char>(b.label ? static_cast<std::uint8_t>(*b.label) : kNoLabel));
    }
    if (!out) throw FormatError("write failed for " + path);
}

FeatureCache read_feature_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open feature cache " + path);
    io::expect_magic(in, kCacheMagic, path);

    FeatureCache cache;
    cache.branches = BranchSet{false, false, false};
    const auto block_count = io::get<std::uint32_t>(in, "block count");
    if (block_count == 0 || block_count > 3) throw FormatError(path + ": bad block count");
    std::vector<std::pair<std::string, std::size_t>> blocks;
    for (std::uint32_t i = 0; i < block_count; ++i) {
        std::string name = io::get_string(in, "block name", 64);
        const std::size_t dim = io::get<std::uint32_t>(in, "block dim");
        if (name == kNeuralBranch && !cache.branches.neural) {
            cache.branches.neural = true;
            cache.dims.neural = dim;
        } else if (name == kStatisticalBranch && !cache.branches.statistical) {
            cache.branches.statistical = true;
            cache.dims.statistical = dim;
        } else if (name == kExternalBranch && !cache.branches.external) {
            cache.branches.external = true;
            cache.dims.external = dim;
        } else {
            throw FormatError(path + ": unexpected block '" + name + "'");
        }
        blocks.emplace_back(std::move(name), dim);
    }

    const auto count = io::get<std::uint64_t>(in, "record count");
    cache.bundles.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
    for (std::uint64_t r = 0; r < count; ++r) {
        FeatureBundle b;
        b.key = io::get_string(in, "pair key");
        for (const auto& [name, dim] : blocks) {
            std::vector<double> values(dim);
            for (auto& v : values) v = io::get_f64(in, "feature values");
            if (name == kNeuralBranch) b.neural = std::move(values);
            else if (name == kStatisticalBranch) b.statistical = std::move(values);
            else b.external = std::move(values);
        }
        const auto label = io::get<std::uint8_t>(in, "label byte");
        if (label != kNoLabel) {
            if (label >= kNumStances) throw FormatError(path + ": bad label byte");
            b.label = static_cast<Stance>(label);
        }
        cache.bundles.push_back(std::move(b));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path + ": trailing bytes");
    return cache;
}

}  // namespace fncstance
