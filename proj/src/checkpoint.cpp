#include <charconv>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "fncstance/error.hpp"
#include "fncstance/nn.hpp"

namespace fncstance::nn {

namespace {

constexpr std::string_view kMagic = "MLPCKPT1";

template <typename T>
T parse_number(const std::string& s, const std::string& path) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(path + ": bad number '" + s + "' in architecture descriptor");
    }
    return v;
}

LayerSpec read_layer(std::istringstream& in, const char* tag, std::size_t expected_in,
                     const std::string& path) {
    std::string word, n_in, n_out, act, keep, l2;
    if (!(in >> word >> n_in >> n_out >> act >> keep >> l2) || word != tag) {
        throw FormatError(path + ": malformed '" + std::string(tag) + "' line in descriptor");
    }
    if (parse_number<std::size_t>(n_in, path) != expected_in) {
        throw FormatError(path + ": layer input width does not chain with the previous layer");
    }
    return LayerSpec{parse_number<std::size_t>(n_out, path), parse_activation(act),
                     parse_number<double>(keep, path), parse_number<double>(l2, path)};
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write checkpoint " + path);
    out.write(kMagic.data(), kMagic.size());
    io::put_string(out, architecture_descriptor(model));
    for (const auto* l : model.layers()) {
        for (Eigen::Index r = 0; r < l->weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l->weights.cols(); ++c) io::put_f64(out, l->weights(r, c));
        }
        for (Eigen::Index r = 0; r < l->bias.size(); ++r) io::put_f64(out, l->bias(r));
    }
    if (!out) throw FormatError("write failed for " + path);
}

MlpModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint " + path);
    io::expect_magic(in, kMagic, path);
    std::istringstream desc(io::get_string(in, "architecture descriptor", 1u << 20));

    std::string word, count;
    if (!(desc >> word >> count) || word != "branches") {
        throw FormatError(path + ": descriptor must start with 'branches'");
    }
    Architecture arch;
    const auto n_branches = parse_number<std::size_t>(count, path);
    std::size_t fused = 0;
    for (std::size_t b = 0; b < n_branches; ++b) {
        std::string name, input, layers;
        if (!(desc >> word >> name >> input >> layers) || word != "branch") {
            throw FormatError(path + ": malformed 'branch' line in descriptor");
        }
        BranchSpec spec{name, parse_number<std::size_t>(input, path), {}};
        std::size_t width = spec.input_dim;
        const auto n_layers = parse_number<std::size_t>(layers, path);
        for (std::size_t l = 0; l < n_layers; ++l) {
            spec.layers.push_back(read_layer(desc, "layer", width, path));
            width = spec.layers.back().width;
        }
        fused += width;
        arch.branches.push_back(std::move(spec));
    }
    const LayerSpec head = read_layer(desc, "head", fused, path);
    if (head.activation != Activation::Softmax) throw FormatError(path + ": head must be softmax");
    arch.num_classes = head.width;

    MlpModel model;
    try {
        model = zero_model(arch);
    } catch (const ShapeError& e) {
        throw FormatError(path + ": " + e.what());
    }
    model.head.dropout_keep = head.dropout_keep;
    model.head.l2 = head.l2;
    for (auto* l : model.layers()) {
        for (Eigen::Index r = 0; r < l->weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l->weights.cols(); ++c) {
                l->weights(r, c) = io::get_f64(in, "weights");
            }
        }
        for (Eigen::Index r = 0; r < l->bias.size(); ++r) l->bias(r) = io::get_f64(in, "bias");
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path + ": trailing bytes");
    return model;
}

}  // namespace fncstance::nn
