#include "stylo/classifiers.hpp"

#include "stylo/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstring>

using nlohmann::json;

namespace stylo {
namespace {

constexpr int kModelVersion = 1;
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

static_assert(std::endian::native == std::endian::little, "f64le payloads assume a little-endian host");

std::string base64_encode(std::span<const unsigned char> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (const std::size_t rest = bytes.size() - i; rest > 0) {
        std::uint32_t v = bytes[i] << 16;
        if (rest == 2) v |= bytes[i + 1] << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(std::string_view text) {
    std::array<int, 256> lookup{};
    lookup.fill(-1);
    for (int k = 0; k < 64; ++k) lookup[static_cast<unsigned char>(kAlphabet[k])] = k;
    if (text.size() % 4 != 0) throw FormatError("base64 payload length is not a multiple of 4");
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t v = 0;
        int pad = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && i + 4 == text.size() && k >= 2) {
                ++pad;
                v <<= 6;
                continue;
            }
            const int d = lookup[static_cast<unsigned char>(c)];
            if (d < 0 || pad > 0) throw FormatError("invalid base64 payload");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out.push_back(static_cast<unsigned char>(v >> 16));
        if (pad < 2) out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<unsigned char>(v & 0xFF));
    }
    return out;
}

json encode_array(std::span<const double> values, std::vector<std::size_t> shape) {
    return json{{"dtype", "f64le"},
                {"shape", std::move(shape)},
                {"data", base64_encode(std::span(reinterpret_cast<const unsigned char*>(values.data()),
                                                  values.size() * sizeof(double)))}};
}

std::vector<double> decode_array(const json& j, std::size_t expected) {
    if (j.at("dtype").get<std::string>() != "f64le") throw FormatError("unsupported array dtype");
    std::size_t count = 1;
    for (auto d : j.at("shape").get<std::vector<std::size_t>>()) count *= d;
    const auto bytes = base64_decode(j.at("data").get<std::string>());
    if (bytes.size() != count * sizeof(double) || count != expected) {
        throw FormatError(fmt::format("array has {} values, expected {}", bytes.size() / sizeof(double), expected));
    }
    std::vector<double> out(count);
    if (count > 0) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

json tree_to_json(const Tree& tree, std::size_t n_classes) {
    std::vector<std::int32_t> feature;
    std::vector<std::int32_t> left;
    std::vector<std::int32_t> right;
    std::vector<double> threshold;
    std::vector<double> weighted;
    std::vector<double> impurity;
    std::vector<double> class_weights;
    for (const auto& n : tree.nodes) {
        feature.push_back(n.feature);
        left.push_back(n.left);
        right.push_back(n.right);
        threshold.push_back(n.threshold);
        weighted.push_back(n.weighted_samples);
        impurity.push_back(n.impurity);
        class_weights.insert(class_weights.end(), n.class_weights.begin(), n.class_weights.end());
    }
    const std::size_t count = tree.nodes.size();
    return json{{"feature", feature},
                {"left", left},
                {"right", right},
                {"threshold", encode_array(threshold, {count})},
                {"weighted_samples", encode_array(weighted, {count})},
                {"impurity", encode_array(impurity, {count})},
                {"class_weights", encode_array(class_weights, {count, n_classes})}};
}

Tree tree_from_json(const json& j, std::size_t n_classes, std::size_t n_features) {
    const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
    const auto left = j.at("left").get<std::vector<std::int32_t>>();
    const auto right = j.at("right").get<std::vector<std::int32_t>>();
    const std::size_t count = feature.size();
    if (count == 0 || left.size() != count || right.size() != count) throw FormatError("inconsistent tree arrays");
    const auto threshold = decode_array(j.at("threshold"), count);
    const auto weighted = decode_array(j.at("weighted_samples"), count);
    const auto impurity = decode_array(j.at("impurity"), count);
    const auto class_weights = decode_array(j.at("class_weights"), count * n_classes);
    Tree tree;
    tree.nodes.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto& n = tree.nodes[k];
        n.feature = feature[k];
        n.left = left[k];
        n.right = right[k];
        if (n.feature >= 0) {
            const auto in_range = [&](std::int32_t c) { return c > static_cast<std::int32_t>(k) && c < static_cast<std::int32_t>(count); };
            if (static_cast<std::size_t>(n.feature) >= n_features || !in_range(n.left) || !in_range(n.right)) {
                throw FormatError("tree node references out of range");
            }
        }
        n.threshold = threshold[k];
        n.weighted_samples = weighted[k];
        n.impurity = impurity[k];
        n.class_weights.assign(class_weights.begin() + static_cast<std::ptrdiff_t>(k * n_classes),
                               class_weights.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_classes));
    }
    return tree;
}

}  // namespace

json to_json(const TrainedModel& model) {
    const std::size_t C = model.class_labels.size();
    json params;
    if (const auto* p = std::get_if<LinearParams>(&model.params)) {
        params = {{"weights", encode_array(p->weights, {p->n_features, p->n_classes})},
                  {"bias", encode_array(p->bias, {p->n_classes})}};
    } else if (const auto* p = std::get_if<KnnParams>(&model.params)) {
        params = {{"k", p->k},
                  {"labels", p->labels},
                  {"row_ptr", p->train.row_ptr},
                  {"cols", p->train.cols},
                  {"values", encode_array(p->train.values, {p->train.values.size()})}};
    } else if (const auto* p = std::get_if<TreeParams>(&model.params)) {
        params = {{"tree", tree_to_json(p->tree, C)}};
    } else if (const auto* p = std::get_if<ForestParams>(&model.params)) {
        json trees = json::array();
        for (const auto& t : p->trees) trees.push_back(tree_to_json(t, C));
        params = {{"trees", std::move(trees)}};
    } else if (const auto* p = std::get_if<MlpParams>(&model.params)) {
        json weights = json::array();
        json biases = json::array();
        for (std::size_t l = 0; l + 1 < p->layer_sizes.size(); ++l) {
            weights.push_back(encode_array(p->weights[l], {p->layer_sizes[l], p->layer_sizes[l + 1]}));
            biases.push_back(encode_array(p->biases[l], {p->layer_sizes[l + 1]}));
        }
        params = {{"layer_sizes", p->layer_sizes},
                  {"weights", std::move(weights)},
                  {"biases", std::move(biases)},
                  {"epochs_run", p->epochs_run}};
    }
    return json{{"format", "stylo-model"},
                {"version", kModelVersion},
                {"algorithm", std::string(to_string(model.algorithm))},
                {"class_labels", model.class_labels},
                {"n_features", model.n_features},
                {"params", std::move(params)}};
}

TrainedModel model_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "stylo-model") throw FormatError("not a model file");
        const int version = j.at("version").get<int>();
        if (version != kModelVersion) {
            throw FormatError(fmt::format("unsupported model version {} (expected {})", version, kModelVersion));
        }
        TrainedModel model;
        model.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        model.class_labels = j.at("class_labels").get<std::vector<std::string>>();
        model.n_features = j.at("n_features").get<std::size_t>();
        const std::size_t C = model.class_labels.size();
        if (C < 2) throw FormatError("model needs at least two classes");
        const json& p = j.at("params");
        switch (model.algorithm) {
            case Algorithm::SVM:
            case Algorithm::LR: {
                LinearParams lp;
                lp.n_features = model.n_features;
                lp.n_classes = C;
                lp.weights = decode_array(p.at("weights"), model.n_features * C);
                lp.bias = decode_array(p.at("bias"), C);
                model.params = std::move(lp);
                break;
            }
            case Algorithm::KNN: {
                KnnParams kp;
                kp.k = p.at("k").get<int>();
                kp.labels = p.at("labels").get<std::vector<int>>();
                kp.train.n_cols = model.n_features;
                kp.train.row_ptr = p.at("row_ptr").get<std::vector<std::size_t>>();
                kp.train.cols = p.at("cols").get<std::vector<std::uint32_t>>();
                kp.train.values = decode_array(p.at("values"), kp.train.cols.size());
                if (kp.train.row_ptr.empty() || kp.train.row_ptr.back() != kp.train.cols.size() ||
                    kp.labels.size() != kp.train.rows()) {
                    throw FormatError("inconsistent k-NN training matrix");
                }
                for (auto c : kp.train.cols) {
                    if (c >= model.n_features) throw FormatError("k-NN column index out of range");
                }
                for (int l : kp.labels) {
                    if (l < 0 || static_cast<std::size_t>(l) >= C) throw FormatError("k-NN label out of range");
                }
                kp.train.row_ids.assign(kp.train.rows(), std::string{});
                model.params = std::move(kp);
                break;
            }
            case Algorithm::DT:
                model.params = TreeParams{tree_from_json(p.at("tree"), C, model.n_features)};
                break;
            case Algorithm::RF: {
                ForestParams fp;
                for (const auto& t : p.at("trees")) fp.trees.push_back(tree_from_json(t, C, model.n_features));
                if (fp.trees.empty()) throw FormatError("forest has no trees");
                model.params = std::move(fp);
                break;
            }
            case Algorithm::ANN: {
                MlpParams mp;
                mp.layer_sizes = p.at("layer_sizes").get<std::vector<std::size_t>>();
                if (mp.layer_sizes.size() < 2 || mp.layer_sizes.front() != model.n_features ||
                    mp.layer_sizes.back() != C) {
                    throw FormatError("network shape does not match model header");
                }
                const auto& weights = p.at("weights");
                const auto& biases = p.at("biases");
                if (weights.size() + 1 != mp.layer_sizes.size() || biases.size() + 1 != mp.layer_sizes.size()) {
                    throw FormatError("network layer count mismatch");
                }
                for (std::size_t l = 0; l + 1 < mp.layer_sizes.size(); ++l) {
                    mp.weights.push_back(decode_array(weights[l], mp.layer_sizes[l] * mp.layer_sizes[l + 1]));
                    mp.biases.push_back(decode_array(biases[l], mp.layer_sizes[l + 1]));
                }
                mp.epochs_run = p.value("epochs_run", 0);
                model.params = std::move(mp);
                break;
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid model: ") + e.what());
    }
}

}  // namespace stylo
