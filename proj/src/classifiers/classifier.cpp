#include "stylo/classifiers.hpp"

#include "stylo/detail/training.hpp"
#include "stylo/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace stylo {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t argmax(std::span<const double> v) noexcept {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void check_columns(const TrainedModel& model, const FeatureMatrix& X) {
    if (X.n_cols != model.n_features) {
        throw InvalidArgument(fmt::format("feature count mismatch: model has {} columns, input has {}",
                                          model.n_features, X.n_cols));
    }
}

std::vector<double> leaf_proportions(const TreeNode& leaf) {
    std::vector<double> p = leaf.class_weights;
    const double total = leaf.weighted_samples;
    for (double& v : p) v /= total;
    return p;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
        case Algorithm::SVM: return "SVM";
        case Algorithm::LR: return "LR";
        case Algorithm::KNN: return "KNN";
        case Algorithm::DT: return "DT";
        case Algorithm::RF: return "RF";
        case Algorithm::ANN: return "ANN";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    std::string lower;
    for (char c : name) {
        if (c != '-') lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (Algorithm a : kAllAlgorithms) {
        std::string tag(to_string(a));
        std::ranges::transform(tag, tag.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (tag == lower) return a;
    }
    throw InvalidArgument("unknown model '" + std::string(name) + "' (expected svm, lr, knn, dt, rf or ann)");
}

void ModelConfig::validate() const {
    switch (algorithm) {
        case Algorithm::SVM:
        case Algorithm::LR:
            if (!(regularization_c > 0.0)) throw InvalidArgument("regularization C must be positive");
            break;
        case Algorithm::KNN:
            if (k_neighbors < 1 || k_neighbors % 2 == 0) {
                throw InvalidArgument(fmt::format("k_neighbors must be odd and >= 1, got {}", k_neighbors));
            }
            break;
        case Algorithm::DT: break;
        case Algorithm::RF:
            if (n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
            if (max_features && *max_features == 0) throw InvalidArgument("max_features must be >= 1");
            break;
        case Algorithm::ANN:
            if (hidden_sizes.empty() || std::ranges::any_of(hidden_sizes, [](int h) { return h < 1; })) {
                throw InvalidArgument("hidden layer sizes must be positive");
            }
            if (batch_size < 1 || max_epochs < 1) throw InvalidArgument("batch size and epochs must be >= 1");
            break;
    }
}

TrainedModel fit(const ModelConfig& config, const FeatureMatrix& X, std::span<const std::string> y) {
    config.validate();
    if (X.rows() != y.size()) {
        throw InvalidArgument(fmt::format("fit: {} feature rows but {} labels", X.rows(), y.size()));
    }
    std::vector<std::string> labels(y.begin(), y.end());
    std::ranges::sort(labels);
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.size() < 2) throw InvalidArgument("fit: need at least two distinct classes");

    std::vector<int> yi(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        yi[i] = static_cast<int>(std::ranges::lower_bound(labels, y[i]) - labels.begin());
    }
    const std::size_t C = labels.size();

    TrainedModel model;
    model.algorithm = config.algorithm;
    model.n_features = X.n_cols;
    switch (config.algorithm) {
        case Algorithm::SVM: model.params = detail::train_linear_svm(X, yi, C, config); break;
        case Algorithm::LR: model.params = detail::train_logistic(X, yi, C, config); break;
        case Algorithm::KNN: model.params = KnnParams{config.k_neighbors, X, yi}; break;
        case Algorithm::DT: {
            const std::vector<double> weight(X.rows(), 1.0);
            model.params = TreeParams{
                detail::grow_tree(X, yi, C, weight, detail::TreeOptions{detail::tree_seed(config.seed, 0), {}})};
            break;
        }
        case Algorithm::RF: model.params = detail::train_forest(X, yi, C, config); break;
        case Algorithm::ANN: model.params = detail::train_mlp(X, yi, C, config); break;
    }
    model.class_labels = std::move(labels);
    return model;
}

std::vector<std::vector<double>> decision_scores(const TrainedModel& model, const FeatureMatrix& X) {
    check_columns(model, X);
    const std::size_t C = model.class_labels.size();
    return std::visit(
        Overloaded{
            [&](const LinearParams& p) {
                auto scores = detail::linear_scores(p, X);
                if (model.algorithm == Algorithm::LR) {
                    for (auto& row : scores) {
                        const double zmax = *std::max_element(row.begin(), row.end());
                        double sum = 0.0;
                        for (double& v : row) sum += (v = std::exp(v - zmax));
                        for (double& v : row) v /= sum;
                    }
                }
                return scores;
            },
            [&](const KnnParams& p) {
                std::vector<std::vector<double>> scores(X.rows());
                for (std::size_t i = 0; i < X.rows(); ++i) scores[i] = detail::knn_vote(p, C, X.row(i)).vote_fraction;
                return scores;
            },
            [&](const TreeParams& p) {
                std::vector<std::vector<double>> scores(X.rows());
                for (std::size_t i = 0; i < X.rows(); ++i) {
                    scores[i] = leaf_proportions(detail::tree_leaf(p.tree, X.row(i)));
                }
                return scores;
            },
            [&](const ForestParams& p) {
                std::vector<std::vector<double>> scores(X.rows(), std::vector<double>(C, 0.0));
                for (std::size_t i = 0; i < X.rows(); ++i) {
                    for (const auto& tree : p.trees) {
                        const auto prop = leaf_proportions(detail::tree_leaf(tree, X.row(i)));
                        for (std::size_t c = 0; c < C; ++c) scores[i][c] += prop[c];
                    }
                    for (double& v : scores[i]) v /= static_cast<double>(p.trees.size());
                }
                return scores;
            },
            [&](const MlpParams& p) {
                const detail::Mlp net(p);
                std::vector<std::size_t> rows(X.rows());
                for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
                const auto acts = net.forward(X, rows);
                std::vector<std::vector<double>> scores(X.rows());
                for (std::size_t i = 0; i < X.rows(); ++i) {
                    scores[i].assign(acts.back().begin() + static_cast<std::ptrdiff_t>(i * C),
                                     acts.back().begin() + static_cast<std::ptrdiff_t>((i + 1) * C));
                }
                return scores;
            },
        },
        model.params);
}

std::vector<std::string> predict(const TrainedModel& model, const FeatureMatrix& X) {
    check_columns(model, X);
    std::vector<std::string> out;
    out.reserve(X.rows());
    if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const auto vote = detail::knn_vote(*knn, model.class_labels.size(), X.row(i));
            out.push_back(model.class_labels[static_cast<std::size_t>(vote.label)]);
        }
        return out;
    }
    for (const auto& row : decision_scores(model, X)) out.push_back(model.class_labels[argmax(row)]);
    return out;
}

std::vector<double> feature_importance(const TrainedModel& model) {
    const auto* forest = std::get_if<ForestParams>(&model.params);
    if (forest == nullptr) throw InvalidArgument("feature importance is only defined for random forest models");
    std::vector<double> total(model.n_features, 0.0);
    for (const auto& tree : forest->trees) {
        auto imp = detail::tree_importance(tree, model.n_features);
        double sum = 0.0;
        for (double v : imp) sum += v;
        if (sum <= 0.0) continue;
        for (std::size_t f = 0; f < imp.size(); ++f) total[f] += imp[f] / sum;
    }
    double sum = 0.0;
    for (double v : total) sum += v;
    if (sum > 0.0) {
        for (double& v : total) v /= sum;
    }
    return total;
}

}  // namespace stylo
