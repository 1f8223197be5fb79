#pragma once

#include "stylo/features.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stylo {

enum class Algorithm { SVM, LR, KNN, DT, RF, ANN };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::SVM, Algorithm::LR, Algorithm::KNN,
                                               Algorithm::DT,  Algorithm::RF, Algorithm::ANN};

std::string_view to_string(Algorithm algorithm) noexcept;
/// Case-insensitive: svm, lr, knn (or k-nn), dt, rf, ann.
Algorithm parse_algorithm(std::string_view name);

/// Hyperparameters. Fields that do not apply to `algorithm` are ignored.
/// Defaults follow the reference configuration for each method.
struct ModelConfig {
    Algorithm algorithm = Algorithm::SVM;

    // SVM, LR
    double regularization_c = 1.0;
    // SVM: dual coordinate descent stopping rule
    double svm_tolerance = 1e-4;
    int svm_max_epochs = 1000;
    // LR: limited-memory quasi-Newton
    double lr_gradient_tolerance = 1e-4;
    int lr_max_iterations = 100;
    int lr_history = 10;

    // KNN
    int k_neighbors = 5;

    // DT, RF, ANN
    std::uint64_t seed = 42;

    // RF
    int n_trees = 100;
    bool bootstrap = true;
    /// Features eligible per split; nullopt means floor(sqrt(F)).
    std::optional<std::size_t> max_features;
    unsigned jobs = 1;

    // ANN
    std::vector<int> hidden_sizes{100, 50};
    double alpha = 1e-4;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t batch_size = 200;
    int max_epochs = 200;
    /// Training stops once the epoch loss has failed to improve by `tol`
    /// for more than `n_iter_no_change` consecutive epochs.
    double tol = 1e-4;
    int n_iter_no_change = 10;

    /// Throws InvalidArgument on an inconsistent configuration.
    void validate() const;
};

/// Dense weights for one-vs-rest SVM and multinomial LR. Feature-major:
/// weights[f * n_classes + c].
struct LinearParams {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> weights;
    std::vector<double> bias;
};

struct KnnParams {
    int k = 5;
    FeatureMatrix train;
    std::vector<int> labels;
};

/// Leaf when feature < 0. Internal nodes route x[feature] <= threshold left.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double weighted_samples = 0.0;
    double impurity = 0.0;              ///< Gini
    std::vector<double> class_weights;  ///< weighted class counts reaching this node
};

struct Tree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root
};

struct TreeParams {
    Tree tree;
};

struct ForestParams {
    std::vector<Tree> trees;
};

/// layer_sizes = {F, hidden..., C}. weights[l] is layer_sizes[l] x
/// layer_sizes[l+1], row-major.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    int epochs_run = 0;
};

using ModelParams = std::variant<LinearParams, KnnParams, TreeParams, ForestParams, MlpParams>;

struct TrainedModel {
    Algorithm algorithm = Algorithm::SVM;
    std::vector<std::string> class_labels;  ///< sorted
    std::size_t n_features = 0;
    ModelParams params;
};

/// Trains one classifier. Throws InvalidArgument when X.rows() != y.size(),
/// when y has fewer than two distinct labels, or on an invalid config.
TrainedModel fit(const ModelConfig& config, const FeatureMatrix& X, std::span<const std::string> y);

/// One label per row. Throws InvalidArgument if X.n_cols differs from the
/// training feature count.
std::vector<std::string> predict(const TrainedModel& model, const FeatureMatrix& X);

/// Per-row class scores (rows x classes). SVM: one-vs-rest margins. LR, ANN:
/// class probabilities. KNN: neighbour vote fractions; equal fractions are
/// resolved by summed neighbour distance, then class index. DT, RF: leaf
/// class proportions. Other exact ties go to the lowest class index.
std::vector<std::vector<double>> decision_scores(const TrainedModel& model, const FeatureMatrix& X);

/// Mean decrease in Gini impurity per feature, averaged over trees and
/// normalized to sum to 1 (all zero if no tree split). RF models only;
/// throws InvalidArgument otherwise.
std::vector<double> feature_importance(const TrainedModel& model);

/// {"format":"stylo-model","version":1,"algorithm":..,"class_labels":[..],
///  "n_features":..,"params":{..}}. Dense real arrays are stored as
/// {"dtype":"f64le","shape":[..],"data":<base64 of little-endian doubles>}.
nlohmann::json to_json(const TrainedModel& model);
/// Throws FormatError on wrong tag, version or shape.
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace stylo
