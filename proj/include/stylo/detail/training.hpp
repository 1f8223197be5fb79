#pragma once

// Internal training entry points, exposed for gradient checks, oracle
// comparisons and the tree/forest equivalence tests. Labels here are class
// indices into the sorted label list.

#include "stylo/classifiers.hpp"

#include <functional>
#include <span>
#include <vector>

namespace stylo::detail {

// ---- limited-memory BFGS -------------------------------------------------

/// Returns f(x) and writes the gradient into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int history = 10;
    int max_iterations = 100;
    double gradient_tolerance = 1e-4;  ///< on max |g_i|
    double relative_decrease = 2.220446049250313e-9;
};

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options);

// ---- multinomial logistic regression --------------------------------------

/// c * sum_i CE(softmax(x_i W + b), y_i) + 0.5 * ||W||^2 with params laid out
/// as [W (F x C, feature-major), b (C)].
double logistic_objective(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes, double c,
                          std::span<const double> params, std::span<double> grad);

LinearParams train_logistic(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                            const ModelConfig& config);

// ---- one-vs-rest linear SVM ---------------------------------------------

LinearParams train_linear_svm(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                              const ModelConfig& config);

/// x W + b for every row.
std::vector<std::vector<double>> linear_scores(const LinearParams& params, const FeatureMatrix& X);

// ---- k nearest neighbours -------------------------------------------------

double sparse_squared_distance(const FeatureMatrix::Row& a, const FeatureMatrix::Row& b) noexcept;

struct KnnVote {
    int label = 0;
    std::vector<double> vote_fraction;
};

KnnVote knn_vote(const KnnParams& params, std::size_t n_classes, const FeatureMatrix::Row& query);

// ---- CART trees ----------------------------------------------------------

struct TreeOptions {
    std::uint64_t seed = 0;
    /// nullopt: every feature present in the node is evaluated.
    std::optional<std::size_t> max_features;
};

/// Grows an unpruned Gini tree. sample_weight entries are non-negative
/// integers (bootstrap multiplicities); zero excludes the row.
Tree grow_tree(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
               std::span<const double> sample_weight, const TreeOptions& options);

const TreeNode& tree_leaf(const Tree& tree, const FeatureMatrix::Row& row) noexcept;

/// Unnormalized Gini importance of one tree.
std::vector<double> tree_importance(const Tree& tree, std::size_t n_features);

/// Seeds used for tree `index` of a forest (index 0 is also the DT seed).
std::uint64_t tree_seed(std::uint64_t seed, std::size_t index) noexcept;

ForestParams train_forest(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                          const ModelConfig& config);

// ---- multilayer perceptron -------------------------------------------------

class Mlp {
public:
    /// Glorot-uniform initialisation seeded by `seed`.
    Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);
    explicit Mlp(MlpParams params);

    const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }

    /// Flat parameter vector: for each layer, weights (in x out, row-major)
    /// followed by biases.
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    /// Activations per layer for the selected rows: [0] hidden 1 ... last =
    /// softmax output. Each entry is rows.size() x width, row-major.
    std::vector<std::vector<double>> forward(const FeatureMatrix& X, std::span<const std::size_t> rows) const;

    /// mean cross-entropy + alpha / (2B) * sum ||W||^2 over the batch; the
    /// gradient of that with respect to parameters() is written to grad.
    double loss_and_gradient(const FeatureMatrix& X, std::span<const std::size_t> rows, std::span<const int> y,
                             double alpha, std::span<double> grad) const;

    MlpParams to_params() const;

private:
    std::size_t weight_offset(std::size_t layer) const noexcept { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const noexcept {
        return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
    }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

MlpParams train_mlp(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes, const ModelConfig& config);

}  // namespace stylo::detail
