#include "stylo/detail/training.hpp"
#include "stylo/rng.hpp"
#include "stylo/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stylo::detail {
namespace {

// scores += x W for one sparse row (W feature-major, C columns).
void accumulate_row(const FeatureMatrix::Row& row, std::span<const double> weights, std::size_t n_classes,
                    std::span<double> scores) noexcept {
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
        simd::axpy(row.values[k], weights.subspan(std::size_t{row.cols[k]} * n_classes, n_classes), scores);
    }
}

double sparse_dot(const FeatureMatrix::Row& row, std::span<const double> w) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < row.cols.size(); ++k) s += row.values[k] * w[row.cols[k]];
    return s;
}

}  // namespace

std::vector<std::vector<double>> linear_scores(const LinearParams& params, const FeatureMatrix& X) {
    std::vector<std::vector<double>> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = params.bias;
        accumulate_row(X.row(i), params.weights, params.n_classes, out[i]);
    }
    return out;
}

double logistic_objective(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes, double c,
                          std::span<const double> params, std::span<double> grad) {
    const std::size_t n_weights = X.n_cols * n_classes;
    const auto weights = params.first(n_weights);
    const auto bias = params.subspan(n_weights, n_classes);
    auto grad_w = grad.first(n_weights);
    auto grad_b = grad.subspan(n_weights, n_classes);

    // 0.5 ||W||^2 and its gradient W.
    std::copy(weights.begin(), weights.end(), grad_w.begin());
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    double value = 0.5 * simd::squared_norm(weights);

    std::vector<double> z(n_classes);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto row = X.row(i);
        std::copy(bias.begin(), bias.end(), z.begin());
        accumulate_row(row, weights, n_classes, z);
        const auto label = static_cast<std::size_t>(y[i]);
        const double z_label = z[label];
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double& zc : z) {
            zc = std::exp(zc - zmax);
            sum += zc;
        }
        value += c * (std::log(sum) + zmax - z_label);
        for (std::size_t k = 0; k < n_classes; ++k) z[k] = c * (z[k] / sum - (k == label ? 1.0 : 0.0));
        for (std::size_t k = 0; k < row.cols.size(); ++k) {
            simd::axpy(row.values[k], z, grad_w.subspan(std::size_t{row.cols[k]} * n_classes, n_classes));
        }
        simd::axpy(1.0, z, grad_b);
    }
    return value;
}

LinearParams train_logistic(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                            const ModelConfig& config) {
    const std::size_t n_weights = X.n_cols * n_classes;
    Objective objective = [&](std::span<const double> p, std::span<double> g) {
        return logistic_objective(X, y, n_classes, config.regularization_c, p, g);
    };
    LbfgsOptions options;
    options.history = config.lr_history;
    options.max_iterations = config.lr_max_iterations;
    options.gradient_tolerance = config.lr_gradient_tolerance;
    auto result = lbfgs_minimize(objective, std::vector<double>(n_weights + n_classes, 0.0), options);

    LinearParams params;
    params.n_features = X.n_cols;
    params.n_classes = n_classes;
    params.bias.assign(result.x.begin() + static_cast<std::ptrdiff_t>(n_weights), result.x.end());
    result.x.resize(n_weights);
    params.weights = std::move(result.x);
    return params;
}

LinearParams train_linear_svm(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                              const ModelConfig& config) {
    const std::size_t n = X.rows();
    const std::size_t F = X.n_cols;
    const double C = config.regularization_c;

    // Diagonal of the Gram matrix with the constant bias feature appended.
    std::vector<double> q_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = X.row(i);
        q_diag[i] = simd::squared_norm(row.values) + 1.0;
    }

    LinearParams params;
    params.n_features = F;
    params.n_classes = n_classes;
    params.weights.assign(F * n_classes, 0.0);
    params.bias.assign(n_classes, 0.0);

    std::vector<double> w(F);
    std::vector<double> alpha(n);
    std::vector<double> sign(n);
    std::vector<std::size_t> order(n);
    for (std::size_t cls = 0; cls < n_classes; ++cls) {
        std::fill(w.begin(), w.end(), 0.0);
        std::fill(alpha.begin(), alpha.end(), 0.0);
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i) sign[i] = static_cast<std::size_t>(y[i]) == cls ? 1.0 : -1.0;
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(0x5356'4D00ULL, cls));

        for (int epoch = 0; epoch < config.svm_max_epochs; ++epoch) {
            rng.shuffle(std::span(order));
            double pg_max = -std::numeric_limits<double>::infinity();
            double pg_min = std::numeric_limits<double>::infinity();
            for (std::size_t i : order) {
                const auto row = X.row(i);
                const double g = sign[i] * (sparse_dot(row, w) + b) - 1.0;
                double pg = g;
                if (alpha[i] == 0.0) {
                    pg = std::min(g, 0.0);
                } else if (alpha[i] == C) {
                    pg = std::max(g, 0.0);
                }
                pg_max = std::max(pg_max, pg);
                pg_min = std::min(pg_min, pg);
                if (pg == 0.0) continue;
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / q_diag[i], 0.0, C);
                const double delta = (alpha[i] - old) * sign[i];
                for (std::size_t k = 0; k < row.cols.size(); ++k) w[row.cols[k]] += delta * row.values[k];
                b += delta;
            }
            if (pg_max - pg_min < config.svm_tolerance) break;
        }
        for (std::size_t f = 0; f < F; ++f) params.weights[f * n_classes + cls] = w[f];
        params.bias[cls] = b;
    }
    return params;
}

}  // namespace stylo::detail
