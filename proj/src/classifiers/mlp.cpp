#include "stylo/detail/training.hpp"
#include "stylo/errors.hpp"
#include "stylo/rng.hpp"
#include "stylo/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stylo::detail {
namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kShuffleStream = 0x5AFF1E;

std::vector<std::size_t> layer_offsets(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> offsets{0};
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        offsets.push_back(offsets.back() + sizes[l] * sizes[l + 1] + sizes[l + 1]);
    }
    return offsets;
}

void softmax_inplace(std::span<double> z) noexcept {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed)
    : sizes_(std::move(layer_sizes)), offsets_(layer_offsets(sizes_)), params_(offsets_.back(), 0.0) {
    Rng rng(derive_seed(seed, kInitStream));
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
        const std::size_t count = sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
        for (std::size_t k = 0; k < count; ++k) params_[offsets_[l] + k] = rng.uniform(-bound, bound);
    }
}

Mlp::Mlp(MlpParams params) : sizes_(std::move(params.layer_sizes)), offsets_(layer_offsets(sizes_)) {
    if (params.weights.size() + 1 != sizes_.size() || params.biases.size() + 1 != sizes_.size()) {
        throw InvalidArgument("mlp: layer count mismatch");
    }
    params_.reserve(offsets_.back());
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (params.weights[l].size() != sizes_[l] * sizes_[l + 1] || params.biases[l].size() != sizes_[l + 1]) {
            throw InvalidArgument("mlp: parameter shape mismatch");
        }
        params_.insert(params_.end(), params.weights[l].begin(), params.weights[l].end());
        params_.insert(params_.end(), params.biases[l].begin(), params.biases[l].end());
    }
}

MlpParams Mlp::to_params() const {
    MlpParams out;
    out.layer_sizes = sizes_;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const auto w = std::span(params_).subspan(weight_offset(l), sizes_[l] * sizes_[l + 1]);
        const auto b = std::span(params_).subspan(bias_offset(l), sizes_[l + 1]);
        out.weights.emplace_back(w.begin(), w.end());
        out.biases.emplace_back(b.begin(), b.end());
    }
    return out;
}

std::vector<std::vector<double>> Mlp::forward(const FeatureMatrix& X, std::span<const std::size_t> rows) const {
    const std::size_t B = rows.size();
    const std::size_t n_layers = sizes_.size() - 1;
    const std::span<const double> p(params_);
    std::vector<std::vector<double>> acts(n_layers);

    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const auto W = p.subspan(weight_offset(l), in * out);
        const auto bias = p.subspan(bias_offset(l), out);
        auto& a = acts[l];
        a.resize(B * out);
        for (std::size_t r = 0; r < B; ++r) {
            const std::span<double> dst(a.data() + r * out, out);
            std::copy(bias.begin(), bias.end(), dst.begin());
            if (l == 0) {
                const auto row = X.row(rows[r]);
                for (std::size_t k = 0; k < row.cols.size(); ++k) {
                    simd::axpy(row.values[k], W.subspan(std::size_t{row.cols[k]} * out, out), dst);
                }
            } else {
                const double* prev = acts[l - 1].data() + r * in;
                for (std::size_t i = 0; i < in; ++i) {
                    if (prev[i] != 0.0) simd::axpy(prev[i], W.subspan(i * out, out), dst);
                }
            }
            if (l + 1 < n_layers) {
                for (double& v : dst) v = std::max(v, 0.0);
            } else {
                softmax_inplace(dst);
            }
        }
    }
    return acts;
}

double Mlp::loss_and_gradient(const FeatureMatrix& X, std::span<const std::size_t> rows, std::span<const int> y,
                              double alpha, std::span<double> grad) const {
    const std::size_t B = rows.size();
    const auto inv_b = 1.0 / static_cast<double>(B);
    const std::size_t n_layers = sizes_.size() - 1;
    const std::span<const double> p(params_);
    const auto acts = forward(X, rows);

    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t C = sizes_.back();
    std::vector<double> delta(acts.back());
    double loss = 0.0;
    for (std::size_t r = 0; r < B; ++r) {
        const auto label = static_cast<std::size_t>(y[rows[r]]);
        loss -= std::log(std::max(delta[r * C + label], std::numeric_limits<double>::min()));
        delta[r * C + label] -= 1.0;
    }
    loss *= inv_b;
    simd::scale(inv_b, delta);

    double weight_sq = 0.0;
    std::vector<double> prev_delta;
    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const auto W = p.subspan(weight_offset(l), in * out);
        auto gW = grad.subspan(weight_offset(l), in * out);
        auto gb = grad.subspan(bias_offset(l), out);

        for (std::size_t r = 0; r < B; ++r) {
            const std::span<const double> d(delta.data() + r * out, out);
            simd::axpy(1.0, d, gb);
            if (l == 0) {
                const auto row = X.row(rows[r]);
                for (std::size_t k = 0; k < row.cols.size(); ++k) {
                    simd::axpy(row.values[k], d, gW.subspan(std::size_t{row.cols[k]} * out, out));
                }
            } else {
                const double* a = acts[l - 1].data() + r * in;
                for (std::size_t i = 0; i < in; ++i) {
                    if (a[i] != 0.0) simd::axpy(a[i], d, gW.subspan(i * out, out));
                }
            }
        }

        if (l > 0) {
            prev_delta.assign(B * in, 0.0);
            for (std::size_t r = 0; r < B; ++r) {
                const std::span<const double> d(delta.data() + r * out, out);
                const double* a = acts[l - 1].data() + r * in;
                for (std::size_t i = 0; i < in; ++i) {
                    if (a[i] > 0.0) prev_delta[r * in + i] = simd::dot(W.subspan(i * out, out), d);
                }
            }
        }

        weight_sq += simd::squared_norm(W);
        simd::axpy(alpha * inv_b, W, gW);
        if (l > 0) delta.swap(prev_delta);
    }
    return loss + 0.5 * alpha * weight_sq * inv_b;
}

MlpParams train_mlp(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes,
                    const ModelConfig& config) {
    const std::size_t n = X.rows();
    std::vector<std::size_t> sizes{X.n_cols};
    for (int h : config.hidden_sizes) sizes.push_back(static_cast<std::size_t>(h));
    sizes.push_back(n_classes);

    Mlp net(sizes, config.seed);
    const std::size_t n_params = net.parameters().size();
    std::vector<double> grad(n_params);
    std::vector<double> m(n_params, 0.0);
    std::vector<double> v(n_params, 0.0);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, kShuffleStream));
    const std::size_t batch = std::min(config.batch_size, n);

    double best_loss = std::numeric_limits<double>::infinity();
    int no_improvement = 0;
    long step = 0;
    int epoch = 0;
    while (epoch < config.max_epochs) {
        rng.shuffle(std::span(order));
        double accumulated = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::span<const std::size_t> rows(order.data() + start, std::min(batch, n - start));
            accumulated += net.loss_and_gradient(X, rows, y, config.alpha, grad) * static_cast<double>(rows.size());
            ++step;
            const double t = static_cast<double>(step);
            const double step_size = config.learning_rate * std::sqrt(1.0 - std::pow(config.adam_beta2, t)) /
                                     (1.0 - std::pow(config.adam_beta1, t));
            simd::adam_update(net.parameters(), grad, m, v,
                              {step_size, config.adam_beta1, config.adam_beta2, config.adam_epsilon});
        }
        ++epoch;
        const double epoch_loss = accumulated / static_cast<double>(n);
        no_improvement = epoch_loss > best_loss - config.tol ? no_improvement + 1 : 0;
        best_loss = std::min(best_loss, epoch_loss);
        if (no_improvement > config.n_iter_no_change) break;
    }
    MlpParams out = net.to_params();
    out.epochs_run = epoch;
    return out;
}

}  // namespace stylo::detail
