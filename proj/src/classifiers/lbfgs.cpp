#include "stylo/detail/training.hpp"
#include "stylo/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace stylo::detail {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

double max_abs(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Probe {
    double step = 0.0;
    double value = 0.0;
    double slope = 0.0;  // directional derivative
    std::vector<double> grad;
};

class LineSearch {
public:
    LineSearch(const Objective& f, std::span<const double> x, std::span<const double> dir, double f0, double slope0)
        : f_(f), x_(x), dir_(dir), f0_(f0), slope0_(slope0), trial_(x.size()) {}

    // Strong Wolfe step; nullopt if no acceptable point was found.
    std::optional<Probe> search(double initial_step) {
        Probe prev{0.0, f0_, slope0_, {}};
        double step = initial_step;
        for (int i = 0; i < 25; ++i) {
            Probe cur = evaluate(step);
            if (!std::isfinite(cur.value) || cur.value > f0_ + kArmijo * step * slope0_ ||
                (i > 0 && cur.value >= prev.value)) {
                return zoom(std::move(prev), std::move(cur));
            }
            if (std::abs(cur.slope) <= -kCurvature * slope0_) return cur;
            if (cur.slope >= 0.0) return zoom(std::move(cur), std::move(prev));
            prev = std::move(cur);
            step *= 2.0;
        }
        return prev.step > 0.0 ? std::optional<Probe>(std::move(prev)) : std::nullopt;
    }

private:
    Probe evaluate(double step) {
        std::copy(x_.begin(), x_.end(), trial_.begin());
        simd::axpy(step, dir_, trial_);
        Probe p;
        p.step = step;
        p.grad.assign(x_.size(), 0.0);
        p.value = f_(trial_, p.grad);
        p.slope = simd::dot(p.grad, dir_);
        return p;
    }

    std::optional<Probe> zoom(Probe lo, Probe hi) {
        for (int j = 0; j < 30; ++j) {
            const double width = hi.step - lo.step;
            // Minimizer of the quadratic through lo (value, slope) and hi (value).
            const double denom = 2.0 * (hi.value - lo.value - lo.slope * width);
            double step = (denom != 0.0 && std::isfinite(hi.value)) ? lo.step - lo.slope * width * width / denom
                                                                    : lo.step + 0.5 * width;
            const double a = std::min(lo.step, hi.step);
            const double b = std::max(lo.step, hi.step);
            const double margin = 0.1 * (b - a);
            if (!std::isfinite(step) || step < a + margin || step > b - margin) step = 0.5 * (a + b);

            Probe cur = evaluate(step);
            if (!std::isfinite(cur.value) || cur.value > f0_ + kArmijo * step * slope0_ || cur.value >= lo.value) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.slope) <= -kCurvature * slope0_) return cur;
                if (cur.slope * (hi.step - lo.step) >= 0.0) hi = std::move(lo);
                lo = std::move(cur);
            }
            if (std::abs(hi.step - lo.step) < 1e-16 * std::max(1.0, lo.step)) break;
        }
        return lo.step > 0.0 ? std::optional<Probe>(std::move(lo)) : std::nullopt;
    }

    const Objective& f_;
    std::span<const double> x_;
    std::span<const double> dir_;
    double f0_;
    double slope0_;
    std::vector<double> trial_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options) {
    const std::size_t n = x0.size();
    LbfgsResult result;
    result.x = std::move(x0);
    std::vector<double> grad(n, 0.0);
    result.value = objective(result.x, grad);

    struct Pair {
        std::vector<double> s;
        std::vector<double> y;
        double rho;
    };
    std::deque<Pair> history;
    std::vector<double> dir(n);
    std::vector<double> alphas;

    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        if (max_abs(grad) <= options.gradient_tolerance) {
            result.converged = true;
            return result;
        }

        // Two-loop recursion: dir = -H grad.
        std::copy(grad.begin(), grad.end(), dir.begin());
        alphas.assign(history.size(), 0.0);
        for (std::size_t k = history.size(); k-- > 0;) {
            alphas[k] = history[k].rho * simd::dot(history[k].s, dir);
            simd::axpy(-alphas[k], history[k].y, dir);
        }
        double initial_step = 1.0;
        if (!history.empty()) {
            const auto& last = history.back();
            simd::scale(simd::dot(last.s, last.y) / simd::dot(last.y, last.y), dir);
        } else {
            initial_step = 1.0 / std::max(std::sqrt(simd::squared_norm(grad)), 1e-300);
        }
        for (std::size_t k = 0; k < history.size(); ++k) {
            const double beta = history[k].rho * simd::dot(history[k].y, dir);
            simd::axpy(alphas[k] - beta, history[k].s, dir);
        }
        simd::scale(-1.0, dir);

        double slope = simd::dot(grad, dir);
        if (!(slope < 0.0)) {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            std::transform(grad.begin(), grad.end(), dir.begin(), [](double g) { return -g; });
            slope = simd::dot(grad, dir);
            initial_step = 1.0 / std::max(std::sqrt(-slope), 1e-300);
        }

        LineSearch ls(objective, result.x, dir, result.value, slope);
        auto probe = ls.search(initial_step);
        if (!probe) return result;

        Pair pair;
        pair.s.assign(dir.begin(), dir.end());
        simd::scale(probe->step, pair.s);
        pair.y = probe->grad;
        simd::axpy(-1.0, grad, pair.y);
        const double sy = simd::dot(pair.s, pair.y);

        const double previous = result.value;
        simd::axpy(1.0, pair.s, result.x);
        result.value = probe->value;
        grad = std::move(probe->grad);

        if (sy > 1e-10 * std::sqrt(simd::squared_norm(pair.y) * simd::squared_norm(pair.s))) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (static_cast<int>(history.size()) > options.history) history.pop_front();
        }

        const double scale = std::max({std::abs(previous), std::abs(result.value), 1.0});
        if ((previous - result.value) <= options.relative_decrease * scale) {
            ++result.iterations;
            result.converged = max_abs(grad) <= options.gradient_tolerance;
            return result;
        }
    }
    result.converged = max_abs(grad) <= options.gradient_tolerance;
    return result;
}

}  // namespace stylo::detail
