#include "stylo/simd/kernels.hpp"

#include <cmath>

namespace stylo::simd {
namespace {

// Lane layout mirrors two 4-wide registers: element i accumulates into lane
// i % 8 for the vectorizable prefix, lanes fold as (j, j+4) then pairwise.
constexpr std::size_t kLanes = 8;

double fold_lanes(const double (&acc)[kLanes]) noexcept {
    double half[4];
    for (std::size_t j = 0; j < 4; ++j) half[j] = acc[j] + acc[j + 4];
    return (half[0] + half[1]) + (half[2] + half[3]);
}

double dot_scalar(const double* x, const double* y, std::size_t n) noexcept {
    double acc[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) acc[j] += x[i + j] * y[i + j];
    }
    double sum = fold_lanes(acc);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

double squared_distance_scalar(const double* x, const double* y, std::size_t n) noexcept {
    double acc[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) {
            const double d = x[i + j] - y[i + j];
            acc[j] += d * d;
        }
    }
    double sum = fold_lanes(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void adam_scalar(double* w, const double* g, double* m, double* v, std::size_t n, const AdamStep& s) noexcept {
    const double one_minus_b1 = 1.0 - s.beta1;
    const double one_minus_b2 = 1.0 - s.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = s.beta1 * m[i] + one_minus_b1 * g[i];
        v[i] = s.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
        w[i] -= s.step_size * m[i] / (std::sqrt(v[i]) + s.epsilon);
    }
}

constexpr KernelTable kScalar{
    &dot_scalar, &squared_distance_scalar, &axpy_scalar, &scale_scalar, &adam_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace stylo::simd
