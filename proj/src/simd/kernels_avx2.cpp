// Compiled with -mavx2 only (no -mfma): every product is rounded before the
// add, matching the scalar reference exactly.

#include "stylo/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace stylo::simd {
namespace {

double fold(__m256d lo, __m256d hi) noexcept {
    const __m256d half = _mm256_add_pd(lo, hi);
    alignas(32) double h[4];
    _mm256_store_pd(h, half);
    return (h[0] + h[1]) + (h[2] + h[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    double sum = fold(acc0, acc1);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

double squared_distance_avx2(const double* x, const double* y, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    double sum = fold(acc0, acc1);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) noexcept {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(a, _mm256_loadu_pd(x + i))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) noexcept {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), a));
    for (; i < n; ++i) x[i] *= alpha;
}

void adam_avx2(double* w, const double* g, double* m, double* v, std::size_t n, const AdamStep& s) noexcept {
    const double one_minus_b1 = 1.0 - s.beta1;
    const double one_minus_b2 = 1.0 - s.beta2;
    const __m256d b1 = _mm256_set1_pd(s.beta1);
    const __m256d b2 = _mm256_set1_pd(s.beta2);
    const __m256d c1 = _mm256_set1_pd(one_minus_b1);
    const __m256d c2 = _mm256_set1_pd(one_minus_b2);
    const __m256d lr = _mm256_set1_pd(s.step_size);
    const __m256d eps = _mm256_set1_pd(s.epsilon);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1, gi));
        const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(c2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d upd = _mm256_div_pd(_mm256_mul_pd(lr, mi), _mm256_add_pd(_mm256_sqrt_pd(vi), eps));
        _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), upd));
    }
    for (; i < n; ++i) {
        m[i] = s.beta1 * m[i] + one_minus_b1 * g[i];
        v[i] = s.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
        w[i] -= s.step_size * m[i] / (std::sqrt(v[i]) + s.epsilon);
    }
}

constexpr KernelTable kAvx2{
    &dot_avx2, &squared_distance_avx2, &axpy_avx2, &scale_avx2, &adam_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() noexcept { return &kAvx2; }

}  // namespace stylo::simd
