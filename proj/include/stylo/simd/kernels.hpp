#pragma once

// Dense double-precision kernels used by the optimizers and the neural
// network. Each kernel has a scalar reference and an AVX2 variant; the
// variant is chosen once at startup from CPUID, or forced with
// STYLO_ATTR_SIMD=scalar|avx2.
//
// Reductions use a fixed 8-lane striped accumulation order in both variants
// and no fused multiply-add, so the two paths return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>

namespace stylo::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct AdamStep {
    double step_size;  ///< learning rate with bias correction folded in
    double beta1;
    double beta2;
    double epsilon;
};

struct KernelTable {
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*squared_distance)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    void (*adam)(double* w, const double* g, double* m, double* v, std::size_t n, const AdamStep& step);
};

const KernelTable& scalar_kernels() noexcept;
/// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels() noexcept;

bool cpu_has_avx2() noexcept;
Isa active_isa() noexcept;
/// Overrides dispatch for the rest of the process. Forcing Avx2 on a CPU
/// without it falls back to Scalar.
void set_isa(Isa isa) noexcept;
const KernelTable& kernels() noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) noexcept {
    return kernels().dot(x.data(), y.data(), x.size());
}

inline double squared_norm(std::span<const double> x) noexcept {
    return kernels().dot(x.data(), x.data(), x.size());
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
    return kernels().squared_distance(x.data(), y.data(), x.size());
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    kernels().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) noexcept { kernels().scale(alpha, x.data(), x.size()); }

/// m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2;  w -= step * m / (sqrt(v) + eps)
inline void adam_update(std::span<double> w, std::span<const double> g, std::span<double> m, std::span<double> v,
                        const AdamStep& step) noexcept {
    kernels().adam(w.data(), g.data(), m.data(), v.data(), w.size(), step);
}

}  // namespace stylo::simd
