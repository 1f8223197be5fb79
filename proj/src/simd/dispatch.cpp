#include "stylo/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace stylo::simd {

#ifndef STYLO_HAVE_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

namespace {

const KernelTable& table_for(Isa isa) noexcept {
    if (isa == Isa::Avx2 && cpu_has_avx2() && avx2_kernels() != nullptr) return *avx2_kernels();
    return scalar_kernels();
}

Isa initial_isa() noexcept {
    const bool avx2 = cpu_has_avx2() && avx2_kernels() != nullptr;
    if (const char* env = std::getenv("STYLO_ATTR_SIMD"); env != nullptr) {
        const std::string v(env);
        if (v == "scalar") return Isa::Scalar;
        if (v == "avx2" && avx2) return Isa::Avx2;
    }
    return avx2 ? Isa::Avx2 : Isa::Scalar;
}

struct State {
    std::atomic<Isa> isa{initial_isa()};
    std::atomic<const KernelTable*> table{&table_for(isa.load())};
};

State& state() noexcept {
    static State s;
    return s;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return state().isa.load(std::memory_order_relaxed); }

void set_isa(Isa isa) noexcept {
    const KernelTable& t = table_for(isa);
    state().isa = (&t == &scalar_kernels()) ? Isa::Scalar : Isa::Avx2;
    state().table = &t;
}

const KernelTable& kernels() noexcept { return *state().table.load(std::memory_order_relaxed); }

}  // namespace stylo::simd
