#include "stylo/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using stylo::Rng;

TEST_CASE("rng streams are reproducible and seed-dependent") {
    Rng a(42);
    Rng b(42);
    Rng c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
}

TEST_CASE("splitmix64 matches published reference output") {
    // First outputs for state 1234567 from the reference C implementation.
    std::uint64_t s = 1234567;
    CHECK(stylo::splitmix64(s) == 6457827717110365317ULL);
    CHECK(stylo::splitmix64(s) == 3203168211198807973ULL);
}

TEST_CASE("below stays in range and covers it") {
    Rng rng(7);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++hist[v];
    }
    for (int h : hist) CHECK(h > 800);
    CHECK(rng.below(1) == 0);
    CHECK(rng.below(0) == 0);
}

TEST_CASE("uniform lies in [0,1)") {
    Rng rng(1);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("shuffle is a permutation") {
    Rng rng(99);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(std::span(v));
    CHECK_FALSE(std::is_sorted(v.begin(), v.end()));
    std::sort(v.begin(), v.end());
    for (int i = 0; i < 50; ++i) CHECK(v[i] == i);
}

TEST_CASE("derived seeds differ per stream") {
    CHECK(stylo::derive_seed(42, 0) != stylo::derive_seed(42, 1));
    CHECK(stylo::derive_seed(42, 0) != stylo::derive_seed(43, 0));
    CHECK(stylo::derive_seed(42, 5) == stylo::derive_seed(42, 5));
}
