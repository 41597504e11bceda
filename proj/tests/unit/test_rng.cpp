#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ssklab/rng.hpp"

using namespace ssklab;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and seeds separate them") {
    RandomStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs = differs || x != c.next_u64();
    }
    CHECK(differs);
}

TEST_CASE("derived seeds are distinct across indices and masters") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m)
        for (std::uint64_t i = 0; i < 2000; ++i) seen.insert(derive_seed(m, i));
    CHECK(seen.size() == 8000);
}

namespace {
struct Moments {
    double mean = 0, var = 0;
};
template <class F>
Moments sample_moments(F draw, int n) {
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    return {m, s2 / n - m * m};
}
}  // namespace

TEST_CASE("variate transforms have the right first two moments") {
    RandomStream r(7);
    const int n = 200000;
    // Tolerances are 5 standard errors of the sample mean / variance.
    const auto u = sample_moments([&] { return r.uniform(); }, n);
    CHECK(std::abs(u.mean - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(u.var - 1.0 / 12) < 5 * std::sqrt(1.0 / 180 / n));

    const auto g = sample_moments([&] { return r.normal(); }, n);
    CHECK(std::abs(g.mean) < 5 / std::sqrt(n));
    CHECK(std::abs(g.var - 1.0) < 5 * std::sqrt(2.0 / n));

    for (double shape : {0.5, 1.0, 3.7, 40.0}) {
        const auto m = sample_moments([&] { return r.gamma(shape); }, n);
        CHECK(std::abs(m.mean - shape) < 5 * std::sqrt(shape / n));
        CHECK(std::abs(m.var - shape) < 5 * std::sqrt((6 * shape + 2 * shape * shape) / n));
    }
    // chi_k^2 has mean k and variance 2k.
    for (double dof : {1.0, 2.0, 7.0, 2.5}) {
        const auto m = sample_moments([&] { const double x = r.chi(dof); return x * x; }, n);
        CHECK(std::abs(m.mean - dof) < 5 * std::sqrt(2 * dof / n));
    }
    const auto rad = sample_moments([&] { return r.rademacher(); }, n);
    CHECK(std::abs(rad.var - 1.0) < 1e-3);
}

TEST_CASE("uniform ranges") {
    RandomStream r(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform(), v = r.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}
