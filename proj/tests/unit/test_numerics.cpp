#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "ssklab/errors.hpp"
#include "ssklab/numerics.hpp"

using namespace ssklab;

TEST_CASE("pairwise summation") {
    std::vector<double> x(1000001, 0.1);
    CHECK(pairwise_sum(x) == doctest::Approx(100000.1).epsilon(1e-14));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("Gauss-Kronrod integrates polynomials exactly and smooth functions accurately") {
    // Degree 30 is beyond the 21-point Kronrod rule on a single panel; adaptivity handles it.
    auto p = [](double x) { return std::pow(x, 30); };
    const auto r = integrate_gk(p, 0.0, 1.0, 0.0, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 31).epsilon(1e-14));

    auto cubic = [](double x) { return 3 * x * x * x - x + 2; };
    CHECK(integrate_gk(cubic, -1.0, 2.0, 0.0, 1e-14).value == doctest::Approx(3 * 15.0 / 4 - 1.5 + 6).epsilon(1e-14));
    CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI, 0.0, 1e-13).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    // Square-root endpoint singularity.
    const auto s = integrate_gk([](double x) { return std::sqrt(x); }, 0.0, 1.0, 0.0, 1e-12);
    CHECK(s.value == doctest::Approx(2.0 / 3).epsilon(1e-11));
    // Breakpoints.
    const std::vector<double> bp = {-1.0, 0.0, 1.0};
    CHECK(integrate_gk([](double x) { return std::abs(x); }, bp, 0.0, 1e-14).value ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre nodes integrate degree 2n-1 exactly") {
    for (int n : {1, 2, 5, 16, 40}) {
        const auto [x, w] = gauss_legendre(n);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
        const int deg = 2 * n - 2;  // even, nonzero integral
        double q = 0;
        for (int i = 0; i < n; ++i) q += w[i] * std::pow(x[i], deg);
        CHECK(q == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
    }
}

TEST_CASE("bracketed Newton and bisection") {
    auto fdf = [](double x) { return std::pair<double, double>{x * x - 2, 2 * x}; };
    CHECK(bracketed_newton(fdf, 0.0, 2.0, 1e-15, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // A derivative that misleads Newton must still converge through bisection.
    auto bad = [](double x) { return std::pair<double, double>{std::atan(x - 0.3), 1e-8}; };
    CHECK(bracketed_newton(bad, -5.0, 5.0, 1e-14, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(bisect([](double x) { return std::cos(x); }, 0.0, 3.0, 1e-14) == doctest::Approx(M_PI / 2).epsilon(1e-13));
    CHECK_THROWS_AS(bisect([](double x) { return x * x + 1; }, -1.0, 1.0, 1e-12), NumericError);
}
