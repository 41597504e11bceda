#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssklab/errors.hpp"
#include "ssklab/rng.hpp"
#include "ssklab/special_functions.hpp"

using namespace ssklab;

namespace {

// Maclaurin series of Ai and Ai' in long double; cancellation limits it to
// about 1e-10 relative accuracy for t <= 6.
std::pair<long double, long double> airy_series(long double x) {
    const long double c1 = 0.355028053887817239260L, c2 = 0.258819403792806798405L;
    long double f = 1, g = x, fp = 0, gp = 1, tf = 1, tg = x;
    const long double x3 = x * x * x;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0L * k - 1) * (3.0L * k));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1));
        f += tf;
        g += tg;
        fp += tf * 3.0L * k / x;
        gp += tg * (3.0L * k + 1) / x;
        if (tf < 1e-30L * f && tg < 1e-30L * g) break;
    }
    return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

}  // namespace

TEST_CASE("log gamma") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.7, 10.0, 55.5, 1e5})
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1e-14));
    CHECK(std::abs(log_gamma(1.0)) < 1e-14);
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("Airy function in the decaying regime") {
    for (double t : {4.0, 4.5, 5.0, 5.5, 6.0}) {
        const auto [ai, aip] = airy_series(t);
        CHECK(airy_ai(t) == doctest::Approx(static_cast<double>(ai)).epsilon(1e-9));
        CHECK(airy_ai_prime(t) == doctest::Approx(static_cast<double>(aip)).epsilon(1e-9));
    }
    CHECK(airy_ai(6.0) == doctest::Approx(9.94769436025289e-6).epsilon(1e-12));
    // Wronskian-free consistency at large t: integral form vs asymptotic series.
    for (double t : {8.0, 12.0, 20.0}) CHECK(airy_ai(t) == doctest::Approx(airy_ai_asymptotic(t)).epsilon(1e-13));
    // Airy equation Ai'' = t Ai by central differences of Ai'.
    for (double t : {4.5, 7.0, 9.0}) {
        const double h = 1e-4;
        const double d2 = (airy_ai_prime(t + h) - airy_ai_prime(t - h)) / (2 * h);
        CHECK(d2 == doctest::Approx(t * airy_ai(t)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(airy_ai(1.0), DomainError);
}

TEST_CASE("Gaussian CDF and KS statistics") {
    CHECK(gaussian_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(gaussian_cdf(1.0, 0.0, 1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(gaussian_cdf(3.0, 1.0, 4.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_cdf(0.0, 0.0, 0.0), DomainError);

    CHECK(ks_statistic({0.5, 0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_statistic({1.0}, [](double x) { return x; }), ValidationError);
    // KS null behaviour: 1e4 Gaussian draws give D around 0.87 / 100; 0.03 is far in the tail.
    RandomStream r(3);
    std::vector<double> z(10000);
    for (auto& v : z) v = 0.2 + 0.5 * r.normal();
    CHECK(ks_statistic(z, [](double x) { return gaussian_cdf(x, 0.2, 0.25); }) < 0.03);
    CHECK(ks_statistic(z, [](double x) { return gaussian_cdf(x, 0.4, 0.25); }) > 0.1);
    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_two_sample({1, 2}, {3, 4}) == 1.0);
}

TEST_CASE("Tracy-Widom tables") {
    const auto& t = tw_table();
    const auto m1 = t.moments(TWKind::tw1), m2 = t.moments(TWKind::tw2);
    CHECK(m1.mean == doctest::Approx(-1.2065335745820).epsilon(1e-9));
    CHECK(m1.variance == doctest::Approx(1.607781034581).epsilon(1e-9));
    CHECK(m2.mean == doctest::Approx(-1.771086807411).epsilon(1e-9));
    CHECK(m2.variance == doctest::Approx(0.8131947928329).epsilon(1e-9));
    CHECK(t.cdf(-2.0, TWKind::tw2) == doctest::Approx(0.41322414250512257).epsilon(1e-7));

    // Monotone CDFs.
    for (std::size_t i = 1; i < t.grid.size(); ++i) {
        REQUIRE(t.f1[i] >= t.f1[i - 1]);
        REQUIRE(t.f2[i] >= t.f2[i - 1]);
    }
    CHECK(t.f1.back() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(t.f2.front() < 1e-30);

    // Hastings-McLeod: q ~ Ai at +inf, q ~ sqrt(-s/2) at -inf, and Painleve II residual.
    CHECK(t.q.back() == doctest::Approx(airy_ai(8.0)).epsilon(1e-10));
    CHECK(t.q.front() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-3));
    // 40-digit Taylor-series ODE solution from the same Airy data at s = 8.
    auto q_at = [&](double s) { return t.q[static_cast<std::size_t>(std::llround((s - t.s_min) / t.ds))]; };
    CHECK(std::abs(q_at(0.0) - 0.36706155154807837547) < 1e-13);
    CHECK(std::abs(q_at(-4.0) - 1.4111769293623321807) < 1e-11);
    CHECK(std::abs(q_at(-7.0) - 1.8701372748420770607) < 1e-9);
    const double h = t.grid[1] - t.grid[0];
    double worst = 0;
    for (std::size_t i = 2; i + 2 < t.grid.size(); ++i) {
        const double d2 = (-t.q[i + 2] + 16 * t.q[i + 1] - 30 * t.q[i] + 16 * t.q[i - 1] - t.q[i - 2]) / (12 * h * h);
        worst = std::max(worst, std::abs(d2 - t.grid[i] * t.q[i] - 2 * std::pow(t.q[i], 3)));
    }
    INFO("worst Painleve residual " << worst);
    CHECK(worst < 1e-7);

    // Densities integrate to one and match the difference quotient of the CDF.
    CHECK(t.density(-1.0, TWKind::tw2) ==
          doctest::Approx((t.cdf(-1.0 + 1e-4, TWKind::tw2) - t.cdf(-1.0 - 1e-4, TWKind::tw2)) / 2e-4).epsilon(1e-5));
    CHECK_THROWS_AS(t.cdf(-11.0, TWKind::tw1), DomainError);
    CHECK(t.cdf_clamped(20.0, TWKind::tw1) == t.f1.back());
    CHECK(tracy_widom_cdf(0.0, TWKind::tw1) == t.cdf(0.0, TWKind::tw1));
}

TEST_CASE("Tracy-Widom tables are stable under step halving") {
    const auto& coarse = tw_table();
    const auto fine = TWTable::build(coarse.tol / 2, coarse.ds / 2);
    double sup = 0;
    for (std::size_t i = 0; i < fine.grid.size(); ++i) {
        sup = std::max(sup, std::abs(coarse.cdf(fine.grid[i], TWKind::tw1) - fine.f1[i]));
        sup = std::max(sup, std::abs(coarse.cdf(fine.grid[i], TWKind::tw2) - fine.f2[i]));
    }
    CHECK(sup < 1e-7);
}
