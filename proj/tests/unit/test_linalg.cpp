#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ssklab/linalg.hpp"
#include "ssklab/rng.hpp"

using namespace ssklab;

namespace {

// det(A - x I) by Gaussian elimination with partial pivoting; for Hermitian A
// the determinant is real.
template <class T>
double char_poly(const DenseMatrix<T>& a, double x) {
    const std::size_t n = a.size();
    std::vector<T> m(a.data());
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= x;
    T det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
        if (m[p * n + k] == T{}) return 0.0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
            det = -det;
        }
        det *= m[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const T f = m[i * n + k] / m[k * n + k];
            for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
        }
    }
    return std::real(det);
}

// Roots of the characteristic polynomial by scanning for sign changes and bisecting.
template <class T>
std::vector<double> char_poly_roots(const DenseMatrix<T>& a) {
    const double r = frobenius_norm(a) + 1.0;
    const int grid = 200000;
    std::vector<double> roots;
    double x0 = -r, f0 = char_poly(a, x0);
    for (int i = 1; i <= grid; ++i) {
        const double x1 = -r + 2 * r * i / grid, f1 = char_poly(a, x1);
        if ((f0 > 0) != (f1 > 0)) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi), fm = char_poly(a, mid);
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    std::sort(roots.rbegin(), roots.rend());
    return roots;
}

RealMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    RandomStream r(seed);
    RealMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = r.normal();
    return a;
}

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    RandomStream r(seed);
    ComplexMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = r.normal();
        for (std::size_t j = 0; j < i; ++j) {
            a(i, j) = {r.normal(), r.normal()};
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

template <class T>
std::vector<double> eigenvalues_of(const DenseMatrix<T>& a) {
    return tridiagonal_eigenvalues(householder_tridiagonalize(a).tri);
}

}  // namespace

TEST_CASE("symmetric 5x5 eigenvalues match characteristic polynomial roots") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto a = random_symmetric(5, seed);
        const auto ev = eigenvalues_of(a);
        const auto roots = char_poly_roots(a);
        REQUIRE(roots.size() == 5);
        for (int i = 0; i < 5; ++i) CHECK(ev[i] == doctest::Approx(roots[i]).epsilon(1e-8));
    }
}

TEST_CASE("Hermitian 5x5 eigenvalues match characteristic polynomial roots") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto a = random_hermitian(5, seed);
        const auto ev = eigenvalues_of(a);
        const auto roots = char_poly_roots(a);
        REQUIRE(roots.size() == 5);
        for (int i = 0; i < 5; ++i) CHECK(ev[i] == doctest::Approx(roots[i]).epsilon(1e-8));
    }
}

TEST_CASE("known spectra") {
    // Path-graph Laplacian-like tridiagonal: eigenvalues 2 cos(k pi / (n + 1)).
    const int n = 50;
    Tridiagonal t{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 1.0)};
    const auto ev = tridiagonal_eigenvalues(t);
    for (int k = 1; k <= n; ++k) CHECK(ev[k - 1] == doctest::Approx(2 * std::cos(k * M_PI / (n + 1))).epsilon(1e-13));
    // Diagonal and 1x1 cases.
    CHECK(tridiagonal_eigenvalues({{3.0}, {}}) == std::vector<double>{3.0});
    const auto d = tridiagonal_eigenvalues({{1.0, -2.0, 5.0}, {0.0, 0.0}});
    CHECK(d == std::vector<double>{5.0, 1.0, -2.0});
}

TEST_CASE("trace and eigenpair residuals on larger matrices") {
    const auto a = random_symmetric(120, 9);
    const auto h = householder_tridiagonalize(a);
    const auto ev = tridiagonal_eigenvalues(h.tri);
    double tr = 0, sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) tr += a(i, i);
    for (double v : ev) sum += v;
    CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
    for (std::size_t k : {std::size_t{0}, std::size_t{60}, std::size_t{119}}) {
        const auto y = tridiagonal_eigenvector(h.tri, ev[k]);
        const auto v = back_transform(h, y);
        CHECK(eigen_residual(a, v, ev[k]) < 1e-10 * frobenius_norm(a));
    }
    const auto c = random_hermitian(80, 10);
    const auto hc = householder_tridiagonalize(c);
    const auto evc = tridiagonal_eigenvalues(hc.tri);
    const auto vc = back_transform(hc, tridiagonal_eigenvector(hc.tri, evc[0]));
    CHECK(eigen_residual(c, vc, evc[0]) < 1e-10 * frobenius_norm(c));
    CHECK(asymmetry(c) == 0.0);
}
