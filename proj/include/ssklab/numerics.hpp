#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ssklab {

// Pairwise (cascade) summation; error grows like log n rather than n.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(std::span<const double> x) { return pairwise_sum(x.data(), x.size()); }

struct QuadResult {
    double value = 0.0;
    double abs_err = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod (10/21) quadrature. `breakpoints` must be
// increasing with at least two entries; they seed the initial panel set.
// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
QuadResult integrate_gk(const std::function<double(double)>& f, std::span<const double> breakpoints,
                        double abs_tol, double rel_tol, int max_intervals = 4000);

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        double rel_tol, int max_intervals = 4000);

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Root of a monotone function on [lo, hi] (sign change required). `fdf`
// returns (f(x), f'(x)); Newton steps are used when they stay inside the
// current bracket, bisection otherwise.
double bracketed_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                        double hi, double xtol, double ftol, int max_iter = 200);

// Plain bisection for a function with f(lo), f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter = 200);

}  // namespace ssklab
