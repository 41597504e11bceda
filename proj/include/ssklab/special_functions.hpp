#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ssklab {

double log_gamma(double x);

// Airy function and derivative on t >= 4 (decaying regime only).
double airy_ai(double t);
double airy_ai_prime(double t);
// The asymptotic expansion alone, optimally truncated (exposed for tests).
double airy_ai_asymptotic(double t);

double gaussian_cdf(double x, double mean, double variance);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

enum class TWKind { tw1, tw2 };

// Tracy-Widom CDFs F1, F2 on a uniform grid, from the Hastings-McLeod
// solution of Painleve II integrated backward from s = 8.
struct TWTable {
    double s_min = -10.0, s_max = 8.0, ds = 0.005;
    double tol = 1e-16;
    std::vector<double> grid;
    std::vector<double> q, qp;     // Hastings-McLeod q and q'
    std::vector<double> u, v, w;   // int q^2, int (x-s) q^2, int q over [s, inf)
    std::vector<double> f1, f2;    // CDFs
    std::vector<double> d1, d2;    // densities
    double abs_err_bound = 0.0;    // sup difference against a half-tolerance rebuild, if computed

    static TWTable build(double tol = 1e-16, double ds = 0.005);

    double cdf(double s, TWKind which) const;
    double density(double s, TWKind which) const;
    // Clamped to the table's end values outside [s_min, s_max].
    double cdf_clamped(double s, TWKind which) const;

    struct Moments {
        double mean, variance;
    };
    Moments moments(TWKind which) const;
};

// Shared default table (tol 1e-16), built on first use.
const TWTable& tw_table();

double tracy_widom_cdf(double s, TWKind which);

}  // namespace ssklab
