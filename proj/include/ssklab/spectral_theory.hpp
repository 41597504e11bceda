#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ssklab/types.hpp"

namespace ssklab {

enum class LawKind { semicircle, marchenko_pastur };

// Limiting spectral measure nu: the semicircle law on [-2, 2] or the
// Marchenko-Pastur law with ratio d = K/N >= 1 on [(sqrt d - 1)^2, (sqrt d + 1)^2].
class LimitLaw {
public:
    static LimitLaw semicircle();
    static LimitLaw marchenko_pastur(double d);

    LawKind kind() const { return kind_; }
    double d() const { return d_; }
    double c_minus() const { return c_minus_; }
    double c_plus() const { return c_plus_; }
    double s_nu() const { return s_nu_; }
    std::string_view name() const;

    double density(double x) const;
    // nu([x, C+]).
    double cdf_tail(double x) const;

    // Integral of f against nu by adaptive quadrature in the angle variable
    // x = c - r cos(theta), which absorbs the square-root edges.
    double integrate(const std::function<double(double)>& f, double rel_tol = 1e-13) const;
    // Same, passing f both x and the edge gap C+ - x (accurate where x rounds to C+).
    double integrate_with_gap(const std::function<double(double, double)>& f, double rel_tol = 1e-13) const;

private:
    LimitLaw(LawKind kind, double d);
    LawKind kind_;
    double d_;
    double c_minus_, c_plus_, s_nu_;
};

enum class Regime { high, low };
std::string_view to_string(Regime r);

struct TheoryConstants {
    double beta = 0.0;
    Symmetry symmetry = Symmetry::real;
    double beta_c = 0.0;
    double gamma_hat = 0.0;  // NaN in the low-temperature regime
    double F = 0.0;
    double ell = 0.0;        // NaN in the low-temperature regime
    double sigma2 = 0.0;     // NaN in the low-temperature regime
    double f0 = 0.0;
    double f2 = 0.0;         // NaN in the low-temperature regime
    Regime regime = Regime::high;
};

struct CltConstants {
    double ell;
    double sigma2;
};

// m(z) = int dnu(x) / (x - z) for z off the support (z = C+ allowed).
std::complex<double> stieltjes(const LimitLaw& law, std::complex<double> z);
double stieltjes(const LimitLaw& law, double z);
// m'(z) for real z > C+, which equals int dnu / (z - x)^2.
double stieltjes_derivative(const LimitLaw& law, double z);
// Defining integrals evaluated by quadrature (independent of closed forms).
double stieltjes_quadrature(const LimitLaw& law, double z);
double stieltjes_derivative_quadrature(const LimitLaw& law, double z);

double beta_critical(const LimitLaw& law, Symmetry symmetry);

double gamma_hat(const LimitLaw& law, double beta, Symmetry symmetry);
double gamma_hat_generic(const LimitLaw& law, double beta, Symmetry symmetry);

// f0-type integral int log(z - x) dnu(x), z >= C+.
double nu_log_integral(const LimitLaw& law, double z);
double nu_log_integral_quadrature(const LimitLaw& law, double z);

double limit_free_energy(const LimitLaw& law, double beta, Symmetry symmetry);
double limit_free_energy_generic(const LimitLaw& law, double beta, Symmetry symmetry);

// Chebyshev coefficient tau_l of phi(x) = log(gamma_hat - x) on [-2, 2].
double chebyshev_tau(double gamma_hat_value, int ell);

// Chebyshev coefficients tau_0..tau_{max_ell} of an arbitrary smooth function
// on [-2, 2], from the periodic trapezoidal rule in the angle variable with
// grid doubling until the coefficients settle.
std::vector<double> chebyshev_coefficients(const std::function<double(double)>& phi, int max_ell,
                                           double tol = 1e-15);

double covariance_kernel_L(double z, double w);

// Gaussian mean and variance of N (F_N - F) in the high-temperature regime.
// `disorder.w2` and `disorder.W4` are the matrix-entry moments in the
// normalization of the given symmetry class (GOE: 2, 3; GUE: 1, 2).
CltConstants clt_mean_variance(const LimitLaw& law, double beta, const DisorderSpec& disorder,
                               Symmetry symmetry);
CltConstants clt_mean_variance_generic(const LimitLaw& law, double beta, const DisorderSpec& disorder,
                                       Symmetry symmetry);

TheoryConstants theory_constants(const LimitLaw& law, double beta, Symmetry symmetry,
                                 const DisorderSpec& disorder);

std::vector<double> classical_locations(const LimitLaw& law, int n);

struct TransitionReport {
    std::vector<double> h;
    std::vector<double> third_jump;    // F'''(beta_c+) - F'''(beta_c-) per h
    std::vector<double> second_jump;   // F''(beta_c+) - F''(beta_c-) per h
    std::vector<double> first_jump;
    double d2_below = 0.0, d2_above = 0.0;  // one-sided F'' at the smallest h
    double d1_below = 0.0, d1_above = 0.0;
    double jump = 0.0;                 // extrapolated to h -> 0
};

// One-sided second-order finite differences of F anchored at beta_c.
TransitionReport third_derivative_jump(const LimitLaw& law, std::span<const double> h_sequence,
                                       Symmetry symmetry = Symmetry::real);

}  // namespace ssklab
