#include "ssklab/spectral_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssklab/errors.hpp"
#include "ssklab/numerics.hpp"

namespace ssklab {

namespace {

constexpr double kPi = M_PI;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite_positive(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and > 0");
}

}  // namespace

LimitLaw::LimitLaw(LawKind kind, double d) : kind_(kind), d_(d) {
    if (kind == LawKind::semicircle) {
        c_minus_ = -2.0;
        c_plus_ = 2.0;
        s_nu_ = 1.0 / kPi;
    } else {
        const double sd = std::sqrt(d);
        c_minus_ = (sd - 1.0) * (sd - 1.0);
        c_plus_ = (sd + 1.0) * (sd + 1.0);
        s_nu_ = std::pow(d, 0.25) / (kPi * c_plus_);
    }
}

LimitLaw LimitLaw::semicircle() { return LimitLaw(LawKind::semicircle, 1.0); }

LimitLaw LimitLaw::marchenko_pastur(double d) {
    if (!(d >= 1.0) || !std::isfinite(d)) throw DomainError("Marchenko-Pastur ratio d must be >= 1");
    return LimitLaw(LawKind::marchenko_pastur, d);
}

std::string_view LimitLaw::name() const {
    return kind_ == LawKind::semicircle ? "semicircle" : "marchenko_pastur";
}

double LimitLaw::density(double x) const {
    if (x <= c_minus_ || x >= c_plus_) return 0.0;
    const double root = std::sqrt((c_plus_ - x) * (x - c_minus_));
    if (kind_ == LawKind::semicircle) return root / (2.0 * kPi);
    return root / (2.0 * kPi * x);
}

double LimitLaw::cdf_tail(double x) const {
    if (x >= c_plus_) return 0.0;
    if (x <= c_minus_) return 1.0;
    if (kind_ == LawKind::semicircle) {
        return 0.5 - x * std::sqrt(4.0 - x * x) / (4.0 * kPi) - std::asin(0.5 * x) / kPi;
    }
    // Angle substitution x = c - r cos(theta) makes the MP tail elementary.
    const double c = d_ + 1.0, r = 2.0 * std::sqrt(d_);
    const double theta0 = std::acos(std::clamp((c - x) / r, -1.0, 1.0));
    double value = -r * std::sin(theta0) + c * (kPi - theta0);
    if (d_ > 1.0) {
        const double inner = 2.0 / (d_ - 1.0) *
                             (0.5 * kPi - std::atan(std::sqrt(c_plus_ / c_minus_) * std::tan(0.5 * theta0)));
        value -= (d_ - 1.0) * (d_ - 1.0) * inner;
    }
    return std::clamp(value / (2.0 * kPi), 0.0, 1.0);
}

double LimitLaw::integrate(const std::function<double(double)>& f, double rel_tol) const {
    return integrate_with_gap([&](double x, double) { return f(x); }, rel_tol);
}

double LimitLaw::integrate_with_gap(const std::function<double(double, double)>& f, double rel_tol) const {
    const double r = 0.5 * (c_plus_ - c_minus_);
    const bool mp = kind_ == LawKind::marchenko_pastur;
    auto g = [&](double theta) {
        const double s = std::sin(theta);
        // x = c - r cos(theta), with x and C+ - x both kept accurate near the edges.
        const double lo = 2.0 * r * std::pow(std::sin(0.5 * theta), 2);  // x - C-
        const double hi = 2.0 * r * std::pow(std::cos(0.5 * theta), 2);  // C+ - x
        const double x = theta < 0.5 * kPi ? c_minus_ + lo : c_plus_ - hi;
        const double h = mp ? 1.0 / (2.0 * kPi * x) : 1.0 / (2.0 * kPi);
        return f(x, hi) * h * r * r * s * s;
    };
    // Extra breakpoints near both ends help endpoint singularities of f.
    const double bp[] = {0.0, 1e-3, 0.05, 0.5 * kPi, kPi - 0.05, kPi - 1e-3, kPi};
    QuadResult q = integrate_gk(g, bp, 1e-300, rel_tol, 8000);
    if (!q.converged && q.abs_err > 1e-8 * std::max(1.0, std::abs(q.value)))
        throw NumericError("integration against " + std::string(name()) + " did not converge");
    return q.value;
}

std::string_view to_string(Regime r) { return r == Regime::high ? "high" : "low"; }

std::complex<double> stieltjes(const LimitLaw& law, std::complex<double> z) {
    const double cm = law.c_minus(), cp = law.c_plus();
    if (z.imag() == 0.0 && z.real() >= cm && z.real() < cp)
        throw DomainError("stieltjes: z lies inside the support");
    // Rationalized closed forms; the textbook (-z + R) / 2 cancels for large |z|.
    if (law.kind() == LawKind::semicircle) return -2.0 / (z + std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
    if (z == 0.0) throw DomainError("stieltjes: z = 0 not supported for Marchenko-Pastur");
    const double d = law.d();
    return -2.0 / (z - (d - 1.0) + std::sqrt(z - cp) * std::sqrt(z - cm));
}

double stieltjes(const LimitLaw& law, double z) { return stieltjes(law, std::complex<double>(z, 0.0)).real(); }

double stieltjes_derivative(const LimitLaw& law, double z) {
    if (!(z > law.c_plus())) throw DomainError("stieltjes_derivative: need z > C+");
    if (law.kind() == LawKind::semicircle) {
        const double R = std::sqrt(z * z - 4.0);
        return 2.0 / (R * (z + R));
    }
    const double cm = law.c_minus(), cp = law.c_plus(), d = law.d();
    const double R = std::sqrt((z - cp) * (z - cm));
    const double den = z - (d - 1.0) + R;
    return 2.0 * (1.0 + (z - (d + 1.0)) / R) / (den * den);
}

double stieltjes_quadrature(const LimitLaw& law, double z) {
    if (z >= law.c_minus() && z < law.c_plus()) throw DomainError("stieltjes: z lies inside the support");
    if (z >= law.c_plus()) {
        const double delta = z - law.c_plus();
        return law.integrate_with_gap([delta](double, double gap) { return -1.0 / (gap + delta); });
    }
    return law.integrate([z](double x) { return 1.0 / (x - z); });
}

double stieltjes_derivative_quadrature(const LimitLaw& law, double z) {
    if (!(z > law.c_plus())) throw DomainError("stieltjes_derivative: need z > C+");
    const double delta = z - law.c_plus();
    return law.integrate_with_gap([delta](double, double gap) { return 1.0 / ((gap + delta) * (gap + delta)); });
}

double beta_critical(const LimitLaw& law, Symmetry symmetry) {
    const double bc = -0.5 * stieltjes(law, law.c_plus());
    return symmetry == Symmetry::real ? bc : 2.0 * bc;
}

double gamma_hat(const LimitLaw& law, double beta, Symmetry symmetry) {
    require_finite_positive(beta);
    const double b = effective_beta(beta, symmetry);
    if (!(b < beta_critical(law, Symmetry::real)))
        throw RegimeError("gamma_hat is defined only for beta < beta_c");
    if (law.kind() == LawKind::semicircle) return 2.0 * b + 1.0 / (2.0 * b);
    return law.d() / (1.0 - 2.0 * b) + 1.0 / (2.0 * b);
}

double gamma_hat_generic(const LimitLaw& law, double beta, Symmetry symmetry) {
    require_finite_positive(beta);
    const double b = effective_beta(beta, symmetry);
    const double bc = -0.5 * stieltjes_quadrature(law, law.c_plus());
    if (!(b < bc)) throw RegimeError("gamma_hat is defined only for beta < beta_c");
    const double cp = law.c_plus();
    auto fdf = [&](double g) {
        const double m = stieltjes_quadrature(law, g);
        // m' blows up at the edge; let the bracket logic bisect there.
        const double dm = g - cp < 1e-6 ? std::numeric_limits<double>::quiet_NaN()
                                        : stieltjes_derivative_quadrature(law, g);
        return std::pair<double, double>{-m - 2.0 * b, -dm};
    };
    return bracketed_newton(fdf, cp + 1e-12, cp + std::max(10.0, 1.0 / b), 1e-15, 1e-13);
}

double nu_log_integral(const LimitLaw& law, double z) {
    const double cp = law.c_plus();
    if (!(z >= cp)) throw DomainError("nu_log_integral: need z >= C+");
    if (law.kind() == LawKind::semicircle) {
        const double R = std::sqrt(z * z - 4.0);
        return 0.25 * z * (z - R) + std::log(z + R) - std::log(2.0) - 0.5;
    }
    const double b = -0.5 * stieltjes(law, z);
    const double d = law.d();
    return 2.0 * b * d / (1.0 - 2.0 * b) + d * std::log1p(-2.0 * b) - std::log(2.0 * b);
}

double nu_log_integral_quadrature(const LimitLaw& law, double z) {
    if (!(z >= law.c_plus())) throw DomainError("nu_log_integral: need z >= C+");
    const double delta = z - law.c_plus();
    return law.integrate_with_gap([delta](double, double gap) { return std::log(gap + delta); });
}

namespace {

double free_energy_real(const LimitLaw& law, double b, bool generic) {
    const double bc = generic ? -0.5 * stieltjes_quadrature(law, law.c_plus()) : beta_critical(law, Symmetry::real);
    auto f0 = [&](double z) { return generic ? nu_log_integral_quadrature(law, z) : nu_log_integral(law, z); };
    if (b < bc) {
        const double g = generic ? gamma_hat_generic(law, b, Symmetry::real) : gamma_hat(law, b, Symmetry::real);
        return b * g - 0.5 * (f0(g) + 1.0 + std::log(2.0 * b));
    }
    const double cp = law.c_plus();
    return b * cp - 0.5 * (f0(cp) + 1.0 + std::log(2.0 * b));
}

}  // namespace

double limit_free_energy(const LimitLaw& law, double beta, Symmetry symmetry) {
    require_finite_positive(beta);
    const double F = free_energy_real(law, effective_beta(beta, symmetry), false);
    return symmetry == Symmetry::real ? F : 2.0 * F;
}

double limit_free_energy_generic(const LimitLaw& law, double beta, Symmetry symmetry) {
    require_finite_positive(beta);
    const double F = free_energy_real(law, effective_beta(beta, symmetry), true);
    return symmetry == Symmetry::real ? F : 2.0 * F;
}

double chebyshev_tau(double gamma_hat_value, int ell) {
    if (!(gamma_hat_value > 2.0)) throw DomainError("chebyshev_tau: need gamma_hat > 2");
    if (ell < 0) throw DomainError("chebyshev_tau: need ell >= 0");
    const double g = gamma_hat_value;
    // rho = 2 beta(gamma_hat), the smaller root of rho + 1/rho = gamma_hat.
    const double rho = 2.0 / (g + std::sqrt(g * g - 4.0));
    if (ell == 0) return -std::log(rho);
    double t = -rho;  // t_1
    for (int k = 1; k < ell; ++k) t *= rho * static_cast<double>(k) / static_cast<double>(k + 1);
    return t;
}

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& phi, int max_ell, double tol) {
    if (max_ell < 0) throw DomainError("chebyshev_coefficients: need max_ell >= 0");
    std::vector<double> prev;
    int M = 64;
    while (M < 4 * (max_ell + 1)) M *= 2;
    for (; M <= (1 << 20); M *= 2) {
        // theta_j = pi j / (M/2) over the half period, using the cosine symmetry.
        const int half = M / 2;
        std::vector<double> vals(half + 1);
        for (int j = 0; j <= half; ++j) vals[j] = phi(2.0 * std::cos(2.0 * kPi * j / M));
        std::vector<double> tau(max_ell + 1);
        std::vector<double> terms(half + 1);
        for (int l = 0; l <= max_ell; ++l) {
            for (int j = 0; j <= half; ++j) {
                const double w = (j == 0 || j == half) ? 1.0 : 2.0;
                terms[j] = w * vals[j] * std::cos(2.0 * kPi * static_cast<double>((static_cast<long long>(l) * j) % M) / M);
            }
            tau[l] = pairwise_sum(terms) / M;
        }
        if (!prev.empty()) {
            double diff = 0.0, scale = 1.0;
            for (int l = 0; l <= max_ell; ++l) {
                diff = std::max(diff, std::abs(tau[l] - prev[l]));
                scale = std::max(scale, std::abs(tau[l]));
            }
            if (diff <= tol * scale) return tau;
        }
        prev = std::move(tau);
    }
    throw NumericError("chebyshev_coefficients did not converge");
}

double covariance_kernel_L(double z, double w) {
    if (!(z > 2.0) || !(w > 2.0)) throw DomainError("covariance_kernel_L: arguments must exceed 2");
    const double Rz = std::sqrt(z * z - 4.0), Rw = std::sqrt(w * w - 4.0);
    return 2.0 * kPi * kPi * std::log((z + Rz) * (w + Rw) / (2.0 * (z * w - 4.0 + Rz * Rw)));
}

namespace {

struct KernelPieces {
    double ell1, m_goe, v_goe, tau1, tau2, tau4;
};

CltConstants assemble(LawKind kind, Symmetry sym, const DisorderSpec& dis, const KernelPieces& k) {
    double M, V;
    if (kind == LawKind::semicircle) {
        if (sym == Symmetry::real) {
            M = k.m_goe + k.tau2 * (dis.w2 - 2.0) + k.tau4 * (dis.W4 - 3.0);
            V = k.v_goe + k.tau1 * k.tau1 * (dis.w2 - 2.0) + 2.0 * k.tau2 * k.tau2 * (dis.W4 - 3.0);
        } else {
            M = k.tau2 * (dis.w2 - 1.0) + k.tau4 * (dis.W4 - 2.0);
            V = 0.5 * k.v_goe + k.tau1 * k.tau1 * (dis.w2 - 1.0) + 2.0 * k.tau2 * k.tau2 * (dis.W4 - 2.0);
        }
    } else {
        if (sym == Symmetry::real) {
            M = k.m_goe - (dis.W4 - 3.0) * k.tau2;
            V = k.v_goe + (dis.W4 - 3.0) * k.tau1 * k.tau1;
        } else {
            M = -(dis.W4 - 2.0) * k.tau2;
            V = 0.5 * k.v_goe + (dis.W4 - 2.0) * k.tau1 * k.tau1;
        }
    }
    if (sym == Symmetry::real) return {k.ell1 - 0.5 * M, 0.25 * V};
    return {k.ell1 - M, V};
}

}  // namespace

CltConstants clt_mean_variance(const LimitLaw& law, double beta, const DisorderSpec& disorder, Symmetry symmetry) {
    require_finite_positive(beta);
    disorder.validate();
    const double b = effective_beta(beta, symmetry);
    if (!(b < beta_critical(law, Symmetry::real))) throw RegimeError("CLT constants need beta < beta_c");
    // Both laws reduce to Chebyshev data of log(z' - x) with z' = rho + 1/rho.
    double rho;
    if (law.kind() == LawKind::semicircle) {
        rho = 2.0 * b;
    } else {
        rho = 2.0 * b * std::sqrt(law.d()) / (1.0 - 2.0 * b);
    }
    const double one_m = std::log1p(-rho * rho);
    KernelPieces k{};
    k.ell1 = 0.5 * one_m;
    k.m_goe = 0.5 * one_m;
    k.v_goe = -2.0 * one_m;
    k.tau1 = -rho;
    k.tau2 = -0.5 * rho * rho;
    k.tau4 = -0.25 * rho * rho * rho * rho;
    return assemble(law.kind(), symmetry, disorder, k);
}

CltConstants clt_mean_variance_generic(const LimitLaw& law, double beta, const DisorderSpec& disorder,
                                       Symmetry symmetry) {
    require_finite_positive(beta);
    disorder.validate();
    const double b = effective_beta(beta, symmetry);
    const double g = gamma_hat_generic(law, b, Symmetry::real);
    const double f2 = stieltjes_derivative_quadrature(law, g);
    KernelPieces k{};
    k.ell1 = std::log(2.0 * b) - 0.5 * std::log(f2);

    std::function<double(double)> phi;
    if (law.kind() == LawKind::semicircle) {
        phi = [g](double x) { return std::log(g - x); };
    } else {
        const double d = law.d(), sd = std::sqrt(d);
        phi = [g, d, sd](double x) { return std::log(g - (d + 1.0) - sd * x); };
    }
    // Grow the coefficient count until the variance series tail is negligible.
    std::vector<double> tau;
    for (int L = 64;; L *= 2) {
        tau = chebyshev_coefficients(phi, L);
        const double last = 2.0 * L * tau[L] * tau[L];
        if (last < 1e-16) break;
        if (L > (1 << 14)) throw NumericError("variance series did not converge");
    }
    std::vector<double> terms;
    for (std::size_t l = 1; l < tau.size(); ++l) terms.push_back(2.0 * static_cast<double>(l) * tau[l] * tau[l]);
    k.v_goe = pairwise_sum(terms);
    k.m_goe = 0.25 * (phi(2.0) + phi(-2.0)) - 0.5 * tau[0];
    k.tau1 = tau[1];
    k.tau2 = tau[2];
    k.tau4 = tau[4];
    return assemble(law.kind(), symmetry, disorder, k);
}

TheoryConstants theory_constants(const LimitLaw& law, double beta, Symmetry symmetry, const DisorderSpec& disorder) {
    require_finite_positive(beta);
    TheoryConstants t;
    t.beta = beta;
    t.symmetry = symmetry;
    t.beta_c = beta_critical(law, symmetry);
    t.F = limit_free_energy(law, beta, symmetry);
    const double b = effective_beta(beta, symmetry);
    if (b < beta_critical(law, Symmetry::real)) {
        t.regime = Regime::high;
        t.gamma_hat = gamma_hat(law, beta, symmetry);
        t.f0 = nu_log_integral(law, t.gamma_hat);
        t.f2 = stieltjes_derivative(law, t.gamma_hat);
        const CltConstants c = clt_mean_variance(law, beta, disorder, symmetry);
        t.ell = c.ell;
        t.sigma2 = c.sigma2;
    } else {
        t.regime = Regime::low;
        t.gamma_hat = kNaN;
        t.f0 = nu_log_integral(law, law.c_plus());
        t.f2 = kNaN;
        t.ell = kNaN;
        t.sigma2 = kNaN;
    }
    return t;
}

std::vector<double> classical_locations(const LimitLaw& law, int n) {
    if (n < 1) throw DomainError("classical_locations: need n >= 1");
    std::vector<double> out(n);
    const double cm = law.c_minus(), cp = law.c_plus();
    for (int k = 1; k <= n; ++k) {
        const double target = (k - 0.5) / n;
        double lo = cm, hi = cp;  // cdf_tail decreasing: tail(lo)=1, tail(hi)=0
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (law.cdf_tail(mid) > target)
                lo = mid;
            else
                hi = mid;
        }
        out[k - 1] = 0.5 * (lo + hi);
    }
    return out;
}

TransitionReport third_derivative_jump(const LimitLaw& law, std::span<const double> hs, Symmetry symmetry) {
    if (hs.empty()) throw ValidationError("third_derivative_jump: empty h sequence");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0.0) || hs[i] > 1e-2) throw ValidationError("third_derivative_jump: need 0 < h <= 1e-2");
        if (hs[i] < 1e-4) throw ValidationError("third_derivative_jump: h < 1e-4 loses double precision");
        if (i > 0 && !(hs[i] < hs[i - 1])) throw ValidationError("third_derivative_jump: h must decrease");
    }
    const double bc = beta_critical(law, symmetry);
    auto F = [&](double beta) { return limit_free_energy(law, beta, symmetry); };
    TransitionReport rep;
    const double f0 = F(bc);
    for (double h : hs) {
        double up[5], dn[5];
        up[0] = dn[0] = f0;
        for (int k = 1; k <= 4; ++k) {
            up[k] = F(bc + k * h);
            dn[k] = F(bc - k * h);
        }
        const double d1u = (-3.0 * up[0] + 4.0 * up[1] - up[2]) / (2.0 * h);
        const double d1d = (3.0 * dn[0] - 4.0 * dn[1] + dn[2]) / (2.0 * h);
        const double d2u = (2.0 * up[0] - 5.0 * up[1] + 4.0 * up[2] - up[3]) / (h * h);
        const double d2d = (2.0 * dn[0] - 5.0 * dn[1] + 4.0 * dn[2] - dn[3]) / (h * h);
        const double d3u = (-5.0 * up[0] + 18.0 * up[1] - 24.0 * up[2] + 14.0 * up[3] - 3.0 * up[4]) / (2.0 * h * h * h);
        const double d3d = (5.0 * dn[0] - 18.0 * dn[1] + 24.0 * dn[2] - 14.0 * dn[3] + 3.0 * dn[4]) / (2.0 * h * h * h);
        rep.h.push_back(h);
        rep.first_jump.push_back(d1u - d1d);
        rep.second_jump.push_back(d2u - d2d);
        rep.third_jump.push_back(d3u - d3d);
        rep.d1_above = d1u;
        rep.d1_below = d1d;
        rep.d2_above = d2u;
        rep.d2_below = d2d;
    }
    // Stencil errors are O(h^2): least-squares fit jump(h) = J + a h^2.
    if (hs.size() == 1) {
        rep.jump = rep.third_jump[0];
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const double x = hs[i] * hs[i];
            sx += x;
            sy += rep.third_jump[i];
            sxx += x * x;
            sxy += x * rep.third_jump[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.jump = (sy - slope * sx) / n;
    }
    return rep;
}

}  // namespace ssklab
