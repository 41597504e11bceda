#include "ssklab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ssklab/errors.hpp"
#include "ssklab/numerics.hpp"
#include "ssklab/rng.hpp"
#include "ssklab/special_functions.hpp"

namespace ssklab {

namespace {

constexpr double kPi = M_PI;

// x - atan(x), accurate for small x.
double x_minus_atan(double x) {
    const double ax = std::abs(x);
    if (ax < 0.1) {
        const double x2 = x * x;
        double term = x * x2, s = 0.0;
        for (int k = 1; k <= 9; ++k) {
            s += (k % 2 ? 1.0 : -1.0) * term / (2 * k + 1);
            term *= x2;
        }
        return s;
    }
    return x - std::atan(x);
}

}  // namespace

GEvaluator::GEvaluator(std::vector<double> eigenvalues, double beta, Symmetry symmetry)
    : lambda_(std::move(eigenvalues)), beta_(beta), symmetry_(symmetry) {
    if (lambda_.empty()) throw ValidationError("GEvaluator: empty spectrum");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("GEvaluator: beta must be > 0");
    for (double v : lambda_)
        if (!std::isfinite(v)) throw ValidationError("GEvaluator: non-finite eigenvalue");
    std::sort(lambda_.begin(), lambda_.end(), std::greater<>());
    gap_.resize(lambda_.size());
    for (std::size_t j = 0; j < lambda_.size(); ++j) gap_[j] = lambda_[0] - lambda_[j];
}

GEvaluator::GEvaluator(const Spectrum& spectrum, double beta, Symmetry symmetry)
    : GEvaluator(spectrum.eigenvalues, beta, symmetry) {}

GEvaluator::GEvaluator(const Spectrum& spectrum, double beta)
    : GEvaluator(spectrum.eigenvalues, beta, spectrum.ensemble.symmetry) {}

double GEvaluator::exponent_scale() const {
    const double n = static_cast<double>(lambda_.size());
    return symmetry_ == Symmetry::real ? 0.5 * n : n;
}

double GEvaluator::g_real_offset(double u, int order) const {
    if (!(u > 0.0)) throw DomainError("G evaluated at or below the top eigenvalue");
    const std::size_t n = gap_.size();
    std::vector<double> terms(n);
    const double b = beta_eff();
    switch (order) {
        case 0:
            for (std::size_t j = 0; j < n; ++j) terms[j] = std::log(u + gap_[j]);
            return 2.0 * b * (lambda_[0] + u) - pairwise_sum(terms) / static_cast<double>(n);
        case 1:
            for (std::size_t j = 0; j < n; ++j) terms[j] = 1.0 / (u + gap_[j]);
            return 2.0 * b - pairwise_sum(terms) / static_cast<double>(n);
        default: {
            if (order < 0 || order > 4) throw DomainError("G derivative order must be 0..4");
            double fact = 1.0;
            for (int k = 2; k < order; ++k) fact *= k;
            for (std::size_t j = 0; j < n; ++j) terms[j] = std::pow(u + gap_[j], -order);
            const double sign = order % 2 == 0 ? 1.0 : -1.0;
            return sign * fact * pairwise_sum(terms) / static_cast<double>(n);
        }
    }
}

std::string_view to_string(FreeEnergyMethod m) {
    switch (m) {
        case FreeEnergyMethod::contour: return "contour";
        case FreeEnergyMethod::saddle: return "saddle";
        case FreeEnergyMethod::sphere_mc: return "sphere_mc";
        case FreeEnergyMethod::closed_form: return "closed_form";
    }
    return "contour";
}

FreeEnergyMethod parse_free_energy_method(std::string_view s) {
    if (s == "contour") return FreeEnergyMethod::contour;
    if (s == "saddle") return FreeEnergyMethod::saddle;
    if (s == "sphere_mc") return FreeEnergyMethod::sphere_mc;
    if (s == "closed_form") return FreeEnergyMethod::closed_form;
    throw ValidationError("unknown free-energy method '" + std::string(s) + "'");
}

std::complex<double> g_eval(const GEvaluator& ev, std::complex<double> z, int order) {
    if (order < 0 || order > 4) throw DomainError("g_eval: order must be 0..4");
    const auto& lam = ev.eigenvalues();
    if (z.imag() == 0.0) {
        for (double l : lam)
            if (z.real() == l) throw DomainError("g_eval: z coincides with an eigenvalue");
        if (z.real() < ev.lambda1()) throw DomainError("g_eval: real z must exceed the top eigenvalue");
    }
    const std::size_t n = lam.size();
    std::vector<double> re(n), im(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::complex<double> w = z - lam[j];
        const std::complex<double> t = order == 0 ? std::log(w) : std::pow(w, -order);
        re[j] = t.real();
        im[j] = t.imag();
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::complex<double> mean(pairwise_sum(re) * inv_n, pairwise_sum(im) * inv_n);
    const double b2 = 2.0 * ev.beta_eff();
    if (order == 0) return b2 * z - mean;
    double fact = 1.0;
    for (int k = 2; k < order; ++k) fact *= k;
    const double sign = order % 2 == 0 ? 1.0 : -1.0;
    std::complex<double> out = sign * fact * mean;
    if (order == 1) out += b2;
    return out;
}

namespace {

// Saddle offset u = gamma - lambda_1, the root of G'(lambda_1 + u) on (0, 1/(2 beta_eff)].
double saddle_offset(const GEvaluator& ev) {
    const double b = ev.beta_eff();
    const double floor = 1e-14 * std::max(1.0, std::abs(ev.lambda1()));
    const double hi = 1.0 / b;  // G'(hi) >= b > 0 for any spectrum
    if (ev.g_real_offset(floor, 1) >= 0.0) return floor;
    auto fdf = [&](double u) { return std::pair<double, double>{ev.g_real_offset(u, 1), ev.g_real_offset(u, 2)}; };
    return bracketed_newton(fdf, floor, hi, 1e-16, 1e-13 * std::max(1.0, 2.0 * b));
}

// Integrals of w(z) exp(K (G(z) - G(gamma))) along the upper half of the
// contour: the vertical segment gamma + i t, t in [0, T], followed (when the
// integrand is still non-negligible at t_cap) by a ray at angle 3 pi / 4,
// which is a Cauchy deformation of the remaining vertical tail.
class ContourIntegrator {
public:
    using Weight = std::function<std::complex<double>(std::complex<double> /*z - gamma*/)>;

    ContourIntegrator(const GEvaluator& ev, const ContourOptions& opts) : ev_(ev), opts_(opts) {
        u_ = saddle_offset(ev);
        const auto& lam = ev.eigenvalues();
        n_ = lam.size();
        a_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) a_[j] = u_ + (lam[0] - lam[j]);
        K_ = ev.exponent_scale();
        b_ = ev.beta_eff();
        g1_ = ev.g_real_offset(u_, 1);
        g2_ = ev.g_real_offset(u_, 2);
        width_ = 1.0 / std::sqrt(K_ * g2_);
        buf1_.resize(n_);
        buf2_.resize(n_);

        // Smallest T (up to t_cap) with log|f(T)| <= -80.
        auto decayed = [&](double t) { return log_magnitude(t) <= -80.0; };
        if (decayed(opts.t_cap)) {
            double hi = std::min(width_, opts.t_cap);
            while (!decayed(hi)) hi = std::min(2.0 * hi, opts.t_cap);
            double lo = hi * 0.5;
            if (decayed(lo)) lo = 0.0;
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                (decayed(mid) ? hi : lo) = mid;
            }
            T_ = hi;
            use_ray_ = false;
        } else {
            T_ = std::min(opts.t_cap, std::max(8.0 * width_, 20.0 / (2.0 * b_ * K_)));
            use_ray_ = true;
        }
    }

    double gamma() const { return ev_.lambda1() + u_; }
    double u() const { return u_; }
    double T() const { return T_; }
    double width() const { return width_; }

    // log|f(t)| on the vertical line.
    double log_magnitude(double t) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double x = t / a_[j];
            buf1_[j] = std::log1p(x * x);
        }
        return -0.5 * (K_ / static_cast<double>(n_)) * pairwise_sum(buf1_);
    }

    // f(t) = exp(K (G(gamma + i t) - G(gamma))) in split real form.
    std::complex<double> vertical(double t) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double x = t / a_[j];
            buf1_[j] = std::log1p(x * x);
            buf2_[j] = x_minus_atan(x);
        }
        const double kn = K_ / static_cast<double>(n_);
        const double logmag = -0.5 * kn * pairwise_sum(buf1_);
        const double phase = K_ * t * g1_ + kn * pairwise_sum(buf2_);
        return std::polar(std::exp(logmag), phase);
    }

    // Same function via principal complex logarithms at arbitrary offset
    // dz = z - gamma in the closed upper/lower half plane.
    std::complex<double> general(std::complex<double> dz) {
        for (std::size_t j = 0; j < n_; ++j) {
            const std::complex<double> r = std::log(std::complex<double>(1.0 + dz.real() / a_[j], dz.imag() / a_[j]));
            buf1_[j] = r.real();
            buf2_[j] = r.imag();
        }
        const double kn = K_ / static_cast<double>(n_);
        const std::complex<double> sum(pairwise_sum(buf1_), pairwise_sum(buf2_));
        return std::exp(2.0 * b_ * K_ * dz - kn * sum);
    }

    struct Result {
        double value, abs_err;
    };

    Result integrate(const Weight& w) {
        std::vector<double> bp{0.0};
        for (double t = width_ / 8.0; t < T_; t *= 2.0) bp.push_back(t);
        bp.push_back(T_);
        auto fv = [&](double t) {
            const std::complex<double> f = vertical(t);
            if (!w) return f.real();
            return (w(std::complex<double>(0.0, t)) * f).real();
        };
        QuadResult q = integrate_gk(fv, bp, 1e-300, opts_.rel_tol * 0.5, 20000);
        Result r{q.value, q.abs_err};
        bool ok = q.converged;
        if (use_ray_) {
            const std::complex<double> dir = std::polar(1.0, 0.75 * kPi);
            const double rate = 2.0 * b_ * K_ / std::sqrt(2.0);
            const double S = (120.0 + K_ * std::log(2.0)) / rate;
            std::vector<double> rbp{0.0};
            for (double s = 1.0 / (8.0 * rate); s < S; s *= 2.0) rbp.push_back(s);
            rbp.push_back(S);
            auto fr = [&](double s) {
                const std::complex<double> dz = std::complex<double>(0.0, T_) + s * dir;
                std::complex<double> f = general(dz) * dir;
                if (w) f *= w(dz);
                return f.imag();
            };
            const double tol = opts_.rel_tol * 0.5 * std::max(std::abs(q.value), 1e-300);
            QuadResult qr = integrate_gk(fr, rbp, tol, opts_.rel_tol * 0.5, 20000);
            r.value += qr.value;
            r.abs_err += qr.abs_err;
            ok = ok && (qr.converged || qr.abs_err <= tol);
        }
        if (!ok && r.abs_err > opts_.rel_tol * std::abs(r.value)) {
            throw NumericError("contour quadrature did not converge: integral " + std::to_string(r.value) +
                               ", error estimate " + std::to_string(r.abs_err) + ", T " + std::to_string(T_) +
                               ", N " + std::to_string(n_));
        }
        return r;
    }

    // Max over sample points of |Im f(t) + Im f(-t)|, with f(-t) from the
    // independent complex-log route.
    double imag_residual() {
        double worst = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double t = (k + 0.5) / 16.0 * std::min(T_, 6.0 * width_);
            const double a = vertical(t).imag();
            const double b = general(std::complex<double>(0.0, -t)).imag();
            worst = std::max(worst, std::abs(a + b));
        }
        return worst;
    }

    double G_at_gamma() const { return ev_.g_real_offset(u_, 0); }

private:
    const GEvaluator& ev_;
    ContourOptions opts_;
    double u_ = 0.0, K_ = 0.0, b_ = 0.0, g1_ = 0.0, g2_ = 0.0, width_ = 0.0, T_ = 0.0;
    bool use_ray_ = false;
    std::size_t n_ = 0;
    std::vector<double> a_, buf1_, buf2_;
};

}  // namespace

double find_saddle(const GEvaluator& ev) { return ev.lambda1() + saddle_offset(ev); }

double log_cn(int n, double beta, Symmetry symmetry) {
    if (n < 1) throw DomainError("log_cn: need n >= 1");
    if (!(beta > 0.0)) throw DomainError("log_cn: need beta > 0");
    const double K = symmetry == Symmetry::real ? 0.5 * n : static_cast<double>(n);
    return log_gamma(K) - std::log(2.0 * kPi) - (K - 1.0) * std::log(n * beta);
}

FreeEnergySample log_partition_contour(const GEvaluator& ev, const ContourOptions& opts) {
    if (!(opts.rel_tol > 0.0) || !(opts.t_cap > 0.0)) throw ValidationError("contour options must be positive");
    ContourIntegrator ci(ev, opts);
    const auto r = ci.integrate(nullptr);
    if (!(r.value > 0.0)) throw NumericError("contour integral is not positive");
    const double n = static_cast<double>(ev.n());
    FreeEnergySample s;
    s.method = FreeEnergyMethod::contour;
    s.gamma = ci.gamma();
    s.value = (log_cn(ev.n(), ev.beta(), ev.symmetry()) + ev.exponent_scale() * ci.G_at_gamma() +
               std::log(2.0 * r.value)) /
              n;
    s.quad_abs_err = r.abs_err;
    s.truncation_T = ci.T();
    s.n = ev.n();
    s.beta = ev.beta();
    s.imag_residual = ci.imag_residual();
    return s;
}

FreeEnergySample free_energy_saddle(const GEvaluator& ev) {
    const double u = saddle_offset(ev);
    const double n = static_cast<double>(ev.n());
    const double b2 = 2.0 * ev.beta_eff();
    const double kn = ev.exponent_scale() / n;
    FreeEnergySample s;
    s.method = FreeEnergyMethod::saddle;
    s.gamma = ev.lambda1() + u;
    s.value = kn * (ev.g_real_offset(u, 0) - 1.0 - std::log(b2)) +
              (std::log(b2) - 0.5 * std::log(ev.g_real_offset(u, 2))) / n;
    s.n = ev.n();
    s.beta = ev.beta();
    return s;
}

namespace {

struct McDraws {
    std::vector<double> energy;  // beta <s, M s>
    std::vector<double> y;       // optional observable per draw
};

struct LogMeanExp {
    double value;
    double jackknife_se;
};

LogMeanExp log_mean_exp_jackknife(const std::vector<double>& e, double scale) {
    const std::size_t m = e.size();
    const double mx = *std::max_element(e.begin(), e.end());
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = std::exp(e[i] - mx);
    const double S = pairwise_sum(w);
    const double value = (mx + std::log(S / m)) * scale;
    std::vector<double> theta(m);
    for (std::size_t i = 0; i < m; ++i) theta[i] = (mx + std::log((S - w[i]) / (m - 1))) * scale;
    const double mean = pairwise_sum(theta) / m;
    std::vector<double> dev(m);
    for (std::size_t i = 0; i < m; ++i) dev[i] = (theta[i] - mean) * (theta[i] - mean);
    return {value, std::sqrt((m - 1.0) / m * pairwise_sum(dev))};
}

template <class T>
FreeEnergySample sphere_mc_impl(const DenseMatrix<T>& a, double beta, long n_draws, std::uint64_t seed) {
    const std::size_t n = a.size();
    if (n < 1 || n > 12) throw ValidationError("sphere Monte Carlo oracle is limited to n <= 12");
    if (n_draws < 10000) throw ValidationError("sphere Monte Carlo needs at least 1e4 draws");
    if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    constexpr bool cplx = !std::is_same_v<T, double>;
    RandomStream rng(seed);
    std::vector<double> e(n_draws);
    std::vector<T> s(n);
    for (long k = 0; k < n_draws; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if constexpr (cplx) {
                const double re = rng.normal(), im = rng.normal();
                s[i] = T(re, im);
            } else {
                s[i] = rng.normal();
            }
            norm2 += std::norm(s[i]);
        }
        const double scale = std::sqrt(static_cast<double>(n) / norm2);
        for (auto& v : s) v *= scale;
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            T row{};
            for (std::size_t j = 0; j < n; ++j) row += a(i, j) * s[j];
            if constexpr (cplx)
                q += (std::conj(s[i]) * row).real();
            else
                q += s[i] * row;
        }
        e[k] = beta * q;
    }
    const LogMeanExp r = log_mean_exp_jackknife(e, 1.0 / static_cast<double>(n));
    FreeEnergySample out;
    out.value = r.value;
    out.std_error = r.jackknife_se;
    out.method = FreeEnergyMethod::sphere_mc;
    out.gamma = std::numeric_limits<double>::quiet_NaN();
    out.n = static_cast<int>(n);
    out.beta = beta;
    return out;
}

}  // namespace

FreeEnergySample free_energy_sphere_mc(const RealMatrix& m, double beta, long n_draws, std::uint64_t seed) {
    return sphere_mc_impl(m, beta, n_draws, seed);
}

FreeEnergySample free_energy_sphere_mc(const ComplexMatrix& m, double beta, long n_draws, std::uint64_t seed) {
    return sphere_mc_impl(m, beta, n_draws, seed);
}

OverlapEstimate condensate_overlap_sphere_mc(const GEvaluator& ev, long n_draws, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(ev.n());
    if (n > 12) throw ValidationError("sphere Monte Carlo oracle is limited to n <= 12");
    if (n_draws < 10000) throw ValidationError("sphere Monte Carlo needs at least 1e4 draws");
    const bool cplx = ev.symmetry() == Symmetry::complex;
    const auto& lam = ev.eigenvalues();
    RandomStream rng(seed);
    std::vector<double> e(n_draws), y(n_draws), sq(n);
    for (long k = 0; k < n_draws; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = rng.normal();
            v *= v;
            if (cplx) {
                const double im = rng.normal();
                v += im * im;
            }
            sq[i] = v;
            norm2 += v;
        }
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sq[i] *= static_cast<double>(n) / norm2;
            q += lam[i] * sq[i];
        }
        e[k] = ev.beta() * q;
        y[k] = sq[0] / static_cast<double>(n);
    }
    const double mx = *std::max_element(e.begin(), e.end());
    std::vector<double> w(n_draws), wy(n_draws);
    for (long k = 0; k < n_draws; ++k) {
        w[k] = std::exp(e[k] - mx);
        wy[k] = w[k] * y[k];
    }
    const double A = pairwise_sum(wy), B = pairwise_sum(w);
    std::vector<double> theta(n_draws);
    for (long k = 0; k < n_draws; ++k) theta[k] = (A - wy[k]) / (B - w[k]);
    const double mean = pairwise_sum(theta) / n_draws;
    std::vector<double> dev(n_draws);
    for (long k = 0; k < n_draws; ++k) dev[k] = (theta[k] - mean) * (theta[k] - mean);
    return {A / B, std::sqrt((n_draws - 1.0) / n_draws * pairwise_sum(dev))};
}

double condensate_overlap(const GEvaluator& ev, const ContourOptions& opts) {
    ContourIntegrator ci(ev, opts);
    const double kn = ev.exponent_scale() / static_cast<double>(ev.n());
    const double u = ci.u();
    const auto den = ci.integrate(nullptr);
    const auto num = ci.integrate([kn, u](std::complex<double> dz) { return kn / (u + dz); });
    return std::abs(num.value / den.value) / (ev.beta() * ev.n());
}

}  // namespace ssklab
