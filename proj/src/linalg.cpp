#include "ssklab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssklab/errors.hpp"

namespace ssklab {

namespace {

inline double conj_of(double x) { return x; }
inline std::complex<double> conj_of(std::complex<double> x) { return std::conj(x); }
inline double real_of(double x) { return x; }
inline double real_of(std::complex<double> x) { return x.real(); }
inline double abs2(double x) { return x * x; }
inline double abs2(std::complex<double> x) { return std::norm(x); }

}  // namespace

template <class T>
HouseholderReduction<T> householder_tridiagonalize(const DenseMatrix<T>& input) {
    const std::size_t n = input.size();
    // Work on the lower triangle only.
    DenseMatrix<T> a = input;
    HouseholderReduction<T> out;
    out.tri.d.assign(n, 0.0);
    out.tri.e.assign(n > 0 ? n - 1 : 0, 0.0);
    std::vector<T> offdiag(n > 0 ? n - 1 : 0);
    std::vector<T> p(n), w(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        std::vector<T> v(m);
        double tail2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a(k + 1 + i, k);
            if (i > 0) tail2 += abs2(v[i]);
        }
        const double x0abs = std::sqrt(abs2(v[0]));
        if (tail2 == 0.0) {
            offdiag[k] = v[0];
            out.reflectors.emplace_back();
            out.taus.push_back(0.0);
            continue;
        }
        const double xnorm = std::sqrt(tail2 + x0abs * x0abs);
        const T phase = x0abs > 0.0 ? v[0] / x0abs : T(1.0);
        const T alpha = -phase * xnorm;
        v[0] -= alpha;
        const double tau = 1.0 / (xnorm * xnorm + x0abs * xnorm);  // 2 / ||v||^2

        // p = tau * B v with B the trailing block (lower-triangle storage).
        for (std::size_t i = 0; i < m; ++i) p[i] = T{};
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t r = k + 1 + i;
            T acc{};
            for (std::size_t j = 0; j < i; ++j) {
                const T bij = a(r, k + 1 + j);
                acc += bij * v[j];
                p[j] += conj_of(bij) * v[i];
            }
            acc += T(real_of(a(r, r))) * v[i];
            p[i] += acc;
        }
        T vp{};
        for (std::size_t i = 0; i < m; ++i) {
            p[i] *= tau;
            vp += conj_of(v[i]) * p[i];
        }
        const double kfac = 0.5 * tau * real_of(vp);
        for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kfac * v[i];
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t r = k + 1 + i;
            for (std::size_t j = 0; j <= i; ++j) {
                a(r, k + 1 + j) -= v[i] * conj_of(w[j]) + w[i] * conj_of(v[j]);
            }
        }
        offdiag[k] = alpha;
        out.reflectors.push_back(std::move(v));
        out.taus.push_back(tau);
    }
    for (std::size_t i = 0; i < n; ++i) out.tri.d[i] = real_of(a(i, i));
    if (n >= 2) offdiag[n - 2] = a(n - 1, n - 2);

    // Diagonal similarity turning the (possibly complex or negative)
    // off-diagonal into nonnegative reals.
    out.phases.assign(n, T(1.0));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double mag = std::sqrt(abs2(offdiag[k]));
        out.tri.e[k] = mag;
        out.phases[k + 1] = mag > 0.0 ? out.phases[k] * (offdiag[k] / mag) : out.phases[k];
    }
    return out;
}

std::vector<double> tridiagonal_eigenvalues(Tridiagonal t) {
    std::vector<double>& d = t.d;
    const int n = static_cast<int>(d.size());
    std::vector<double> e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) e[i] = t.e[i];
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw NumericError("tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

std::vector<double> tridiagonal_eigenvector(const Tridiagonal& t, double lambda) {
    const std::size_t n = t.d.size();
    if (n == 1) return {1.0};
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(t.d[i]));
        if (i + 1 < n) scale = std::max(scale, std::abs(t.e[i]));
    }
    if (scale == 0.0) scale = 1.0;
    const double tiny = std::numeric_limits<double>::epsilon() * scale;

    // LU with partial pivoting of (T - lambda I), LAPACK gttrf layout.
    std::vector<double> dl(n - 1), dg(n), du(n - 1), du2(n > 2 ? n - 2 : 0);
    std::vector<char> swapped(n - 1, 0);
    for (std::size_t i = 0; i < n; ++i) dg[i] = t.d[i] - lambda;
    for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = t.e[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(dg[i]) >= std::abs(dl[i])) {
            if (dg[i] == 0.0) dg[i] = tiny;
            const double fact = dl[i] / dg[i];
            dl[i] = fact;
            dg[i + 1] -= fact * du[i];
            if (i + 2 < n) du2[i] = 0.0;
        } else {
            const double fact = dg[i] / dl[i];
            dg[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = dg[i + 1];
            dg[i + 1] = temp - fact * dg[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (dg[n - 1] == 0.0) dg[n - 1] = tiny;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(dg[i]) < tiny) dg[i] = std::copysign(tiny, dg[i]);

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    for (int it = 0; it < 3; ++it) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                x[i + 1] -= dl[i] * x[i];
            } else {
                const double temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - dl[i] * x[i];
            }
        }
        x[n - 1] /= dg[n - 1];
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dg[n - 2];
        for (std::size_t ii = n - 2; ii-- > 0;) x[ii] = (x[ii] - du[ii] * x[ii + 1] - du2[ii] * x[ii + 2]) / dg[ii];
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    return x;
}

template <class T>
std::vector<T> back_transform(const HouseholderReduction<T>& h, const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = h.phases[i] * y[i];
    for (std::size_t kk = h.reflectors.size(); kk-- > 0;) {
        const auto& v = h.reflectors[kk];
        if (v.empty()) continue;
        T dot{};
        for (std::size_t i = 0; i < v.size(); ++i) dot += conj_of(v[i]) * x[kk + 1 + i];
        dot *= h.taus[kk];
        for (std::size_t i = 0; i < v.size(); ++i) x[kk + 1 + i] -= v[i] * dot;
    }
    return x;
}

template <class T>
double asymmetry(const DenseMatrix<T>& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            worst = std::max(worst, std::sqrt(abs2(a(i, j) - conj_of(a(j, i)))));
    return worst;
}

template <class T>
double frobenius_norm(const DenseMatrix<T>& a) {
    double s = 0.0;
    for (const T& x : a.data()) s += abs2(x);
    return std::sqrt(s);
}

template <class T>
double eigen_residual(const DenseMatrix<T>& a, const std::vector<T>& v, double lambda) {
    const std::size_t n = a.size();
    double r = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        T acc{};
        for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * v[j];
        acc -= lambda * v[i];
        r += abs2(acc);
        nv += abs2(v[i]);
    }
    return std::sqrt(r / nv);
}

template HouseholderReduction<double> householder_tridiagonalize(const DenseMatrix<double>&);
template HouseholderReduction<std::complex<double>> householder_tridiagonalize(
    const DenseMatrix<std::complex<double>>&);
template std::vector<double> back_transform(const HouseholderReduction<double>&, const std::vector<double>&);
template std::vector<std::complex<double>> back_transform(const HouseholderReduction<std::complex<double>>&,
                                                          const std::vector<double>&);
template double asymmetry(const DenseMatrix<double>&);
template double asymmetry(const DenseMatrix<std::complex<double>>&);
template double frobenius_norm(const DenseMatrix<double>&);
template double frobenius_norm(const DenseMatrix<std::complex<double>>&);
template double eigen_residual(const DenseMatrix<double>&, const std::vector<double>&, double);
template double eigen_residual(const DenseMatrix<std::complex<double>>&, const std::vector<std::complex<double>>&,
                               double);

}  // namespace ssklab
