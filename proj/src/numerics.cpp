#include "ssklab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ssklab/errors.hpp"

namespace ssklab {

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208977211617, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk21(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double f1[10], f2[10];
    double kronrod = kWgk[10] * fc, gauss = 0.0, resabs = kWgk[10] * std::abs(fc);
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        f1[j] = f(c - dx);
        f2[j] = f(c + dx);
        kronrod += kWgk[j] * (f1[j] + f2[j]);
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
    }
    // QUADPACK qk21 error heuristic.
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    const double ah = std::abs(h);
    resasc *= ah;
    resabs *= ah;
    double err = std::abs((kronrod - gauss) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * 2.220446049250313e-16 * resabs);
    return {a, b, kronrod * h, err};
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, std::span<const double> bp,
                        double abs_tol, double rel_tol, int max_intervals) {
    if (bp.size() < 2) throw ValidationError("integrate_gk needs at least two breakpoints");
    std::priority_queue<Panel> heap;
    QuadResult r;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(bp[i + 1] > bp[i])) throw ValidationError("integrate_gk breakpoints must increase");
        Panel p = gk21(f, bp[i], bp[i + 1]);
        r.evaluations += 21;
        total += p.value;
        err += p.err;
        heap.push(p);
    }
    for (;;) {
        const double target = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= target) {
            r.converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= max_intervals) break;
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval no longer splittable
        heap.pop();
        Panel left = gk21(f, worst.a, mid), right = gk21(f, mid, worst.b);
        r.evaluations += 42;
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed drift accumulated by the incremental updates.
    r.intervals = static_cast<int>(heap.size());
    std::vector<double> vals, errs;
    vals.reserve(heap.size());
    errs.reserve(heap.size());
    while (!heap.empty()) {
        vals.push_back(heap.top().value);
        errs.push_back(heap.top().err);
        heap.pop();
    }
    r.value = pairwise_sum(vals);
    r.abs_err = pairwise_sum(errs);
    if (!r.converged) r.converged = r.abs_err <= std::max(abs_tol, rel_tol * std::abs(r.value));
    return r;
}

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        double rel_tol, int max_intervals) {
    const double bp[2] = {a, b};
    return integrate_gk(f, std::span<const double>(bp, 2), abs_tol, rel_tol, max_intervals);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre needs n >= 1");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

double bracketed_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                        double hi, double xtol, double ftol, int max_iter) {
    auto [flo, dlo] = fdf(lo);
    auto [fhi, dhi] = fdf(hi);
    (void)dlo;
    (void)dhi;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw NumericError("bracketed_newton: no sign change on bracket");
    const bool increasing = fhi > 0.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [fx, dfx] = fdf(x);
        if (std::abs(fx) <= ftol) return x;
        if ((fx > 0.0) == increasing)
            hi = x;
        else
            lo = x;
        if (hi - lo <= xtol * std::max(1.0, std::abs(x))) return x;
        double next = x - fx / dfx;
        if (!(dfx != 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol, int max_iter) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw NumericError("bisect: no sign change on bracket");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace ssklab
