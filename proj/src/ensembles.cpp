#include "ssklab/ensembles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ssklab/errors.hpp"
#include "ssklab/format.hpp"
#include "ssklab/rng.hpp"

namespace ssklab {

std::string_view to_string(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::wigner_real: return "wigner_real";
        case EnsembleKind::wigner_complex: return "wigner_complex";
        case EnsembleKind::ssk_coupling: return "ssk_coupling";
        case EnsembleKind::sample_covariance: return "sample_covariance";
    }
    return "wigner_real";
}

EnsembleKind parse_ensemble_kind(std::string_view s) {
    if (s == "wigner_real") return EnsembleKind::wigner_real;
    if (s == "wigner_complex") return EnsembleKind::wigner_complex;
    if (s == "ssk_coupling") return EnsembleKind::ssk_coupling;
    if (s == "sample_covariance") return EnsembleKind::sample_covariance;
    throw ValidationError("unknown ensemble kind '" + std::string(s) + "'");
}

std::string_view to_string(SpectrumMethod m) { return m == SpectrumMethod::dense ? "dense" : "tridiagonal"; }

SpectrumMethod parse_spectrum_method(std::string_view s) {
    if (s == "dense") return SpectrumMethod::dense;
    if (s == "tridiagonal") return SpectrumMethod::tridiagonal;
    throw ValidationError("unknown spectrum method '" + std::string(s) + "'");
}

EnsembleSpec EnsembleSpec::goe(int n) { return wigner(n, DisorderSpec::gaussian(2.0), Symmetry::real); }

EnsembleSpec EnsembleSpec::gue(int n) { return wigner(n, DisorderSpec::gaussian(1.0), Symmetry::complex); }

EnsembleSpec EnsembleSpec::wigner(int n, DisorderSpec disorder, Symmetry symmetry) {
    EnsembleSpec s;
    s.kind = symmetry == Symmetry::real ? EnsembleKind::wigner_real : EnsembleKind::wigner_complex;
    s.n = n;
    s.disorder = disorder;
    s.symmetry = symmetry;
    return s;
}

EnsembleSpec EnsembleSpec::ssk(int n, DisorderSpec disorder) {
    EnsembleSpec s;
    s.kind = EnsembleKind::ssk_coupling;
    s.n = n;
    disorder.w2 = 0.0;
    s.disorder = disorder;
    return s;
}

EnsembleSpec EnsembleSpec::sample_covariance(int n, int k_rows, DisorderSpec disorder, Symmetry symmetry) {
    EnsembleSpec s;
    s.kind = EnsembleKind::sample_covariance;
    s.n = n;
    s.k_rows = k_rows;
    s.disorder = disorder;
    s.symmetry = symmetry;
    return s;
}

void EnsembleSpec::validate() const {
    if (n < 1) throw ValidationError("ensemble size n must be >= 1");
    disorder.validate();
    switch (kind) {
        case EnsembleKind::wigner_real:
            if (symmetry != Symmetry::real) throw ValidationError("wigner_real requires real symmetry");
            break;
        case EnsembleKind::wigner_complex:
            if (symmetry != Symmetry::complex) throw ValidationError("wigner_complex requires complex symmetry");
            break;
        case EnsembleKind::ssk_coupling:
            if (symmetry != Symmetry::real) throw ValidationError("ssk_coupling requires real symmetry");
            if (disorder.w2 != 0.0) throw ValidationError("ssk_coupling has zero diagonal (w2 = 0)");
            break;
        case EnsembleKind::sample_covariance:
            if (k_rows < n) throw ValidationError("sample_covariance requires k_rows >= n");
            break;
    }
}

LimitLaw EnsembleSpec::law() const {
    if (kind == EnsembleKind::sample_covariance)
        return LimitLaw::marchenko_pastur(static_cast<double>(k_rows) / static_cast<double>(n));
    return LimitLaw::semicircle();
}

DisorderSpec EnsembleSpec::matrix_moments() const {
    const double w2 = kind == EnsembleKind::ssk_coupling ? 0.0 : disorder.w2;
    // Complex entries (x + iy)/sqrt 2 with x, y i.i.d.: E|z|^4 = (W4 + 1)/2.
    const double W4 = symmetry == Symmetry::real ? disorder.W4 : 0.5 * (disorder.W4 + 1.0);
    return DisorderSpec::custom(w2, disorder.W3, W4);
}

void Spectrum::validate() const {
    if (eigenvalues.empty()) throw ValidationError("spectrum is empty");
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (!std::isfinite(eigenvalues[i])) throw ValidationError("spectrum has non-finite entries");
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) throw ValidationError("spectrum is not descending");
    }
}

namespace {

double draw(RandomStream& rng, DisorderName name) {
    switch (name) {
        case DisorderName::gaussian: return rng.normal();
        case DisorderName::rademacher: return rng.rademacher();
        case DisorderName::uniform: return (2.0 * rng.uniform() - 1.0) * std::sqrt(3.0);
        case DisorderName::custom: break;
    }
    throw ValidationError("custom disorder cannot be sampled");
}

}  // namespace

DisorderMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.disorder.name == DisorderName::custom) throw ValidationError("custom disorder cannot be sampled");
    RandomStream rng(seed);
    const std::size_t n = static_cast<std::size_t>(spec.n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const auto dname = spec.disorder.name;

    switch (spec.kind) {
        case EnsembleKind::wigner_real:
        case EnsembleKind::ssk_coupling: {
            RealMatrix m(n);
            const bool ssk = spec.kind == EnsembleKind::ssk_coupling;
            const double diag_scale = std::sqrt(spec.disorder.w2) * inv_sqrt_n;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    const double x = draw(rng, dname) * inv_sqrt_n;
                    m(i, j) = m(j, i) = ssk ? -x : x;
                }
                m(i, i) = ssk ? 0.0 : draw(rng, dname) * diag_scale;
            }
            return m;
        }
        case EnsembleKind::wigner_complex: {
            ComplexMatrix m(n);
            const double diag_scale = std::sqrt(spec.disorder.w2) * inv_sqrt_n;
            const double off_scale = inv_sqrt_n / std::sqrt(2.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    const double re = draw(rng, dname), im = draw(rng, dname);
                    m(i, j) = std::complex<double>(re, im) * off_scale;
                    m(j, i) = std::conj(m(i, j));
                }
                m(i, i) = draw(rng, dname) * diag_scale;
            }
            return m;
        }
        case EnsembleKind::sample_covariance: {
            const std::size_t K = static_cast<std::size_t>(spec.k_rows);
            if (spec.symmetry == Symmetry::real) {
                std::vector<double> x(K * n);
                for (double& v : x) v = draw(rng, dname) * inv_sqrt_n;
                RealMatrix m(n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j <= i; ++j) {
                        double s = 0.0;
                        for (std::size_t k = 0; k < K; ++k) s += x[k * n + i] * x[k * n + j];
                        m(i, j) = m(j, i) = s;
                    }
                return m;
            }
            std::vector<std::complex<double>> x(K * n);
            const double scale = inv_sqrt_n / std::sqrt(2.0);
            for (auto& v : x) {
                const double re = draw(rng, dname), im = draw(rng, dname);
                v = std::complex<double>(re, im) * scale;
            }
            ComplexMatrix m(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    std::complex<double> s{};
                    for (std::size_t k = 0; k < K; ++k) s += std::conj(x[k * n + i]) * x[k * n + j];
                    if (i == j) s = s.real();
                    m(i, j) = s;
                    m(j, i) = std::conj(s);
                }
            return m;
        }
    }
    throw ValidationError("unsupported ensemble kind");
}

namespace {

template <class T>
Spectrum eigen_spectrum_impl(const DenseMatrix<T>& a) {
    const std::size_t n = a.size();
    if (n == 0) throw ValidationError("eigen_spectrum: empty matrix");
    double maxabs = 0.0;
    for (const T& x : a.data()) maxabs = std::max(maxabs, std::abs(x));
    if (asymmetry(a) > 1e-12 * std::max(1.0, maxabs))
        throw ValidationError("eigen_spectrum: matrix is not symmetric/Hermitian");

    const HouseholderReduction<T> h = householder_tridiagonalize(a);
    Spectrum s;
    s.eigenvalues = tridiagonal_eigenvalues(h.tri);
    s.method = SpectrumMethod::dense;
    s.ensemble.n = static_cast<int>(n);

    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += std::real(a(i, i));
    for (double v : s.eigenvalues) sum += v;
    if (std::abs(sum - trace) > 1e-8 * static_cast<double>(n) * std::max(maxabs, 1e-300) + 1e-300)
        throw NumericError("eigen_spectrum: trace check failed");

    const std::vector<double> y = tridiagonal_eigenvector(h.tri, s.eigenvalues.front());
    const std::vector<T> v = back_transform(h, y);
    const double res = eigen_residual(a, v, s.eigenvalues.front());
    if (res > 1e-8 * std::max(frobenius_norm(a), 1e-300))
        throw NumericError("eigen_spectrum: eigenpair residual check failed");
    return s;
}

}  // namespace

Spectrum eigen_spectrum(const RealMatrix& m) { return eigen_spectrum_impl(m); }

Spectrum eigen_spectrum(const ComplexMatrix& m) {
    Spectrum s = eigen_spectrum_impl(m);
    s.ensemble.symmetry = Symmetry::complex;
    s.ensemble.kind = EnsembleKind::wigner_complex;
    return s;
}

Spectrum eigen_spectrum(const DisorderMatrix& m) {
    return std::visit([](const auto& mat) { return eigen_spectrum(mat); }, m);
}

Spectrum sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed) {
    Spectrum s = eigen_spectrum(sample_matrix(spec, seed));
    s.ensemble = spec;
    s.seed = seed;
    s.method = SpectrumMethod::dense;
    s.ensemble.n = s.n();
    return s;
}

Spectrum sample_gaussian_spectrum_fast(FastEnsemble kind, int n, std::uint64_t seed) {
    if (n < 2) throw ValidationError("fast sampler needs n >= 2");
    RandomStream rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Tridiagonal t;
    t.d.resize(n);
    t.e.resize(n - 1);
    Spectrum s;
    switch (kind.kind) {
        case FastKind::goe:
            for (int i = 0; i < n; ++i) t.d[i] = std::sqrt(2.0) * rng.normal() * scale;
            for (int i = 0; i + 1 < n; ++i) t.e[i] = rng.chi(n - 1 - i) * scale;
            s.ensemble = EnsembleSpec::goe(n);
            break;
        case FastKind::gue:
            for (int i = 0; i < n; ++i) t.d[i] = rng.normal() * scale;
            for (int i = 0; i + 1 < n; ++i) t.e[i] = rng.chi(2.0 * (n - 1 - i)) / std::sqrt(2.0) * scale;
            s.ensemble = EnsembleSpec::gue(n);
            break;
        case FastKind::wishart_real: {
            const long long K = std::llround(kind.d * n);
            if (!(kind.d >= 1.0) || K < n) throw ValidationError("wishart_real needs d >= 1");
            // Lower bidiagonal B: diagonal chi_K, ..., chi_{K-n+1}; subdiagonal chi_{n-1}, ..., chi_1.
            std::vector<double> a(n), b(n - 1);
            for (int i = 0; i < n; ++i) a[i] = rng.chi(static_cast<double>(K - i));
            for (int i = 0; i + 1 < n; ++i) b[i] = rng.chi(static_cast<double>(n - 1 - i));
            const double inv_n = 1.0 / n;
            for (int i = 0; i < n; ++i) t.d[i] = (a[i] * a[i] + (i > 0 ? b[i - 1] * b[i - 1] : 0.0)) * inv_n;
            for (int i = 0; i + 1 < n; ++i) t.e[i] = a[i] * b[i] * inv_n;
            s.ensemble = EnsembleSpec::sample_covariance(n, static_cast<int>(K));
            break;
        }
    }
    s.eigenvalues = tridiagonal_eigenvalues(std::move(t));
    s.seed = seed;
    s.method = SpectrumMethod::tridiagonal;
    return s;
}

double edge_statistic(const Spectrum& spectrum, const LimitLaw& law) {
    const double n = static_cast<double>(spectrum.n());
    return std::pow(law.s_nu() * M_PI, -2.0 / 3.0) * std::pow(n, 2.0 / 3.0) * (spectrum.lambda1() - law.c_plus());
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "# ensemble=" << to_string(s.ensemble.kind) << " n=" << s.n() << " seed=" << s.seed
       << " method=" << to_string(s.method) << "\n";
    for (double v : s.eigenvalues) os << format_double(v, 17) << "\n";
}

Spectrum read_spectrum_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0)
        throw ValidationError("spectrum CSV: missing '# ensemble=...' header");
    Spectrum s;
    long long n = -1;
    bool have_kind = false, have_seed = false, have_method = false;
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ValidationError("spectrum CSV: malformed header token '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "ensemble") {
            s.ensemble.kind = parse_ensemble_kind(val);
            have_kind = true;
        } else if (key == "n") {
            n = std::stoll(val);
        } else if (key == "seed") {
            const auto r = std::from_chars(val.data(), val.data() + val.size(), s.seed);
            if (r.ec != std::errc()) throw ValidationError("spectrum CSV: bad seed");
            have_seed = true;
        } else if (key == "method") {
            s.method = parse_spectrum_method(val);
            have_method = true;
        } else {
            throw ValidationError("spectrum CSV: unknown header key '" + key + "'");
        }
    }
    if (!have_kind || n < 1 || !have_seed || !have_method)
        throw ValidationError("spectrum CSV: header needs ensemble, n, seed, method");
    if (s.ensemble.kind == EnsembleKind::wigner_complex) {
        s.ensemble.symmetry = Symmetry::complex;
        s.ensemble.disorder.w2 = 1.0;
    } else if (s.ensemble.kind == EnsembleKind::ssk_coupling) {
        s.ensemble.disorder.w2 = 0.0;
    }
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        double v;
        const char* first = line.data();
        const char* last = line.data() + line.size();
        while (last > first && (last[-1] == '\r' || last[-1] == ' ')) --last;
        const auto r = std::from_chars(first, last, v);
        if (r.ec != std::errc() || r.ptr != last) throw ValidationError("spectrum CSV: bad value '" + line + "'");
        s.eigenvalues.push_back(v);
    }
    if (static_cast<long long>(s.eigenvalues.size()) != n)
        throw ValidationError("spectrum CSV: header n does not match number of values");
    s.ensemble.n = static_cast<int>(n);
    if (s.ensemble.kind == EnsembleKind::sample_covariance) s.ensemble.k_rows = static_cast<int>(n);
    s.validate();
    return s;
}

}  // namespace ssklab
