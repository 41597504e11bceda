#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "ssklab/linalg.hpp"
#include "ssklab/spectral_theory.hpp"
#include "ssklab/types.hpp"

namespace ssklab {

enum class EnsembleKind { wigner_real, wigner_complex, ssk_coupling, sample_covariance };

std::string_view to_string(EnsembleKind k);
EnsembleKind parse_ensemble_kind(std::string_view s);

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::wigner_real;
    int n = 1;
    int k_rows = 0;  // sample covariance only
    DisorderSpec disorder{};
    Symmetry symmetry = Symmetry::real;

    static EnsembleSpec goe(int n);
    static EnsembleSpec gue(int n);
    static EnsembleSpec wigner(int n, DisorderSpec disorder, Symmetry symmetry = Symmetry::real);
    static EnsembleSpec ssk(int n, DisorderSpec disorder = DisorderSpec::gaussian(0.0));
    static EnsembleSpec sample_covariance(int n, int k_rows, DisorderSpec disorder = DisorderSpec::gaussian(),
                                          Symmetry symmetry = Symmetry::real);

    void validate() const;
    // Limiting spectral law of the ensemble (semicircle or Marchenko-Pastur, d = K/N).
    LimitLaw law() const;
    // (w2, W4) of the matrix entries in the normalization of the symmetry
    // class, as consumed by clt_mean_variance. Only w2 and W4 are meaningful.
    DisorderSpec matrix_moments() const;
};

enum class SpectrumMethod { dense, tridiagonal };
std::string_view to_string(SpectrumMethod m);
SpectrumMethod parse_spectrum_method(std::string_view s);

struct Spectrum {
    std::vector<double> eigenvalues;  // descending
    EnsembleSpec ensemble{};
    std::uint64_t seed = 0;
    SpectrumMethod method = SpectrumMethod::dense;

    int n() const { return static_cast<int>(eigenvalues.size()); }
    double lambda1() const { return eigenvalues.front(); }
    // Checks finiteness, ordering and length; sorts nothing.
    void validate() const;
};

using DisorderMatrix = std::variant<RealMatrix, ComplexMatrix>;

DisorderMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed);

// Eigenvalues of a dense symmetric/Hermitian matrix, with trace and
// spot-checked eigenpair residual verification.
Spectrum eigen_spectrum(const DisorderMatrix& matrix);
Spectrum eigen_spectrum(const RealMatrix& matrix);
Spectrum eigen_spectrum(const ComplexMatrix& matrix);

// Dense sample-and-diagonalize convenience with provenance filled in.
Spectrum sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed);

enum class FastKind { goe, gue, wishart_real };

struct FastEnsemble {
    FastKind kind = FastKind::goe;
    double d = 1.0;  // K/N for wishart_real
};

// Tridiagonal (Dumitriu-Edelman) models: same law as the dense Gaussian
// ensembles at O(n^2) cost.
Spectrum sample_gaussian_spectrum_fast(FastEnsemble kind, int n, std::uint64_t seed);

double edge_statistic(const Spectrum& spectrum, const LimitLaw& law);

void write_spectrum_csv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& is);

}  // namespace ssklab
