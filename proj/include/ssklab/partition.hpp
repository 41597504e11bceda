#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ssklab/ensembles.hpp"
#include "ssklab/types.hpp"

namespace ssklab {

// G(z) = 2 beta_eff z - (1/N) sum log(z - lambda_i) for one spectrum, with
// beta_eff = beta (real) or beta/2 (complex). The partition function is
// C_N * integral of exp(K G(z)) dz along a vertical line, K = N/2 (real) or
// N (complex).
class GEvaluator {
public:
    GEvaluator(std::vector<double> eigenvalues, double beta, Symmetry symmetry = Symmetry::real);
    GEvaluator(const Spectrum& spectrum, double beta, Symmetry symmetry);
    explicit GEvaluator(const Spectrum& spectrum, double beta);

    int n() const { return static_cast<int>(lambda_.size()); }
    double beta() const { return beta_; }
    double beta_eff() const { return effective_beta(beta_, symmetry_); }
    Symmetry symmetry() const { return symmetry_; }
    double lambda1() const { return lambda_.front(); }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    // Exponent multiplier K.
    double exponent_scale() const;

    // G and its derivatives at real u = z - lambda_1 > 0, using the exact
    // gaps lambda_1 - lambda_j so nothing cancels near the top eigenvalue.
    double g_real_offset(double u, int order) const;

private:
    std::vector<double> lambda_;  // descending
    std::vector<double> gap_;     // lambda_1 - lambda_j >= 0
    double beta_;
    Symmetry symmetry_;
};

enum class FreeEnergyMethod { contour, saddle, sphere_mc, closed_form };
std::string_view to_string(FreeEnergyMethod m);
FreeEnergyMethod parse_free_energy_method(std::string_view s);

struct FreeEnergySample {
    double value = 0.0;  // F_N
    FreeEnergyMethod method = FreeEnergyMethod::contour;
    double gamma = 0.0;
    double quad_abs_err = 0.0;  // absolute error estimate of the contour integral
    double truncation_T = 0.0;
    int n = 0;
    double beta = 0.0;
    double imag_residual = 0.0;  // relative; conjugate-symmetry diagnostic
    double std_error = 0.0;      // sphere Monte Carlo only
};

struct ContourOptions {
    double rel_tol = 1e-10;
    double t_cap = 1e3;
};

std::complex<double> g_eval(const GEvaluator& ev, std::complex<double> z, int order);

double find_saddle(const GEvaluator& ev);

double log_cn(int n, double beta, Symmetry symmetry = Symmetry::real);

FreeEnergySample log_partition_contour(const GEvaluator& ev, const ContourOptions& opts = {});

FreeEnergySample free_energy_saddle(const GEvaluator& ev);

// Direct Monte Carlo over the sphere |s|^2 = N (oracle for n <= 12).
FreeEnergySample free_energy_sphere_mc(const RealMatrix& matrix, double beta, long n_draws, std::uint64_t seed);
FreeEnergySample free_energy_sphere_mc(const ComplexMatrix& matrix, double beta, long n_draws, std::uint64_t seed);

struct OverlapEstimate {
    double value;
    double std_error;
};

// Gibbs average of <s, v_1>^2 / N for the spectrum in the eigenbasis, by
// sphere Monte Carlo (oracle for n <= 12).
OverlapEstimate condensate_overlap_sphere_mc(const GEvaluator& ev, long n_draws, std::uint64_t seed);

double condensate_overlap(const GEvaluator& ev, const ContourOptions& opts = {});

}  // namespace ssklab
