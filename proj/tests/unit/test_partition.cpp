#include <doctest.h>

#include <cmath>
#include <variant>
#include <vector>

#include "ssklab/ensembles.hpp"
#include "ssklab/errors.hpp"
#include "ssklab/partition.hpp"
#include "ssklab/special_functions.hpp"

using namespace ssklab;

TEST_CASE("N = 2 real: circle average gives the Bessel function I0") {
    for (double beta : {0.05, 0.3, 1.0, 3.0, 10.0}) {
        const GEvaluator ev({1.0, -1.0}, beta);
        const auto r = log_partition_contour(ev);
        CHECK(r.value == doctest::Approx(0.5 * std::log(std::cyl_bessel_i(0.0, 2 * beta))).epsilon(1e-10));
        CHECK(r.imag_residual < 1e-10);
        // Condensate: <cos^2 theta> = (1 + I1 / I0) / 2.
        const double i0 = std::cyl_bessel_i(0.0, 2 * beta), i1 = std::cyl_bessel_i(1.0, 2 * beta);
        CHECK(condensate_overlap(ev) == doctest::Approx(0.5 * (1 + i1 / i0)).epsilon(1e-8));
    }
}

TEST_CASE("N = 2 complex: |s_1|^2 / 2 is uniform on [0, 1]") {
    for (double beta : {0.1, 0.3, 1.0, 3.0}) {
        const GEvaluator ev({1.0, -1.0}, beta, Symmetry::complex);
        CHECK(log_partition_contour(ev).value ==
              doctest::Approx(0.5 * std::log(std::sinh(2 * beta) / (2 * beta))).epsilon(1e-10));
        const double a = 4 * beta;
        CHECK(condensate_overlap(ev) == doctest::Approx(1 / (1 - std::exp(-a)) - 1 / a).epsilon(1e-8));
    }
}

TEST_CASE("contour matches sphere Monte Carlo at N = 6") {
    const auto m = std::get<RealMatrix>(sample_matrix(EnsembleSpec::goe(6), 21));
    const auto sp = eigen_spectrum(m);
    for (double beta : {0.3, 1.0, 2.5}) {
        const double f = log_partition_contour(GEvaluator(sp, beta)).value;
        const auto mc = free_energy_sphere_mc(m, beta, 100000, 99);
        CHECK(std::abs(f - mc.value) < 3 * mc.std_error);
    }
    const auto h = std::get<ComplexMatrix>(sample_matrix(EnsembleSpec::gue(5), 22));
    const auto sph = eigen_spectrum(h);
    for (double beta : {0.5, 2.0}) {
        const double f = log_partition_contour(GEvaluator(sph, beta, Symmetry::complex)).value;
        const auto mc = free_energy_sphere_mc(h, beta, 100000, 98);
        CHECK(std::abs(f - mc.value) < 3 * mc.std_error);
    }
}

TEST_CASE("condensate overlap matches sphere Monte Carlo") {
    const auto sp = sample_spectrum(EnsembleSpec::goe(6), 31);
    for (double beta : {0.4, 2.0}) {
        const GEvaluator ev(sp, beta);
        const auto mc = condensate_overlap_sphere_mc(ev, 200000, 5);
        CHECK(std::abs(condensate_overlap(ev) - mc.value) < 4 * mc.std_error);
    }
}

TEST_CASE("condensate overlap separates the two regimes") {
    const auto sp = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 1000, 8);
    // O(1/N) at high temperature; close to 1 - beta_c / beta at low temperature.
    CHECK(condensate_overlap(GEvaluator(sp, 0.25)) < 0.01);
    CHECK(condensate_overlap(GEvaluator(sp, 2.0)) == doctest::Approx(0.75).epsilon(0.1));
}

TEST_CASE("degenerate spectra") {
    for (double beta : {0.2, 0.7, 5.0}) {
        CHECK(std::abs(log_partition_contour(GEvaluator(std::vector<double>(6, 0.0), beta)).value) < 1e-12);
        CHECK(std::abs(log_partition_contour(GEvaluator(std::vector<double>(1, 0.0), beta)).value) < 1e-12);
        // Constant spectrum c: Z = exp(beta c N).
        CHECK(log_partition_contour(GEvaluator(std::vector<double>(9, 1.5), beta)).value ==
              doctest::Approx(1.5 * beta).epsilon(1e-11));
    }
}

TEST_CASE("shift and scale covariance") {
    const auto sp = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 300, 4);
    for (double beta : {0.2, 0.9}) {
        const double f = log_partition_contour(GEvaluator(sp, beta)).value;
        std::vector<double> shifted = sp.eigenvalues, scaled = sp.eigenvalues;
        for (auto& v : shifted) v -= 0.4;
        for (auto& v : scaled) v *= 0.5;
        CHECK(std::abs(log_partition_contour(GEvaluator(shifted, beta)).value - (f - 0.4 * beta)) < 1e-9);
        CHECK(std::abs(log_partition_contour(GEvaluator(scaled, 2 * beta)).value - f) < 1e-9);
    }
}

TEST_CASE("saddle approximation tracks the contour integral") {
    const auto sp = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 500, 6);
    const GEvaluator hi(sp, 0.25);
    CHECK(std::abs(free_energy_saddle(hi).value - log_partition_contour(hi).value) < 10.0 / (500.0 * 500.0));
    const GEvaluator lo(sp, 1.0);
    CHECK(std::abs(free_energy_saddle(lo).value - log_partition_contour(lo).value) < 10 * std::log(500.0) / 500);
    CHECK(free_energy_saddle(hi).gamma == doctest::Approx(find_saddle(hi)));
    CHECK(g_eval(hi, find_saddle(hi), 1).real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("G evaluation and normalization constant") {
    const GEvaluator ev({2.0, 0.5, -1.0}, 0.4);
    const double z = 2.7;
    const double expect = 0.8 * z - (std::log(0.7) + std::log(2.2) + std::log(3.7)) / 3;
    CHECK(g_eval(ev, z, 0).real() == doctest::Approx(expect).epsilon(1e-14));
    CHECK(ev.g_real_offset(0.7, 0) == doctest::Approx(expect).epsilon(1e-14));
    for (int k = 1; k <= 3; ++k)
        CHECK(ev.g_real_offset(0.7, k) == doctest::Approx(g_eval(ev, z, k).real()).epsilon(1e-13));
    // Conjugate symmetry off the real axis.
    const std::complex<double> w(2.1, 0.8);
    CHECK(std::abs(g_eval(ev, w, 0) - std::conj(g_eval(ev, std::conj(w), 0))) < 1e-14);
    CHECK_THROWS_AS(g_eval(ev, 0.5, 0), DomainError);
    CHECK(log_cn(10, 0.3) == doctest::Approx(std::lgamma(5.0) - std::log(2 * M_PI) - 4 * std::log(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(log_cn(0, 1.0), DomainError);
}

TEST_CASE("contour diagnostics") {
    const auto sp = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 800, 3);
    for (double beta : {0.25, 1.0}) {
        const auto r = log_partition_contour(GEvaluator(sp, beta));
        CHECK(r.imag_residual < 1e-10);
        CHECK(r.quad_abs_err < 1e-8);
        CHECK(r.truncation_T > 0.0);
        CHECK(r.method == FreeEnergyMethod::contour);
        CHECK(r.gamma > sp.lambda1());
    }
}

TEST_CASE("method names round trip") {
    for (auto m : {FreeEnergyMethod::contour, FreeEnergyMethod::saddle, FreeEnergyMethod::sphere_mc,
                   FreeEnergyMethod::closed_form})
        CHECK(parse_free_energy_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_free_energy_method("bogus"), ValidationError);
}
