#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ssklab/errors.hpp"
#include "ssklab/experiments.hpp"
#include "ssklab/rng.hpp"

using namespace ssklab;

namespace {

ExperimentConfig small_config(Statistic st, double beta) {
    ExperimentConfig c;
    c.ensemble = EnsembleSpec::goe(120);
    c.beta = beta;
    c.trials = 40;
    c.master_seed = 17;
    c.statistic = st;
    return c;
}

std::string jsonl(const std::vector<TrialRecord>& r) {
    std::ostringstream os;
    write_jsonl(os, r, false);
    return os.str();
}

}  // namespace

TEST_CASE("config validation enforces the regime of each statistic") {
    CHECK_NOTHROW(small_config(Statistic::high_temp, 0.25).validate());
    CHECK_THROWS_AS(small_config(Statistic::high_temp, 0.7).validate(), RegimeError);
    CHECK_THROWS_AS(small_config(Statistic::low_temp, 0.3).validate(), RegimeError);
    CHECK_THROWS_AS(small_config(Statistic::linear_stat, 0.5).validate(), RegimeError);
    auto c = small_config(Statistic::high_temp, 0.25);
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(Statistic::high_temp, 0.25);
    c.ensemble = EnsembleSpec::ssk(50, DisorderSpec::rademacher());
    CHECK_THROWS_AS(c.validate(), ValidationError);  // fast path needs Gaussian GOE
    c.sampler = Sampler::dense;
    CHECK_NOTHROW(c.validate());
    // GUE: regime is decided by beta / 2 against the real critical value.
    c = small_config(Statistic::high_temp, 0.9);
    c.ensemble = EnsembleSpec::gue(50);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("records are ordered, reproducible and independent of worker count") {
    auto c = small_config(Statistic::high_temp, 0.25);
    c.workers = 1;
    const auto a = run_experiment(c);
    c.workers = 4;
    const auto b = run_experiment(c);
    c.workers = 8;
    const auto d = run_experiment(c);
    REQUIRE(a.size() == 40);
    for (long i = 0; i < 40; ++i) {
        CHECK(a[i].trial_index == i);
        CHECK(a[i].seed == trial_seed(17, i));
        CHECK(a[i].ok());
    }
    CHECK(jsonl(a) == jsonl(b));
    CHECK(jsonl(a) == jsonl(d));
    // A single trial can be recomputed from (config, index).
    const auto t = run_trial(c, 13);
    CHECK(to_json(t, false) == to_json(a[13], false));
}

TEST_CASE("SSKLAB_THREADS caps the worker count") {
    setenv("SSKLAB_THREADS", "2", 1);
    CHECK(resolve_workers(8) == 2);
    CHECK(resolve_workers(1) == 1);
    unsetenv("SSKLAB_THREADS");
    CHECK(resolve_workers(3) == 3);
}

TEST_CASE("statistic definitions") {
    auto c = small_config(Statistic::high_temp, 0.25);
    c.trials = 3;
    const auto hi = run_experiment(c);
    for (const auto& r : hi) CHECK(r.statistic_value == doctest::Approx(120 * (r.F_N - 0.0625)).epsilon(1e-12));

    c = small_config(Statistic::low_temp, 1.0);
    c.trials = 3;
    const double F = limit_free_energy(LimitLaw::semicircle(), 1.0, Symmetry::real);
    for (const auto& r : run_experiment(c))
        CHECK(r.statistic_value == doctest::Approx(std::pow(120.0, 2.0 / 3) * (r.F_N - F) / 0.5).epsilon(1e-12));

    c = small_config(Statistic::edge, 1.0);
    c.trials = 3;
    for (const auto& r : run_experiment(c)) {
        CHECK(r.statistic_value == doctest::Approx(std::pow(120.0, 2.0 / 3) * (r.lambda1 - 2.0)).epsilon(1e-12));
        CHECK(std::isnan(r.F_N));
    }
}

TEST_CASE("summaries") {
    RandomStream rng(5);
    std::vector<TrialRecord> recs(10000);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].trial_index = static_cast<long>(i);
        recs[i].statistic_value = -0.07 + std::sqrt(0.14) * rng.normal();
    }
    const auto s = summarize(recs, TargetLaw::gaussian(-0.07, 0.14));
    CHECK(s.n_trials == 10000);
    CHECK(s.ks_distance < 0.03);
    CHECK(std::abs(s.empirical_mean + 0.07) < 3 * std::sqrt(0.14 / 10000));
    CHECK(std::abs(s.empirical_variance - 0.14) < 3 * 0.14 * std::sqrt(2.0 / 9999));
    CHECK(s.ks_distance >= 0.0);
    CHECK(s.ks_distance <= 1.0);

    CHECK_THROWS_AS(summarize({}, TargetLaw::tw1()), ValidationError);
    std::vector<TrialRecord> few(29);
    CHECK_THROWS_AS(summarize(few, TargetLaw::tw1()), ValidationError);
    // A 1% failure rate is too many.
    std::vector<TrialRecord> bad(recs.begin(), recs.begin() + 100);
    bad[3].failure = "numeric: test";
    CHECK_THROWS_AS(summarize(bad, TargetLaw::tw1()), NumericError);
}

TEST_CASE("JSONL round trip") {
    TrialRecord r;
    r.trial_index = 7;
    r.seed = 18446744073709551615ull;
    r.F_N = 0.1 + 1e-17;
    r.lambda1 = 2.0000000000000004;
    r.statistic_value = -1.2345678901234567;
    r.gamma = std::nan("");
    const auto line = to_json(r, false);
    CHECK(line.find("wall_time_ms") == std::string::npos);
    const auto back = trial_record_from_json(line);
    CHECK(back.seed == r.seed);
    CHECK(back.F_N == r.F_N);
    CHECK(back.lambda1 == r.lambda1);
    CHECK(back.statistic_value == r.statistic_value);
    CHECK(std::isnan(back.gamma));
    CHECK(back.ok());
    r.failure = "domain: gamma_hat <= lambda_1";
    r.statistic_value = std::nan("");
    CHECK(trial_record_from_json(to_json(r, true)).failure == r.failure);
    CHECK_THROWS_AS(trial_record_from_json("{not json"), ValidationError);
}

TEST_CASE("rigidity report") {
    const auto law = LimitLaw::semicircle();
    Spectrum s;
    s.eigenvalues = classical_locations(law, 500);
    const auto exact = rigidity_report(s, law, 0.3);
    CHECK(exact.max_scaled_gap == 0.0);
    CHECK(exact.pass);
    s.eigenvalues[0] += 1.0;
    CHECK_FALSE(rigidity_report(s, law, 0.3).pass);
    const auto g = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 1000, 2);
    CHECK(rigidity_report(g, law, 0.3).max_scaled_gap > 0.0);
}

TEST_CASE("linear statistic") {
    const auto law = LimitLaw::semicircle();
    Spectrum s;
    s.eigenvalues = classical_locations(law, 1000);
    CHECK(std::abs(linear_statistic(s, law, 0.25)) <= 2.0);
    // phi depends on gamma_hat - x only: shifting the spectrum is the same as moving gamma_hat.
    s.eigenvalues[0] = 2.6;
    CHECK_THROWS_AS(linear_statistic(s, law, 0.25), DomainError);
    CHECK_THROWS_AS(linear_statistic(s, law, 0.6), RegimeError);

    ExperimentConfig c = small_config(Statistic::linear_stat, 0.25);
    const auto t = linear_statistic_target(c);
    CHECK(t.mean == doctest::Approx(0.5 * std::log(0.75)).epsilon(1e-10));
    CHECK(t.variance == doctest::Approx(-2 * std::log(0.75)).epsilon(1e-10));
}

TEST_CASE("default targets") {
    CHECK(default_target(small_config(Statistic::low_temp, 1.0)).kind == TargetKind::tw1);
    auto c = small_config(Statistic::edge, 1.0);
    c.ensemble = EnsembleSpec::gue(50);
    CHECK(default_target(c).kind == TargetKind::tw2);
    const auto g = default_target(small_config(Statistic::high_temp, 0.25));
    CHECK(g.mean == doctest::Approx(0.25 * std::log(0.75)));
    CHECK(g.variance == doctest::Approx(-0.5 * std::log(0.75)));
    CHECK_THROWS_AS(default_target(small_config(Statistic::rigidity, 0.25)), ValidationError);
}
