#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ssklab/ensembles.hpp"
#include "ssklab/partition.hpp"
#include "ssklab/spectral_theory.hpp"

namespace ssklab {

enum class Statistic { high_temp, low_temp, edge, linear_stat, rigidity };
std::string_view to_string(Statistic s);
Statistic parse_statistic(std::string_view s);

// fast: tridiagonal models (Gaussian GOE/GUE/real Wishart only); dense: sample
// the matrix and diagonalize.
enum class Sampler { fast, dense };
std::string_view to_string(Sampler s);
Sampler parse_sampler(std::string_view s);

struct ExperimentConfig {
    EnsembleSpec ensemble = EnsembleSpec::goe(100);
    double beta = 0.25;
    long trials = 100;
    std::uint64_t master_seed = 0;
    Statistic statistic = Statistic::high_temp;
    FreeEnergyMethod method = FreeEnergyMethod::contour;
    Sampler sampler = Sampler::fast;
    double epsilon = 0.3;       // rigidity exponent
    std::string output_path;    // empty: records are not written
    int workers = 0;            // 0: SSKLAB_THREADS or hardware concurrency
    bool record_timing = false; // wall times make JSONL output nondeterministic

    void validate() const;
};

struct TrialRecord {
    long trial_index = 0;
    std::uint64_t seed = 0;
    double F_N = 0.0;             // NaN when the statistic does not need it
    double lambda1 = 0.0;
    double statistic_value = 0.0; // NaN on failure
    double gamma = 0.0;           // NaN when F_N is not computed
    double wall_time_ms = 0.0;
    std::string failure;          // empty on success

    bool ok() const { return failure.empty(); }
};

// Worker count after applying the SSKLAB_THREADS cap.
int resolve_workers(int requested);

// Per-trial seed.
std::uint64_t trial_seed(std::uint64_t master_seed, long trial_index);

Spectrum sample_trial_spectrum(const ExperimentConfig& config, std::uint64_t seed);

TrialRecord run_trial(const ExperimentConfig& config, long trial_index);

// Records ordered by trial index whatever the worker count. Writes JSONL to
// config.output_path when it is set.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

enum class TargetKind { gaussian, tw1, tw2 };

struct TargetLaw {
    TargetKind kind = TargetKind::gaussian;
    double mean = 0.0, variance = 1.0;  // gaussian only

    static TargetLaw gaussian(double mean, double variance);
    static TargetLaw tw1();
    static TargetLaw tw2();
    double cdf(double x) const;
    std::string descriptor() const;
};

// The limit law the statistic should follow for this configuration.
TargetLaw default_target(const ExperimentConfig& config);

struct ExperimentSummary {
    long n_trials = 0;
    long n_failed = 0;
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    double ks_distance = 0.0;
    TargetLaw target;
    TheoryConstants theory;
    bool has_theory = false;
};

// Needs at least 30 successful records and a failure rate below 1%.
ExperimentSummary summarize(const std::vector<TrialRecord>& records, const TargetLaw& target);
ExperimentSummary summarize(const std::vector<TrialRecord>& records, const TargetLaw& target,
                            const TheoryConstants& theory);

struct RigidityReport {
    double max_scaled_gap = 0.0;
    bool pass = false;
};

RigidityReport rigidity_report(const Spectrum& spectrum, const LimitLaw& law, double epsilon);
RigidityReport rigidity_report(const Spectrum& spectrum, const std::vector<double>& classical, double epsilon);

// N_phi = sum log(gamma_hat - lambda_i) - N f0(beta). Throws DomainError when
// gamma_hat <= lambda_1.
double linear_statistic(const Spectrum& spectrum, const LimitLaw& law, double beta);

// Gaussian limit (M, V) of linear_statistic for the configuration.
TargetLaw linear_statistic_target(const ExperimentConfig& config);

std::string to_json(const TrialRecord& r, bool include_timing);
TrialRecord trial_record_from_json(std::string_view line);
void write_jsonl(std::ostream& os, const std::vector<TrialRecord>& records, bool include_timing);
std::vector<TrialRecord> read_jsonl(std::istream& is);

std::string to_json(const ExperimentSummary& s);
std::string to_json(const TheoryConstants& t, int digits = 17);

// Directory for default output files: SSKLAB_OUT, or "." when unset.
std::string default_output_dir();

}  // namespace ssklab
