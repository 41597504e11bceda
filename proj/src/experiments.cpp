#include "ssklab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "ssklab/errors.hpp"
#include "ssklab/format.hpp"
#include "ssklab/numerics.hpp"
#include "ssklab/rng.hpp"
#include "ssklab/special_functions.hpp"

namespace ssklab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string_view to_string(Statistic s) {
    switch (s) {
        case Statistic::high_temp: return "high_temp";
        case Statistic::low_temp: return "low_temp";
        case Statistic::edge: return "edge";
        case Statistic::linear_stat: return "linear_stat";
        case Statistic::rigidity: return "rigidity";
    }
    return "high_temp";
}

Statistic parse_statistic(std::string_view s) {
    for (auto st : {Statistic::high_temp, Statistic::low_temp, Statistic::edge, Statistic::linear_stat,
                    Statistic::rigidity})
        if (s == to_string(st)) return st;
    throw ValidationError("unknown statistic '" + std::string(s) + "'");
}

std::string_view to_string(Sampler s) { return s == Sampler::fast ? "fast" : "dense"; }

Sampler parse_sampler(std::string_view s) {
    if (s == "fast") return Sampler::fast;
    if (s == "dense") return Sampler::dense;
    throw ValidationError("unknown sampler '" + std::string(s) + "'");
}

namespace {

FastEnsemble fast_kind(const EnsembleSpec& e) {
    const bool gaussian = e.disorder.name == DisorderName::gaussian;
    switch (e.kind) {
        case EnsembleKind::wigner_real:
            if (gaussian && e.disorder.w2 == 2.0) return {FastKind::goe, 1.0};
            break;
        case EnsembleKind::wigner_complex:
            if (gaussian && e.disorder.w2 == 1.0) return {FastKind::gue, 1.0};
            break;
        case EnsembleKind::sample_covariance:
            if (gaussian && e.symmetry == Symmetry::real)
                return {FastKind::wishart_real, static_cast<double>(e.k_rows) / e.n};
            break;
        case EnsembleKind::ssk_coupling: break;
    }
    throw ValidationError("fast sampler supports only GOE, GUE and real Gaussian sample covariance; use --sampler dense");
}

bool needs_free_energy(Statistic s) { return s == Statistic::high_temp || s == Statistic::low_temp; }

}  // namespace

void ExperimentConfig::validate() const {
    ensemble.validate();
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive and finite");
    if (method != FreeEnergyMethod::contour && method != FreeEnergyMethod::saddle)
        throw ValidationError("experiment method must be contour or saddle");
    if (sampler == Sampler::fast) (void)fast_kind(ensemble);
    if (statistic == Statistic::rigidity && !(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    const double be = effective_beta(beta, ensemble.symmetry);
    const double bc = beta_critical(ensemble.law(), Symmetry::real);
    if ((statistic == Statistic::high_temp || statistic == Statistic::linear_stat) && !(be < bc))
        throw RegimeError("statistic " + std::string(to_string(statistic)) + " needs the high-temperature regime");
    if (statistic == Statistic::low_temp && !(be > bc))
        throw RegimeError("statistic low_temp needs the low-temperature regime");
}

int resolve_workers(int requested) {
    int w = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("SSKLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) w = std::min(w, cap);
    }
    return std::max(1, w);
}

std::uint64_t trial_seed(std::uint64_t master_seed, long trial_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

Spectrum sample_trial_spectrum(const ExperimentConfig& config, std::uint64_t seed) {
    if (config.sampler == Sampler::fast) {
        Spectrum s = sample_gaussian_spectrum_fast(fast_kind(config.ensemble), config.ensemble.n, seed);
        s.ensemble = config.ensemble;
        return s;
    }
    return sample_spectrum(config.ensemble, seed);
}

namespace {

// Configuration-wide constants shared read-only by all workers.
struct TrialContext {
    LimitLaw law;
    double F = kNaN;
    double low_temp_scale = kNaN;
    std::vector<double> classical;

    explicit TrialContext(const ExperimentConfig& c) : law(c.ensemble.law()) {
        if (needs_free_energy(c.statistic)) F = limit_free_energy(law, c.beta, c.ensemble.symmetry);
        if (c.statistic == Statistic::low_temp) {
            // The Hermitian free energy is twice a real one at beta/2, hence the factor 2.
            const double dbeta = effective_beta(c.beta, c.ensemble.symmetry) - beta_critical(law, Symmetry::real);
            const double factor = c.ensemble.symmetry == Symmetry::real ? 1.0 : 2.0;
            low_temp_scale = std::pow(law.s_nu() * M_PI, 2.0 / 3.0) * factor * dbeta;
        }
        if (c.statistic == Statistic::rigidity) classical = classical_locations(law, c.ensemble.n);
    }
};

TrialRecord run_trial_impl(const ExperimentConfig& c, const TrialContext& ctx, long i) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord r;
    r.trial_index = i;
    r.seed = trial_seed(c.master_seed, i);
    r.F_N = kNaN;
    r.gamma = kNaN;
    r.statistic_value = kNaN;
    r.lambda1 = kNaN;
    try {
        const Spectrum sp = sample_trial_spectrum(c, r.seed);
        r.lambda1 = sp.lambda1();
        const double n = sp.n();
        if (needs_free_energy(c.statistic)) {
            const GEvaluator ev(sp, c.beta, c.ensemble.symmetry);
            const FreeEnergySample fe =
                c.method == FreeEnergyMethod::contour ? log_partition_contour(ev) : free_energy_saddle(ev);
            r.F_N = fe.value;
            r.gamma = fe.gamma;
            if (c.statistic == Statistic::high_temp)
                r.statistic_value = n * (fe.value - ctx.F);
            else
                r.statistic_value = std::pow(n, 2.0 / 3.0) * (fe.value - ctx.F) / ctx.low_temp_scale;
        } else if (c.statistic == Statistic::edge) {
            r.statistic_value = edge_statistic(sp, ctx.law);
        } else if (c.statistic == Statistic::linear_stat) {
            r.statistic_value = linear_statistic(sp, ctx.law, c.beta);
        } else {
            r.statistic_value = rigidity_report(sp, ctx.classical, c.epsilon).max_scaled_gap;
        }
        if (!std::isfinite(r.statistic_value)) throw NumericError("non-finite statistic");
    } catch (const DomainError& e) {
        r.failure = std::string("domain: ") + e.what();
        r.statistic_value = kNaN;
    } catch (const NumericError& e) {
        r.failure = std::string("numeric: ") + e.what();
        r.statistic_value = kNaN;
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& config, long trial_index) {
    config.validate();
    return run_trial_impl(config, TrialContext(config), trial_index);
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const TrialContext ctx(config);
    std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
    const int workers = static_cast<int>(std::min<long>(resolve_workers(config.workers), config.trials));

    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (long i = next++; i < config.trials; i = next++) {
            try {
                records[static_cast<std::size_t>(i)] = run_trial_impl(config, ctx, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = config.trials;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    if (!config.output_path.empty()) {
        std::ofstream os(config.output_path, std::ios::binary);
        if (!os) throw ValidationError("cannot open output file '" + config.output_path + "'");
        write_jsonl(os, records, config.record_timing);
        if (!os) throw ValidationError("failed writing '" + config.output_path + "'");
    }
    return records;
}

TargetLaw TargetLaw::gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw ValidationError("gaussian target needs positive variance");
    return {TargetKind::gaussian, mean, variance};
}

TargetLaw TargetLaw::tw1() { return {TargetKind::tw1, kNaN, kNaN}; }
TargetLaw TargetLaw::tw2() { return {TargetKind::tw2, kNaN, kNaN}; }

double TargetLaw::cdf(double x) const {
    switch (kind) {
        case TargetKind::gaussian: return gaussian_cdf(x, mean, variance);
        case TargetKind::tw1: return tw_table().cdf_clamped(x, TWKind::tw1);
        case TargetKind::tw2: return tw_table().cdf_clamped(x, TWKind::tw2);
    }
    return kNaN;
}

std::string TargetLaw::descriptor() const {
    switch (kind) {
        case TargetKind::gaussian:
            return "gaussian(" + format_double(mean) + "," + format_double(variance) + ")";
        case TargetKind::tw1: return "tw1";
        case TargetKind::tw2: return "tw2";
    }
    return "";
}

TargetLaw linear_statistic_target(const ExperimentConfig& config) {
    const LimitLaw law = config.ensemble.law();
    const Symmetry sym = config.ensemble.symmetry;
    const TheoryConstants t = theory_constants(law, config.beta, sym, config.ensemble.matrix_moments());
    if (t.regime != Regime::high) throw RegimeError("linear statistic target needs the high-temperature regime");
    // ell = ell_1 - M / 2 and sigma2 = V / 4 (real); ell = ell_1 - M and sigma2 = V (complex),
    // with ell_1 = log(2 beta_eff) - log(f2) / 2.
    const double ell1 = std::log(2.0 * effective_beta(config.beta, sym)) - 0.5 * std::log(t.f2);
    if (sym == Symmetry::real) return TargetLaw::gaussian(2.0 * (ell1 - t.ell), 4.0 * t.sigma2);
    return TargetLaw::gaussian(ell1 - t.ell, t.sigma2);
}

TargetLaw default_target(const ExperimentConfig& config) {
    const bool real = config.ensemble.symmetry == Symmetry::real;
    switch (config.statistic) {
        case Statistic::high_temp: {
            const TheoryConstants t = theory_constants(config.ensemble.law(), config.beta, config.ensemble.symmetry,
                                                       config.ensemble.matrix_moments());
            return TargetLaw::gaussian(t.ell, t.sigma2);
        }
        case Statistic::low_temp:
        case Statistic::edge: return real ? TargetLaw::tw1() : TargetLaw::tw2();
        case Statistic::linear_stat: return linear_statistic_target(config);
        case Statistic::rigidity: break;
    }
    throw ValidationError("rigidity experiments have no distributional target");
}

ExperimentSummary summarize(const std::vector<TrialRecord>& records, const TargetLaw& target) {
    ExperimentSummary s;
    s.target = target;
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        if (r.ok())
            values.push_back(r.statistic_value);
        else
            ++s.n_failed;
    }
    s.n_trials = static_cast<long>(records.size());
    if (values.size() < 30) throw ValidationError("summarize needs at least 30 successful records");
    if (static_cast<double>(s.n_failed) >= 0.01 * static_cast<double>(s.n_trials))
        throw NumericError("failure rate " + std::to_string(s.n_failed) + "/" + std::to_string(s.n_trials) +
                           " is not below 1%");
    const double m = static_cast<double>(values.size());
    s.empirical_mean = pairwise_sum(values) / m;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.empirical_mean) * (values[i] - s.empirical_mean);
    s.empirical_variance = pairwise_sum(sq) / (m - 1.0);
    s.ks_distance = ks_statistic(std::move(values), [&](double x) { return target.cdf(x); });
    return s;
}

ExperimentSummary summarize(const std::vector<TrialRecord>& records, const TargetLaw& target,
                            const TheoryConstants& theory) {
    ExperimentSummary s = summarize(records, target);
    s.theory = theory;
    s.has_theory = true;
    return s;
}

RigidityReport rigidity_report(const Spectrum& spectrum, const std::vector<double>& classical, double epsilon) {
    const int n = spectrum.n();
    if (static_cast<int>(classical.size()) != n) throw ValidationError("rigidity_report: size mismatch");
    const double n23 = std::pow(static_cast<double>(n), 2.0 / 3.0);
    double worst = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double khat = std::min(k, n + 1 - k);
        const double gap = std::cbrt(khat) * n23 * std::abs(spectrum.eigenvalues[k - 1] - classical[k - 1]);
        worst = std::max(worst, gap);
    }
    return {worst, worst <= std::pow(static_cast<double>(n), epsilon)};
}

RigidityReport rigidity_report(const Spectrum& spectrum, const LimitLaw& law, double epsilon) {
    return rigidity_report(spectrum, classical_locations(law, spectrum.n()), epsilon);
}

double linear_statistic(const Spectrum& spectrum, const LimitLaw& law, double beta) {
    const Symmetry sym = spectrum.ensemble.symmetry;
    const double g = gamma_hat(law, beta, sym);
    if (!std::isfinite(g)) throw RegimeError("linear_statistic needs the high-temperature regime");
    if (!(g > spectrum.lambda1())) throw DomainError("gamma_hat <= lambda_1");
    std::vector<double> terms(spectrum.eigenvalues.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::log(g - spectrum.eigenvalues[i]);
    return pairwise_sum(terms) - spectrum.n() * nu_log_integral(law, g);
}

std::string to_json(const TrialRecord& r, bool include_timing) {
    JsonObject o;
    o.add("trial_index", static_cast<long long>(r.trial_index))
        .add("seed", static_cast<unsigned long long>(r.seed))
        .add("F_N", r.F_N)
        .add("lambda1", r.lambda1)
        .add("statistic_value", r.statistic_value)
        .add("gamma", r.gamma);
    if (include_timing) o.add("wall_time_ms", r.wall_time_ms);
    if (r.ok())
        o.add_null("failure");
    else
        o.add("failure", std::string_view(r.failure));
    return o.str();
}

namespace {
double number_or_nan(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return kNaN;
    if (!it->is_number()) throw ValidationError(std::string("field '") + key + "' is not a number");
    return it->get<double>();
}
}  // namespace

TrialRecord trial_record_from_json(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSONL record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("trial_index") || !j.contains("statistic_value"))
        throw ValidationError("JSONL record lacks trial_index or statistic_value");
    TrialRecord r;
    r.trial_index = j.at("trial_index").get<long>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
    r.F_N = number_or_nan(j, "F_N");
    r.lambda1 = number_or_nan(j, "lambda1");
    r.statistic_value = number_or_nan(j, "statistic_value");
    r.gamma = number_or_nan(j, "gamma");
    r.wall_time_ms = number_or_nan(j, "wall_time_ms");
    if (const auto it = j.find("failure"); it != j.end() && it->is_string()) r.failure = it->get<std::string>();
    if (r.ok() && !std::isfinite(r.statistic_value)) r.failure = "non-finite statistic";
    return r;
}

void write_jsonl(std::ostream& os, const std::vector<TrialRecord>& records, bool include_timing) {
    for (const auto& r : records) os << to_json(r, include_timing) << '\n';
}

std::vector<TrialRecord> read_jsonl(std::istream& is) {
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(trial_record_from_json(line));
    }
    return out;
}

std::string to_json(const TheoryConstants& t, int digits) {
    JsonObject o(digits);
    o.add("beta", t.beta)
        .add("symmetry", to_string(t.symmetry))
        .add("beta_c", t.beta_c)
        .add("gamma_hat", t.gamma_hat)
        .add("F", t.F)
        .add("ell", t.ell)
        .add("sigma2", t.sigma2)
        .add("f0", t.f0)
        .add("f2", t.f2)
        .add("regime", to_string(t.regime));
    return o.str();
}

std::string to_json(const ExperimentSummary& s) {
    JsonObject o;
    o.add("n_trials", static_cast<long long>(s.n_trials))
        .add("n_failed", static_cast<long long>(s.n_failed))
        .add("empirical_mean", s.empirical_mean)
        .add("empirical_variance", s.empirical_variance)
        .add("ks_distance", s.ks_distance)
        .add("target_law", std::string_view(s.target.descriptor()))
        .add("ks_note", "KS thresholds are acceptance choices calibrated at finite N, not limit-theorem constants");
    if (s.has_theory)
        o.add_raw("theory", to_json(s.theory));
    else
        o.add_null("theory");
    return o.str();
}

std::string default_output_dir() {
    const char* env = std::getenv("SSKLAB_OUT");
    return env && *env ? std::string(env) : std::string(".");
}

}  // namespace ssklab
