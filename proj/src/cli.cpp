#include "ssklab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ssklab/ensembles.hpp"
#include "ssklab/errors.hpp"
#include "ssklab/experiments.hpp"
#include "ssklab/format.hpp"
#include "ssklab/partition.hpp"
#include "ssklab/spectral_theory.hpp"
#include "ssklab/special_functions.hpp"

namespace ssklab {

namespace {

struct EnsembleArgs {
    std::string kind = "wigner_real";
    int n = 100;
    std::optional<int> k_rows;
    std::string disorder = "gaussian";
    std::optional<double> w2;
    std::string symmetry = "real";

    void add_to(CLI::App& app) {
        app.add_option("--ensemble", kind, "wigner_real | wigner_complex | ssk_coupling | sample_covariance")
            ->capture_default_str();
        app.add_option("--n", n, "matrix size N")->capture_default_str();
        app.add_option("--k", k_rows, "rows K of the sample covariance data matrix (default N)");
        app.add_option("--disorder", disorder, "gaussian | rademacher | uniform")->capture_default_str();
        app.add_option("--w2", w2, "diagonal variance N E[M_ii^2] (default 2 real, 1 complex, 0 ssk)");
        app.add_option("--symmetry", symmetry, "real | complex (sample_covariance only; Wigner kinds imply it)")
            ->capture_default_str();
    }

    EnsembleSpec build() const {
        const EnsembleKind k = parse_ensemble_kind(kind);
        const DisorderName dn = parse_disorder(disorder);
        EnsembleSpec s;
        switch (k) {
            case EnsembleKind::wigner_real:
                s = EnsembleSpec::wigner(n, DisorderSpec::named(dn, w2.value_or(2.0)), Symmetry::real);
                break;
            case EnsembleKind::wigner_complex:
                s = EnsembleSpec::wigner(n, DisorderSpec::named(dn, w2.value_or(1.0)), Symmetry::complex);
                break;
            case EnsembleKind::ssk_coupling:
                if (w2 && *w2 != 0.0) throw ValidationError("ssk_coupling has w2 = 0");
                s = EnsembleSpec::ssk(n, DisorderSpec::named(dn, 0.0));
                break;
            case EnsembleKind::sample_covariance:
                s = EnsembleSpec::sample_covariance(n, k_rows.value_or(n), DisorderSpec::named(dn, w2.value_or(2.0)),
                                                    parse_symmetry(symmetry));
                break;
        }
        s.validate();
        return s;
    }
};

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open output file '" + path + "'");
    return os;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open input file '" + path + "'");
    return is;
}

LimitLaw make_law(const std::string& name, double d) {
    if (name == "semicircle") return LimitLaw::semicircle();
    if (name == "marchenko_pastur" || name == "mp") return LimitLaw::marchenko_pastur(d);
    throw ValidationError("unknown law '" + name + "'");
}

// Oracle checks that need no reference data.
std::string run_validation_suite(bool& all_pass) {
    std::string checks = "[";
    all_pass = true;
    auto record = [&](std::string_view name, double error, double tol) {
        const bool pass = std::isfinite(error) && error <= tol;
        all_pass = all_pass && pass;
        JsonObject o;
        o.add("name", name).add("error", error).add("tolerance", tol).add("pass", pass);
        if (checks.size() > 1) checks += ",";
        checks += o.str();
    };

    // N = 2, lambda = (1, -1): Z is the circle average of exp(2 beta cos 2 theta) = I0(2 beta).
    for (double beta : {0.3, 1.0, 3.0}) {
        const double exact = 0.5 * std::log(std::cyl_bessel_i(0.0, 2.0 * beta));
        const double f = log_partition_contour(GEvaluator({1.0, -1.0}, beta)).value;
        record("bessel_n2_beta" + format_double(beta, 3), std::abs(f / exact - 1.0), 1e-8);
    }
    // M = 0: the Hamiltonian vanishes, so F_N = 0 exactly.
    record("zero_matrix", std::abs(log_partition_contour(GEvaluator(std::vector<double>(6, 0.0), 0.7)).value),
           1e-12);

    const Spectrum sp = sample_gaussian_spectrum_fast({FastKind::goe, 1.0}, 60, 12345);
    const double beta = 0.4, c = 0.75, a = 1.6;
    const double f = log_partition_contour(GEvaluator(sp, beta)).value;
    std::vector<double> shifted = sp.eigenvalues, scaled = sp.eigenvalues;
    for (auto& v : shifted) v += c;
    for (auto& v : scaled) v *= a;
    record("shift_covariance", std::abs(log_partition_contour(GEvaluator(shifted, beta)).value - (f + beta * c)),
           1e-9);
    record("scale_covariance",
           std::abs(log_partition_contour(GEvaluator(scaled, beta)).value -
                    log_partition_contour(GEvaluator(sp.eigenvalues, a * beta)).value),
           1e-9);
    return checks + "]";
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Appends `--key value` for every line of the --config file whose flag is not
// already on the command line.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--config", "cannot open config file '" + path + "'");
    const std::vector<std::string> explicit_args = args;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line.substr(0, line.find_first_of("#;")));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": empty key");
        const std::string flag = "--" + key;
        if (given(explicit_args, flag)) continue;
        if (value == "true") {
            args.push_back(flag);
        } else if (value != "false") {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spherical SK free energies, limit constants and fluctuation experiments", "ssklab"};
    app.require_subcommand(1);

    // theory
    auto* theory = app.add_subcommand("theory", "Limit constants beta_c, gamma_hat, F, ell, sigma2 as JSON");
    std::string law_name = "semicircle", symmetry = "real", disorder = "gaussian";
    double beta = 0.25, d = 1.0;
    std::optional<double> w2, W4;
    theory->add_option("--law", law_name, "semicircle | marchenko_pastur")->capture_default_str();
    theory->add_option("--d", d, "Marchenko-Pastur ratio K/N >= 1")->capture_default_str();
    theory->add_option("--beta", beta, "inverse temperature")->capture_default_str();
    theory->add_option("--symmetry", symmetry, "real | complex")->capture_default_str();
    theory->add_option("--disorder", disorder, "gaussian | rademacher | uniform (sets W4)")->capture_default_str();
    theory->add_option("--w2", w2, "diagonal variance of the matrix entries (default 2 real, 1 complex)");
    theory->add_option("--W4", W4, "fourth moment of the entries (overrides --disorder)");

    // sample-spectrum
    auto* sample = app.add_subcommand("sample-spectrum", "Sample one spectrum and write it as CSV");
    EnsembleArgs sample_ens;
    sample_ens.add_to(*sample);
    std::uint64_t sample_seed = 0;
    std::string sample_method = "dense", sample_output;
    sample->add_option("--seed", sample_seed, "random seed")->capture_default_str();
    sample->add_option("--method", sample_method, "dense | tridiagonal (Gaussian GOE/GUE/real Wishart)")
        ->capture_default_str();
    sample->add_option("--output", sample_output, "output CSV path (default stdout)");

    // free-energy
    auto* fe = app.add_subcommand("free-energy", "Free energy F_N of a spectrum CSV");
    std::string fe_input, fe_method = "contour";
    std::optional<std::string> fe_symmetry;
    double fe_beta = 0.25;
    fe->add_option("input,--input", fe_input, "spectrum CSV path")->required();
    fe->add_option("--beta", fe_beta, "inverse temperature")->capture_default_str();
    fe->add_option("--method", fe_method, "contour | saddle")->capture_default_str();
    fe->add_option("--symmetry", fe_symmetry, "real | complex (default from the CSV ensemble)");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Monte Carlo fluctuation experiment; JSONL records plus summary");
    EnsembleArgs ex_ens;
    ex_ens.add_to(*ex);
    std::string ex_statistic = "high_temp", ex_method = "contour", ex_sampler = "fast", ex_output;
    double ex_beta = 0.25, ex_epsilon = 0.3;
    long ex_trials = 100;
    std::uint64_t ex_seed = 0;
    int ex_workers = 0;
    bool ex_timing = false;
    ex->add_option("--statistic", ex_statistic, "high_temp | low_temp | edge | linear_stat | rigidity")
        ->capture_default_str();
    ex->add_option("--beta", ex_beta, "inverse temperature")->capture_default_str();
    ex->add_option("--trials", ex_trials, "number of disorder samples")->capture_default_str();
    ex->add_option("--seed", ex_seed, "master seed")->capture_default_str();
    ex->add_option("--method", ex_method, "contour | saddle")->capture_default_str();
    ex->add_option("--sampler", ex_sampler, "fast | dense")->capture_default_str();
    ex->add_option("--epsilon", ex_epsilon, "rigidity exponent")->capture_default_str();
    ex->add_option("--workers", ex_workers, "worker threads (0: SSKLAB_THREADS or all cores)")->capture_default_str();
    ex->add_option("--output", ex_output, "JSONL path (default $SSKLAB_OUT/experiment-<statistic>-n<N>-seed<seed>.jsonl)");
    ex->add_flag("--timing", ex_timing, "include wall_time_ms in records (breaks byte reproducibility)");

    // analyze
    auto* an = app.add_subcommand("analyze", "Summarize a JSONL record file against a target law");
    std::string an_input, an_target = "gaussian";
    double an_mean = 0.0, an_variance = 1.0;
    an->add_option("input,--input", an_input, "JSONL path")->required();
    an->add_option("--target", an_target, "gaussian | tw1 | tw2")->capture_default_str();
    an->add_option("--mean", an_mean, "gaussian target mean")->capture_default_str();
    an->add_option("--variance", an_variance, "gaussian target variance")->capture_default_str();

    // tw-table
    auto* tw = app.add_subcommand("tw-table", "Tracy-Widom F1, F2 table as CSV");
    double tw_tol = 1e-16, tw_ds = 0.005;
    std::string tw_output;
    tw->add_option("--tol", tw_tol, "ODE tolerance")->capture_default_str();
    tw->add_option("--ds", tw_ds, "grid spacing (must divide 18)")->capture_default_str();
    tw->add_option("--output", tw_output, "output CSV path (default stdout)");

    // validate
    auto* val = app.add_subcommand("validate", "Run the built-in oracle checks");

    std::string config_path;
    for (auto* sub : {theory, sample, fe, ex, an, tw})
        sub->add_option("--config", config_path, "file of key = value lines; explicit flags win");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_file(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*theory) {
            const Symmetry sym = parse_symmetry(symmetry);
            const LimitLaw law = make_law(law_name, d);
            DisorderSpec dis = DisorderSpec::named(parse_disorder(disorder),
                                                   w2.value_or(sym == Symmetry::real ? 2.0 : 1.0));
            if (W4) dis = DisorderSpec::custom(dis.w2, dis.W3, *W4);
            // Complex entries are built from two independent real parts.
            if (sym == Symmetry::complex && !W4) dis.W4 = 0.5 * (dis.W4 + 1.0);
            out << to_json(theory_constants(law, beta, sym, dis), 15) << "\n";
        } else if (*sample) {
            const EnsembleSpec spec = sample_ens.build();
            Spectrum s;
            if (parse_spectrum_method(sample_method) == SpectrumMethod::tridiagonal) {
                ExperimentConfig c;
                c.ensemble = spec;
                c.sampler = Sampler::fast;
                s = sample_trial_spectrum(c, sample_seed);
            } else {
                s = sample_spectrum(spec, sample_seed);
            }
            if (sample_output.empty()) {
                write_spectrum_csv(out, s);
            } else {
                auto os = open_output(sample_output);
                write_spectrum_csv(os, s);
                err << "wrote " << s.n() << " eigenvalues to " << sample_output << "\n";
            }
        } else if (*fe) {
            auto is = open_input(fe_input);
            const Spectrum s = read_spectrum_csv(is);
            const Symmetry sym = fe_symmetry ? parse_symmetry(*fe_symmetry) : s.ensemble.symmetry;
            const FreeEnergyMethod m = parse_free_energy_method(fe_method);
            if (m != FreeEnergyMethod::contour && m != FreeEnergyMethod::saddle)
                throw ValidationError("free-energy --method must be contour or saddle");
            const GEvaluator ev(s, fe_beta, sym);
            const FreeEnergySample r = m == FreeEnergyMethod::contour ? log_partition_contour(ev) : free_energy_saddle(ev);
            JsonObject o;
            o.add("F", r.value).add("gamma", r.gamma).add("method", to_string(r.method));
            if (m == FreeEnergyMethod::contour)
                o.add("quad_abs_err", r.quad_abs_err).add("T", r.truncation_T);
            else
                o.add_null("quad_abs_err").add_null("T");
            out << o.str() << "\n";
        } else if (*ex) {
            ExperimentConfig c;
            c.ensemble = ex_ens.build();
            c.beta = ex_beta;
            c.trials = ex_trials;
            c.master_seed = ex_seed;
            c.statistic = parse_statistic(ex_statistic);
            c.method = parse_free_energy_method(ex_method);
            c.sampler = parse_sampler(ex_sampler);
            c.epsilon = ex_epsilon;
            c.workers = ex_workers;
            c.record_timing = ex_timing;
            c.output_path = !ex_output.empty()
                                ? ex_output
                                : default_output_dir() + "/experiment-" + std::string(to_string(c.statistic)) + "-n" +
                                      std::to_string(c.ensemble.n) + "-seed" + std::to_string(c.master_seed) + ".jsonl";
            const auto records = run_experiment(c);
            err << "wrote " << records.size() << " records to " << c.output_path << "\n";

            long failed = 0;
            for (const auto& r : records) failed += r.ok() ? 0 : 1;
            std::string summary;
            if (c.statistic == Statistic::rigidity) {
                const double threshold = std::pow(static_cast<double>(c.ensemble.n), c.epsilon);
                long passed = 0;
                double worst = 0.0;
                for (const auto& r : records) {
                    if (!r.ok()) continue;
                    passed += r.statistic_value <= threshold ? 1 : 0;
                    worst = std::max(worst, r.statistic_value);
                }
                JsonObject o;
                o.add("n_trials", static_cast<long long>(records.size()))
                    .add("n_failed", static_cast<long long>(failed))
                    .add("epsilon", c.epsilon)
                    .add("threshold", threshold)
                    .add("pass_count", static_cast<long long>(passed))
                    .add("max_scaled_gap", worst);
                summary = o.str();
            } else if (records.size() - failed < 30) {
                JsonObject o;
                o.add("n_trials", static_cast<long long>(records.size()))
                    .add("n_failed", static_cast<long long>(failed))
                    .add_null("summary");
                summary = o.str();
                err << "fewer than 30 successful trials; no distributional summary\n";
            } else {
                const TheoryConstants t =
                    theory_constants(c.ensemble.law(), c.beta, c.ensemble.symmetry, c.ensemble.matrix_moments());
                summary = to_json(summarize(records, default_target(c), t));
            }
            auto os = open_output(c.output_path + ".summary.json");
            os << summary << "\n";
            out << summary << "\n";
        } else if (*an) {
            auto is = open_input(an_input);
            const auto records = read_jsonl(is);
            TargetLaw target;
            if (an_target == "gaussian")
                target = TargetLaw::gaussian(an_mean, an_variance);
            else if (an_target == "tw1")
                target = TargetLaw::tw1();
            else if (an_target == "tw2")
                target = TargetLaw::tw2();
            else
                throw ValidationError("unknown target '" + an_target + "'");
            out << to_json(summarize(records, target)) << "\n";
        } else if (*tw) {
            const TWTable t = TWTable::build(tw_tol, tw_ds);
            std::ostringstream csv;
            csv << "# tracy-widom tol=" << format_double(tw_tol, 17) << " ds=" << format_double(tw_ds, 17) << "\n";
            csv << "s,F1,F2\n";
            for (std::size_t i = 0; i < t.grid.size(); ++i)
                csv << format_double(t.grid[i]) << "," << format_double(t.f1[i]) << "," << format_double(t.f2[i])
                    << "\n";
            if (tw_output.empty()) {
                out << csv.str();
            } else {
                auto os = open_output(tw_output);
                os << csv.str();
            }
        } else if (*val) {
            bool pass = false;
            const std::string checks = run_validation_suite(pass);
            JsonObject o;
            o.add_raw("checks", checks).add("pass", pass);
            out << o.str() << "\n";
            if (!pass) {
                err << "validation failed\n";
                return 2;
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace ssklab
