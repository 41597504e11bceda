#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ssklab/cli.hpp"

using namespace ssklab;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "ssklab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir() {
    auto d = std::filesystem::temp_directory_path() / "ssklab_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("theory command") {
    const auto r = run({"theory", "--law", "semicircle", "--beta", "0.25", "--symmetry", "real"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["beta_c"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(j["gamma_hat"].get<double>() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(j["F"].get<double>() == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(j["regime"] == "high");
    for (const char* key : {"beta", "symmetry", "ell", "sigma2", "f0", "f2"}) CHECK(j.contains(key));
    const auto lo = nlohmann::json::parse(run({"theory", "--beta", "1"}).out);
    CHECK(lo["gamma_hat"].is_null());
    CHECK(lo["regime"] == "low");
}

TEST_CASE("exit codes") {
    CHECK(run({"theory", "--beta", "-1"}).code == 1);
    CHECK(run({"theory", "--bogus-flag", "1"}).code == 1);
    CHECK(run({"nosuchcommand"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"experiment", "--statistic", "high_temp", "--beta", "0.8", "--n", "20", "--trials", "2",
               "--output", (temp_dir() / "x.jsonl").string()})
              .code == 1);
}

TEST_CASE("help for every subcommand") {
    for (const char* sub : {"theory", "sample-spectrum", "free-energy", "experiment", "analyze", "tw-table", "validate"}) {
        const auto r = run({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Options") != std::string::npos);
    }
    const auto ex = run({"experiment", "--help"});
    for (const char* flag : {"--statistic", "--beta", "--n", "--trials", "--seed", "--method", "--sampler", "--workers",
                             "--output", "--config"})
        CHECK(ex.out.find(flag) != std::string::npos);
}

TEST_CASE("sample-spectrum output feeds free-energy unchanged") {
    const auto csv = temp_dir() / "spec.csv";
    REQUIRE(run({"sample-spectrum", "--n", "40", "--seed", "9", "--output", csv.string()}).code == 0);
    const auto r = run({"free-energy", csv.string(), "--beta", "0.3", "--method", "contour"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"F", "gamma", "method", "quad_abs_err", "T"}) CHECK(j.contains(key));
    CHECK(j["method"] == "contour");
    const auto s = nlohmann::json::parse(run({"free-energy", csv.string(), "--beta", "0.3", "--method", "saddle"}).out);
    CHECK(std::abs(s["F"].get<double>() - j["F"].get<double>()) < 0.01);
    const auto gue = temp_dir() / "gue.csv";
    REQUIRE(run({"sample-spectrum", "--ensemble", "wigner_complex", "--n", "30", "--method", "tridiagonal",
                 "--output", gue.string()})
                .code == 0);
    CHECK(run({"free-energy", gue.string(), "--beta", "0.3"}).code == 0);
    CHECK(run({"free-energy", (temp_dir() / "missing.csv").string(), "--beta", "0.3"}).code == 1);
}

TEST_CASE("experiment output is identical across runs and worker counts") {
    const auto a = temp_dir() / "a.jsonl", b = temp_dir() / "b.jsonl";
    const std::vector<std::string> base = {"experiment", "--statistic", "low_temp", "--beta", "1.0", "--n", "200",
                                           "--trials", "40", "--seed", "7"};
    auto args = base;
    args.insert(args.end(), {"--output", a.string(), "--workers", "1"});
    REQUIRE(run(args).code == 0);
    args = base;
    args.insert(args.end(), {"--output", b.string(), "--workers", "3"});
    const auto r = run(args);
    REQUIRE(r.code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(std::filesystem::exists(b.string() + ".summary.json"));
    const auto summary = nlohmann::json::parse(r.out);
    CHECK(summary["n_trials"] == 40);
    CHECK(summary["target_law"] == "tw1");

    const auto an = run({"analyze", a.string(), "--target", "tw1"});
    REQUIRE(an.code == 0);
    CHECK(nlohmann::json::parse(an.out)["ks_distance"] == summary["ks_distance"]);
}

TEST_CASE("config file: flat key = value, explicit flags win, unknown keys rejected") {
    const auto ini = temp_dir() / "theory.ini";
    std::ofstream(ini) << "# defaults\nbeta = 0.1\nsymmetry = real\n";
    const auto j = nlohmann::json::parse(run({"theory", "--config", ini.string()}).out);
    CHECK(j["beta"].get<double>() == doctest::Approx(0.1));
    const auto k = nlohmann::json::parse(run({"theory", "--config", ini.string(), "--beta", "0.2"}).out);
    CHECK(k["beta"].get<double>() == doctest::Approx(0.2));
    const auto bad = temp_dir() / "bad.ini";
    std::ofstream(bad) << "nonsense = 3\n";
    CHECK(run({"theory", "--config", bad.string()}).code == 1);
}

TEST_CASE("tw-table and validate") {
    const auto r = run({"tw-table"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# tracy-widom tol=", 0) == 0);
    CHECK(r.out.find("s,F1,F2\n") != std::string::npos);
    const auto v = run({"validate"});
    CHECK(v.code == 0);
    CHECK(nlohmann::json::parse(v.out)["pass"] == true);
}
