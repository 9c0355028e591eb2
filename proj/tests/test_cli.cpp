#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cli/run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "netloop-cli-test";
    fs::create_directories(dir);
    return dir;
}

struct CmdResult {
    int status = -1;
    std::string out, err;
};

CmdResult run_netloop(const std::string& args) {
    static int n = 0;
    auto dir = scratch_dir();
    auto out = dir / ("out" + std::to_string(n) + ".txt");
    auto err = dir / ("err" + std::to_string(n) + ".txt");
    ++n;
    std::string cmd = std::string(NETLOOP_BIN) + " " + args + " >" +
                      out.string() + " 2>" + err.string();
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CmdResult res;
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

fs::path write_config(const std::string& name, const std::string& text) {
    auto p = scratch_dir() / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p;
}

const std::string kBenchmark = std::string(CONFIG_DIR) + "/example-benchmark.cfg";

std::string benchmark_json(const std::string& network,
                           const std::string& simulation) {
    return std::string(R"({
  "system": {
    "h": 1.0,
    "plant": {"num": [0.0051271], "den": [1.0, -1.051], "delay": 5},
    "controller": {"type": "fsp",
                   "C": {"num": [29.504, -29.017184], "den": [1.0, -1.0]},
                   "filter_pole": 0.95},
    "prefilter": {"num": [0.041317, -0.0247902], "den": [1.0, -0.9835]},
    "design_tau_A": 0
  },
  "network": )") +
           network + (simulation.empty() ? "" : ",\n  \"simulation\": " + simulation) +
           "\n}\n";
}

}  // namespace

TEST_CASE("gaintable reproduces the committed fixture byte for byte") {
    auto r = run_netloop("gaintable --lo 1 --hi 10");
    CHECK(r.status == 0);
    CHECK(r.out == slurp(std::string(FIXTURE_DIR) + "/gaintable_p3_1_10.csv"));
    CHECK(r.err.empty());
}

TEST_CASE("gaintable variants") {
    auto p1 = run_netloop("gaintable --protocol p1 --lo 1 --hi 4");
    CHECK(p1.status == 0);
    CHECK(p1.out == "tau_hat_N,tau_A_star,alpha_star,family\n"
                    "1,0,1,p1\n2,1,1,p1\n3,1,2,p1\n4,2,2,p1\n");

    auto over = run_netloop("gaintable --overestimate --lo 1 --hi 3");
    CHECK(over.status == 0);
    CHECK(over.out == "tau_hat_N,tau_A_star,alpha_star,family\n"
                      "1,1,1,overestimate\n"
                      "2,2,2,overestimate\n"
                      "3,3,3,overestimate\n");

    // the closed-form sweep has saturated well below this depth
    auto deep = run_netloop("gaintable --lo 3 --hi 3 --tmax 300");
    auto base = run_netloop("gaintable --lo 3 --hi 3");
    CHECK(deep.status == 0);
    CHECK(deep.out == base.out);
}

TEST_CASE("check exit codes encode the verdict") {
    auto ok = run_netloop("check --config " + kBenchmark);
    CHECK(ok.status == 0);
    CHECK(ok.out.find("protocol,tau_lo,tau_hi,") == 0);
    CHECK(ok.out.find(",stable,") != std::string::npos);

    auto bad = run_netloop("check --config " + kBenchmark + " --tau-hi 4");
    CHECK(bad.status == 2);
    CHECK(bad.out.find(",violated,") != std::string::npos);

    auto missing = run_netloop("check --config /nonexistent.cfg");
    CHECK(missing.status == 1);
    CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("config rejects unknown keys") {
    auto cfg = write_config(
        "typo.cfg",
        benchmark_json(R"({"tau_lo": 0, "tau_high": 3, "protocol": "p3"})", ""));
    auto r = run_netloop("check --config " + cfg.string());
    CHECK(r.status == 1);
    CHECK(r.err.find("unknown key") != std::string::npos);
    CHECK(r.err.find("tau_high") != std::string::npos);
}

TEST_CASE("json report round-trips through the parser") {
    auto out = scratch_dir() / "report.json";
    auto r = run_netloop("check --config " + kBenchmark + " --format json --out " +
                         out.string());
    CHECK(r.status == 0);
    CHECK(r.out.empty());

    std::string text = slurp(out);
    auto rep = cli::parse_report_json(text);
    CHECK(rep.protocol == unc::Protocol::P3);
    CHECK(rep.tau_lo == 0);
    CHECK(rep.tau_hi == 3);
    CHECK(rep.tau_hat_N == 3);
    CHECK(rep.verdict);
    CHECK(rep.nominal_ok);
    CHECK(rep.product < 1.0);
    CHECK(cli::render_report(rep, "json") == text);
}

TEST_CASE("load_config reads the bundled example") {
    auto run = cli::load_config(kBenchmark);
    CHECK(run.sim.plant.h == 1.0);
    CHECK(run.sim.plant.delay == 5);
    REQUIRE(run.sim.plant.num.size() == 1);
    CHECK(run.sim.plant.num[0] == 0.0051271);
    CHECK(run.sim.fsp);
    CHECK(run.sim.filter_pole == 0.95);
    CHECK(run.sim.V.num[0] == 0.041317);
    CHECK(run.sim.design_tau_A == 0);
    CHECK(run.sim.tau_lo == 0);
    CHECK(run.sim.tau_hi == 3);
    CHECK(run.sim.protocol == unc::Protocol::P3);
    CHECK(run.sim.horizon == 4000);
    CHECK(run.t_max == -1);
    CHECK_FALSE(run.overestimate);
    CHECK_FALSE(run.causal);
    CHECK(run.format == "csv");
}

TEST_CASE("oracle subcommand prints the witness") {
    auto r = run_netloop("oracle p1 1 0 0");
    CHECK(r.status == 0);
    CHECK(r.out.find("alpha_T,1\n") == 0);
    CHECK(r.out.find("delays,1,0,0\n") != std::string::npos);

    auto starved = run_netloop("oracle p3 3 3 6 --budget 50");
    CHECK(starved.status == 1);
    CHECK(starved.err.find("error:") != std::string::npos);
}

TEST_CASE("simulate flags divergence through the exit code") {
    auto cfg = write_config(
        "div4.cfg",
        benchmark_json(
            R"({"tau_lo": 0, "tau_hi": 4, "protocol": "p3"})",
            R"({"horizon": 4000,
                "delay": {"kind": "family", "family": "p3_prime", "tau_A": 0, "T": 0}})"));
    auto r = run_netloop("simulate --config " + cfg.string());
    CHECK(r.status == 2);
    CHECK(r.out.find("diverged,true\ndivergence_k,2469\n") == 0);
    CHECK(r.err.find("diverged at k=2469") != std::string::npos);

    auto quiet = run_netloop("simulate --config " + kBenchmark + " --horizon 60");
    CHECK(quiet.status == 0);
    CHECK(quiet.out.find("diverged,false\n") == 0);
    CHECK(quiet.out.find("k,r,u,y,n\n") != std::string::npos);
}

TEST_CASE("maxdelay reports the certified prefix") {
    auto p1 = run_netloop("maxdelay --config " + kBenchmark +
                          " --protocol p1 --cap 8");
    CHECK(p1.status == 0);
    CHECK(p1.out.find("max_stable,6\ngap,false\n") == 0);

    auto p3 = run_netloop("maxdelay --config " + kBenchmark + " --cap 6");
    CHECK(p3.status == 0);
    CHECK(p3.out.find("max_stable,3\ngap,false\n") == 0);
}

TEST_CASE("bode emits curves and flags nominal instability") {
    auto r = run_netloop("bode --config " + kBenchmark +
                         " --spans 2,3 --points 50");
    CHECK(r.status == 0);
    CHECK(r.out.find("tau_hat_N,omega,magnitude\n") == 0);
    CHECK(r.out.find("\n2,") != std::string::npos);
    CHECK(r.out.find("\n3,") != std::string::npos);

    auto cfg = write_config("unstable.cfg", R"({
  "system": {
    "plant": {"num": [0.0051271], "den": [1.0, -1.051], "delay": 5},
    "controller": {"type": "direct", "R": {"num": [100.0], "den": [1.0]}}
  },
  "network": {"tau_lo": 0, "tau_hi": 1, "protocol": "p1"}
})");
    auto bad = run_netloop("bode --config " + cfg.string() + " --spans 1");
    CHECK(bad.status == 1);
    CHECK(bad.err.find("nominal loop unstable") != std::string::npos);
}

TEST_CASE("format must be csv or json") {
    auto r = run_netloop("check --config " + kBenchmark + " --format xml");
    CHECK(r.status == 1);
    CHECK(r.err.find("format") != std::string::npos);
}
