#include "cli/run_config.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
}

struct Overrides {
    std::string config;
    std::string protocol;
    int tau_lo = -1;
    int tau_hi = -1;
    bool causal = false;
    bool overestimate = false;
    int t_max = -2;
    std::string format;
    std::string out;
};

void add_common(CLI::App* cmd, Overrides& ov, bool needs_config) {
    auto* c = cmd->add_option("--config", ov.config, "structured config file");
    if (needs_config) c->required();
    cmd->add_option("--protocol", ov.protocol, "p1 or p3");
    cmd->add_option("--tau-lo", ov.tau_lo, "lower delay bound");
    cmd->add_option("--tau-hi", ov.tau_hi, "upper delay bound");
    cmd->add_flag("--causal", ov.causal, "force tau_A = 0");
    cmd->add_flag("--overestimate", ov.overestimate,
                  "span-independent P3 gain (tau_A = span)");
    cmd->add_option("--tmax", ov.t_max, "gain sweep depth");
    cmd->add_option("--format", ov.format, "csv or json");
    cmd->add_option("--out", ov.out, "output path (default stdout)");
}

cli::RunConfig resolve(const Overrides& ov) {
    cli::RunConfig run;
    if (!ov.config.empty()) run = cli::load_config(ov.config);
    if (!ov.protocol.empty())
        run.sim.protocol = unc::protocol_from_name(ov.protocol);
    if (ov.tau_lo >= 0) run.sim.tau_lo = ov.tau_lo;
    if (ov.tau_hi >= 0) run.sim.tau_hi = ov.tau_hi;
    if (ov.causal) run.causal = true;
    if (ov.overestimate) run.overestimate = true;
    if (ov.t_max != -2) run.t_max = ov.t_max;
    if (!ov.format.empty()) run.format = ov.format;
    if (!ov.out.empty()) run.out = ov.out;
    if (run.format != "csv" && run.format != "json")
        throw std::runtime_error("format must be csv or json");
    return run;
}

// family closed forms against the exhaustive search wherever the latter
// finishes inside the node budget; a mismatch means the table cannot be
// trusted and the whole command fails
void cross_check_row(unc::Protocol protocol, int tn, int ta,
                     std::uint64_t budget) {
    const int T = tn + 2;
    double expect = unc::family_gain(protocol, tn, ta, T);
    unc::OracleResult o;
    try {
        o = unc::oracle_gain(protocol, tn, ta, T, budget);
    } catch (const unc::BudgetExceeded&) {
        return;
    }
    if (std::abs(expect - o.alpha_T) > 1e-9)
        throw std::runtime_error(
            "internal inconsistency: family gain " + cli::fmt(expect) +
            " != exhaustive " + cli::fmt(o.alpha_T) + " at span " +
            std::to_string(tn) + ", tau_A " + std::to_string(ta) + ", T " +
            std::to_string(T));
}

int cmd_gaintable(int lo, int hi, unc::Protocol protocol,
                  const cli::RunConfig& run, std::uint64_t check_budget) {
    std::vector<cli::GainRow> rows;
    for (int tn = lo; tn <= hi; ++tn) {
        unc::GainResult g = run.overestimate ? unc::overestimate_p3(tn)
                            : protocol == unc::Protocol::P1
                                ? unc::optimal_p1(tn)
                                : unc::optimal_p3(tn, run.t_max);
        if (!run.overestimate)
            cross_check_row(protocol, tn, g.tau_A_star, check_budget);
        rows.push_back({tn, g.tau_A_star, g.alpha_star, g.family});
    }
    emit(cli::render_gain_table(rows, run.format), run.out);
    return 0;
}

int cmd_check(const cli::RunConfig& run) {
    auto rep = crit::check_stability(run.sim.plant,
                                     cli::controller_spec(run.sim),
                                     run.sim.tau_lo, run.sim.tau_hi,
                                     run.sim.protocol,
                                     cli::criterion_options(run));
    emit(cli::render_report(rep, run.format), run.out);
    if (!rep.nominal_ok) {
        std::cerr << "error: nominal loop unstable at tau_hat "
                  << rep.tau_hat << "\n";
        return 1;
    }
    return rep.verdict ? 0 : 2;
}

int cmd_maxdelay(const cli::RunConfig& run, int cap) {
    auto scan = crit::max_admissible_delay(run.sim.plant,
                                           cli::controller_spec(run.sim),
                                           run.sim.tau_lo, run.sim.protocol,
                                           cap, cli::criterion_options(run));
    emit(cli::render_scan(scan, run.format), run.out);
    return 0;
}

int cmd_bode(const cli::RunConfig& run, const std::vector<int>& spans,
             int points) {
    auto curves = crit::bode_margin_data(run.sim.plant,
                                         cli::controller_spec(run.sim),
                                         run.sim.tau_lo, run.sim.protocol,
                                         spans, points,
                                         cli::criterion_options(run));
    emit(cli::render_curves(curves, run.format), run.out);
    for (const auto& c : curves)
        if (!c.report.nominal_ok) {
            std::cerr << "error: nominal loop unstable at span "
                      << c.tau_hat_N << "\n";
            return 1;
        }
    return 0;
}

int cmd_simulate(const cli::RunConfig& run) {
    auto tr = sim::simulate(run.sim);
    emit(cli::render_trace(tr, run.format), run.out);
    if (tr.diverged) {
        std::cerr << "diverged at k=" << tr.divergence_k << "\n";
        return 2;
    }
    return 0;
}

int cmd_oracle(const std::string& protocol, int tn, int ta, int T,
               std::uint64_t budget, const std::string& format,
               const std::string& out) {
    auto res = unc::oracle_gain(unc::protocol_from_name(protocol), tn, ta, T,
                                budget);
    emit(cli::render_oracle(res, format), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability analysis for control loops closed over a network "
                 "with variable packet delays"};
    app.require_subcommand(1);

    Overrides ov_table, ov_check, ov_max, ov_bode, ov_sim;
    int lo = 1, hi = 10, cap = 12, points = 400;
    std::uint64_t table_budget = 4000000ULL;
    std::vector<int> spans;
    std::string oracle_protocol = "p3", oracle_format = "csv", oracle_out;
    int oracle_tn = 1, oracle_ta = 0, oracle_T = 0;
    std::uint64_t oracle_budget = 200000000ULL;

    auto* table = app.add_subcommand(
        "gaintable", "per-span optimal recentering shift and worst-case gain");
    add_common(table, ov_table, false);
    table->add_option("--lo", lo, "first span");
    table->add_option("--hi", hi, "last span");
    table->add_option("--budget", table_budget,
                      "node budget for the per-row exhaustive cross-check");

    auto* check = app.add_subcommand("check", "stability certificate for one "
                                              "delay range");
    add_common(check, ov_check, true);

    auto* maxd = app.add_subcommand(
        "maxdelay", "largest certified delay span, scanning 1..cap");
    add_common(maxd, ov_max, true);
    maxd->add_option("--cap", cap, "scan limit");

    auto* bode = app.add_subcommand(
        "bode", "scaled magnitude curves whose peak encodes the verdict");
    add_common(bode, ov_bode, true);
    bode->add_option("--spans", spans, "delay spans to plot")
        ->required()
        ->delimiter(',');
    bode->add_option("--points", points, "grid points per curve");

    auto* simc = app.add_subcommand("simulate", "closed-loop time response "
                                                "with packetized delays");
    add_common(simc, ov_sim, true);
    int horizon_override = -1;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    simc->add_option("--horizon", horizon_override, "samples to run");
    simc->add_option("--seed", seed_override, "uniform delay seed")
        ->each([&](const std::string&) { seed_set = true; });

    auto* oracle = app.add_subcommand(
        "oracle", "exhaustive worst-case gain over one truncation window");
    oracle->add_option("protocol", oracle_protocol, "p1 or p3")->required();
    oracle->add_option("span", oracle_tn, "delay span")->required();
    oracle->add_option("tau_A", oracle_ta, "recentering shift")->required();
    oracle->add_option("T", oracle_T, "payload truncation")->required();
    oracle->add_option("--budget", oracle_budget, "search node budget");
    oracle->add_option("--format", oracle_format, "csv or json");
    oracle->add_option("--out", oracle_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (table->parsed()) {
            auto run = resolve(ov_table);
            return cmd_gaintable(lo, hi, run.sim.protocol, run, table_budget);
        }
        if (check->parsed()) return cmd_check(resolve(ov_check));
        if (maxd->parsed()) return cmd_maxdelay(resolve(ov_max), cap);
        if (bode->parsed()) return cmd_bode(resolve(ov_bode), spans, points);
        if (simc->parsed()) {
            auto run = resolve(ov_sim);
            if (horizon_override > 0) run.sim.horizon = horizon_override;
            if (seed_set) run.sim.delay.seed = seed_override;
            return cmd_simulate(run);
        }
        return cmd_oracle(oracle_protocol, oracle_tn, oracle_ta, oracle_T,
                          oracle_budget, oracle_format, oracle_out);
    } catch (const unc::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
