#pragma once

#include "criterion/stability.hpp"
#include "netsim/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

// Everything one invocation needs: the loop definition plus network bounds
// (carried inside the SimConfig), analysis knobs, and output routing.
struct RunConfig {
    sim::SimConfig sim;
    int t_max = -1;                       // gain sweep depth, -1 = default
    std::uint64_t budget = 200000000ULL;  // oracle node budget
    bool overestimate = false;
    bool causal = false;
    std::string format = "csv";  // csv | json
    std::string out;             // empty = stdout
};

// Parses the structured config file. Unknown keys anywhere in the tree are
// rejected so typos cannot silently fall back to defaults.
RunConfig load_config(const std::string& path);

crit::ControllerSpec controller_spec(const sim::SimConfig& c);
crit::CriterionOptions criterion_options(const RunConfig& c);

// 12 significant digits, the regression-diff format
std::string fmt(double v);

struct GainRow {
    int tau_hat_N = 0;
    int tau_A_star = 0;
    double alpha_star = 0.0;
    std::string family;
};

std::string render_gain_table(const std::vector<GainRow>& rows,
                              const std::string& format);
std::string render_report(const crit::StabilityReport& rep,
                          const std::string& format);
std::string render_scan(const crit::DelayScan& scan, const std::string& format);
std::string render_curves(const std::vector<crit::BodeCurve>& curves,
                          const std::string& format);
std::string render_trace(const sim::SimTrace& tr, const std::string& format);
std::string render_oracle(const unc::OracleResult& res,
                          const std::string& format);

// inverse of render_report's json form; used to guarantee emitted records
// stay loadable
crit::StabilityReport parse_report_json(const std::string& text);

}  // namespace cli
