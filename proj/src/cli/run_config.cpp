#include "cli/run_config.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

using nlohmann::json;

namespace cli {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("config: " + msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail("unknown key \"" + it.key() + "\" in " + where);
    }
}

std::vector<double> coeffs(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where + " must be a nonempty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail(where + " must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

lti::TransferFunction tf_of(const json& v, double h, const std::string& where) {
    if (!v.is_object()) fail(where + " must be an object");
    check_keys(v, where, {"num", "den", "delay"});
    if (!v.contains("num") || !v.contains("den"))
        fail(where + " needs num and den");
    int delay = v.value("delay", 0);
    return lti::tf_new(coeffs(v["num"], where + ".num"),
                       coeffs(v["den"], where + ".den"), delay, h);
}

void parse_delay(const json& v, sim::SimConfig& c) {
    check_keys(v, "simulation.delay",
               {"kind", "value", "seed", "pattern", "family", "tau_A", "T",
                "span"});
    std::string kind = v.value("kind", "constant");
    if (kind == "constant") {
        c.delay.kind = sim::DelaySource::Kind::Constant;
        c.delay.constant = v.value("value", c.tau_lo);
    } else if (kind == "uniform") {
        c.delay.kind = sim::DelaySource::Kind::Uniform;
        c.delay.seed = v.value("seed", 0ULL);
    } else if (kind == "scripted") {
        c.delay.kind = sim::DelaySource::Kind::Scripted;
        if (!v.contains("pattern")) fail("scripted delay needs pattern");
        for (const auto& x : v["pattern"])
            c.delay.pattern.push_back(x.get<int>());
    } else if (kind == "family") {
        c.delay.kind = sim::DelaySource::Kind::Family;
        std::string f = v.value("family", "p3_prime");
        if (f == "p1")
            c.delay.family = unc::Family::P1;
        else if (f == "p3_prime")
            c.delay.family = unc::Family::P3Prime;
        else if (f == "p3_dprime")
            c.delay.family = unc::Family::P3DPrime;
        else if (f == "p3_tprime")
            c.delay.family = unc::Family::P3TPrime;
        else
            fail("unknown delay family \"" + f + "\"");
        c.delay.family_tau_A = v.value("tau_A", 0);
        c.delay.family_T = v.value("T", 0);
        c.delay.family_span = v.value("span", 0);
    } else {
        fail("unknown delay kind \"" + kind + "\"");
    }
}

const char* verdict_word(const crit::StabilityReport& r) {
    if (!r.nominal_ok) return "nominal-unstable";
    return r.verdict ? "stable" : "violated";
}

json report_json(const crit::StabilityReport& r) {
    return json{{"protocol", unc::protocol_name(r.protocol)},
                {"tau_lo", r.tau_lo},
                {"tau_hi", r.tau_hi},
                {"tau_hat_N", r.tau_hat_N},
                {"tau_A_star", r.tau_A_star},
                {"tau_hat", r.tau_hat},
                {"alpha_star", r.alpha_star},
                {"family", r.family},
                {"m_inf_norm", r.m_inf_norm},
                {"peak_omega", r.peak_omega},
                {"product", r.product},
                {"verdict", r.verdict},
                {"margin", r.margin},
                {"nominal_ok", r.nominal_ok}};
}

void report_csv(std::ostringstream& os, const crit::StabilityReport& r) {
    os << unc::protocol_name(r.protocol) << ',' << r.tau_lo << ',' << r.tau_hi
       << ',' << r.tau_hat_N << ',' << r.tau_A_star << ',' << r.tau_hat << ','
       << fmt(r.alpha_star) << ',' << r.family << ',' << fmt(r.m_inf_norm)
       << ',' << fmt(r.peak_omega) << ',' << fmt(r.product) << ','
       << verdict_word(r) << ',' << fmt(r.margin) << '\n';
}

constexpr const char* kReportHeader =
    "protocol,tau_lo,tau_hi,tau_hat_N,tau_A_star,tau_hat,alpha_star,family,"
    "m_inf_norm,peak_omega,product,verdict,margin\n";

}  // namespace

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    json root;
    try {
        root = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    }
    check_keys(root, "top level",
               {"system", "network", "analysis", "simulation", "output"});
    if (!root.contains("system") || !root.contains("network"))
        fail("system and network sections are required");

    RunConfig run;
    sim::SimConfig& c = run.sim;

    const json& sys = root["system"];
    check_keys(sys, "system",
               {"h", "plant", "controller", "prefilter", "design_tau_A"});
    double h = sys.value("h", 1.0);
    if (!sys.contains("plant")) fail("system.plant is required");
    c.plant = tf_of(sys["plant"], h, "system.plant");
    if (!sys.contains("controller")) fail("system.controller is required");
    const json& ctl = sys["controller"];
    check_keys(ctl, "system.controller", {"type", "C", "filter_pole", "R"});
    std::string type = ctl.value("type", "fsp");
    if (type == "fsp") {
        c.fsp = true;
        if (!ctl.contains("C")) fail("fsp controller needs C");
        c.C = tf_of(ctl["C"], h, "system.controller.C");
        c.filter_pole = ctl.value("filter_pole", 0.95);
    } else if (type == "direct") {
        c.fsp = false;
        if (!ctl.contains("R")) fail("direct controller needs R");
        c.R = tf_of(ctl["R"], h, "system.controller.R");
    } else {
        fail("controller type must be fsp or direct");
    }
    c.V = sys.contains("prefilter") ? tf_of(sys["prefilter"], h, "system.prefilter")
                                    : lti::tf_new({1.0}, {1.0}, 0, h);
    c.design_tau_A = sys.value("design_tau_A", 0);

    const json& net = root["network"];
    check_keys(net, "network", {"tau_lo", "tau_hi", "protocol"});
    c.tau_lo = net.value("tau_lo", 0);
    c.tau_hi = net.value("tau_hi", c.tau_lo);
    c.protocol = unc::protocol_from_name(net.value("protocol", "p3"));

    if (root.contains("analysis")) {
        const json& an = root["analysis"];
        check_keys(an, "analysis",
                   {"t_max", "budget", "overestimate", "causal"});
        run.t_max = an.value("t_max", -1);
        run.budget = an.value("budget", run.budget);
        run.overestimate = an.value("overestimate", false);
        run.causal = an.value("causal", false);
    }

    if (root.contains("simulation")) {
        const json& s = root["simulation"];
        check_keys(s, "simulation",
                   {"horizon", "reference", "delay", "divergence"});
        c.horizon = s.value("horizon", c.horizon);
        if (s.contains("reference")) {
            const json& r = s["reference"];
            check_keys(r, "simulation.reference", {"amplitude", "onset"});
            c.ref_amplitude = r.value("amplitude", 1.0);
            c.ref_onset = r.value("onset", 0);
        }
        if (s.contains("delay")) parse_delay(s["delay"], c);
        if (s.contains("divergence")) {
            const json& d = s["divergence"];
            check_keys(d, "simulation.divergence", {"threshold", "sustain"});
            c.divergence_threshold = d.value("threshold", 1e6);
            c.divergence_sustain = d.value("sustain", 50);
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        check_keys(o, "output", {"format", "path"});
        run.format = o.value("format", "csv");
        run.out = o.value("path", "");
    }
    if (run.format != "csv" && run.format != "json")
        fail("output format must be csv or json");
    return run;
}

crit::ControllerSpec controller_spec(const sim::SimConfig& c) {
    crit::ControllerSpec spec;
    spec.fsp = c.fsp;
    spec.C = c.C;
    spec.filter_pole = c.filter_pole;
    spec.R = c.R;
    return spec;
}

crit::CriterionOptions criterion_options(const RunConfig& c) {
    return {c.overestimate, c.causal, c.t_max};
}

std::string render_gain_table(const std::vector<GainRow>& rows,
                              const std::string& format) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"tau_hat_N", r.tau_hat_N},
                               {"tau_A_star", r.tau_A_star},
                               {"alpha_star", r.alpha_star},
                               {"family", r.family}});
        return json{{"rows", arr}}.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "tau_hat_N,tau_A_star,alpha_star,family\n";
    for (const auto& r : rows)
        os << r.tau_hat_N << ',' << r.tau_A_star << ',' << fmt(r.alpha_star)
           << ',' << r.family << '\n';
    return os.str();
}

std::string render_report(const crit::StabilityReport& rep,
                          const std::string& format) {
    if (format == "json") return report_json(rep).dump(2) + "\n";
    std::ostringstream os;
    os << kReportHeader;
    report_csv(os, rep);
    return os.str();
}

crit::StabilityReport parse_report_json(const std::string& text) {
    json v = json::parse(text);
    crit::StabilityReport r;
    r.protocol = unc::protocol_from_name(v.at("protocol").get<std::string>());
    r.tau_lo = v.at("tau_lo").get<int>();
    r.tau_hi = v.at("tau_hi").get<int>();
    r.tau_hat_N = v.at("tau_hat_N").get<int>();
    r.tau_A_star = v.at("tau_A_star").get<int>();
    r.tau_hat = v.at("tau_hat").get<int>();
    r.alpha_star = v.at("alpha_star").get<double>();
    r.family = v.at("family").get<std::string>();
    r.m_inf_norm = v.at("m_inf_norm").get<double>();
    r.peak_omega = v.at("peak_omega").get<double>();
    r.product = v.at("product").get<double>();
    r.verdict = v.at("verdict").get<bool>();
    r.margin = v.at("margin").get<double>();
    r.nominal_ok = v.at("nominal_ok").get<bool>();
    return r;
}

std::string render_scan(const crit::DelayScan& scan, const std::string& format) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : scan.reports) arr.push_back(report_json(r));
        return json{{"max_stable", scan.max_stable},
                    {"gap", scan.gap},
                    {"reports", arr}}
                   .dump(2) +
               "\n";
    }
    std::ostringstream os;
    os << "max_stable," << scan.max_stable << '\n';
    os << "gap," << (scan.gap ? "true" : "false") << '\n';
    os << kReportHeader;
    for (const auto& r : scan.reports) report_csv(os, r);
    return os.str();
}

std::string render_curves(const std::vector<crit::BodeCurve>& curves,
                          const std::string& format) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& c : curves)
            arr.push_back(json{{"tau_hat_N", c.tau_hat_N},
                               {"report", report_json(c.report)},
                               {"omega", c.omega},
                               {"magnitude", c.magnitude}});
        return json{{"curves", arr}}.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "tau_hat_N,omega,magnitude\n";
    for (const auto& c : curves)
        for (size_t i = 0; i < c.omega.size(); ++i)
            os << c.tau_hat_N << ',' << fmt(c.omega[i]) << ','
               << fmt(c.magnitude[i]) << '\n';
    return os.str();
}

std::string render_trace(const sim::SimTrace& tr, const std::string& format) {
    if (format == "json") {
        json packets = json::array();
        for (const auto& p : tr.packets)
            packets.push_back(json{{"send_k", p.send_k},
                                   {"delay", p.delay},
                                   {"arrival_k", p.arrival_k},
                                   {"status", std::string(1, p.status)}});
        return json{{"diverged", tr.diverged},
                    {"divergence_k", tr.divergence_k},
                    {"r", tr.r},
                    {"u", tr.u},
                    {"y", tr.y},
                    {"n", tr.n},
                    {"packets", packets}}
                   .dump(2) +
               "\n";
    }
    std::ostringstream os;
    os << "diverged," << (tr.diverged ? "true" : "false") << '\n';
    os << "divergence_k," << tr.divergence_k << '\n';
    os << "k,r,u,y,n\n";
    for (size_t k = 0; k < tr.y.size(); ++k)
        os << k << ',' << fmt(tr.r[k]) << ',' << fmt(tr.u[k]) << ','
           << fmt(tr.y[k]) << ',' << fmt(tr.n[k]) << '\n';
    os << "send_k,delay,arrival_k,status\n";
    for (const auto& p : tr.packets)
        os << p.send_k << ',' << p.delay << ',' << p.arrival_k << ','
           << p.status << '\n';
    return os.str();
}

std::string render_oracle(const unc::OracleResult& res,
                          const std::string& format) {
    const auto& w = res.witness;
    if (format == "json") {
        return json{{"alpha_T", res.alpha_T},
                    {"nodes", res.nodes},
                    {"tau_hat_N", w.tau_hat_N},
                    {"tau_A", w.tau_A},
                    {"T", w.T},
                    {"norm2", w.norm2},
                    {"delays", w.delays},
                    {"selections", w.selections},
                    {"w", w.w}}
                   .dump(2) +
               "\n";
    }
    std::ostringstream os;
    os << "alpha_T," << fmt(res.alpha_T) << '\n';
    os << "nodes," << res.nodes << '\n';
    os << "tau_hat_N," << w.tau_hat_N << '\n';
    os << "tau_A," << w.tau_A << '\n';
    os << "T," << w.T << '\n';
    os << "norm2," << fmt(w.norm2) << '\n';
    os << "delays";
    for (int d : w.delays) os << ',' << d;
    os << "\nselections";
    for (int s : w.selections) os << ',' << s;
    os << "\nw";
    for (double x : w.w) os << ',' << fmt(x);
    os << '\n';
    return os.str();
}

}  // namespace cli
