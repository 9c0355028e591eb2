#include "netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>

namespace sim {

namespace {

// output energy over the trailing stretch; infinite once the run blew up
double terminal_energy(const SimTrace& tr) {
    const size_t n = tr.y.size();
    const size_t tail = std::min<size_t>(n, 200);
    double e = 0.0;
    for (size_t k = n - tail; k < n; ++k) {
        double v = tr.y[k];
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        e += v * v;
    }
    return e;
}

}  // namespace

SearchResult adversarial_search(const SimConfig& base, int tau_hat_N,
                                int budget) {
    base.validate();
    if (budget < 1) throw Error("search budget must be positive");

    SimConfig cfg = base;
    cfg.horizon = std::max(base.horizon, 4000);
    cfg.delay.kind = DelaySource::Kind::Scripted;
    cfg.forced_selections.clear();

    const int tn = tau_hat_N;
    const int n = cfg.horizon;

    struct Candidate {
        std::vector<int> pattern;
        std::string label;
    };
    std::vector<Candidate> cands;
    std::set<std::vector<int>> seen;
    auto push = [&](std::vector<int> p, std::string label) {
        for (auto& v : p) v = std::clamp(v, base.tau_lo, base.tau_hi);
        if (seen.insert(p).second)
            cands.push_back({std::move(p), std::move(label)});
    };

    if (tn < 1) {
        push(std::vector<int>(static_cast<size_t>(n), base.tau_lo), "constant");
    } else {
        std::vector<unc::Family> fams;
        if (base.protocol == unc::Protocol::P1)
            fams = {unc::Family::P1};
        else
            fams = {unc::Family::P3Prime, unc::Family::P3DPrime,
                    unc::Family::P3TPrime, unc::Family::P1};
        const int t_grid[] = {tn - 1, 2 * tn, 4 * tn};
        for (auto f : fams)
            for (int ta = 0; ta <= tn; ++ta)
                for (int T : t_grid) {
                    if (T < 0 || (f == unc::Family::P3TPrime && T < tn - 1))
                        continue;
                    auto shifted = unc::family_pattern(f, tn, ta, T, n - 1);
                    std::vector<int> phys(shifted.size());
                    for (size_t j = 0; j < shifted.size(); ++j)
                        phys[j] = shifted[j] + base.tau_lo + ta;
                    push(std::move(phys),
                         std::string(unc::family_name(f)) +
                             " tau_A=" + std::to_string(ta) +
                             " T=" + std::to_string(T));
                }
    }

    SearchResult best;
    best.energy = -1.0;

    auto run_one = [&](std::vector<int> pattern, std::string label) {
        cfg.delay.pattern = std::move(pattern);
        SimTrace tr = simulate(cfg);
        ++best.patterns_tried;
        double e = terminal_energy(tr);
        if (tr.diverged || e > best.energy) {
            best.pattern = cfg.delay.pattern;
            best.label = std::move(label);
            best.diverged = tr.diverged;
            best.energy = e;
            best.trace = std::move(tr);
        }
        return best.diverged;
    };

    for (auto& c : cands) {
        if (best.patterns_tried >= budget) break;
        if (run_one(std::move(c.pattern), std::move(c.label))) return best;
    }

    // a degenerate range has exactly one pattern, already simulated above
    if (base.tau_hi == base.tau_lo) return best;

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> dist(base.tau_lo, base.tau_hi);
    while (best.patterns_tried < budget) {
        std::vector<int> p(static_cast<size_t>(n));
        for (auto& v : p) v = dist(rng);
        if (run_one(std::move(p),
                    "random #" + std::to_string(best.patterns_tried)))
            return best;
    }
    return best;
}

}  // namespace sim
