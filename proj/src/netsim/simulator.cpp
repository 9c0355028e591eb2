#include "netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sim {

Block::Block(const lti::TransferFunction& g) {
    size_t n = g.den.size() + static_cast<size_t>(g.delay);
    b_.assign(n, 0.0);
    std::copy(g.num.begin(), g.num.end(),
              b_.begin() + static_cast<long>(n - g.num.size()));
    a_ = g.den;
    a_.resize(n, 0.0);
    s_.assign(n - 1, 0.0);
}

Block tf_realize(const lti::TransferFunction& g) { return Block(g); }

double Block::peek() const {
    if (!strictly_proper())
        throw Error("peek requires a strictly proper block");
    return s_.empty() ? 0.0 : s_[0];
}

double Block::step(double u) {
    double y = b_.empty() ? 0.0 : b_[0] * u;
    if (!s_.empty()) y += s_[0];
    for (size_t i = 0; i + 1 < s_.size(); ++i)
        s_[i] = s_[i + 1] + b_[i + 1] * u - a_[i + 1] * y;
    if (!s_.empty())
        s_.back() = b_.back() * u - a_.back() * y;
    return y;
}

void SimConfig::validate() const {
    if (horizon < 1) throw Error("horizon must be at least 1");
    if (tau_lo < 0 || tau_hi < tau_lo)
        throw Error("need 0 <= tau_lo <= tau_hi");
    if (divergence_threshold <= 0.0)
        throw Error("divergence threshold must be positive");
    if (divergence_sustain < 1)
        throw Error("divergence sustain must be at least 1");
    switch (delay.kind) {
        case DelaySource::Kind::Constant:
            if (delay.constant < tau_lo || delay.constant > tau_hi)
                throw Error("constant delay outside [tau_lo, tau_hi]");
            break;
        case DelaySource::Kind::Scripted:
            if (static_cast<int>(delay.pattern.size()) < horizon)
                throw Error("scripted pattern shorter than the horizon");
            for (int d : delay.pattern)
                if (d < tau_lo || d > tau_hi)
                    throw Error("scripted delay outside [tau_lo, tau_hi]");
            break;
        default:
            break;
    }
}

double Receiver::deliver(int instant,
                         const std::vector<std::pair<int, double>>& arrivals,
                         std::vector<PacketEvent>* log,
                         const std::vector<int>* delays) {
    if (arrivals.empty()) return hold_;
    auto push = [&](int j, char status) {
        if (log)
            log->push_back({j, delays ? (*delays)[static_cast<size_t>(j)] : 0,
                            instant, status});
    };
    if (protocol_ == unc::Protocol::P1) {
        int jm = arrivals.back().first;
        for (const auto& [j, v] : arrivals) {
            if (j == jm && jm > last_) {
                last_ = jm;
                hold_ = v;
                push(j, 's');
            } else {
                push(j, 'k');
            }
        }
    } else {
        int chosen = arrivals.front().first;
        if (forced_) {
            auto it = forced_->find(instant);
            if (it != forced_->end()) chosen = it->second;
        }
        bool found = false;
        for (const auto& [j, v] : arrivals) {
            if (j == chosen) {
                hold_ = v;
                found = true;
                push(j, 's');
            } else {
                push(j, 'd');
            }
        }
        if (!found)
            throw Error("forced selection at instant " +
                        std::to_string(instant) +
                        " is not among the arrivals");
    }
    return hold_;
}

std::vector<int> expand_delays(const SimConfig& cfg) {
    std::vector<int> d(static_cast<size_t>(cfg.horizon), cfg.tau_lo);
    switch (cfg.delay.kind) {
        case DelaySource::Kind::Constant:
            std::fill(d.begin(), d.end(), cfg.delay.constant);
            break;
        case DelaySource::Kind::Uniform: {
            std::mt19937_64 rng(cfg.delay.seed);
            std::uniform_int_distribution<int> dist(cfg.tau_lo, cfg.tau_hi);
            for (auto& v : d) v = dist(rng);
            break;
        }
        case DelaySource::Kind::Scripted:
            std::copy_n(cfg.delay.pattern.begin(), cfg.horizon, d.begin());
            break;
        case DelaySource::Kind::Family: {
            int span = cfg.delay.family_span > 0 ? cfg.delay.family_span
                                                 : cfg.tau_hi - cfg.tau_lo;
            if (span < 1) {
                std::fill(d.begin(), d.end(), cfg.tau_lo);
                break;
            }
            auto shifted =
                unc::family_pattern(cfg.delay.family, span, cfg.delay.family_tau_A,
                                    cfg.delay.family_T, cfg.horizon - 1);
            for (int j = 0; j < cfg.horizon; ++j) {
                int v = shifted[static_cast<size_t>(j)] + cfg.tau_lo +
                        cfg.delay.family_tau_A;
                d[static_cast<size_t>(j)] =
                    std::clamp(v, cfg.tau_lo, cfg.tau_hi);
            }
            break;
        }
    }
    return d;
}

SimTrace simulate(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.horizon;

    lti::TransferFunction plant_core =
        lti::tf_new(cfg.plant.num, cfg.plant.den, 0, cfg.plant.h);
    int tau_hat = cfg.plant.delay + cfg.tau_lo + cfg.design_tau_A;

    Block plant(cfg.plant);
    Block v_block(cfg.V);
    Block c_block, f_block, h_block, r_block;
    if (cfg.fsp) {
        auto d = lti::design_fsp(cfg.C, plant_core, tau_hat, cfg.filter_pole);
        c_block = Block(d.C);
        f_block = Block(d.F);
        h_block = Block(d.H);
    } else {
        r_block = Block(cfg.R);
    }

    std::vector<int> delays = expand_delays(cfg);
    Receiver receiver(cfg.protocol,
                      cfg.forced_selections.empty() ? nullptr
                                                    : &cfg.forced_selections);

    SimTrace tr;
    tr.r.reserve(static_cast<size_t>(n));
    tr.u.reserve(static_cast<size_t>(n));
    tr.y.reserve(static_cast<size_t>(n));
    tr.n.reserve(static_cast<size_t>(n));

    std::vector<std::vector<std::pair<int, double>>> arrivals(
        static_cast<size_t>(n + cfg.tau_hi + 1));
    double scale = std::abs(cfg.ref_amplitude) > 0.0 ? std::abs(cfg.ref_amplitude) : 1.0;
    int over = 0;

    for (int k = 0; k < n; ++k) {
        // plant output first: it does not depend on this instant's input
        double y = plant.peek();
        arrivals[static_cast<size_t>(k + delays[static_cast<size_t>(k)])]
            .emplace_back(k, y);
        double hold = receiver.deliver(k, arrivals[static_cast<size_t>(k)],
                                       &tr.packets, &delays);
        arrivals[static_cast<size_t>(k)].clear();
        double r = k >= cfg.ref_onset ? cfg.ref_amplitude : 0.0;
        double u;
        if (cfg.fsp) {
            double e = v_block.step(r) - f_block.step(hold) - h_block.peek();
            u = c_block.step(e);
            h_block.step(u);
        } else {
            u = r_block.step(v_block.step(r) - hold);
        }
        plant.step(u);

        tr.r.push_back(r);
        tr.u.push_back(u);
        tr.y.push_back(y);
        tr.n.push_back(hold);

        if (std::abs(y) > cfg.divergence_threshold * scale) {
            if (++over >= cfg.divergence_sustain && !tr.diverged) {
                tr.diverged = true;
                tr.divergence_k = k - cfg.divergence_sustain + 1;
            }
        } else {
            over = 0;
        }
    }
    return tr;
}

std::vector<double> replay_realization(const unc::ChannelRealization& real,
                                       unc::Protocol protocol) {
    const int ta = real.tau_A;
    const int window = real.window_size();

    std::map<int, int> forced;
    for (int idx = 0; idx < window; ++idx)
        if (real.selections[static_cast<size_t>(idx)] >= 0)
            forced[idx] = real.selections[static_cast<size_t>(idx)];

    // physical receiver time m counted from the window start: packet j is
    // sent at m = j with physical delay (shifted + tau_A), so every arrival
    // lands at or after its send instant; the constant network floor tau_lo
    // shifts both axes equally and drops out of w
    std::vector<std::vector<std::pair<int, double>>> arrivals(
        static_cast<size_t>(window));
    for (size_t j = 0; j < real.delays.size(); ++j) {
        int m = static_cast<int>(j) + real.delays[j] + ta;
        if (m >= 0 && m < window)
            arrivals[static_cast<size_t>(m)].emplace_back(
                static_cast<int>(j),
                static_cast<double>(unc::payload(static_cast<int>(j), real.T)));
    }

    Receiver receiver(protocol, protocol == unc::Protocol::P3 ? &forced : nullptr);
    std::vector<double> w(static_cast<size_t>(window), 0.0);
    for (int m = 0; m < window; ++m) {
        double hold =
            receiver.deliver(m, arrivals[static_cast<size_t>(m)], nullptr, nullptr);
        w[static_cast<size_t>(m)] = hold - unc::payload(m - ta, real.T);
    }
    return w;
}

}  // namespace sim
