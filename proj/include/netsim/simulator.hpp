#pragma once

#include "ltisys/fsp_design.hpp"
#include "ltisys/transfer_function.hpp"
#include "uncertainty/delay_gain.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sim {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Direct-form II transposed realization of a transfer function, with the
// pure-delay factor folded into the state. For strictly proper systems the
// current output is available before the current input (peek), which is what
// lets the loop be evaluated one instant at a time.
class Block {
public:
    Block() = default;
    explicit Block(const lti::TransferFunction& g);

    bool strictly_proper() const { return b_.empty() || b_[0] == 0.0; }
    double peek() const;
    double step(double u);

private:
    std::vector<double> b_, a_;  // equal length, read as polynomials in z^-1
    std::vector<double> s_;
};

Block tf_realize(const lti::TransferFunction& g);

struct DelaySource {
    enum class Kind { Constant, Uniform, Scripted, Family };
    Kind kind = Kind::Constant;
    int constant = 0;
    std::uint64_t seed = 0;          // uniform
    std::vector<int> pattern;        // scripted, physical delays per packet
    unc::Family family = unc::Family::P3Prime;
    int family_tau_A = 0;
    int family_T = 0;
    int family_span = 0;             // 0 = use the network span
};

struct SimConfig {
    lti::TransferFunction plant;     // dead time carried in plant.delay
    bool fsp = true;
    lti::TransferFunction C;         // fsp recipe
    double filter_pole = 0.95;
    lti::TransferFunction R;         // direct single-block controller
    lti::TransferFunction V;
    int design_tau_A = 0;            // predictor constant; tau_hat = d_hat + tau_lo + design_tau_A
    int tau_lo = 0;
    int tau_hi = 1;
    unc::Protocol protocol = unc::Protocol::P3;
    DelaySource delay;
    int horizon = 1000;
    double ref_amplitude = 1.0;
    int ref_onset = 0;
    double divergence_threshold = 1e6;  // scaled by |ref_amplitude| when nonzero
    int divergence_sustain = 50;
    std::map<int, int> forced_selections;  // P3 only: instant -> packet index

    void validate() const;
};

struct PacketEvent {
    int send_k = 0;
    int delay = 0;
    int arrival_k = 0;
    // 's' selected, 'k' skipped (stale under P1), 'd' dropped (unchosen P3)
    char status = 's';
};

struct SimTrace {
    std::vector<double> r, u, y, n;
    std::vector<PacketEvent> packets;
    bool diverged = false;
    int divergence_k = -1;
};

// Materializes the delay source as one physical delay per packet index.
std::vector<int> expand_delays(const SimConfig& config);

SimTrace simulate(const SimConfig& config);

// Receiver shared by the full simulation and the conformance replay:
// protocol selection / skip / drop plus zero-order hold.
class Receiver {
public:
    Receiver(unc::Protocol protocol, const std::map<int, int>* forced)
        : protocol_(protocol), forced_(forced) {}

    // packets arriving at this instant as (send index, value), ascending
    // index; returns the held value after applying the protocol
    double deliver(int instant, const std::vector<std::pair<int, double>>& arrivals,
                   std::vector<PacketEvent>* log, const std::vector<int>* delays);

    double hold() const { return hold_; }

private:
    unc::Protocol protocol_;
    const std::map<int, int>* forced_;
    double hold_ = 0.0;
    int last_ = -1;
};

// Replays a shifted-coordinate channel realization in physical time through
// the simulator's receiver, with the plant replaced by the running-sum
// payload source. Returns w over the realization's window; bit-identical to
// the uncertainty module's output when the receiver semantics agree.
std::vector<double> replay_realization(const unc::ChannelRealization& real,
                                       unc::Protocol protocol);

struct SearchResult {
    std::vector<int> pattern;  // physical per-packet delays
    std::string label;
    SimTrace trace;
    bool diverged = false;
    double energy = 0.0;       // terminal output energy of the best pattern
    int patterns_tried = 0;
};

// Seeds the family worst-case patterns (all tau_A, a small T grid, shifted
// to physical coordinates and clamped) plus uniform random patterns, and
// returns the first diverging pattern or the best-effort energy maximizer.
// budget caps the number of simulated patterns.
SearchResult adversarial_search(const SimConfig& base, int tau_hat_N,
                                int budget = 64);

}  // namespace sim
