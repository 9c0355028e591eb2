#include "uncertainty/delay_gain.hpp"

#include <algorithm>
#include <cmath>

namespace unc {

namespace {

// Depth-first maximization of ||w||^2 over per-packet delays (and P3
// selections). Packets are assigned in index order; instant k can be scored
// as soon as every packet that could still arrive there (index <= k + tau_A)
// has been assigned. Branches are pruned with a per-instant upper bound on
// w_k^2 accumulated into suffix sums; pruning is strict-less so the first
// maximal assignment in lexicographic order (delays ascending from -tau_A,
// selections by ascending packet index) is the one reported.
class OracleSearch {
public:
    OracleSearch(Protocol protocol, int tn, int ta, int T, std::uint64_t budget)
        : proto_(protocol), tn_(tn), ta_(ta), T_(T), budget_(budget) {
        dtau_ = tn_ - ta_;
        k_end_ = T_ + 2 * tn_;
        n_packets_ = k_end_ + ta_ + 1;  // senders that can reach the window
        delays_.assign(static_cast<size_t>(n_packets_), 0);
        arrivals_.assign(static_cast<size_t>(k_end_ + ta_ + 2), {});
        selections_.assign(static_cast<size_t>(k_end_ + ta_ + 1), -1);

        // |w_k| cannot exceed the payload spread between the oldest value
        // the hold can still carry and the newest one selectable this
        // instant (a packet peeked up to tau_A ahead)
        caps_suffix_.assign(static_cast<size_t>(k_end_ + ta_ + 2), 0.0);
        for (int k = k_end_; k >= -ta_; --k) {
            double neg = payload(k, T_) - payload(k - tn_ - dtau_ - 1, T_);
            neg = std::min(neg, static_cast<double>(payload(k, T_)));
            double pos = payload(k + ta_, T_) - payload(k, T_);
            double cap = std::max(neg, pos);
            caps_suffix_[static_cast<size_t>(k + ta_)] =
                caps_suffix_[static_cast<size_t>(k + ta_) + 1] + cap * cap;
        }
    }

    OracleResult run() {
        descend(-ta_, 0.0, -1, 0.0, 0);
        OracleResult out;
        out.nodes = nodes_;
        std::map<int, int> forced;
        if (proto_ == Protocol::P3) {
            for (int k = -ta_; k <= k_end_; ++k) {
                int s = best_selections_[static_cast<size_t>(k + ta_)];
                if (s >= 0) forced[k] = s;
            }
        }
        out.witness =
            uncertainty_response(proto_, best_delays_, T_, ta_, tn_, forced);
        out.alpha_T = out.witness.alpha_T;
        if (std::abs(out.witness.norm2 - best_) > 1e-9)
            throw Error("oracle internal inconsistency: witness replay "
                        "does not reproduce the maximum");
        return out;
    }

private:
    void record_best(double acc) {
        best_ = acc;
        best_delays_ = delays_;
        best_selections_ = selections_;
    }

    // scores complete instants starting at k, advancing the state in place;
    // returns false if the walk branched over P3 selections (descendants
    // already explored by recursion)
    bool advance(int& k, double& hold, int& last, double& acc, int jnext) {
        while (k <= k_end_ && jnext > k + ta_) {
            const auto& js = arrivals_[static_cast<size_t>(k + ta_)];
            if (proto_ == Protocol::P1) {
                if (!js.empty() && js.back() > last) {
                    last = js.back();
                    hold = payload(last, T_);
                }
                acc += sq(hold - payload(k, T_));
                ++k;
            } else if (js.empty()) {
                acc += sq(hold - payload(k, T_));
                ++k;
            } else {
                for (int s : js) {
                    double h2 = payload(s, T_);
                    selections_[static_cast<size_t>(k + ta_)] = s;
                    descend(k + 1, h2, last, acc + sq(h2 - payload(k, T_)),
                            jnext);
                }
                selections_[static_cast<size_t>(k + ta_)] = -1;
                return false;
            }
        }
        return true;
    }

    void descend(int k, double hold, int last, double acc, int jnext) {
        if (++nodes_ > budget_)
            throw BudgetExceeded("oracle budget of " + std::to_string(budget_) +
                                 " nodes exceeded");
        if (!advance(k, hold, last, acc, jnext)) return;
        if (k > k_end_) {
            if (acc > best_) record_best(acc);
            return;
        }
        if (acc + caps_suffix_[static_cast<size_t>(k + ta_)] < best_) return;
        if (jnext >= n_packets_) {
            // every packet assigned: flush the remaining instants
            int k2 = k, l2 = last;
            double h2 = hold, a2 = acc;
            if (advance(k2, h2, l2, a2, n_packets_ + k_end_ + ta_ + 1)) {
                if (a2 > best_) record_best(a2);
            }
            return;
        }
        const int j = jnext;
        // arrivals beyond the window are indistinguishable; merge them into
        // the single earliest out-of-window slot
        int dmax = std::max(std::min(dtau_, k_end_ + 1 - j), -ta_);
        for (int d = -ta_; d <= dmax; ++d) {
            delays_[static_cast<size_t>(j)] = d;
            auto& bucket = arrivals_[static_cast<size_t>(j + d + ta_)];
            bucket.push_back(j);
            descend(k, hold, last, acc, j + 1);
            bucket.pop_back();
        }
    }

    static double sq(double x) { return x * x; }

    Protocol proto_;
    int tn_, ta_, T_, dtau_, k_end_, n_packets_;
    std::uint64_t budget_, nodes_ = 0;
    double best_ = -1.0;
    std::vector<int> delays_, best_delays_, selections_, best_selections_;
    std::vector<std::vector<int>> arrivals_;
    std::vector<double> caps_suffix_;
};

}  // namespace

OracleResult oracle_gain(Protocol protocol, int tn, int ta, int T,
                         std::uint64_t budget) {
    if (tn < 1) throw Error("delay span must be at least 1");
    if (ta < 0 || ta > tn) throw Error("tau_A must lie in [0, span]");
    if (T < 0) throw Error("truncation index must be nonnegative");
    OracleSearch search(protocol, tn, ta, T, budget);
    return search.run();
}

}  // namespace unc
