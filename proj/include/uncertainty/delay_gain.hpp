#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace unc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

// Receiver protocols. P1: packets are numbered, the newest available one wins
// and older ones are skipped. P3: no numbering; when packets arrive, any one
// of them may be used (adversarial choice) and the rest are dropped. Both
// zero-order hold between selections.
enum class Protocol { P1, P3 };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

// Network delay bounds plus the design constants derived from them.
// Shifted per-packet delays live in [-tau_A, span - tau_A].
struct DelaySpec {
    int tau_lo = 0;
    int tau_hi = 1;
    int d_hat = 0;
    int tau_A = 0;

    int span() const { return tau_hi - tau_lo; }
    int tau_hat() const { return d_hat + tau_lo + tau_A; }
    void validate() const;
};

// One concrete behavior of the delay block: per-packet shifted delays, the
// receiver's per-instant selections, and the resulting output w_k = c_k - a_k
// on the scoring window k in [-tau_A, T + 2*span].
struct ChannelRealization {
    int tau_hat_N = 0;
    int tau_A = 0;
    int T = 0;
    std::vector<int> delays;      // packet j = 0..delays.size()-1
    std::vector<int> selections;  // per window instant; packet index or -1 = hold
    std::vector<double> w;
    double norm2 = 0.0;
    double alpha_T = 0.0;

    int k_lo() const { return -tau_A; }
    int k_hi() const { return T + 2 * tau_hat_N; }
    int window_size() const { return k_hi() - k_lo() + 1; }
};

// truncated-ramp payload: 0 before release, k+1 while active, T+1 after
inline int payload(int k, int T) {
    if (k < 0) return 0;
    return k + 1 < T + 1 ? k + 1 : T + 1;
}

// Runs the receiver over the scoring window. delays[j] is the shifted delay
// of packet j (pass every packet whose arrival can land in the window, i.e.
// j up to T + 2*span + tau_A). For P3 the per-instant selections may be
// forced (instant -> packet index); unspecified instants take the oldest
// arrival, matching the worst-case pattern families.
ChannelRealization uncertainty_response(Protocol protocol,
                                        const std::vector<int>& delays, int T,
                                        int tau_A, int tau_hat_N,
                                        const std::map<int, int>& selections = {});

// ---- closed-form truncated gains (alpha_T) and their limits ----

// newest-wins protocol; valid for T >= max(tau_bar - 2, 0),
// tau_bar = max(tau_A, span - tau_A)
double gain_p1(int tau_hat_N, int tau_A, int T);
double gain_p1_limit(int tau_hat_N, int tau_A);

// periodic stale-burst family
double gain_p3_prime(int tau_hat_N, int tau_A, int T);
double gain_p3_prime_limit(int tau_hat_N, int tau_A);

// early-flood variant of the burst family
double gain_p3_dprime(int tau_hat_N, int tau_A, int T);

// late-single-burst family; valid for T >= span - 1
double gain_p3_tprime(int tau_hat_N, int tau_A, int T);

// max over the families that are valid at (tau_A, T); for P1 only the P1
// closed form applies
double family_gain(Protocol protocol, int tau_hat_N, int tau_A, int T);

// per-family supremum over T (swept to t_max and combined with the
// analytic limits where they exist)
struct FamilyAlphas {
    double p1 = 0.0;
    double p3_prime = 0.0;
    double p3_dprime = 0.0;
    double p3_tprime = 0.0;

    double max3() const;                  // P3 block: max of all four
    const char* argmax3() const;
};

FamilyAlphas family_alphas(int tau_hat_N, int tau_A, int t_max = -1);

int default_t_max(int tau_hat_N);

// ---- optimization over the acausal shift ----

struct TauADetail {
    int tau_A = 0;
    std::vector<double> alpha_T;  // index = T
    double alpha = 0.0;           // limiting gain (sup over T)
    std::string family;           // family attaining the sup
};

struct GainResult {
    Protocol protocol = Protocol::P3;
    int tau_hat_N = 0;
    std::vector<TauADetail> per_tau_A;
    int tau_A_star = 0;
    double alpha_star = 0.0;
    std::string family;
};

// smaller minimizer of max(tau_A, span - tau_A); alpha* = ceil(span/2)
GainResult optimal_p1(int tau_hat_N);

// min over tau_A of the family-combined sup; ties resolve to smaller tau_A
GainResult optimal_p3(int tau_hat_N, int t_max = -1);

// span-independent shortcut: tau_A = span, alpha = span
GainResult overestimate_p3(int tau_hat_N);

// ---- exhaustive oracle and worst-case patterns ----

struct OracleResult {
    double alpha_T = 0.0;
    ChannelRealization witness;
    std::uint64_t nodes = 0;
};

// exact max of alpha_T over all admissible delay assignments (and P3
// selections), branch-and-bound; witness is the lexicographically first
// maximal assignment (delays scanned ascending from -tau_A, selections by
// packet index). budget caps the number of search nodes.
OracleResult oracle_gain(Protocol protocol, int tau_hat_N, int tau_A, int T,
                         std::uint64_t budget = 200000000ULL);

enum class Family { P1, P3Prime, P3DPrime, P3TPrime };

const char* family_name(Family f);

// delay pattern (and implied oldest-arrival selections) of one closed-form
// family, long enough to cover packets 0..j_end
std::vector<int> family_pattern(Family f, int tau_hat_N, int tau_A, int T,
                                int j_end);

// realization of the family attaining family_gain at (tau_A, T)
ChannelRealization worst_case_pattern(Protocol protocol, int tau_hat_N,
                                      int tau_A, int T);

}  // namespace unc
