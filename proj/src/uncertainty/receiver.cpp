#include "uncertainty/delay_gain.hpp"

#include <algorithm>
#include <cmath>

namespace unc {

const char* protocol_name(Protocol p) {
    return p == Protocol::P1 ? "p1" : "p3";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "p1" || name == "P1") return Protocol::P1;
    if (name == "p3" || name == "P3") return Protocol::P3;
    throw Error("unknown protocol '" + name + "' (expected p1 or p3)");
}

void DelaySpec::validate() const {
    if (tau_lo < 0 || tau_hi < 0 || d_hat < 0 || tau_A < 0)
        throw Error("delay bounds must be nonnegative");
    if (tau_lo >= tau_hi)
        throw Error("tau_lo must be strictly below tau_hi");
}

ChannelRealization uncertainty_response(Protocol protocol,
                                        const std::vector<int>& delays, int T,
                                        int tau_A, int tau_hat_N,
                                        const std::map<int, int>& selections) {
    if (tau_hat_N < 1) throw Error("delay span must be at least 1");
    if (tau_A < 0 || tau_A > tau_hat_N)
        throw Error("tau_A must lie in [0, span]");
    if (T < 0) throw Error("truncation index must be nonnegative");
    const int dtau = tau_hat_N - tau_A;
    const int k_lo = -tau_A;
    const int k_hi = T + 2 * tau_hat_N;
    const int window = k_hi - k_lo + 1;

    ChannelRealization r;
    r.tau_hat_N = tau_hat_N;
    r.tau_A = tau_A;
    r.T = T;
    r.delays = delays;
    r.selections.assign(static_cast<size_t>(window), -1);
    r.w.assign(static_cast<size_t>(window), 0.0);

    // arrivals bucketed by window index k + tau_A; packet indices ascend
    std::vector<std::vector<int>> arrivals(static_cast<size_t>(window));
    for (size_t j = 0; j < delays.size(); ++j) {
        int d = delays[j];
        if (d < -tau_A || d > dtau)
            throw Error("packet delay out of the admissible shifted range");
        int arr = static_cast<int>(j) + d;
        if (arr >= k_lo && arr <= k_hi)
            arrivals[static_cast<size_t>(arr + tau_A)].push_back(static_cast<int>(j));
    }

    double hold = 0.0;
    int last = -1;
    for (int k = k_lo; k <= k_hi; ++k) {
        size_t idx = static_cast<size_t>(k + tau_A);
        const auto& js = arrivals[idx];
        if (!js.empty()) {
            if (protocol == Protocol::P1) {
                int jm = js.back();
                if (jm > last) {
                    last = jm;
                    hold = payload(jm, T);
                    r.selections[idx] = jm;
                }
            } else {
                int s;
                auto it = selections.find(k);
                if (it != selections.end()) {
                    s = it->second;
                    if (std::find(js.begin(), js.end(), s) == js.end())
                        throw Error("forced selection is not among the arrivals");
                } else {
                    s = js.front();
                }
                hold = payload(s, T);
                r.selections[idx] = s;
            }
        }
        double w = hold - payload(k, T);
        r.w[idx] = w;
        r.norm2 += w * w;
    }
    r.alpha_T = std::sqrt(r.norm2 / (1.0 + T));
    return r;
}

}  // namespace unc
