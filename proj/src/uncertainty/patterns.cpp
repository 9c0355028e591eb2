#include "uncertainty/delay_gain.hpp"

#include <algorithm>

namespace unc {

const char* family_name(Family f) {
    switch (f) {
        case Family::P1: return "p1";
        case Family::P3Prime: return "p3_prime";
        case Family::P3DPrime: return "p3_dprime";
        default: return "p3_tprime";
    }
}

std::vector<int> family_pattern(Family f, int tn, int ta, int T, int j_end) {
    if (tn < 1) throw Error("delay span must be at least 1");
    if (ta < 0 || ta > tn) throw Error("tau_A must lie in [0, span]");
    const int dtau = tn - ta;
    std::vector<int> d(static_cast<size_t>(j_end) + 1, 0);
    switch (f) {
        case Family::P1: {
            // constant extreme: whichever of the two range ends is farther
            // from the nominal arrival
            int tb = std::max(ta, dtau);
            int v = tb == dtau ? dtau : -tb;
            std::fill(d.begin(), d.end(), v);
            break;
        }
        case Family::P3Prime: {
            // rolling burst: packets of each period arrive together, the
            // receiver is fed the oldest
            for (int j = 0; j <= j_end; ++j)
                d[static_cast<size_t>(j)] = dtau - (j % (tn + 1));
            break;
        }
        case Family::P3DPrime: {
            // early flood then the rolling burst
            for (int j = 0; j <= j_end; ++j) {
                if (j == 0)
                    d[static_cast<size_t>(j)] = dtau;
                else if (j <= tn)
                    d[static_cast<size_t>(j)] = -ta;
                else
                    d[static_cast<size_t>(j)] = dtau - ((j - tn - 1) % (tn + 1));
            }
            break;
        }
        case Family::P3TPrime: {
            // single stale burst straddling the payload truncation
            if (T < tn - 1)
                throw Error("this family requires T >= span - 1");
            int n0 = T - tn + 1;
            for (int j = 0; j <= j_end; ++j) {
                if (j < n0)
                    d[static_cast<size_t>(j)] = -ta;
                else if (j == n0)
                    d[static_cast<size_t>(j)] = dtau;
                else if (j <= n0 + tn)
                    d[static_cast<size_t>(j)] = -ta;
                else
                    d[static_cast<size_t>(j)] = dtau;
            }
            break;
        }
    }
    return d;
}

ChannelRealization worst_case_pattern(Protocol protocol, int tn, int ta, int T) {
    const int j_end = T + 2 * tn + ta;
    if (protocol == Protocol::P1) {
        auto d = family_pattern(Family::P1, tn, ta, T, j_end);
        return uncertainty_response(Protocol::P1, d, T, ta, tn);
    }
    ChannelRealization best;
    bool have = false;
    for (Family f : {Family::P1, Family::P3Prime, Family::P3DPrime,
                     Family::P3TPrime}) {
        if (f == Family::P3TPrime && T < tn - 1) continue;
        auto d = family_pattern(f, tn, ta, T, j_end);
        auto r = uncertainty_response(Protocol::P3, d, T, ta, tn);
        if (!have || r.alpha_T > best.alpha_T) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

}  // namespace unc
