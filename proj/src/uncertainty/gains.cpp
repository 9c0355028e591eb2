#include "uncertainty/delay_gain.hpp"

#include <algorithm>
#include <cmath>

namespace unc {

namespace {

// squared truncated gains, i.e. ||w||^2 / (1+T); -1 marks "formula not
// valid at this T"

double gain2_p1(int tn, int ta, int T) {
    int tb = std::max(ta, tn - ta);
    if (T < tb - 2) return -1.0;
    long long s = 0;
    for (int i = 1; i < tb; ++i) s += 2LL * i * i;
    s += static_cast<long long>(T - tb + 2) * tb * tb;
    return static_cast<double>(s) / (1.0 + T);
}

struct K123 {
    int k1, k2, k3;
};

K123 k123(int tn, int ta, int T) {
    int numer = T + 1 + tn + ta - 3 * tn;
    int period = tn + 1;
    int k1 = numer <= 0 ? 0 : (numer + period - 1) / period;
    int k2 = T + 1 + tn + ta - k1 * period;
    int k3 = k2 / period;
    return {k1, k2, k3};
}

struct BCD {
    long long B, C, D;
};

BCD blocks_bcd(int tn, int ta, int T) {
    int dtau = tn - ta;
    auto [k1, k2, k3] = k123(tn, ta, T);
    long long d = 0;
    for (int i = 0; i <= tn; ++i) d += static_cast<long long>(dtau + i) * (dtau + i);
    long long B = static_cast<long long>(k1) * d;
    long long C = 0;
    for (int j = k1; j < k1 + k3; ++j) {
        int base = payload(j * (tn + 1), T);
        for (int i = dtau + j * (tn + 1); i <= 2 * tn - ta + j * (tn + 1); ++i) {
            long long v = payload(i, T) - base;
            C += v * v;
        }
    }
    long long D = 0;
    int i0 = dtau + (k1 + k3) * (tn + 1);
    int base = payload(i0, T);
    for (int i = i0; i <= T + 2 * tn; ++i) {
        long long v = payload(i, T) - base;
        D += v * v;
    }
    return {B, C, D};
}

double gain2_p3p(int tn, int ta, int T) {
    int dtau = tn - ta;
    long long A = 0;
    for (int i = 1; i <= dtau; ++i) {
        long long v = std::min(i, T + 1);
        A += v * v;
    }
    auto [B, C, D] = blocks_bcd(tn, ta, T);
    return static_cast<double>(A + B + C + D) / (1.0 + T);
}

double limit2_p3p(int tn, int ta) {
    double dtau = tn - ta;
    return dtau * dtau + dtau * tn + tn * tn / 3.0 + tn / 6.0;
}

double gain2_p3pp(int tn, int ta, int T) {
    int dtau = tn - ta;
    long long Ap = 0;
    if (ta == 0) {
        Ap = 1;
    } else {
        for (int i = 1; i <= dtau; ++i) {
            long long v = std::min({T, ta, std::max(0, T - i + 1)});
            Ap += v * v;
        }
    }
    long long Am = 0;
    if (ta >= 2) {
        for (int i = 2; i <= ta; ++i) {
            long long v = std::min(i, T + 1);
            Am += v * v;
        }
    }
    auto [B, C, D] = blocks_bcd(tn, ta, T);
    return static_cast<double>(Ap + Am + B + C + D) / (1.0 + T);
}

double gain2_p3ppp(int tn, int ta, int T) {
    if (T < tn - 1) return -1.0;
    int dtau = tn - ta;
    long long A = 0;
    if (ta >= 2) {
        for (int i = 1; i < ta; ++i) {
            int delta = (i == T - tn + 2 && T < tn - 2 + ta) ? 1 : 0;
            long long v = i - delta;
            A += v * v;
        }
    }
    long long B, C = 0;
    if (T >= tn - 2 + ta) {
        B = static_cast<long long>(T - tn - ta + 2) * ta * ta;
        for (int i = ta - 1; i <= ta + tn - 2; ++i) {
            long long v = std::min(i, ta);
            C += v * v;
        }
    } else {
        B = static_cast<long long>(T - ta + 2) * ta * ta;
    }
    long long D = 0;
    for (int i = dtau; i <= 2 * tn - ta; ++i) {
        long long v = std::min(i, tn - 1);
        D += v * v;
    }
    return static_cast<double>(A + B + C + D) / (1.0 + T);
}

void check_args(int tn, int ta) {
    if (tn < 1) throw Error("delay span must be at least 1");
    if (ta < 0 || ta > tn) throw Error("tau_A must lie in [0, span]");
}

}  // namespace

double gain_p1(int tn, int ta, int T) {
    check_args(tn, ta);
    double g2 = gain2_p1(tn, ta, T);
    if (g2 < 0.0)
        throw Error("P1 closed form requires T >= max(tau_bar - 2, 0)");
    return std::sqrt(g2);
}

double gain_p1_limit(int tn, int ta) {
    check_args(tn, ta);
    return static_cast<double>(std::max(ta, tn - ta));
}

double gain_p3_prime(int tn, int ta, int T) {
    check_args(tn, ta);
    if (T < 0) throw Error("truncation index must be nonnegative");
    return std::sqrt(gain2_p3p(tn, ta, T));
}

double gain_p3_prime_limit(int tn, int ta) {
    check_args(tn, ta);
    return std::sqrt(limit2_p3p(tn, ta));
}

double gain_p3_dprime(int tn, int ta, int T) {
    check_args(tn, ta);
    if (T < 0) throw Error("truncation index must be nonnegative");
    return std::sqrt(gain2_p3pp(tn, ta, T));
}

double gain_p3_tprime(int tn, int ta, int T) {
    check_args(tn, ta);
    double g2 = gain2_p3ppp(tn, ta, T);
    if (g2 < 0.0) throw Error("this family requires T >= span - 1");
    return std::sqrt(g2);
}

double family_gain(Protocol protocol, int tn, int ta, int T) {
    check_args(tn, ta);
    if (protocol == Protocol::P1) return gain_p1(tn, ta, T);
    double best = std::max(gain2_p3p(tn, ta, T), gain2_p3pp(tn, ta, T));
    best = std::max(best, gain2_p3ppp(tn, ta, T));  // -1 when invalid
    best = std::max(best, gain2_p1(tn, ta, T));
    return std::sqrt(best);
}

double FamilyAlphas::max3() const {
    return std::max({p1, p3_prime, p3_dprime, p3_tprime});
}

const char* FamilyAlphas::argmax3() const {
    double m = max3();
    if (p1 >= m) return "p1";
    if (p3_prime >= m) return "p3_prime";
    if (p3_dprime >= m) return "p3_dprime";
    return "p3_tprime";
}

int default_t_max(int tn) { return std::max(50, 10 * tn); }

FamilyAlphas family_alphas(int tn, int ta, int t_max) {
    check_args(tn, ta);
    if (t_max < 0) t_max = default_t_max(tn);
    FamilyAlphas out;
    out.p1 = gain_p1_limit(tn, ta);
    double best = limit2_p3p(tn, ta);
    for (int T = 0; T <= t_max; ++T) best = std::max(best, gain2_p3p(tn, ta, T));
    out.p3_prime = std::sqrt(best);
    best = limit2_p3p(tn, ta);  // shares the T -> inf limit
    for (int T = 0; T <= t_max; ++T) best = std::max(best, gain2_p3pp(tn, ta, T));
    out.p3_dprime = std::sqrt(best);
    best = 0.0;
    for (int T = std::max(0, tn - 1); T <= t_max; ++T)
        best = std::max(best, gain2_p3ppp(tn, ta, T));
    out.p3_tprime = std::sqrt(best);
    return out;
}

namespace {

// alpha_T sequence over T = 0..t_max; where a closed form is invalid at
// small T the family pattern is run through the receiver instead
std::vector<double> alpha_series(Protocol protocol, int tn, int ta, int t_max) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(t_max) + 1);
    for (int T = 0; T <= t_max; ++T) {
        bool formula_ok = protocol == Protocol::P3
                              ? true
                              : T >= std::max(ta, tn - ta) - 2;
        if (formula_ok) {
            out.push_back(family_gain(protocol, tn, ta, T));
        } else {
            out.push_back(worst_case_pattern(protocol, tn, ta, T).alpha_T);
        }
    }
    return out;
}

}  // namespace

GainResult optimal_p1(int tn) {
    check_args(tn, 0);
    GainResult res;
    res.protocol = Protocol::P1;
    res.tau_hat_N = tn;
    res.family = "p1";
    int best_ta = 0;
    double best = -1.0;
    for (int ta = 0; ta <= tn; ++ta) {
        TauADetail d;
        d.tau_A = ta;
        d.alpha = gain_p1_limit(tn, ta);
        d.family = "p1";
        d.alpha_T = alpha_series(Protocol::P1, tn, ta, default_t_max(tn));
        res.per_tau_A.push_back(std::move(d));
        if (best < 0.0 || res.per_tau_A.back().alpha < best) {
            best = res.per_tau_A.back().alpha;
            best_ta = ta;
        }
    }
    res.tau_A_star = best_ta;
    res.alpha_star = best;
    return res;
}

GainResult optimal_p3(int tn, int t_max) {
    check_args(tn, 0);
    if (t_max < 0) t_max = default_t_max(tn);
    GainResult res;
    res.protocol = Protocol::P3;
    res.tau_hat_N = tn;
    int best_ta = 0;
    double best = -1.0;
    std::string best_family;
    for (int ta = 0; ta <= tn; ++ta) {
        FamilyAlphas fa = family_alphas(tn, ta, t_max);
        TauADetail d;
        d.tau_A = ta;
        d.alpha = fa.max3();
        d.family = fa.argmax3();
        d.alpha_T = alpha_series(Protocol::P3, tn, ta, t_max);
        res.per_tau_A.push_back(std::move(d));
        const TauADetail& back = res.per_tau_A.back();
        if (best < 0.0 || back.alpha < best) {
            best = back.alpha;
            best_ta = ta;
            best_family = back.family;
        }
    }
    res.tau_A_star = best_ta;
    res.alpha_star = best;
    res.family = best_family;
    return res;
}

GainResult overestimate_p3(int tn) {
    check_args(tn, 0);
    GainResult res;
    res.protocol = Protocol::P3;
    res.tau_hat_N = tn;
    res.tau_A_star = tn;
    res.alpha_star = static_cast<double>(tn);
    res.family = "overestimate";
    TauADetail d;
    d.tau_A = tn;
    d.alpha = static_cast<double>(tn);
    d.family = "overestimate";
    res.per_tau_A.push_back(std::move(d));
    return res;
}

}  // namespace unc
