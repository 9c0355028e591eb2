#include "ltisys/fsp_design.hpp"

#include <cmath>

namespace lti {

namespace {

constexpr double kDeflateTol = 1e-8;

// unique pole with |z| >= 1, or 0 count if the plant is stable
int unstable_pole(const TransferFunction& g, double* root) {
    int count = 0;
    for (const auto& p : poles(g)) {
        if (std::abs(p) >= 1.0) {
            ++count;
            if (std::abs(p.imag()) > 1e-12)
                throw Error("unstable plant pole is not real");
            *root = p.real();
        }
    }
    return count;
}

}  // namespace

SmithPredictorDesign design_fsp(const TransferFunction& C,
                                const TransferFunction& P_hat,
                                int tau_hat, double p) {
    if (p <= 0.0 || p >= 1.0) throw Error("filter pole must lie in (0, 1)");
    if (tau_hat < 0) throw Error("nominal delay must be nonnegative");
    if (P_hat.delay != 0)
        throw Error("pass the delay-free plant; dead time lives in tau_hat");
    double z_u = 0.0;
    int n_unstable = unstable_pole(P_hat, &z_u);
    if (n_unstable > 1)
        throw Error("plant has more than one unstable pole");

    double b1, b0;
    if (n_unstable == 1) {
        // F(1) = 1 and z^tau_hat (z - p) - (b1 z + b0) = 0 at z = z_u
        double rhs = std::pow(z_u, tau_hat) * (z_u - p);
        if (std::abs(z_u - 1.0) < 1e-12)
            throw Error("design system singular: unstable pole at z = 1");
        b1 = (rhs - (1.0 - p)) / (z_u - 1.0);
        b0 = (1.0 - p) - b1;
    } else {
        b1 = 1.0 - p;
        b0 = 0.0;
    }
    TransferFunction F = tf_new({b1, b0}, {1.0, -p}, 0, P_hat.h);

    // H = P_hat (1 - z^-tau_hat F) = P_hat q(z) / (z^tau_hat (z - p)),
    // q(z) = z^tau_hat (z - p) - (b1 z + b0)
    std::vector<double> q(static_cast<size_t>(tau_hat) + 2, 0.0);
    q[0] = 1.0;
    q[1] += -p;
    q[static_cast<size_t>(tau_hat)] += -b1;
    q[static_cast<size_t>(tau_hat) + 1] += -b0;

    std::vector<double> h_num_core = q;
    std::vector<double> h_den_plant = P_hat.den;
    if (n_unstable == 1) {
        double rem = 0.0;
        h_num_core = poly_deflate(q, z_u, &rem);
        if (std::abs(rem) > kDeflateTol)
            throw Error("predictor cancellation failed: residual " +
                        std::to_string(rem));
        double rem_den = 0.0;
        h_den_plant = poly_deflate(P_hat.den, z_u, &rem_den);
    }
    std::vector<double> h_den = poly_mul(h_den_plant, {1.0, -p});
    h_den.resize(h_den.size() + static_cast<size_t>(tau_hat), 0.0);
    TransferFunction H = tf_new(poly_mul(P_hat.num, h_num_core),
                                std::move(h_den), 0, P_hat.h);
    if (!is_stable(H))
        throw Error("predictor internal model H is unstable");

    // R = C F / (1 + C H); the controller denominator d_C appears in both
    // the numerator and denominator of the raw quotient and is cancelled
    // analytically: R = n_C n_F d_H / (d_F (d_C d_H + n_C n_H))
    std::vector<double> r_num = poly_mul(poly_mul(C.num, F.num), H.den);
    std::vector<double> r_den = poly_mul(
        F.den, poly_add(poly_mul(C.den, H.den), poly_mul(C.num, H.num)));
    TransferFunction R = tf_new(std::move(r_num), std::move(r_den), 0, P_hat.h);

    SmithPredictorDesign d;
    d.C = C;
    d.V = tf_new({1.0}, {1.0}, 0, P_hat.h);
    d.F = F;
    d.H = H;
    d.R = R;
    d.tau_hat = tau_hat;
    return d;
}

TransferFunction build_M(const TransferFunction& R,
                         const TransferFunction& P_hat, int tau_hat) {
    if (P_hat.delay != 0)
        throw Error("pass the delay-free plant; dead time lives in tau_hat");
    TransferFunction D = tf_new({1.0}, {1.0}, tau_hat, P_hat.h);
    TransferFunction open = tf_multiply(R, tf_multiply(P_hat, D));
    TransferFunction closed = tf_feedback(open, tf_new({1.0}, {1.0}, 0, P_hat.h));
    TransferFunction diff = tf_new({1.0, -1.0}, {1.0, 0.0}, 0, P_hat.h);
    return tf_multiply(tf_scale(closed, -1.0), diff);
}

BenchmarkSystem design_example() {
    BenchmarkSystem b;
    b.h = 1.0;
    b.filter_pole = 0.95;
    b.plant = tf_new({0.0051271}, {1.0, -1.051}, 5, b.h);
    b.C = tf_new({29.504, -29.504 * 0.9835}, {1.0, -1.0}, 0, b.h);
    b.V = tf_new({0.041317, -0.041317 * 0.6}, {1.0, -0.9835}, 0, b.h);
    return b;
}

}  // namespace lti
