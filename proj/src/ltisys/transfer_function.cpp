#include "ltisys/transfer_function.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace lti {

namespace {

constexpr double kStabilityMargin = 1e-7;
constexpr double kCancelTol = 1e-9;

double max_abs(const std::vector<double>& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::abs(c));
    return m;
}

// drop leading (highest-power) coefficients that are negligible relative to
// the largest coefficient; keeps at least one entry
void strip_leading(std::vector<double>& p) {
    double scale = max_abs(p);
    double tol = scale > 0.0 ? scale * 1e-14 : 0.0;
    size_t i = 0;
    while (i + 1 < p.size() && std::abs(p[i]) <= tol) ++i;
    if (i > 0) p.erase(p.begin(), p.begin() + static_cast<long>(i));
    if (p.size() == 1 && std::abs(p[0]) <= tol) p[0] = 0.0;
}

size_t trailing_zeros(const std::vector<double>& p) {
    size_t n = 0;
    for (auto it = p.rbegin(); it != p.rend() && *it == 0.0; ++it) ++n;
    return std::min(n, p.size() - 1);
}

void check_h(const TransferFunction& g1, const TransferFunction& g2) {
    if (g1.h != g2.h) throw Error("sample-time mismatch");
}

}  // namespace

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size() + q.size() - 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

std::vector<double> poly_add(const std::vector<double>& p, const std::vector<double>& q) {
    // align by the constant term (lists are descending)
    size_t n = std::max(p.size(), q.size());
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < p.size(); ++i) out[n - p.size() + i] += p[i];
    for (size_t i = 0; i < q.size(); ++i) out[n - q.size() + i] += q[i];
    return out;
}

std::complex<double> poly_eval(const std::vector<double>& p, const std::complex<double>& z) {
    std::complex<double> acc(0.0, 0.0);
    for (double c : p) acc = acc * z + c;
    return acc;
}

std::vector<double> poly_deflate(const std::vector<double>& p, double root, double* remainder) {
    std::vector<double> out;
    out.reserve(p.size() - 1);
    double acc = 0.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        acc = acc * root + p[i];
        out.push_back(acc);
    }
    acc = acc * root + p.back();
    if (remainder) *remainder = acc;
    return out;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& p) {
    std::vector<double> q = p;
    strip_leading(q);
    int n = static_cast<int>(q.size()) - 1;
    std::vector<std::complex<double>> out;
    if (n < 1 || (q.size() == 1 && q[0] == 0.0)) return out;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) comp(0, i) = -q[static_cast<size_t>(i) + 1] / q[0];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
    return out;
}

std::complex<double> TransferFunction::eval(const std::complex<double>& z) const {
    std::complex<double> v = poly_eval(num, z) / poly_eval(den, z);
    if (delay > 0) v *= std::pow(z, -delay);
    return v;
}

std::complex<double> TransferFunction::at_omega(double omega) const {
    return eval(std::polar(1.0, omega * h));
}

TransferFunction tf_new(std::vector<double> num, std::vector<double> den,
                        int delay, double h) {
    if (den.empty()) throw Error("empty denominator");
    if (h <= 0.0) throw Error("sample time must be positive");
    if (delay < 0) throw Error("delay must be nonnegative");
    if (num.empty()) num = {0.0};
    strip_leading(num);
    strip_leading(den);
    if (den[0] == 0.0) throw Error("zero denominator");
    // cancel a common z^k factor (origin pole/zero pair)
    size_t tz = std::min(trailing_zeros(num), trailing_zeros(den));
    if (tz > 0 && !(num.size() == 1 && num[0] == 0.0)) {
        num.resize(num.size() - tz);
        den.resize(den.size() - tz);
    }
    TransferFunction g{std::move(num), std::move(den), delay, h};
    if (g.is_zero()) {
        g.den = {1.0};
        g.delay = 0;
    }
    if (g.relative_degree() < 0) throw Error("improper transfer function");
    double lead = g.den[0];
    for (double& c : g.num) c /= lead;
    for (double& c : g.den) c /= lead;
    return g;
}

TransferFunction tf_scale(const TransferFunction& g, double factor) {
    std::vector<double> num = g.num;
    for (double& c : num) c *= factor;
    return tf_new(std::move(num), g.den, g.delay, g.h);
}

TransferFunction tf_multiply(const TransferFunction& g1, const TransferFunction& g2) {
    check_h(g1, g2);
    return tf_new(poly_mul(g1.num, g2.num), poly_mul(g1.den, g2.den),
                  g1.delay + g2.delay, g1.h);
}

TransferFunction tf_add(const TransferFunction& g1, const TransferFunction& g2) {
    check_h(g1, g2);
    // z^-d1 n1/d1 + z^-d2 n2/d2 = z^-dmax (n1 d2 z^(dmax-d1) + n2 d1 z^(dmax-d2)) / (d1 d2)
    int dmax = std::max(g1.delay, g2.delay);
    std::vector<double> t1 = poly_mul(g1.num, g2.den);
    std::vector<double> t2 = poly_mul(g2.num, g1.den);
    t1.resize(t1.size() + static_cast<size_t>(dmax - g1.delay), 0.0);
    t2.resize(t2.size() + static_cast<size_t>(dmax - g2.delay), 0.0);
    return tf_new(poly_add(t1, t2), poly_mul(g1.den, g2.den), dmax, g1.h);
}

TransferFunction tf_feedback(const TransferFunction& g, const TransferFunction& h_fb) {
    check_h(g, h_fb);
    // g/(1 + g h) = ng dh z^b / (dg dh z^(a+b) + ng nh), a = g.delay, b = h.delay
    int a = g.delay, b = h_fb.delay;
    std::vector<double> num = poly_mul(g.num, h_fb.den);
    num.resize(num.size() + static_cast<size_t>(b), 0.0);
    std::vector<double> d1 = poly_mul(g.den, h_fb.den);
    d1.resize(d1.size() + static_cast<size_t>(a + b), 0.0);
    std::vector<double> den = poly_add(d1, poly_mul(g.num, h_fb.num));
    if (max_abs(den) == 0.0) throw Error("zero denominator after feedback");
    return tf_new(std::move(num), std::move(den), 0, g.h);
}

std::vector<std::complex<double>> poles(const TransferFunction& g) {
    return poly_roots(g.den);
}

bool is_stable(const TransferFunction& g) {
    for (const auto& p : poles(g))
        if (std::abs(p) >= 1.0 - kStabilityMargin) return false;
    return true;
}

InfNormResult inf_norm(const TransferFunction& g) {
    if (!is_stable(g)) {
        // distinguish a genuinely unstable system from an unstable factor that
        // should have been cancelled upstream
        auto zs = poly_roots(g.num);
        for (const auto& p : poles(g)) {
            if (std::abs(p) < 1.0 - kStabilityMargin) continue;
            for (const auto& z : zs)
                if (std::abs(p - z) < kCancelTol)
                    throw Error("near-cancelling unstable factor at |z|=" +
                                std::to_string(std::abs(p)) +
                                "; cancel it analytically before taking the norm");
        }
        throw Error("infinity norm requested for an unstable system");
    }
    if (g.is_zero()) return {0.0, 0.0};
    const int kIntervals = 4096;
    const double wmax = M_PI / g.h;
    auto mag = [&](double w) { return std::abs(g.at_omega(w)); };
    double best = -1.0, wbest = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        double w = wmax * static_cast<double>(i) / kIntervals;
        double m = mag(w);
        if (m > best) {
            best = m;
            wbest = w;
        }
    }
    // golden-section refinement inside the bracketing interval pair
    double lo = std::max(0.0, wbest - wmax / kIntervals);
    double hi = std::min(wmax, wbest + wmax / kIntervals);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = mag(x1), f2 = mag(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = mag(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = mag(x1);
        }
    }
    double wmid = 0.5 * (lo + hi);
    double fmid = mag(wmid);
    if (fmid > best) {
        best = fmid;
        wbest = wmid;
    }
    return {best, wbest};
}

}  // namespace lti
