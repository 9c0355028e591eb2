#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ltisys/fsp_design.hpp"
#include "ltisys/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

using lti::TransferFunction;
using std::complex;

namespace {

complex<double> at(const TransferFunction& g, double omega) {
    return g.at_omega(omega);
}

TransferFunction random_stable(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pole(-0.85, 0.85);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> order(1, 3), dly(0, 3);
    int n = order(rng);
    std::vector<double> den{1.0};
    for (int i = 0; i < n; ++i) den = lti::poly_mul(den, {1.0, -pole(rng)});
    std::vector<double> num(static_cast<size_t>(n) + 1);
    for (auto& c : num) c = coef(rng);
    return lti::tf_new(num, den, dly(rng), 1.0);
}

}  // namespace

TEST_CASE("construction canonicalizes to a monic denominator") {
    auto g = lti::tf_new({2.0, 4.0}, {2.0, 1.0}, 0, 1.0);
    CHECK(g.den[0] == 1.0);
    CHECK(g.den[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.num[0] == doctest::Approx(1.0).epsilon(1e-15));

    auto id = lti::tf_new({1.0}, {1.0}, 0, 1.0);
    for (double w : {0.0, 0.7, 2.2, M_PI})
        CHECK(std::abs(at(id, w) - 1.0) < 1e-15);
}

TEST_CASE("construction rejects bad shapes") {
    CHECK_THROWS_AS(lti::tf_new({1.0, 0.0, 0.0}, {1.0, 1.0}, 0, 1.0),
                    lti::Error);                                   // improper
    CHECK_THROWS_AS(lti::tf_new({1.0}, {0.0}, 0, 1.0), lti::Error);
    CHECK_THROWS_AS(lti::tf_new({1.0}, {}, 0, 1.0), lti::Error);
    CHECK_THROWS_AS(lti::tf_new({1.0}, {1.0}, -1, 1.0), lti::Error);
    CHECK_THROWS_AS(lti::tf_new({1.0}, {1.0}, 0, 0.0), lti::Error);
}

TEST_CASE("common trailing zeros are trimmed") {
    auto g = lti::tf_new({1.0, 0.0}, {1.0, -0.5, 0.0}, 0, 1.0);
    CHECK(g.num.size() == 1);
    CHECK(g.den.size() == 2);
    for (double w : {0.3, 1.1, 2.9}) {
        auto ref = 1.0 / (std::polar(1.0, w) - 0.5);
        CHECK(std::abs(at(g, w) - ref) < 1e-14);
    }
}

TEST_CASE("pure delays multiply by adding exponents") {
    auto d2 = lti::tf_new({1.0}, {1.0}, 2, 1.0);
    auto d3 = lti::tf_new({1.0}, {1.0}, 3, 1.0);
    auto d5 = lti::tf_multiply(d2, d3);
    CHECK(d5.delay == 5);
    CHECK(d5.num.size() == 1);
    for (double w : {0.0, 0.4, 1.9}) {
        auto ref = std::polar(1.0, -5.0 * w);
        CHECK(std::abs(at(d5, w) - ref) < 1e-14);
    }
}

TEST_CASE("feedback against zero is the open loop") {
    auto g = lti::tf_new({1.0, 0.2}, {1.0, -0.4, 0.1}, 1, 1.0);
    auto zero = lti::tf_new({0.0}, {1.0}, 0, 1.0);
    auto cl = lti::tf_feedback(g, zero);
    for (double w : {0.1, 0.9, 2.5})
        CHECK(std::abs(at(cl, w) - at(g, w)) < 1e-12);
}

TEST_CASE("algebra matches pointwise arithmetic on random systems") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        auto g1 = random_stable(rng);
        auto g2 = random_stable(rng);
        auto sum = lti::tf_add(g1, g2);
        auto prod = lti::tf_multiply(g1, g2);
        auto fb = lti::tf_feedback(g1, g2);
        for (int i = 0; i <= 16; ++i) {
            double w = M_PI * i / 16.0;
            auto v1 = at(g1, w), v2 = at(g2, w);
            CHECK(std::abs(at(sum, w) - (v1 + v2)) <
                  1e-9 * std::max(1.0, std::abs(v1 + v2)));
            CHECK(std::abs(at(prod, w) - v1 * v2) <
                  1e-9 * std::max(1.0, std::abs(v1 * v2)));
            // closed loop checked through the loop identity so near-singular
            // return differences cannot amplify the comparison
            CHECK(std::abs(at(fb, w) * (1.0 + v1 * v2) - v1) <
                  1e-9 * std::max(1.0, std::abs(v1)));
        }
    }
}

TEST_CASE("algebra rejects mismatched sample times") {
    auto a = lti::tf_new({1.0}, {1.0, -0.5}, 0, 1.0);
    auto b = lti::tf_new({1.0}, {1.0, -0.5}, 0, 0.5);
    CHECK_THROWS_AS(lti::tf_add(a, b), lti::Error);
    CHECK_THROWS_AS(lti::tf_multiply(a, b), lti::Error);
    CHECK_THROWS_AS(lti::tf_feedback(a, b), lti::Error);
}

TEST_CASE("poles come from the denominator") {
    auto unstable = lti::tf_new({0.0051271}, {1.0, -1.051}, 5, 1.0);
    auto p = lti::poles(unstable);
    REQUIRE(p.size() == 1);
    CHECK(std::abs(p[0] - 1.051) < 1e-12);
    CHECK_FALSE(lti::is_stable(unstable));

    auto origin = lti::tf_new({1.0}, {1.0, 0.0}, 0, 1.0);
    auto p0 = lti::poles(origin);
    REQUIRE(p0.size() == 1);
    CHECK(std::abs(p0[0]) < 1e-14);
    CHECK(lti::is_stable(origin));

    // (z-0.5)(z-0.9)(z+0.3)
    auto cubic = lti::tf_new({1.0}, {1.0, -1.1, 0.03, 0.135}, 0, 1.0);
    auto roots = lti::poles(cubic);
    REQUIRE(roots.size() == 3);
    std::vector<double> re;
    for (auto r : roots) {
        CHECK(std::abs(r.imag()) < 1e-12);
        re.push_back(r.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(std::abs(re[0] + 0.3) < 1e-12);
    CHECK(std::abs(re[1] - 0.5) < 1e-12);
    CHECK(std::abs(re[2] - 0.9) < 1e-12);
}

TEST_CASE("stability margin keeps near-unit poles out") {
    CHECK_FALSE(lti::is_stable(lti::tf_new({1.0}, {1.0, -(1.0 - 1e-8)}, 0, 1.0)));
    CHECK(lti::is_stable(lti::tf_new({1.0}, {1.0, -0.99}, 0, 1.0)));
}

TEST_CASE("infinity norm of reference systems") {
    auto diff = lti::tf_new({1.0, -1.0}, {1.0, 0.0}, 0, 1.0);
    auto r = lti::inf_norm(diff);
    CHECK(std::abs(r.norm - 2.0) < 1e-9);
    CHECK(std::abs(r.omega - M_PI) < 1e-6);

    for (int d : {0, 3, 7}) {
        auto pass = lti::tf_new({1.0}, {1.0}, d, 1.0);
        CHECK(std::abs(lti::inf_norm(pass).norm - 1.0) < 1e-9);
    }

    // first-order peaks sit at the band edges
    auto lp = lti::tf_new({1.0}, {1.0, -0.5}, 0, 1.0);
    auto rl = lti::inf_norm(lp);
    CHECK(std::abs(rl.norm - 2.0) < 1e-6);
    CHECK(rl.omega < 1e-6);
    auto hp = lti::tf_new({1.0}, {1.0, 0.5}, 0, 1.0);
    auto rh = lti::inf_norm(hp);
    CHECK(std::abs(rh.norm - 2.0) < 1e-6);
    CHECK(std::abs(rh.omega - M_PI) < 1e-6);

    CHECK_THROWS_AS(lti::inf_norm(lti::tf_new({1.0}, {1.0, -1.2}, 0, 1.0)),
                    lti::Error);
}

TEST_CASE("infinity norm dominates the sampled response") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_stable(rng);
        auto r = lti::inf_norm(g);
        for (int i = 0; i <= 64; ++i) {
            double w = M_PI * i / 64.0;
            CHECK(r.norm + 1e-9 >= std::abs(at(g, w)));
        }
        CHECK(std::abs(r.norm - std::abs(at(g, r.omega))) <=
              1e-6 * std::max(1.0, r.norm));
    }
}

TEST_CASE("predictor design solves the two filter conditions") {
    auto b = lti::design_example();
    auto core = lti::tf_new(b.plant.num, b.plant.den, 0, b.h);
    for (int tau_hat : {5, 8}) {
        auto d = lti::design_fsp(b.C, core, tau_hat, b.filter_pole);
        CHECK(d.tau_hat == tau_hat);
        auto f1 = lti::poly_eval(d.F.num, 1.0) / lti::poly_eval(d.F.den, 1.0);
        CHECK(std::abs(f1 - 1.0) < 1e-9);
        CHECK(lti::is_stable(d.H));
        for (auto pole : lti::poles(d.H)) CHECK(std::abs(pole) < 1.0);
    }
    // coefficients re-solve when the nominal delay moves
    auto d5 = lti::design_fsp(b.C, core, 5, b.filter_pole);
    auto d8 = lti::design_fsp(b.C, core, 8, b.filter_pole);
    CHECK(std::abs(d5.F.num[0] - d8.F.num[0]) > 1e-6);
}

TEST_CASE("stable plants take the dc-gain-only filter") {
    auto plant = lti::tf_new({1.0}, {1.0, -0.5}, 0, 1.0);
    auto c = lti::tf_new({0.2}, {1.0}, 0, 1.0);
    auto d = lti::design_fsp(c, plant, 4, 0.95);
    // F = (1-p) z / (z-p)
    REQUIRE(d.F.num.size() == 2);
    CHECK(d.F.num[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(d.F.num[1] == 0.0);
    CHECK(lti::is_stable(d.H));
}

TEST_CASE("bundled benchmark system") {
    auto b = lti::design_example();
    CHECK(b.plant.delay == 5);
    CHECK(b.filter_pole == 0.95);
    CHECK(b.h == 1.0);
    auto v1 = lti::poly_eval(b.V.num, 1.0) / lti::poly_eval(b.V.den, 1.0);
    CHECK(std::abs(v1.real() - 0.041317 * 0.4 / 0.0165) < 1e-12);
    CHECK(std::abs(v1.real() - 1.0016) < 1e-3);
}

TEST_CASE("delay-free design loop has its dominant poles near 0.95") {
    // the published controller coefficients are rounded to 5 digits, which
    // moves the intended double pole by a few 1e-3; assert to that accuracy
    auto b = lti::design_example();
    auto core = lti::tf_new(b.plant.num, b.plant.den, 0, b.h);
    auto one = lti::tf_new({1.0}, {1.0}, 0, 1.0);
    auto cl = lti::tf_feedback(lti::tf_multiply(b.C, core), one);
    auto p = lti::poles(cl);
    REQUIRE(p.size() == 2);
    for (auto z : p) {
        CHECK(std::abs(z.imag()) < 5e-3);
        CHECK(std::abs(z.real() - 0.95) < 5e-3);
    }
}

TEST_CASE("closed nominal loop is stable at the design delay") {
    auto b = lti::design_example();
    auto core = lti::tf_new(b.plant.num, b.plant.den, 0, b.h);
    auto d = lti::design_fsp(b.C, core, 5, b.filter_pole);
    auto open = lti::tf_multiply(d.R, lti::tf_new(core.num, core.den, 5, b.h));
    auto one = lti::tf_new({1.0}, {1.0}, 0, 1.0);
    CHECK(lti::is_stable(lti::tf_feedback(open, one)));
}

TEST_CASE("uncertainty-facing map M") {
    auto zero = lti::tf_new({0.0}, {1.0}, 0, 1.0);
    auto plant = lti::tf_new({1.0}, {1.0, -0.5}, 0, 1.0);
    auto m0 = lti::build_M(zero, plant, 3);
    CHECK(std::abs(lti::inf_norm(m0).norm) < 1e-15);

    auto b = lti::design_example();
    auto core = lti::tf_new(b.plant.num, b.plant.den, 0, b.h);
    auto d = lti::design_fsp(b.C, core, 5, b.filter_pole);
    auto m = lti::build_M(d.R, core, 5);
    REQUIRE(lti::is_stable(m));

    // |M| equals the delay-free-numerator form on the unit circle
    auto dhat = lti::tf_new({1.0}, {1.0}, 5, 1.0);
    auto rp = lti::tf_multiply(d.R, core);
    auto denom = lti::tf_add(lti::tf_new({1.0}, {1.0}, 0, 1.0),
                             lti::tf_multiply(rp, dhat));
    auto fwd = lti::tf_new({1.0, -1.0}, {1.0, 0.0}, 0, 1.0);
    for (int i = 1; i <= 40; ++i) {
        double w = M_PI * i / 40.0;
        double lhs = std::abs(at(m, w));
        double rhs =
            std::abs(at(rp, w) / at(denom, w) * at(fwd, w));
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, rhs));
    }
}

TEST_CASE("design guards demand a delay-free internal model") {
    auto b = lti::design_example();
    CHECK_THROWS_AS(lti::design_fsp(b.C, b.plant, 5, b.filter_pole),
                    lti::Error);
    CHECK_THROWS_AS(lti::build_M(b.C, b.plant, 5), lti::Error);
}
