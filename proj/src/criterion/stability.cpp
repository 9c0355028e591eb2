#include "criterion/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crit {

namespace {

struct Certificate {
    StabilityReport report;
    lti::TransferFunction M;
};

Certificate certify(const lti::TransferFunction& plant,
                    const ControllerSpec& controller, int tau_lo, int tau_hi,
                    unc::Protocol protocol, const CriterionOptions& opt) {
    if (tau_lo < 0) throw lti::Error("tau_lo must be nonnegative");
    if (tau_hi < tau_lo) throw lti::Error("tau_hi must be at least tau_lo");
    if (opt.overestimate && protocol != unc::Protocol::P3)
        throw lti::Error("over-estimation applies to protocol P3 only");
    if (opt.overestimate && opt.causal)
        throw lti::Error("over-estimation fixes tau_A = span, not 0");

    Certificate c;
    StabilityReport& rep = c.report;
    rep.protocol = protocol;
    rep.tau_lo = tau_lo;
    rep.tau_hi = tau_hi;
    rep.tau_hat_N = tau_hi - tau_lo;

    const int tn = rep.tau_hat_N;
    if (tn == 0) {
        // constant delay: the re-tuned predictor matches the channel exactly
        rep.tau_A_star = 0;
        rep.alpha_star = 0.0;
        rep.family = "none";
    } else if (opt.causal) {
        rep.tau_A_star = 0;
        auto fa = unc::family_alphas(tn, 0, opt.t_max);
        if (protocol == unc::Protocol::P1) {
            rep.alpha_star = fa.p1;
            rep.family = "p1";
        } else {
            rep.alpha_star = fa.max3();
            rep.family = fa.argmax3();
        }
    } else {
        unc::GainResult g = opt.overestimate ? unc::overestimate_p3(tn)
                            : protocol == unc::Protocol::P1
                                ? unc::optimal_p1(tn)
                                : unc::optimal_p3(tn, opt.t_max);
        rep.tau_A_star = g.tau_A_star;
        rep.alpha_star = g.alpha_star;
        rep.family = g.family;
    }

    rep.tau_hat = plant.delay + tau_lo + rep.tau_A_star;

    lti::TransferFunction core =
        lti::tf_new(plant.num, plant.den, 0, plant.h);
    lti::TransferFunction loop_r =
        controller.fsp
            ? lti::design_fsp(controller.C, core, rep.tau_hat,
                              controller.filter_pole)
                  .R
            : controller.R;
    c.M = lti::build_M(loop_r, core, rep.tau_hat);

    if (!lti::is_stable(c.M)) {
        rep.nominal_ok = false;
        rep.m_inf_norm = std::numeric_limits<double>::infinity();
        rep.product = std::numeric_limits<double>::infinity();
        rep.margin = -std::numeric_limits<double>::infinity();
        rep.verdict = false;
        return c;
    }

    auto nrm = lti::inf_norm(c.M);
    rep.m_inf_norm = nrm.norm;
    rep.peak_omega = nrm.omega;
    rep.product = rep.m_inf_norm * rep.alpha_star;
    rep.verdict = rep.product < 1.0;
    rep.margin = 1.0 - rep.product;
    return c;
}

}  // namespace

StabilityReport check_stability(const lti::TransferFunction& plant,
                                const ControllerSpec& controller, int tau_lo,
                                int tau_hi, unc::Protocol protocol,
                                const CriterionOptions& options) {
    return certify(plant, controller, tau_lo, tau_hi, protocol, options).report;
}

DelayScan max_admissible_delay(const lti::TransferFunction& plant,
                               const ControllerSpec& controller, int tau_lo,
                               unc::Protocol protocol, int cap,
                               const CriterionOptions& options) {
    if (cap < 1) throw lti::Error("scan cap must be at least 1");
    DelayScan scan;
    scan.reports.reserve(static_cast<size_t>(cap));
    for (int span = 1; span <= cap; ++span)
        scan.reports.push_back(check_stability(plant, controller, tau_lo,
                                               tau_lo + span, protocol,
                                               options));
    bool failed = false;
    for (const auto& rep : scan.reports) {
        bool ok = rep.nominal_ok && rep.verdict;
        if (!failed && ok)
            scan.max_stable = rep.tau_hat_N;
        else if (!ok)
            failed = true;
        else
            scan.gap = true;
    }
    return scan;
}

std::vector<BodeCurve> bode_margin_data(const lti::TransferFunction& plant,
                                        const ControllerSpec& controller,
                                        int tau_lo, unc::Protocol protocol,
                                        const std::vector<int>& spans,
                                        int grid_points,
                                        const CriterionOptions& options) {
    if (grid_points < 2) throw lti::Error("curve needs at least 2 points");
    std::vector<BodeCurve> curves;
    curves.reserve(spans.size());
    for (int span : spans) {
        Certificate c = certify(plant, controller, tau_lo, tau_lo + span,
                                protocol, options);
        BodeCurve curve;
        curve.tau_hat_N = span;
        curve.report = c.report;
        if (c.report.nominal_ok) {
            const double w_hi = M_PI / c.M.h;
            const double w_lo = w_hi * 1e-4;
            const double ratio = std::log(w_hi / w_lo);
            curve.omega.reserve(static_cast<size_t>(grid_points) + 1);
            for (int i = 0; i < grid_points; ++i)
                curve.omega.push_back(
                    w_lo * std::exp(ratio * i / (grid_points - 1)));
            auto it = std::lower_bound(curve.omega.begin(), curve.omega.end(),
                                       c.report.peak_omega);
            if (it == curve.omega.end() || *it != c.report.peak_omega)
                curve.omega.insert(it, c.report.peak_omega);
            curve.magnitude.reserve(curve.omega.size());
            for (double w : curve.omega)
                curve.magnitude.push_back(std::abs(c.M.at_omega(w)) *
                                          c.report.alpha_star);
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

}  // namespace crit
