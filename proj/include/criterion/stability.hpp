#pragma once

#include "ltisys/fsp_design.hpp"
#include "uncertainty/delay_gain.hpp"

#include <string>
#include <vector>

namespace crit {

// Loop controller handed to the criterion: either the FSP recipe (primary
// controller C plus predictor filter pole, re-designed for every nominal
// delay) or a fixed single-block R used as-is.
struct ControllerSpec {
    bool fsp = true;
    lti::TransferFunction C;
    double filter_pole = 0.95;
    lti::TransferFunction R;
};

struct CriterionOptions {
    bool overestimate = false;  // P3 only: span-independent gain at tau_A = span
    bool causal = false;        // restrict the recentering shift to tau_A = 0
    int t_max = -1;             // gain sweep depth, -1 = span-scaled default
};

// Small-gain certificate for one delay range. The loop is certified for
// every admissible delay pattern iff product < 1; when the re-tuned nominal
// loop itself is unstable no verdict is possible and the norm fields are
// infinite.
struct StabilityReport {
    unc::Protocol protocol = unc::Protocol::P3;
    int tau_lo = 0;
    int tau_hi = 0;
    int tau_hat_N = 0;   // delay span tau_hi - tau_lo
    int tau_A_star = 0;
    int tau_hat = 0;     // nominal dead time the loop is tuned to
    double alpha_star = 0.0;
    std::string family;
    double m_inf_norm = 0.0;
    double peak_omega = 0.0;  // rad/s argmax of |M|
    double product = 0.0;     // m_inf_norm * alpha_star
    bool verdict = false;     // product < 1
    double margin = 0.0;      // 1 - product
    bool nominal_ok = true;
};

// Re-tunes the loop for tau_hat = plant dead time + tau_lo + tau_A*, builds
// the uncertainty-facing map M and combines its peak gain with the protocol
// gain alpha*.
StabilityReport check_stability(const lti::TransferFunction& plant,
                                const ControllerSpec& controller, int tau_lo,
                                int tau_hi, unc::Protocol protocol,
                                const CriterionOptions& options = {});

// Verdicts for every span 1..cap. The certified maximum is the largest span
// with all smaller spans stable too; the full vector is kept because the
// product is not monotone in the span.
struct DelayScan {
    int max_stable = 0;
    bool gap = false;  // a stable verdict exists above the first failure
    std::vector<StabilityReport> reports;  // index i holds span i+1
};

DelayScan max_admissible_delay(const lti::TransferFunction& plant,
                               const ControllerSpec& controller, int tau_lo,
                               unc::Protocol protocol, int cap,
                               const CriterionOptions& options = {});

// Scaled magnitude curve |M(e^{j w h})| * alpha_star per requested span; the
// refined peak is inserted into the grid so max(magnitude) equals the
// report's product. Curves are empty when the nominal loop is unstable.
struct BodeCurve {
    int tau_hat_N = 0;
    StabilityReport report;
    std::vector<double> omega;
    std::vector<double> magnitude;
};

std::vector<BodeCurve> bode_margin_data(const lti::TransferFunction& plant,
                                        const ControllerSpec& controller,
                                        int tau_lo, unc::Protocol protocol,
                                        const std::vector<int>& spans,
                                        int grid_points = 400,
                                        const CriterionOptions& options = {});

}  // namespace crit
