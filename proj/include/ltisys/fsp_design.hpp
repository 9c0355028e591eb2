#pragma once

#include "ltisys/transfer_function.hpp"

namespace lti {

// Filtered Smith predictor around a plant with a long known dead time.
// F shapes the predictor response (unit dc gain); H is the stabilized
// internal model P_hat*(1 - z^(-tau_hat) F); R is the equivalent single
// controller C F / (1 + C H).
struct SmithPredictorDesign {
    TransferFunction C;
    TransferFunction V;
    TransferFunction F;
    TransferFunction H;
    TransferFunction R;
    int tau_hat = 0;
};

// First-order F(z) = (b1 z + b0)/(z - p) solved from unit dc gain plus
// cancellation of the plant's unstable pole in H; for a stable plant the
// dc-gain-only fallback F = (1-p) z/(z - p) is used. P_hat must be the
// delay-free plant: the dead time (plant plus network) is tau_hat.
SmithPredictorDesign design_fsp(const TransferFunction& C,
                                const TransferFunction& P_hat,
                                int tau_hat, double filter_pole);

// M(z) = -R P_hat D / (1 + R P_hat D) * (z-1)/z with D = z^(-tau_hat);
// |M| on the unit circle is unchanged if the delay is dropped from the
// numerator factor since |D| = 1 there.
TransferFunction build_M(const TransferFunction& R,
                         const TransferFunction& P_hat, int tau_hat);

struct BenchmarkSystem {
    TransferFunction plant;  // includes the 5-sample dead time
    TransferFunction C;
    TransferFunction V;
    double filter_pole = 0.95;
    double h = 1.0;
};

// the bundled benchmark loop: unstable first-order plant with dead time 5,
// PI-like controller and overshoot-reducing prefilter
BenchmarkSystem design_example();

}  // namespace lti
