#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lti {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rational function of z with an extra pure-delay factor z^(-delay).
// Coefficient lists are in descending powers of z; the denominator is monic
// after construction. Immutable by convention: treat instances as values.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;
    int delay = 0;
    double h = 1.0;

    int num_degree() const { return static_cast<int>(num.size()) - 1; }
    int den_degree() const { return static_cast<int>(den.size()) - 1; }
    // relative degree including the delay factor; >= 0 for proper systems
    int relative_degree() const { return den_degree() - num_degree() + delay; }
    bool is_zero() const { return num.size() == 1 && num[0] == 0.0; }

    std::complex<double> eval(const std::complex<double>& z) const;
    // response at angular frequency omega (rad/s), z = exp(i*omega*h)
    std::complex<double> at_omega(double omega) const;
};

TransferFunction tf_new(std::vector<double> num, std::vector<double> den,
                        int delay = 0, double h = 1.0);

TransferFunction tf_add(const TransferFunction& g1, const TransferFunction& g2);
TransferFunction tf_multiply(const TransferFunction& g1, const TransferFunction& g2);
// feedback(g, h_fb) = g / (1 + g*h_fb)
TransferFunction tf_feedback(const TransferFunction& g, const TransferFunction& h_fb);
TransferFunction tf_scale(const TransferFunction& g, double factor);

// roots of the denominator (companion-matrix eigenvalues); the z^(-delay)
// factor contributes only origin poles and is not listed
std::vector<std::complex<double>> poles(const TransferFunction& g);
bool is_stable(const TransferFunction& g);

struct InfNormResult {
    double norm = 0.0;
    double omega = 0.0;
};

// max over omega in [0, pi/h] of |G(e^(j*omega*h))|, dense grid plus
// golden-section refinement; rejects unstable systems
InfNormResult inf_norm(const TransferFunction& g);

// polynomial helpers shared across modules (descending-power lists)
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> poly_add(const std::vector<double>& p, const std::vector<double>& q);
std::complex<double> poly_eval(const std::vector<double>& p, const std::complex<double>& z);
// divide p by (z - root); returns quotient, sets remainder
std::vector<double> poly_deflate(const std::vector<double>& p, double root, double* remainder);
std::vector<std::complex<double>> poly_roots(const std::vector<double>& p);

}  // namespace lti
