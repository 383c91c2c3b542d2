#pragma once

#include <optional>

namespace shearband {

// Model parameters for the rate-dependent softening law sigma = gamma^{-1} gamma_t^n.
//
// Only three of (n, lambda, gamma_bar0, u_bar0) are independent: the profile data
// must satisfy the compatibility relation
//     u_bar0 = gamma_bar0 * (1 + 2*lambda/(2-n)),
// equivalently lambda = ((2-n)/2) * (u_bar0/gamma_bar0 - 1).
// validate() always derives the missing member so the relation cannot be violated.
struct ModelParams {
    double n = 0.0;          // rate sensitivity, 0 < n < 1
    double lambda = 0.0;     // focusing rate, 0 < lambda < (2-n)(1-n)/n
    double gamma_bar0 = 1.0; // profile strain at the origin
    double u_bar0 = 0.0;     // profile strain rate at the origin (derived or given)
    double gamma0 = 1.0;     // base strain at t = 0

    double sigma_bar0() const; // = u_bar0^n / gamma_bar0
    double lambda_max() const; // = (2-n)(1-n)/n
    double r0() const;         // = 1 + 2*lambda/(2-n)
    double r1() const;         // = 1 - n*lambda/((2-n)(1-n))
};

// Raw user input; unset optionals are derived (or defaulted for gamma_bar0/gamma0).
struct RawParams {
    std::optional<double> n;
    std::optional<double> lambda;
    std::optional<double> gamma_bar0;
    std::optional<double> u_bar0;
    std::optional<double> gamma0;
};

// Throws ConstraintViolation / Overdetermined on bad input.
ModelParams validate(const RawParams& raw);

// sigma = gamma^{-1} gamma_t^n.  DomainError for gamma <= 0 or gamma_t < 0.
double sigma_constitutive(double gamma, double gamma_t, double n);

// Uniform shearing solution: v = x, gamma = t + gamma0, sigma = 1/(t + gamma0).
struct UniformShear {
    double gamma0 = 1.0;
    double gamma_s(double t) const { return t + gamma0; }
    double sigma_s(double t) const { return 1.0 / (t + gamma0); }
    static double v_s(double x) { return x; }
};

// Rescaled time tau = log(1 + t/gamma0) and its inverse.
double tau_of_t(double t, double gamma0);
double t_of_tau(double tau, double gamma0);

} // namespace shearband
