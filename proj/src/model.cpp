#include "shearband/model.hpp"

#include <cmath>
#include <sstream>

#include "shearband/errors.hpp"

namespace shearband {

double ModelParams::sigma_bar0() const { return std::pow(u_bar0, n) / gamma_bar0; }
double ModelParams::lambda_max() const { return (2.0 - n) * (1.0 - n) / n; }
double ModelParams::r0() const { return 1.0 + 2.0 * lambda / (2.0 - n); }
double ModelParams::r1() const { return 1.0 - n * lambda / ((2.0 - n) * (1.0 - n)); }

namespace {

double lambda_from_data(double n, double gb0, double ub0) {
    return 0.5 * (2.0 - n) * (ub0 / gb0 - 1.0);
}

} // namespace

ModelParams validate(const RawParams& raw) {
    if (!raw.n)
        throw ConstraintViolation("n is required");
    ModelParams p;
    p.n = *raw.n;
    if (!(p.n > 0.0 && p.n < 1.0)) {
        std::ostringstream os;
        os << "n must satisfy 0 < n < 1, got n=" << p.n;
        throw ConstraintViolation(os.str());
    }
    p.gamma_bar0 = raw.gamma_bar0.value_or(1.0);
    if (!(p.gamma_bar0 > 0.0))
        throw ConstraintViolation("gamma_bar0 must be positive");
    p.gamma0 = raw.gamma0.value_or(1.0);
    if (!(p.gamma0 > 0.0))
        throw ConstraintViolation("gamma0 must be positive");

    if (raw.lambda && raw.u_bar0) {
        double implied = lambda_from_data(p.n, p.gamma_bar0, *raw.u_bar0);
        double rel = std::abs(implied - *raw.lambda) / std::max(1.0, std::abs(*raw.lambda));
        if (rel > 1e-12) {
            std::ostringstream os;
            os << "lambda=" << *raw.lambda << " and u_bar0=" << *raw.u_bar0
               << " are inconsistent (compatibility implies lambda=" << implied << ")";
            throw Overdetermined(os.str());
        }
        p.lambda = *raw.lambda;
        p.u_bar0 = *raw.u_bar0;
    } else if (raw.lambda) {
        p.lambda = *raw.lambda;
        p.u_bar0 = p.gamma_bar0 * (1.0 + 2.0 * p.lambda / (2.0 - p.n));
    } else if (raw.u_bar0) {
        p.u_bar0 = *raw.u_bar0;
        p.lambda = lambda_from_data(p.n, p.gamma_bar0, p.u_bar0);
    } else {
        throw ConstraintViolation("either lambda or u_bar0 must be supplied");
    }

    if (!(p.lambda > 0.0)) {
        std::ostringstream os;
        os << "lambda must be positive, got lambda=" << p.lambda
           << " (lambda=0 is the uniform shearing member)";
        throw ConstraintViolation(os.str());
    }
    if (!(p.lambda < p.lambda_max())) {
        std::ostringstream os;
        os << "lambda must satisfy lambda < (2-n)(1-n)/n = " << p.lambda_max()
           << ", got lambda=" << p.lambda;
        throw ConstraintViolation(os.str());
    }
    // Equivalent to 1 < u_bar0/gamma_bar0 < (2-n)/n, kept as a separate guard in case
    // of data entry through u_bar0 with pathological gamma_bar0.
    double ratio = p.u_bar0 / p.gamma_bar0;
    if (!(ratio > 1.0 && ratio < (2.0 - p.n) / p.n)) {
        std::ostringstream os;
        os << "data must satisfy 1 < u_bar0/gamma_bar0 < (2-n)/n, got ratio=" << ratio;
        throw ConstraintViolation(os.str());
    }
    return p;
}

double sigma_constitutive(double gamma, double gamma_t, double n) {
    if (!(gamma > 0.0))
        throw DomainError("sigma_constitutive requires gamma > 0");
    if (gamma_t < 0.0)
        throw DomainError("sigma_constitutive requires gamma_t >= 0");
    return std::pow(gamma_t, n) / gamma;
}

double tau_of_t(double t, double gamma0) {
    if (t < 0.0 || !(gamma0 > 0.0))
        throw DomainError("tau_of_t requires t >= 0 and gamma0 > 0");
    return std::log1p(t / gamma0);
}

double t_of_tau(double tau, double gamma0) {
    if (tau < 0.0 || !(gamma0 > 0.0))
        throw DomainError("t_of_tau requires tau >= 0 and gamma0 > 0");
    return gamma0 * std::expm1(tau);
}

} // namespace shearband
