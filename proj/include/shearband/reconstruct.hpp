#pragma once

#include <utility>
#include <vector>

#include "shearband/heteroclinic.hpp"
#include "shearband/model.hpp"
#include "shearband/vec3.hpp"

namespace shearband::reconstruct {

struct TildeVars {
    double v = 0.0, gamma = 0.0, sigma = 0.0, u = 0.0;
};

// Inverse of the (p, q, r) definition.  DomainError for p <= 0 or r < 0.
TildeVars tilde_from_pqr(const Vec3& x, double n);

// Self-similar profiles on xi = e^eta, evaluable anywhere in (0, xi_max]:
// inside the sampled range by cubic Hermite interpolation of (p, q, r) in eta
// (slopes are the exact vector field, so the constitutive identities survive
// interpolation), below it by the Appendix Taylor expansion about xi = 0.
struct Profile {
    ModelParams params;
    std::vector<double> eta; // translated orbit abscissae
    std::vector<Vec3> pqr;
    std::vector<Vec3> slopes;
    std::vector<double> xi, v_bar, gamma_bar, sigma_bar, u_bar; // profile samples
    double xi_min = 0.0, xi_max = 0.0;
    double gamma_bar_xx0 = 0.0, u_bar_xx0 = 0.0; // Taylor coefficients at xi = 0

    struct Values {
        double v_bar, gamma_bar, sigma_bar, u_bar;
    };
    // ExtrapolationError for xi > xi_max; negative xi is rejected.
    Values eval(double xi) const;
};

Profile profile_from_orbit(const het::Orbit& orbit, const ModelParams& params);

// Appendix closed forms (Gamma_bar_xixi(0), U_bar_xixi(0)); the second is the first
// times (r0 + 2 lambda).  DomainError when the expansion denominator vanishes.
std::pair<double, double> taylor_coefficients(const ModelParams& params);

// Limits at xi -> 0+ by Richardson extrapolation (even expansion in xi) through the
// three smallest profile samples: (gamma_bar, u_bar, sigma_bar).
std::array<double, 3> limits_at_zero(const Profile& profile);

struct FieldFrame {
    double t = 0.0;
    std::vector<double> x, v, gamma, sigma, u;
};

// Physical fields at time t on the given grid (x may include negatives: v extends
// odd, the others even).  ExtrapolationError when |x| (1+t/gamma0)^lambda leaves
// the profile range.
FieldFrame fields_at_time(const Profile& profile, double t, const std::vector<double>& xgrid);

} // namespace shearband::reconstruct
