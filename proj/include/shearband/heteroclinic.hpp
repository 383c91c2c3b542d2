#pragma once

#include <limits>
#include <vector>

#include "shearband/model.hpp"
#include "shearband/vec3.hpp"

namespace shearband::het {

// Sampled heteroclinic orbit M0 -> M1 with asymptotic diagnostics.
struct Orbit {
    std::vector<double> eta; // strictly increasing; shifted in place by apply_translation
    std::vector<Vec3> x;     // (p, q, r) samples
    double n = 0.0, lambda = 0.0;
    double T = 0.0;    // eta extent of the boundary-value solve
    double kappa2 = std::numeric_limits<double>::quiet_NaN(); // e^{2 eta} X02 coefficient
    double eta0 = 0.0; // accumulated translation
    double exponent_m0 = std::numeric_limits<double>::quiet_NaN(); // slope of log||phi-M0||
    double exponent_m1 = std::numeric_limits<double>::quiet_NaN(); // decay exponent of p at M1
    double endpoint_dev_m0 = 0.0, endpoint_dev_m1 = 0.0;
    double r_start = 0.0, q_end = 0.0, r_end = 0.0;
};

struct HetOptions {
    double delta_seed = 1e-6; // boundary offset at both equilibria
    double ball_fit = 1e-3;   // outer radius of the asymptotic fit windows
    double mu03_direct = 8.0; // continuation in (n, lambda) above this fast rate
    double anchor_n = 0.3, anchor_lambda = 2.0; // continuation anchor (moderate mu03)
    double newton_tol = 1e-10;
    int newton_maxit = 40;
    int theta_bisect_budget = 60;
    double sample_spacing = 0.02; // eta spacing of the emitted samples
};

// Backward shots from M1 + delta_seed (cos(theta) X11 + sin(theta) X12) over a theta
// grid on the sin(theta) > 0 side; candidates that reach the M0 ball are returned.
// Throws NoConnection if none do.
std::vector<Orbit> shoot_family(double n, double lambda, int ntheta = 40,
                                double delta_seed = 1e-6);

// The orbit emanating from M0 along X02 (kappa1 = 0), refined by a multiple-shooting
// boundary-value Newton solve; see the module notes for why plain theta bisection
// cannot isolate it.  Throws NoConnection / SelectionFailed.
Orbit select_x02_orbit(double n, double lambda, const HetOptions& opts = {});

// Least-squares coefficient of the e^{2 eta} X02 term on the window
// ||phi - M0|| in [1e-6, ball_fit]; stores and returns it.
// Throws FitIllConditioned with fewer than 10 window samples.
double fit_kappa2(Orbit& orbit, double ball_fit = 1e-3);

// Reparametrize eta -> eta + eta0 with eta0 = (1/2) log(kappa2 / kappa),
// kappa = gamma_bar0 * u_bar0^{1-n}; refits kappa2 afterwards (idempotent).
void apply_translation(Orbit& orbit, const ModelParams& params);

// Convenience: select + fit + translate for validated parameters.
Orbit build_orbit(const ModelParams& params, const HetOptions& opts = {});

} // namespace shearband::het
