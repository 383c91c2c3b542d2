#pragma once

#include <functional>
#include <vector>

#include "shearband/model.hpp"
#include "shearband/reconstruct.hpp"

namespace shearband::pdecheck {

// Nodal (U, Gamma) on N+1 uniform nodes over [0, 1].
struct PdeState {
    int N = 0;
    double h = 0.0;
    double tau = 0.0;
    double n = 0.0;
    std::vector<double> U, Gamma;
};

// Uniform state U = Gamma = 1.
PdeState make_uniform(int N, double n);

// U = 1 + amp cos(j pi x), Gamma = 1, with the zero mode projected out.
PdeState make_mode_perturbation(int N, double n, int j, double amp);

// Explicit diffusion limit 0.4 h^2 / (n max(U^{n-1}/Gamma)).
double stability_bound(const PdeState& s);

// One RK4 step of U_tau = Sigma_xx (Sigma = U^n/Gamma, ghost nodes enforce
// Sigma_x = 0), Gamma_tau = U - Gamma.  Throws StabilityViolation if dtau exceeds
// the bound, PositivityLoss if U or Gamma leaves the positive cone.
void step_nonlinear(PdeState& s, double dtau);

// Trapezoid mean of U (conserved by the flux-form update).
double mean_U(const PdeState& s);

// Growth rate of mode j of the linearized system, fitted over the tail of
// [0, tau_end].  ResolutionError if N < 8j.
double run_linearized(int j, double n, double tau_end, int N);

struct ResidualNorms {
    double t = 0.0;
    double mom_linf = 0.0, mom_l2 = 0.0; // u_t - (u^n/gamma)_xx, relative
    double kin_linf = 0.0, kin_l2 = 0.0; // gamma_t - u, relative
};

struct Fields {
    std::vector<double> u, gamma, sigma;
};
using FrameFn = std::function<Fields(double t, const std::vector<double>& x)>;

// PDE residuals of arbitrary fields by central differences: dt-stencil (1 +- dt_frac)t
// in time, second differences in x (even symmetry at x = 0).
ResidualNorms residual_from_frames(const FrameFn& frames, double t, double xmax, int nx,
                                   double dt_frac);

// Same, applied to the reconstructed self-similar fields.
std::vector<ResidualNorms> selfsimilar_residual(const reconstruct::Profile& profile,
                                                const std::vector<double>& t_list, double xmax,
                                                int nx, double dt_frac = 1e-4);

} // namespace shearband::pdecheck
