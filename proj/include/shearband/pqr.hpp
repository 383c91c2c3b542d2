#pragma once

#include <array>
#include <string>

#include "shearband/vec3.hpp"

namespace shearband::pqr {

// State of the autonomous system in (p, q, r) = (gamma~/sigma~, n v~/sigma~, u~/gamma~).
using PhasePoint = Vec3;

struct EigenPair {
    double mu = 0.0;
    Vec3 X;       // unit norm, sign-fixed (first nonzero of (p, q, r) positive)
    Vec3 X_paper; // unnormalized closed form as printed, for residual checks
};

struct Equilibrium {
    std::string label; // M0..M3
    PhasePoint point;
    std::array<EigenPair, 3> eigenpairs;
};

// Right sides of the autonomous system; r' is stored pre-divided by n.
Vec3 vector_field(const PhasePoint& x, double n, double lambda);

// Analytic Jacobian of vector_field.
Mat3 jacobian(const PhasePoint& x, double n, double lambda);

// The four equilibria with the closed-form eigenpairs attached.
// Throws DegenerateLambda when lambda = 1 + n/(2(1-n)) within 1e-10, and
// ConstraintViolation outside the admissible lambda range.
std::array<Equilibrium, 4> equilibria(double n, double lambda);

// Numeric eigenpairs via characteristic-polynomial roots + inverse iteration.
// Validation oracle only; throws ComplexSpectrum if imaginary parts exceed 1e-8.
std::array<EigenPair, 3> eigen_oracle(const Mat3& J);

} // namespace shearband::pqr
