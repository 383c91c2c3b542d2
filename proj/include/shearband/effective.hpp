#pragma once

#include <vector>

namespace shearband::effective {

enum class Boundary { Periodic, Neumann };

// Growth rate of mode e^{i xi y} for the linearized effective equation:
// ((1-n) + eps(2-n)) xi^2 - eps(1-n) xi^4.
double linear_symbol(double xi, double n, double eps);

// Exact positive root of the symbol in xi (band edge of the instability).
double cutoff_xi(double n, double eps);

// Sufficient stability threshold sqrt(1 + 1/eps + 1/(1-n)); cutoff_xi never exceeds it.
double cutoff_bound(double n, double eps);

// Fourth-order effective operator
//   (U^{-(1-n)})_yy + eps (U^{-(2-n)} (U^{-(1-n)})_yy)_yy
// by nested second-order central differences.  DomainError if any U <= 0.
std::vector<double> effective_rhs(const std::vector<double>& U, double n, double eps, double dy,
                                  Boundary bc = Boundary::Periodic);

} // namespace shearband::effective
