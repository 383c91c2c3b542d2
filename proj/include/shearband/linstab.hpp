#pragma once

#include <array>
#include <vector>

namespace shearband::linstab {

// One cosine mode of the linearized relative-perturbation system.
struct ModeEntry {
    int j = 0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    std::array<double, 2> eigvec_plus{};  // (U, Gamma) components, unit norm
    std::array<double, 2> eigvec_minus{};
    bool constrained = false; // j = 0 carries the zero-mean constraint U_0 == 0
};

struct ModeSpectrum {
    double n = 0.0;
    std::vector<ModeEntry> entries;
};

enum class Classification { Hadamard, Turing, Stable };

// [[-n j^2 pi^2, j^2 pi^2], [1, -1]], row-major.
std::array<std::array<double, 2>, 2> mode_matrix(int j, double n);

// Roots of lambda^2 + lambda(1 + n pi^2 j^2) - (1-n) pi^2 j^2 = 0, (plus, minus).
// The larger-magnitude root is computed first; the other from the product of roots.
std::array<double, 2> eigenvalues(int j, double n);

double turing_bound(double n); // (1-n)/n, DomainError at n = 0

Classification classify(double n);

// Three-term expansion of lambda^+_j at n = 0: pi j - 1/2 + 1/(8 pi j).
double hadamard_asymptotics_plus(int j);
// And of lambda^-_j: -pi j - 1/2 - 1/(8 pi j).
double hadamard_asymptotics_minus(int j);

ModeSpectrum spectrum(double n, int jmax);

ModeEntry mode_entry(int j, double n);

} // namespace shearband::linstab
