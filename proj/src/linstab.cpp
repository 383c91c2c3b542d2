#include "shearband/linstab.hpp"

#include <cmath>
#include <numbers>

#include "shearband/errors.hpp"

namespace shearband::linstab {

namespace {

constexpr double pi = std::numbers::pi;

// Unit eigenvector for eigenvalue lam, from the second row (U - Gamma = lam*Gamma):
// direction (1 + lam, 1), sign fixed so the first nonzero component is positive.
std::array<double, 2> eigvec(double lam) {
    double u = 1.0 + lam;
    double g = 1.0;
    double s = std::hypot(u, g);
    u /= s;
    g /= s;
    double lead = (u != 0.0) ? u : g;
    if (lead < 0.0) {
        u = -u;
        g = -g;
    }
    return {u, g};
}

} // namespace

std::array<std::array<double, 2>, 2> mode_matrix(int j, double n) {
    if (j < 0)
        throw DomainError("mode index must be >= 0");
    double k2 = pi * pi * static_cast<double>(j) * static_cast<double>(j);
    return {{{-n * k2, k2}, {1.0, -1.0}}};
}

std::array<double, 2> eigenvalues(int j, double n) {
    if (j < 1)
        throw DomainError("eigenvalues defined for j >= 1; the j = 0 mode is {0, -1}");
    double k2 = pi * pi * static_cast<double>(j) * static_cast<double>(j);
    double b = 1.0 + n * k2;            // lambda^2 + b lambda - c = 0
    double c = (1.0 - n) * k2;
    double disc = std::sqrt(b * b + 4.0 * c);
    if (c >= 0.0) {
        // 0 <= n <= 1: the negative root has the larger magnitude; no cancellation there.
        double lm = 0.5 * (-b - disc);
        double lp = (c == 0.0) ? 0.0 : -c / lm; // product of roots = -c
        return {lp, lm};
    }
    // n > 1: both roots negative, product positive.
    double lm = 0.5 * (-b - disc);
    double lp = -c / lm;
    return {lp, lm};
}

double turing_bound(double n) {
    if (!(n > 0.0 && n < 1.0))
        throw DomainError("turing_bound requires 0 < n < 1 (n = 0 is the Hadamard case)");
    return (1.0 - n) / n;
}

Classification classify(double n) {
    if (n < 0.0)
        throw DomainError("classify requires n >= 0");
    if (n == 0.0)
        return Classification::Hadamard;
    if (n < 1.0)
        return Classification::Turing;
    return Classification::Stable;
}

double hadamard_asymptotics_plus(int j) {
    if (j < 1)
        throw DomainError("expansion defined for j >= 1");
    return pi * j - 0.5 + 1.0 / (8.0 * pi * j);
}

double hadamard_asymptotics_minus(int j) {
    if (j < 1)
        throw DomainError("expansion defined for j >= 1");
    return -pi * j - 0.5 - 1.0 / (8.0 * pi * j);
}

ModeEntry mode_entry(int j, double n) {
    ModeEntry e;
    e.j = j;
    if (j == 0) {
        e.lambda_plus = 0.0;
        e.lambda_minus = -1.0;
        e.constrained = true; // zero-mean constraint: this mode is pinned to U_0 = 0
    } else {
        auto [lp, lm] = eigenvalues(j, n);
        e.lambda_plus = lp;
        e.lambda_minus = lm;
    }
    e.eigvec_plus = eigvec(e.lambda_plus);
    e.eigvec_minus = eigvec(e.lambda_minus);
    return e;
}

ModeSpectrum spectrum(double n, int jmax) {
    if (jmax < 0)
        throw DomainError("jmax must be >= 0");
    ModeSpectrum s;
    s.n = n;
    s.entries.reserve(static_cast<size_t>(jmax) + 1);
    for (int j = 0; j <= jmax; ++j)
        s.entries.push_back(mode_entry(j, n));
    return s;
}

} // namespace shearband::linstab
