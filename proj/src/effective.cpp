#include "shearband/effective.hpp"

#include <cmath>

#include "shearband/errors.hpp"

namespace shearband::effective {

double linear_symbol(double xi, double n, double eps) {
    double x2 = xi * xi;
    return ((1.0 - n) + eps * (2.0 - n)) * x2 - eps * (1.0 - n) * x2 * x2;
}

double cutoff_xi(double n, double eps) {
    if (!(n > 0.0 && n < 1.0) || !(eps > 0.0))
        throw DomainError("cutoff_xi requires 0 < n < 1 and eps > 0");
    return std::sqrt(((1.0 - n) + eps * (2.0 - n)) / (eps * (1.0 - n)));
}

double cutoff_bound(double n, double eps) {
    if (!(n > 0.0 && n < 1.0) || !(eps > 0.0))
        throw DomainError("cutoff_bound requires 0 < n < 1 and eps > 0");
    return std::sqrt(1.0 + 1.0 / eps + 1.0 / (1.0 - n));
}

namespace {

// Second difference with the requested boundary closure.  Neumann uses mirror ghosts
// (even extension), periodic wraps.
std::vector<double> d2(const std::vector<double>& f, double dy, Boundary bc) {
    const size_t m = f.size();
    std::vector<double> out(m);
    auto at = [&](long i) -> double {
        if (i >= 0 && i < static_cast<long>(m))
            return f[static_cast<size_t>(i)];
        if (bc == Boundary::Periodic) {
            long mm = static_cast<long>(m);
            return f[static_cast<size_t>(((i % mm) + mm) % mm)];
        }
        return (i < 0) ? f[static_cast<size_t>(-i)] : f[2 * (m - 1) - static_cast<size_t>(i)];
    };
    double inv = 1.0 / (dy * dy);
    for (long i = 0; i < static_cast<long>(m); ++i)
        out[static_cast<size_t>(i)] = (at(i - 1) - 2.0 * at(i) + at(i + 1)) * inv;
    return out;
}

} // namespace

std::vector<double> effective_rhs(const std::vector<double>& U, double n, double eps, double dy,
                                  Boundary bc) {
    if (U.size() < 3)
        throw DomainError("effective_rhs needs at least 3 samples");
    if (!(dy > 0.0))
        throw DomainError("effective_rhs requires dy > 0");
    std::vector<double> w(U.size()), inner(U.size());
    for (size_t i = 0; i < U.size(); ++i) {
        if (!(U[i] > 0.0))
            throw DomainError("effective_rhs requires U > 0 pointwise");
        w[i] = std::pow(U[i], -(1.0 - n));
    }
    std::vector<double> wyy = d2(w, dy, bc);
    for (size_t i = 0; i < U.size(); ++i)
        inner[i] = std::pow(U[i], -(2.0 - n)) * wyy[i];
    std::vector<double> corr = d2(inner, dy, bc);
    for (size_t i = 0; i < U.size(); ++i)
        wyy[i] += eps * corr[i];
    return wyy;
}

} // namespace shearband::effective
