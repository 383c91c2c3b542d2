#include "shearband/pqr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "shearband/errors.hpp"

namespace shearband::pqr {

namespace {

Vec3 sign_fixed_unit(const Vec3& x) {
    Vec3 u = normalized(x);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(u[i]) > 1e-14)
            return (u[i] > 0.0) ? u : -u;
    }
    return u;
}

// Roots of x^3 + a x^2 + b x + c, all real expected.
std::array<double, 3> cubic_roots(double a, double b, double c) {
    // Depressed form t^3 + p t + q with x = t - a/3.
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double scale = std::max({1.0, std::abs(a), std::sqrt(std::abs(b)), std::cbrt(std::abs(c))});
    std::array<double, 3> t{};
    if (std::abs(p) < 1e-14 * scale * scale && std::abs(q) < 1e-14 * scale * scale * scale) {
        t = {0.0, 0.0, 0.0};
    } else {
        double disc = -4.0 * p * p * p - 27.0 * q * q;
        if (disc < -1e-10 * std::pow(scale, 6)) {
            // One real root, complex pair: report the pair's imaginary part.
            double w = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
            double A = std::cbrt(-q / 2.0 + w);
            double B = std::cbrt(-q / 2.0 - w);
            double imag = std::sqrt(3.0) / 2.0 * std::abs(A - B);
            if (imag > 1e-8) {
                std::ostringstream os;
                os << "complex eigenvalue pair with |Im| = " << imag;
                throw ComplexSpectrum(os.str());
            }
            t = {A + B, -0.5 * (A + B), -0.5 * (A + B)};
        } else {
            double m = 2.0 * std::sqrt(std::max(0.0, -p / 3.0));
            double arg = (m == 0.0) ? 0.0 : std::clamp(3.0 * q / (p * m), -1.0, 1.0);
            double th = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                t[static_cast<size_t>(k)] =
                    m * std::cos(th - 2.0 * std::numbers::pi * k / 3.0);
        }
    }
    std::array<double, 3> x{};
    for (int k = 0; k < 3; ++k) {
        double xr = t[static_cast<size_t>(k)] - a / 3.0;
        // Newton polish on the monic cubic.
        for (int it = 0; it < 3; ++it) {
            double f = ((xr + a) * xr + b) * xr + c;
            double fp = (3.0 * xr + 2.0 * a) * xr + b;
            if (std::abs(fp) < 1e-300)
                break;
            xr -= f / fp;
        }
        x[static_cast<size_t>(k)] = xr;
    }
    std::sort(x.begin(), x.end());
    return x;
}

// 3x3 solve with partial pivoting; near-singular pivots are regularized, which is
// exactly what inverse iteration wants.
Vec3 solve3(Mat3 A, Vec3 rhs, double reg) {
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(A[piv[row]][col]) > std::abs(A[piv[best]][col]))
                best = row;
        std::swap(piv[col], piv[best]);
        double d = A[piv[col]][col];
        if (std::abs(d) < reg) {
            d = (d >= 0.0) ? reg : -reg;
            A[piv[col]][col] = d;
        }
        for (int row = col + 1; row < 3; ++row) {
            double f = A[piv[row]][col] / d;
            A[piv[row]][col] = 0.0;
            for (int k = col + 1; k < 3; ++k)
                A[piv[row]][k] -= f * A[piv[col]][k];
            rhs[piv[row]] -= f * rhs[piv[col]];
        }
    }
    Vec3 x;
    for (int col = 2; col >= 0; --col) {
        double s = rhs[piv[col]];
        for (int k = col + 1; k < 3; ++k)
            s -= A[piv[col]][k] * x[k];
        x[col] = s / A[piv[col]][col];
    }
    return x;
}

} // namespace

Vec3 vector_field(const PhasePoint& x, double n, double lambda) {
    const double p = x[0], q = x[1], r = x[2];
    const double c1 = 2.0 * (1.0 - n) / (2.0 - n);
    const double c2 = lambda / (2.0 - n);
    const double lpr = lambda * p * r;
    return {p * ((r - 1.0) / lambda + c1 - lpr - c2 * q),
            q * (1.0 - lpr - c2 * q) + n * p * r,
            r * ((1.0 - n) / lambda * (r - 1.0) - c1 + lpr + c2 * q) / n};
}

Mat3 jacobian(const PhasePoint& x, double n, double lambda) {
    const double p = x[0], q = x[1], r = x[2];
    const double c1 = 2.0 * (1.0 - n) / (2.0 - n);
    const double c2 = lambda / (2.0 - n);
    const double A = (r - 1.0) / lambda + c1 - lambda * p * r - c2 * q;
    const double B = (1.0 - n) / lambda * (r - 1.0) - c1 + lambda * p * r + c2 * q;
    Mat3 J;
    J[0][0] = A - lambda * p * r;
    J[0][1] = -c2 * p;
    J[0][2] = p * (1.0 / lambda - lambda * p);
    J[1][0] = -lambda * q * r + n * r;
    J[1][1] = 1.0 - lambda * p * r - 2.0 * c2 * q;
    J[1][2] = -lambda * p * q + n * p;
    J[2][0] = r * lambda * r / n;
    J[2][1] = r * c2 / n;
    J[2][2] = (B + r * ((1.0 - n) / lambda + lambda * p)) / n;
    return J;
}

std::array<Equilibrium, 4> equilibria(double n, double lambda) {
    if (!(n > 0.0 && n < 1.0))
        throw ConstraintViolation("equilibria require 0 < n < 1");
    const double lmax = (2.0 - n) * (1.0 - n) / n;
    if (!(lambda > 0.0 && lambda < lmax))
        throw ConstraintViolation("lambda outside the admissible range (0, (2-n)(1-n)/n)");
    const double ldeg = 1.0 + n / (2.0 * (1.0 - n));
    if (std::abs(lambda - ldeg) < 1e-10) {
        std::ostringstream os;
        os << "lambda = 1 + n/(2(1-n)) = " << ldeg
           << " is degenerate (equilibria fill the p-axis)";
        throw DegenerateLambda(os.str());
    }

    const double r0 = 1.0 + 2.0 * lambda / (2.0 - n);
    const double r1 = 1.0 - n * lambda / ((2.0 - n) * (1.0 - n));
    const double q1 = (2.0 - n) / lambda;
    const double nn = n / (1.0 - n);
    const double L1 = lambda / (1.0 - n);
    const double L2 = lambda / (2.0 - n);

    auto mk = [](double mu, const Vec3& Xp) {
        EigenPair e;
        e.mu = mu;
        e.X_paper = Xp;
        e.X = sign_fixed_unit(Xp);
        return e;
    };

    std::array<Equilibrium, 4> out;

    out[0].label = "M0";
    out[0].point = {0.0, 0.0, r0};
    out[0].eigenpairs = {
        mk(1.0, {0.0, 1.0, -L1 * L2 / (1.0 - nn * lambda / r0)}),
        mk(2.0, {1.0 / r0, n, -L1 * L2 / (0.5 - nn * lambda / r0)}),
        mk((1.0 / n) * ((1.0 - n) / lambda) * r0, {0.0, 0.0, 1.0}),
    };

    out[1].label = "M1";
    out[1].point = {0.0, q1, r1};
    out[1].eigenpairs = {
        mk(-1.0, {0.0, 1.0, -L1 * L2 / (1.0 + nn * lambda / r1)}),
        // First component as printed carries a spurious (2-n)/lambda factor; without it
        // the Jacobian residual is at machine precision.
        mk(-nn, {-(1.0 / r1) * (2.0 - 1.0 / (1.0 - n)), 2.0 * (1.0 - n),
                 -nn * L1 * L2 / (1.0 + nn * nn * lambda / r1)}),
        mk((1.0 - n) / (lambda * n) * r1, {0.0, 0.0, 1.0}),
    };

    out[2].label = "M2";
    out[2].point = {0.0, q1, 0.0};
    out[2].eigenpairs = {
        mk(-(1.0 / lambda) * (1.0 + n * lambda / (2.0 - n)), {1.0, 0.0, 0.0}),
        mk(-1.0, {0.0, 1.0, 0.0}),
        mk(-(1.0 / n) * ((1.0 - n) / lambda) * r1, {0.0, 0.0, 1.0}),
    };

    out[3].label = "M3";
    out[3].point = {0.0, 0.0, 0.0};
    out[3].eigenpairs = {
        mk(-(1.0 / lambda) * (1.0 - 2.0 * (1.0 - n) * lambda / (2.0 - n)), {1.0, 0.0, 0.0}),
        mk(1.0, {0.0, 1.0, 0.0}),
        mk(-(1.0 / n) * ((1.0 - n) / lambda) * r0, {0.0, 0.0, 1.0}),
    };

    return out;
}

std::array<EigenPair, 3> eigen_oracle(const Mat3& J) {
    const double tr = J[0][0] + J[1][1] + J[2][2];
    const double m2 = J[0][0] * J[1][1] - J[0][1] * J[1][0] + J[0][0] * J[2][2] -
                      J[0][2] * J[2][0] + J[1][1] * J[2][2] - J[1][2] * J[2][1];
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    auto mu = cubic_roots(-tr, m2, -det);

    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            scale = std::max(scale, std::abs(J[i][k]));
    scale = std::max(scale, 1.0);

    std::array<EigenPair, 3> out;
    for (int k = 0; k < 3; ++k) {
        Vec3 v = normalized({1.0, 1.0, 1.0});
        Mat3 A = J;
        for (int i = 0; i < 3; ++i)
            A[i][i] -= mu[static_cast<size_t>(k)];
        for (int it = 0; it < 50; ++it) {
            Vec3 w = solve3(A, v, 1e-14 * scale);
            double s = norm(w);
            if (!(s > 0.0) || !std::isfinite(s))
                break;
            Vec3 vn = {w[0] / s, w[1] / s, w[2] / s};
            double delta = std::min(norm(vn - v), norm(vn + v));
            v = vn;
            if (delta < 1e-15)
                break;
        }
        out[static_cast<size_t>(k)].mu = mu[static_cast<size_t>(k)];
        out[static_cast<size_t>(k)].X = sign_fixed_unit(v);
        out[static_cast<size_t>(k)].X_paper = out[static_cast<size_t>(k)].X;
    }
    return out;
}

} // namespace shearband::pqr
