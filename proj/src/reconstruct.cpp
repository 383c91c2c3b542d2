#include "shearband/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shearband/errors.hpp"
#include "shearband/pqr.hpp"

namespace shearband::reconstruct {

TildeVars tilde_from_pqr(const Vec3& x, double n) {
    const double p = x[0], q = x[1], r = x[2];
    if (!(p > 0.0) || r < 0.0)
        throw DomainError("tilde_from_pqr requires p > 0 and r >= 0");
    if (q < 0.0)
        throw DomainError("tilde_from_pqr requires q >= 0");
    const double e = 1.0 / (2.0 - n);
    TildeVars t;
    t.v = (q == 0.0) ? 0.0
                     : (1.0 / n) * std::pow(std::pow(p, -(1.0 - n)) * std::pow(q, 2.0 - n) *
                                                std::pow(r, n),
                                            e);
    t.gamma = std::pow(p * std::pow(r, n), e);
    t.sigma = std::pow(std::pow(p, -(1.0 - n)) * std::pow(r, n), e);
    t.u = std::pow(p * r * r, e);
    return t;
}

std::pair<double, double> taylor_coefficients(const ModelParams& params) {
    const double n = params.n, lam = params.lambda;
    const double r0 = params.r0();
    const double denom = 0.5 - (n / (1.0 - n)) * (lam / r0);
    if (std::abs(denom) < 1e-12)
        throw DomainError("Taylor expansion singular: 1/2 - (n/(1-n))(lambda/r0) = 0");
    const double kappa = params.gamma_bar0 * params.gamma_bar0 *
                         std::pow(params.u_bar0, 1.0 - n);
    const double g2 = -kappa * (lam / (2.0 - n)) * (lam / (1.0 - n)) / denom / lam;
    return {g2, g2 * (r0 + 2.0 * lam)};
}

namespace {

Profile::Values values_from_point(const Vec3& x, double xi, double n) {
    TildeVars t = tilde_from_pqr(x, n);
    const double a = n / (2.0 - n), b = 2.0 / (2.0 - n);
    Profile::Values v;
    v.v_bar = std::pow(xi, -a) * t.v;
    v.gamma_bar = std::pow(xi, -b) * t.gamma;
    v.sigma_bar = std::pow(xi, 1.0 - a) * t.sigma;
    v.u_bar = std::pow(xi, -b) * t.u;
    return v;
}

} // namespace

Profile profile_from_orbit(const het::Orbit& orbit, const ModelParams& params) {
    Profile pr;
    pr.params = params;
    pr.eta = orbit.eta;
    pr.pqr = orbit.x;
    pr.slopes.reserve(orbit.x.size());
    for (const Vec3& x : orbit.x)
        pr.slopes.push_back(pqr::vector_field(x, params.n, params.lambda));
    pr.xi.reserve(orbit.eta.size());
    for (size_t i = 0; i < orbit.eta.size(); ++i) {
        double xi = std::exp(orbit.eta[i]);
        pr.xi.push_back(xi);
        auto v = values_from_point(orbit.x[i], xi, params.n);
        pr.v_bar.push_back(v.v_bar);
        pr.gamma_bar.push_back(v.gamma_bar);
        pr.sigma_bar.push_back(v.sigma_bar);
        pr.u_bar.push_back(v.u_bar);
    }
    pr.xi_min = pr.xi.front();
    pr.xi_max = pr.xi.back();
    auto [g2, u2] = taylor_coefficients(params);
    pr.gamma_bar_xx0 = g2;
    pr.u_bar_xx0 = u2;
    return pr;
}

Profile::Values Profile::eval(double x) const {
    if (!(x >= 0.0))
        throw DomainError("profile evaluation requires xi >= 0");
    if (x > xi_max) {
        std::ostringstream os;
        os << "xi=" << x << " beyond the sampled range (xi_max=" << xi_max
           << "); widen the orbit span";
        throw ExtrapolationError(os.str());
    }
    if (x < xi_min) {
        // Even quadratic-in-xi^2 extrapolation through the three smallest samples:
        // consistent with the sampled field by construction, so second differences
        // across xi_min see only the profile's genuine curvature.
        if (xi.size() < 3)
            throw FitIllConditioned("need at least 3 profile samples for extrapolation");
        double x0 = xi[0];
        double t = (x / x0) * (x / x0);
        double t1 = (xi[1] / x0) * (xi[1] / x0);
        double t2 = (xi[2] / x0) * (xi[2] / x0);
        double l0 = ((t - t1) * (t - t2)) / ((1.0 - t1) * (1.0 - t2));
        double l1 = ((t - 1.0) * (t - t2)) / ((t1 - 1.0) * (t1 - t2));
        double l2 = ((t - 1.0) * (t - t1)) / ((t2 - 1.0) * (t2 - t1));
        auto ext = [&](const std::vector<double>& f) {
            return l0 * f[0] + l1 * f[1] + l2 * f[2];
        };
        Values v;
        v.gamma_bar = ext(gamma_bar);
        v.u_bar = ext(u_bar);
        v.sigma_bar = ext(sigma_bar);
        // v_bar is odd: extrapolate the even quotient v_bar/xi, then restore xi.
        double w0 = v_bar[0] / xi[0], w1 = v_bar[1] / xi[1], w2 = v_bar[2] / xi[2];
        v.v_bar = (l0 * w0 + l1 * w1 + l2 * w2) * x;
        return v;
    }
    double et = std::log(x);
    size_t hi = static_cast<size_t>(std::upper_bound(eta.begin(), eta.end(), et) - eta.begin());
    hi = std::clamp<size_t>(hi, 1, eta.size() - 1);
    size_t lo = hi - 1;
    double d = eta[hi] - eta[lo];
    double s = (et - eta[lo]) / d;
    double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    double h10 = s * (1.0 - s) * (1.0 - s);
    double h01 = s * s * (3.0 - 2.0 * s);
    double h11 = s * s * (s - 1.0);
    Vec3 p = h00 * pqr[lo] + (h10 * d) * slopes[lo] + h01 * pqr[hi] + (h11 * d) * slopes[hi];
    return values_from_point(p, x, params.n);
}

std::array<double, 3> limits_at_zero(const Profile& pr) {
    if (pr.xi.size() < 3)
        throw FitIllConditioned("need at least 3 profile samples for extrapolation");
    // Even expansion f = a + b xi^2 + c xi^4 through the three smallest samples,
    // solved in the scaled variable t = (xi/xi_0)^2 for conditioning.
    auto extrap = [&](const std::vector<double>& f) {
        double x0 = pr.xi[0];
        double t1 = (pr.xi[1] / x0) * (pr.xi[1] / x0);
        double t2 = (pr.xi[2] / x0) * (pr.xi[2] / x0);
        // Lagrange value at t = 0 through nodes (1, t1, t2).
        double l0 = (t1 * t2) / ((1.0 - t1) * (1.0 - t2));
        double l1 = (1.0 * t2) / ((t1 - 1.0) * (t1 - t2));
        double l2 = (1.0 * t1) / ((t2 - 1.0) * (t2 - t1));
        return l0 * f[0] + l1 * f[1] + l2 * f[2];
    };
    return {extrap(pr.gamma_bar), extrap(pr.u_bar), extrap(pr.sigma_bar)};
}

FieldFrame fields_at_time(const Profile& pr, double t, const std::vector<double>& xgrid) {
    if (t < 0.0)
        throw DomainError("fields_at_time requires t >= 0");
    const ModelParams& mp = pr.params;
    const double s = 1.0 + t / mp.gamma0;
    const double n = mp.n, lam = mp.lambda;
    const double sv = std::pow(s, lam * n / (2.0 - n));
    const double sg = mp.gamma0 * std::pow(s, 1.0 + 2.0 * lam / (2.0 - n));
    const double ss = (1.0 / mp.gamma0) * std::pow(s, -1.0 - 2.0 * lam * (1.0 - n) / (2.0 - n));
    const double su = std::pow(s, 2.0 * lam / (2.0 - n));
    const double sfac = std::pow(s, lam);
    FieldFrame fr;
    fr.t = t;
    fr.x = xgrid;
    fr.v.reserve(xgrid.size());
    fr.gamma.reserve(xgrid.size());
    fr.sigma.reserve(xgrid.size());
    fr.u.reserve(xgrid.size());
    for (double x : xgrid) {
        double xi = std::abs(x) * sfac;
        auto vals = pr.eval(xi);
        double sign = (x < 0.0) ? -1.0 : 1.0; // v odd, the rest even
        fr.v.push_back(sign * sv * vals.v_bar);
        fr.gamma.push_back(sg * vals.gamma_bar);
        fr.sigma.push_back(ss * vals.sigma_bar);
        fr.u.push_back(su * vals.u_bar);
    }
    return fr;
}

} // namespace shearband::reconstruct
