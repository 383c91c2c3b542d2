#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "shearband/errors.hpp"
#include "shearband/reconstruct.hpp"

using namespace shearband;
namespace rc = shearband::reconstruct;

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace

TEST_SUITE("reconstruct") {

// [DERIVED] the tilde variables invert the (p, q, r) definition: the algebraic
// identities p = gamma/sigma, q = n v/sigma, r = u/gamma, sigma = u^n/gamma hold.
TEST_CASE("tilde round trip identities") {
    const double n = 0.3;
    for (Vec3 x : {Vec3{0.4, 1.1, 2.2}, Vec3{1.0, 0.85, 0.5}, Vec3{3.0, 0.2, 7.0}}) {
        auto tv = rc::tilde_from_pqr(x, n);
        CHECK(tv.gamma / tv.sigma == doctest::Approx(x[0]).epsilon(1e-12));
        CHECK(n * tv.v / tv.sigma == doctest::Approx(x[1]).epsilon(1e-12));
        CHECK(tv.u / tv.gamma == doctest::Approx(x[2]).epsilon(1e-12));
        CHECK(std::pow(tv.u, n) / tv.gamma == doctest::Approx(tv.sigma).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rc::tilde_from_pqr({0.0, 1.0, 1.0}, n), DomainError);
    CHECK_THROWS_AS(rc::tilde_from_pqr({1.0, 1.0, -1.0}, n), DomainError);
}

// [PAPER] boundary values at xi -> 0: Gamma_bar -> gamma_bar0 = 1, U_bar -> u_bar0
// = r0, Sigma_bar -> u_bar0^n.
TEST_CASE("limits at zero") {
    const auto& pr = sbtest::profile_fig3();
    auto lim = rc::limits_at_zero(pr);
    double r0 = 1.0 + 4.0 / 1.7;
    CHECK(lim[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(lim[1] == doctest::Approx(r0).epsilon(1e-4));
    CHECK(lim[2] == doctest::Approx(std::pow(r0, 0.3)).epsilon(1e-4));
}

// [DERIVED] Taylor coefficients: the closed form matches a finite-difference
// curvature of the evaluated profile, and the ratio is exactly r0 + 2 lambda.
TEST_CASE("Taylor coefficients at the origin") {
    const auto& pr = sbtest::profile_fig3();
    auto [gxx, uxx] = rc::taylor_coefficients(sbtest::params_fig3());
    CHECK(pr.gamma_bar_xx0 == doctest::Approx(gxx).epsilon(1e-13));
    double r0 = 1.0 + 4.0 / 1.7;
    CHECK(uxx / gxx == doctest::Approx(r0 + 4.0).epsilon(1e-6));

    auto lim = rc::limits_at_zero(pr);
    // Probe where the quadratic term is ~1e-4 of the limit but the quartic tail
    // is negligible; stay inside the interpolated (non-Taylor) range.
    double xi = std::sqrt(2e-4 * lim[0] / std::abs(gxx));
    REQUIRE(xi > pr.xi_min);
    double fd_g = 2.0 * (pr.eval(xi).gamma_bar - lim[0]) / (xi * xi);
    double fd_u = 2.0 * (pr.eval(xi).u_bar - lim[1]) / (xi * xi);
    CHECK(fd_g == doctest::Approx(gxx).epsilon(0.01));
    CHECK(fd_u == doctest::Approx(uxx).epsilon(0.01));
}

// [PAPER] far-field tails: Gamma_bar, U_bar ~ xi^{-1/(1-n)} and Sigma_bar ~ xi.
TEST_CASE("far-field power laws") {
    const auto& pr = sbtest::profile_fig3();
    std::vector<double> lx, lg, lu, ls;
    double eta_end = pr.eta.back();
    for (size_t i = 0; i < pr.xi.size(); ++i)
        if (pr.eta[i] > eta_end - 2.3) { // last decade in xi
            lx.push_back(std::log(pr.xi[i]));
            lg.push_back(std::log(pr.gamma_bar[i]));
            lu.push_back(std::log(pr.u_bar[i]));
            ls.push_back(std::log(pr.sigma_bar[i]));
        }
    REQUIRE(lx.size() >= 10);
    CHECK(fit_slope(lx, lg) == doctest::Approx(-1.0 / 0.7).epsilon(0.02));
    CHECK(fit_slope(lx, lu) == doctest::Approx(-1.0 / 0.7).epsilon(0.02));
    CHECK(fit_slope(lx, ls) == doctest::Approx(1.0).epsilon(0.02));
}

// [DERIVED] evaluation is continuous across the Taylor/Hermite seam and satisfies
// the constitutive identity Sigma_bar = U_bar^n / Gamma_bar everywhere.
TEST_CASE("eval continuity and constitutive identity") {
    const auto& pr = sbtest::profile_fig3();
    auto a = pr.eval(pr.xi_min * 0.999);
    auto b = pr.eval(pr.xi_min * 1.001);
    CHECK(a.gamma_bar == doctest::Approx(b.gamma_bar).epsilon(1e-5));
    CHECK(a.u_bar == doctest::Approx(b.u_bar).epsilon(1e-5));

    for (double xi : {pr.xi_min * 0.1, pr.xi_min * 2.0, 0.1, 1.0, 5.0}) {
        auto v = pr.eval(xi);
        CHECK(std::pow(v.u_bar, 0.3) / v.gamma_bar ==
              doctest::Approx(v.sigma_bar).epsilon(1e-8));
    }
    CHECK_THROWS_AS(pr.eval(pr.xi_max * 1.01), ExtrapolationError);
    CHECK_THROWS_AS(pr.eval(-1.0), ConstraintViolation);
}

// [DERIVED] physical fields: t = 0 reproduces the profile exactly; v is odd and
// the scalar fields even in x; leaving the profile range raises.
TEST_CASE("fields at a time slice") {
    const auto& pr = sbtest::profile_fig3();
    std::vector<double> grid = {-0.02, -0.01, 0.0, 0.01, 0.02};
    auto fr = rc::fields_at_time(pr, 0.0, grid);
    REQUIRE(fr.x.size() == grid.size());
    // Odd / even extensions.
    CHECK(fr.v[0] == doctest::Approx(-fr.v[4]).epsilon(1e-12));
    CHECK(fr.gamma[0] == doctest::Approx(fr.gamma[4]).epsilon(1e-12));
    CHECK(fr.sigma[1] == doctest::Approx(fr.sigma[3]).epsilon(1e-12));
    CHECK(fr.u[1] == doctest::Approx(fr.u[3]).epsilon(1e-12));
    // t = 0, gamma0 = 1: gamma(x, 0) = gamma0 Gamma_bar(x).
    auto v = pr.eval(0.01);
    CHECK(fr.gamma[3] == doctest::Approx(v.gamma_bar).epsilon(1e-12));
    CHECK(fr.u[3] == doctest::Approx(v.u_bar).epsilon(1e-12));

    CHECK_THROWS_AS(rc::fields_at_time(pr, 0.0, {2.0 * pr.xi_max}), ExtrapolationError);
}

// [DERIVED] temporal scaling at the center: gamma(0, t) grows like s^{1 + 2 lambda/(2-n)}
// with s = 1 + t/gamma0.
TEST_CASE("center growth exponents") {
    const auto& pr = sbtest::profile_fig3();
    std::vector<double> ls, lg, lu, lsg;
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        auto fr = rc::fields_at_time(pr, t, {0.0});
        ls.push_back(std::log(1.0 + t));
        lg.push_back(std::log(fr.gamma[0]));
        lu.push_back(std::log(fr.u[0]));
        lsg.push_back(std::log(fr.sigma[0]));
    }
    double lam = 2.0, nn = 0.3;
    CHECK(fit_slope(ls, lg) == doctest::Approx(1.0 + 2.0 * lam / (2.0 - nn)).epsilon(1e-8));
    CHECK(fit_slope(ls, lu) == doctest::Approx(2.0 * lam / (2.0 - nn)).epsilon(1e-8));
    CHECK(fit_slope(ls, lsg) ==
          doctest::Approx(-1.0 - 2.0 * lam * (1.0 - nn) / (2.0 - nn)).epsilon(1e-8));
}

} // TEST_SUITE
