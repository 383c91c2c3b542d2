#include "shearband/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shearband/errors.hpp"

namespace shearband::integrate {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - bhat, for the embedded 4th-order error estimate.
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer-Norsett-Wanner DOPRI5 continuous extension).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

struct DenseStep {
    double x0 = 0.0, h = 0.0;
    // y(x0 + th*h) = r1 + th*(r2 + (1-th)*(r3 + th*(r4 + (1-th)*r5)))
    State r1, r2, r3, r4, r5;

    void eval(double th, State& out) const {
        const size_t m = r1.size();
        out.resize(m);
        for (size_t i = 0; i < m; ++i)
            out[i] = r1[i] + th * (r2[i] + (1.0 - th) * (r3[i] + th * (r4[i] + (1.0 - th) * r5[i])));
    }
};

void check_cfg(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-2) || !(cfg.abs_tol > 0.0 && cfg.abs_tol <= 1e-2))
        throw DomainError("integrator tolerances must lie in (0, 1e-2]");
    if (!(cfg.h_min > 0.0 && cfg.h_min <= cfg.h_init && cfg.h_init <= cfg.h_max))
        throw DomainError("integrator steps must satisfy 0 < h_min <= h_init <= h_max");
}

bool finite(const State& y) {
    for (double v : y)
        if (!std::isfinite(v))
            return false;
    return true;
}

} // namespace

Trajectory integrate(const Field& f, State y0, double a, double b, const IntegratorConfig& cfg,
                     const std::vector<Event>& events) {
    check_cfg(cfg);
    const double dir = (b >= a) ? 1.0 : -1.0;
    const double span = std::abs(b - a);
    // One code path: integrate the (possibly negated) field over [0, span].
    auto g = [&](double s, const State& y, State& dy) {
        f(a + dir * s, y, dy);
        if (dir < 0.0)
            for (double& v : dy)
                v = -v;
    };

    const size_t m = y0.size();
    State y = std::move(y0);
    State k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), ynew(m), yerr(m);

    Trajectory out;
    std::vector<double> gprev(events.size());
    double s = 0.0;
    g(0.0, y, k1); // FSAL seed
    if (!finite(k1) || !finite(y))
        throw NonFinite("non-finite state or derivative at the initial point");
    if (cfg.record) {
        out.x.push_back(a);
        out.y.push_back(y);
    }
    for (size_t e = 0; e < events.size(); ++e)
        gprev[e] = events[e].fn(a, y);

    double h = std::min(cfg.h_init, std::max(span, cfg.h_min));
    long steps = 0;
    DenseStep ds;
    ds.r1.resize(m), ds.r2.resize(m), ds.r3.resize(m), ds.r4.resize(m), ds.r5.resize(m);
    State yev(m);

    while (s < span) {
        if (++steps > cfg.max_steps) {
            std::ostringstream os;
            os << "step budget " << cfg.max_steps << " exceeded at x=" << a + dir * s;
            throw BudgetExceeded(os.str());
        }
        h = std::min(h, span - s);
        bool last_possible = (s + h >= span);

        for (size_t i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        g(s + c2 * h, ytmp, k2);
        for (size_t i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        g(s + c3 * h, ytmp, k3);
        for (size_t i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        g(s + c4 * h, ytmp, k4);
        for (size_t i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        g(s + c5 * h, ytmp, k5);
        for (size_t i = 0; i < m; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        g(s + h, ytmp, k6);
        for (size_t i = 0; i < m; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        g(s + h, ynew, k7);
        if (!finite(ynew) || !finite(k7))
            throw NonFinite("non-finite state during integration");

        double errnorm = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            errnorm = std::max(errnorm, std::abs(err) / sc);
        }

        if (errnorm <= 1.0) {
            // Accepted: build the dense interpolant and scan for events.
            for (size_t i = 0; i < m; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                ds.r1[i] = y[i];
                ds.r2[i] = ydiff;
                ds.r3[i] = bspl;
                ds.r4[i] = ydiff - h * k7[i] - bspl;
                ds.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                d7 * k7[i]);
            }
            ds.x0 = s;
            ds.h = h;

            bool stop = false;
            for (size_t e = 0; e < events.size(); ++e) {
                double gnew = events[e].fn(a + dir * (s + h), ynew);
                if (gprev[e] != 0.0 && gnew != 0.0 && ((gprev[e] < 0.0) != (gnew < 0.0))) {
                    // Bisection on the dense output.
                    double lo = 0.0, hi = 1.0, glo = gprev[e];
                    for (int it = 0; it < 200 && (hi - lo) * h > 1e-10; ++it) {
                        double mid = 0.5 * (lo + hi);
                        ds.eval(mid, yev);
                        double gm = events[e].fn(a + dir * (s + mid * h), yev);
                        if (gm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        if ((gm < 0.0) == (glo < 0.0)) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    double th = 0.5 * (lo + hi);
                    ds.eval(th, yev);
                    EventHit hit;
                    hit.id = static_cast<int>(e);
                    hit.x = a + dir * (s + th * h);
                    hit.state = yev;
                    out.events.push_back(hit);
                    if (events[e].stopping) {
                        out.stopped_by_event = true;
                        out.stop_event_id = hit.id;
                        if (cfg.record) {
                            out.x.push_back(hit.x);
                            out.y.push_back(yev);
                        }
                        stop = true;
                        break;
                    }
                }
                gprev[e] = gnew;
            }
            if (stop)
                return out;

            s += h;
            std::swap(y, ynew);
            std::swap(k1, k7); // FSAL
            if (cfg.record) {
                out.x.push_back(a + dir * s);
                out.y.push_back(y);
            }
            double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
            h = std::min(cfg.h_max, h * std::min(5.0, std::max(0.2, fac)));
            (void)last_possible;
        } else {
            double fac = 0.9 * std::pow(errnorm, -0.2);
            h *= std::min(1.0, std::max(0.1, fac));
        }
        if (h < cfg.h_min) {
            std::ostringstream os;
            os << "step size underflow (h=" << h << " < h_min=" << cfg.h_min
               << ") at x=" << a + dir * s;
            throw StepUnderflow(os.str());
        }
    }
    if (!cfg.record) {
        out.x.push_back(b);
        out.y.push_back(y);
    }
    return out;
}

std::pair<State, double> integrate_to_event(const Field& f, State y0, double a, double x_limit,
                                            const IntegratorConfig& cfg, const EventFn& event) {
    Trajectory tr = integrate(f, std::move(y0), a, x_limit, cfg, {{event, true}});
    if (!tr.stopped_by_event)
        throw EventNotFound("event function did not change sign over the integration span");
    const EventHit& hit = tr.events.back();
    return {hit.state, hit.x};
}

} // namespace shearband::integrate
