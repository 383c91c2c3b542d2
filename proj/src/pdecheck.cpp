#include "shearband/pdecheck.hpp"

#include <cmath>
#include <numbers>

#include "shearband/errors.hpp"

namespace shearband::pdecheck {

namespace {

constexpr double pi = std::numbers::pi;

// Second difference with mirror ghosts at both ends (Neumann on the argument).
void d2_mirror(const std::vector<double>& f, double h, std::vector<double>& out) {
    const size_t m = f.size();
    out.resize(m);
    const double inv = 1.0 / (h * h);
    out[0] = 2.0 * (f[1] - f[0]) * inv;
    for (size_t i = 1; i + 1 < m; ++i)
        out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
    out[m - 1] = 2.0 * (f[m - 2] - f[m - 1]) * inv;
}

} // namespace

PdeState make_uniform(int N, double n) {
    if (N < 4)
        throw DomainError("grid too coarse");
    PdeState s;
    s.N = N;
    s.h = 1.0 / N;
    s.n = n;
    s.U.assign(static_cast<size_t>(N) + 1, 1.0);
    s.Gamma.assign(static_cast<size_t>(N) + 1, 1.0);
    return s;
}

PdeState make_mode_perturbation(int N, double n, int j, double amp) {
    PdeState s = make_uniform(N, n);
    for (int i = 0; i <= N; ++i)
        s.U[static_cast<size_t>(i)] += amp * std::cos(j * pi * i * s.h);
    // Project out the zero mode (the perturbation constraint pins it to zero).
    double m = mean_U(s);
    for (double& u : s.U)
        u -= (m - 1.0);
    return s;
}

double mean_U(const PdeState& s) {
    double acc = 0.5 * (s.U.front() + s.U.back());
    for (int i = 1; i < s.N; ++i)
        acc += s.U[static_cast<size_t>(i)];
    return acc * s.h;
}

double stability_bound(const PdeState& s) {
    double w = 0.0;
    for (size_t i = 0; i < s.U.size(); ++i)
        w = std::max(w, std::pow(s.U[i], s.n - 1.0) / s.Gamma[i]);
    return 0.4 * s.h * s.h / (s.n * w);
}

void step_nonlinear(PdeState& s, double dtau) {
    if (dtau > stability_bound(s) * (1.0 + 1e-12))
        throw StabilityViolation("dtau exceeds the explicit stability bound");
    const size_t m = s.U.size();
    std::vector<double> sig(m), d2(m);
    auto rhs = [&](const std::vector<double>& U, const std::vector<double>& G,
                   std::vector<double>& dU, std::vector<double>& dG) {
        for (size_t i = 0; i < m; ++i)
            sig[i] = std::pow(U[i], s.n) / G[i];
        d2_mirror(sig, s.h, d2);
        dU = d2;
        dG.resize(m);
        for (size_t i = 0; i < m; ++i)
            dG[i] = U[i] - G[i];
    };
    std::vector<double> k1u, k1g, k2u, k2g, k3u, k3g, k4u, k4g, tu(m), tg(m);
    rhs(s.U, s.Gamma, k1u, k1g);
    for (size_t i = 0; i < m; ++i) {
        tu[i] = s.U[i] + 0.5 * dtau * k1u[i];
        tg[i] = s.Gamma[i] + 0.5 * dtau * k1g[i];
    }
    rhs(tu, tg, k2u, k2g);
    for (size_t i = 0; i < m; ++i) {
        tu[i] = s.U[i] + 0.5 * dtau * k2u[i];
        tg[i] = s.Gamma[i] + 0.5 * dtau * k2g[i];
    }
    rhs(tu, tg, k3u, k3g);
    for (size_t i = 0; i < m; ++i) {
        tu[i] = s.U[i] + dtau * k3u[i];
        tg[i] = s.Gamma[i] + dtau * k3g[i];
    }
    rhs(tu, tg, k4u, k4g);
    for (size_t i = 0; i < m; ++i) {
        s.U[i] += dtau / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        s.Gamma[i] += dtau / 6.0 * (k1g[i] + 2.0 * k2g[i] + 2.0 * k3g[i] + k4g[i]);
        if (!(s.U[i] > 0.0) || !(s.Gamma[i] > 0.0))
            throw PositivityLoss("U or Gamma left the positive cone");
    }
    s.tau += dtau;
}

double run_linearized(int j, double n, double tau_end, int N) {
    if (j < 1)
        throw DomainError("mode index must be >= 1");
    if (N < 8 * j)
        throw ResolutionError("N < 8j: mode under-resolved");
    const double h = 1.0 / N;
    const size_t m = static_cast<size_t>(N) + 1;
    std::vector<double> Ut(m), Gt(m, 0.0), w(m), d2(m);
    for (size_t i = 0; i < m; ++i)
        Ut[i] = std::cos(j * pi * static_cast<double>(i) * h);

    const double dtau = 0.4 * h * h / std::max(n, 1e-3);
    auto rhs = [&](const std::vector<double>& U, const std::vector<double>& G,
                   std::vector<double>& dU, std::vector<double>& dG) {
        for (size_t i = 0; i < m; ++i)
            w[i] = n * U[i] - G[i];
        d2_mirror(w, h, d2);
        dU = d2;
        dG.resize(m);
        for (size_t i = 0; i < m; ++i)
            dG[i] = U[i] - G[i];
    };
    auto amplitude = [&]() {
        // Cosine-mode coefficient by the trapezoid rule (2 * integral U cos(j pi x)).
        double acc = 0.5 * (Ut[0] + Ut[m - 1] * std::cos(j * pi));
        for (size_t i = 1; i + 1 < m; ++i)
            acc += Ut[i] * std::cos(j * pi * static_cast<double>(i) * h);
        return 2.0 * acc * h;
    };

    std::vector<double> k1u, k1g, k2u, k2g, k3u, k3g, k4u, k4g, tu(m), tg(m);
    std::vector<double> taus, logs;
    double tau = 0.0;
    const double fit_lo = 0.6 * tau_end;
    long steps = static_cast<long>(std::ceil(tau_end / dtau));
    long record_every = std::max<long>(1, steps / 2000);
    for (long sidx = 0; sidx < steps; ++sidx) {
        rhs(Ut, Gt, k1u, k1g);
        for (size_t i = 0; i < m; ++i) {
            tu[i] = Ut[i] + 0.5 * dtau * k1u[i];
            tg[i] = Gt[i] + 0.5 * dtau * k1g[i];
        }
        rhs(tu, tg, k2u, k2g);
        for (size_t i = 0; i < m; ++i) {
            tu[i] = Ut[i] + 0.5 * dtau * k2u[i];
            tg[i] = Gt[i] + 0.5 * dtau * k2g[i];
        }
        rhs(tu, tg, k3u, k3g);
        for (size_t i = 0; i < m; ++i) {
            tu[i] = Ut[i] + dtau * k3u[i];
            tg[i] = Gt[i] + dtau * k3g[i];
        }
        rhs(tu, tg, k4u, k4g);
        for (size_t i = 0; i < m; ++i) {
            Ut[i] += dtau / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            Gt[i] += dtau / 6.0 * (k1g[i] + 2.0 * k2g[i] + 2.0 * k3g[i] + k4g[i]);
        }
        tau += dtau;
        if (tau >= fit_lo && sidx % record_every == 0) {
            double a = std::abs(amplitude());
            if (a > 0.0) {
                taus.push_back(tau);
                logs.push_back(std::log(a));
            }
        }
    }
    if (taus.size() < 10)
        throw FitIllConditioned("too few amplitude samples for the rate fit");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < taus.size(); ++i) {
        sx += taus[i];
        sy += logs[i];
        sxx += taus[i] * taus[i];
        sxy += taus[i] * logs[i];
    }
    double mcount = static_cast<double>(taus.size());
    return (mcount * sxy - sx * sy) / (mcount * sxx - sx * sx);
}

ResidualNorms residual_from_frames(const FrameFn& frames, double t, double xmax, int nx,
                                   double dt_frac) {
    if (!(t > 0.0) || !(xmax > 0.0) || nx < 8)
        throw DomainError("residual evaluation requires t > 0, xmax > 0, nx >= 8");
    const double hx = xmax / nx;
    std::vector<double> x(static_cast<size_t>(nx) + 1);
    for (int i = 0; i <= nx; ++i)
        x[static_cast<size_t>(i)] = i * hx;
    const double dt = dt_frac * t;
    Fields f0 = frames(t, x), fp = frames(t + dt, x), fm = frames(t - dt, x);

    ResidualNorms out;
    out.t = t;
    double smom = 0.0, skin = 0.0;
    std::vector<double> mom, kin;
    // The last node has no right neighbor and the domain is not symmetric there;
    // residuals are evaluated on i = 0..nx-1 (x = 0 uses the even extension).
    for (int i = 0; i < nx; ++i) {
        size_t k = static_cast<size_t>(i);
        double sxx = (i == 0) ? 2.0 * (f0.sigma[1] - f0.sigma[0]) / (hx * hx)
                              : (f0.sigma[k - 1] - 2.0 * f0.sigma[k] + f0.sigma[k + 1]) /
                                    (hx * hx);
        double ut = (fp.u[k] - fm.u[k]) / (2.0 * dt);
        double gt = (fp.gamma[k] - fm.gamma[k]) / (2.0 * dt);
        mom.push_back(ut - sxx);
        kin.push_back(gt - f0.u[k]);
        smom = std::max({smom, std::abs(ut), std::abs(sxx)});
        skin = std::max(skin, std::abs(f0.u[k]));
    }
    smom = std::max(smom, 1e-300);
    skin = std::max(skin, 1e-300);
    double m2 = 0.0, ki2 = 0.0;
    for (size_t i = 0; i < mom.size(); ++i) {
        out.mom_linf = std::max(out.mom_linf, std::abs(mom[i]));
        out.kin_linf = std::max(out.kin_linf, std::abs(kin[i]));
        m2 += mom[i] * mom[i];
        ki2 += kin[i] * kin[i];
    }
    out.mom_linf /= smom;
    out.kin_linf /= skin;
    out.mom_l2 = std::sqrt(m2 / static_cast<double>(mom.size())) / smom;
    out.kin_l2 = std::sqrt(ki2 / static_cast<double>(kin.size())) / skin;
    return out;
}

std::vector<ResidualNorms> selfsimilar_residual(const reconstruct::Profile& profile,
                                                const std::vector<double>& t_list, double xmax,
                                                int nx, double dt_frac) {
    FrameFn fn = [&profile](double t, const std::vector<double>& x) {
        auto fr = reconstruct::fields_at_time(profile, t, x);
        return Fields{fr.u, fr.gamma, fr.sigma};
    };
    std::vector<ResidualNorms> out;
    out.reserve(t_list.size());
    for (double t : t_list)
        out.push_back(residual_from_frames(fn, t, xmax, nx, dt_frac));
    return out;
}

} // namespace shearband::pdecheck
