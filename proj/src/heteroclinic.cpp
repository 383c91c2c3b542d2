#include "shearband/heteroclinic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "shearband/errors.hpp"
#include "shearband/integrate.hpp"
#include "shearband/pqr.hpp"

namespace shearband::het {

namespace {

bool het_debug() {
    static const bool on = std::getenv("SHEARBAND_HET_DEBUG") != nullptr;
    return on;
}

using integrate::IntegratorConfig;
using integrate::State;
using integrate::Trajectory;

// Closed-form frame at one parameter point: the two equilibria and the eigenvectors
// the construction needs, all unit-normalized except X02_paper.
struct Frame {
    double n = 0.0, lam = 0.0;
    Vec3 M0, M1;
    Vec3 X01u, X02u, X11u, X12u;
    Vec3 X02p; // paper normalization, for kappa2 fits
    double mu03 = 0.0, r0 = 0.0, r1 = 0.0;
    double mu11 = 0.0, mu12 = 0.0; // stable rates at M1
};

Frame make_frame(double n, double lam) {
    Frame f;
    f.n = n;
    f.lam = lam;
    auto eq = pqr::equilibria(n, lam);
    f.M0 = eq[0].point;
    f.M1 = eq[1].point;
    f.X01u = eq[0].eigenpairs[0].X;
    f.X02u = eq[0].eigenpairs[1].X;
    f.X02p = eq[0].eigenpairs[1].X_paper;
    f.mu03 = eq[0].eigenpairs[2].mu;
    f.X11u = eq[1].eigenpairs[0].X;
    f.X12u = eq[1].eigenpairs[1].X;
    f.mu11 = eq[1].eigenpairs[0].mu;
    f.mu12 = eq[1].eigenpairs[1].mu;
    f.r0 = f.M0[2];
    f.r1 = f.M1[2];
    return f;
}

integrate::Field make_field(double n, double lam) {
    return [n, lam](double, const State& y, State& dy) {
        Vec3 v = pqr::vector_field({y[0], y[1], y[2]}, n, lam);
        dy[0] = v[0];
        dy[1] = v[1];
        dy[2] = v[2];
    };
}

double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

// The boundary-value problem anchors its M0 end at this offset along X02; the
// emitted orbit is then flowed backward (toward M0, which attracts in reverse
// time) down to delta_seed.  Solving directly at delta_seed = 1e-6 conditions
// the first shooting segment badly: the finite-difference step used for the
// Jacobian is a sizable fraction of the deviation itself.
constexpr double kDelta0Bvp = 1e-4;
// The M1 end is anchored at the same offset and the emitted orbit is flowed
// forward (M1 attracts in forward time) down to delta_seed.  This matters most
// near n -> 0, where the slow stable rate -n/(1-n) would otherwise force the
// boundary-value problem to resolve an enormous nearly-neutral tail.
constexpr double kDelta1Bvp = 1e-4;
// Backward shots stop this close to M0 so the glued guess hands over to the
// forward arc well inside the linear regime.
constexpr double kBackBall = 2e-5;

// ---------------------------------------------------------------------------
// Initial-guess arcs
// ---------------------------------------------------------------------------

struct Arc {
    std::vector<double> t; // increasing, starts at 0
    std::vector<Vec3> x;
};

enum class BackOutcome { Converged, Escaped, Undecided };

// Backward in eta from M1 + delta (cos X11 + sin X12); stops on entering the M0
// ball (converged) or leaving a large sphere around M0 (escaped).
BackOutcome shoot_back(const Frame& fr, double theta, double delta, double ball, Arc* arc) {
    Vec3 seed = fr.M1 + delta * (std::cos(theta) * fr.X11u + std::sin(theta) * fr.X12u);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.h_max = 0.5;
    cfg.max_steps = 2000000;
    cfg.record = (arc != nullptr);
    double Resc = 8.0 * (1.0 + norm(fr.M0));
    Vec3 M0 = fr.M0;
    std::vector<integrate::Event> evts = {
        {[M0, ball](double, const State& y) {
             return dist({y[0], y[1], y[2]}, M0) - ball;
         },
         true},
        {[M0, Resc](double, const State& y) {
             return dist({y[0], y[1], y[2]}, M0) - Resc;
         },
         true},
    };
    Trajectory tr;
    try {
        tr = integrate::integrate(make_field(fr.n, fr.lam), {seed[0], seed[1], seed[2]}, 0.0,
                                  -4000.0, cfg, evts);
    } catch (const NumericalFailure&) {
        return BackOutcome::Escaped;
    }
    if (arc) {
        arc->t.clear();
        arc->x.clear();
        for (size_t i = 0; i < tr.x.size(); ++i) {
            arc->t.push_back(tr.x[i]);
            arc->x.push_back({tr.y[i][0], tr.y[i][1], tr.y[i][2]});
        }
    }
    if (!tr.stopped_by_event)
        return BackOutcome::Undecided;
    return (tr.stop_event_id == 0) ? BackOutcome::Converged : BackOutcome::Escaped;
}

// Wedge-boundary arc: backward shots converge to the M0 ball only inside a wedge
// of angles theta in (0, pi) (the sin(theta) > 0 half-plane around M1).  Bisect a
// converge/escape boundary of that wedge and return the converging-side arc in
// forward orientation (t increasing, M0 end first).
Arc backward_boundary_arc(const Frame& fr, double delta, double ball, int budget) {
    constexpr int kScan = 48;
    std::array<BackOutcome, kScan + 1> outc{};
    auto angle = [](int k) { return (k + 1) * std::numbers::pi / (kScan + 2); };
    int kconv = -1;
    for (int k = 0; k <= kScan; ++k) {
        outc[static_cast<size_t>(k)] = shoot_back(fr, angle(k), delta, ball, nullptr);
        if (outc[static_cast<size_t>(k)] == BackOutcome::Converged)
            kconv = k;
    }
    if (kconv < 0)
        throw NoConnection("no backward shot from M1 reaches the M0 ball");
    double conv = angle(kconv);
    double other = std::numeric_limits<double>::quiet_NaN();
    if (kconv > 0 && outc[static_cast<size_t>(kconv - 1)] != BackOutcome::Converged)
        other = angle(kconv - 1);
    else if (kconv < kScan && outc[static_cast<size_t>(kconv + 1)] != BackOutcome::Converged)
        other = angle(kconv + 1);
    else {
        // Look for any neighboring non-converging sample to bracket the boundary.
        for (int k = 0; k <= kScan; ++k)
            if (outc[static_cast<size_t>(k)] != BackOutcome::Converged) {
                other = angle(k);
                break;
            }
    }
    if (std::isfinite(other)) {
        for (int it = 0; it < budget; ++it) {
            double mid = 0.5 * (conv + other);
            if (shoot_back(fr, mid, delta, ball, nullptr) == BackOutcome::Converged)
                conv = mid;
            else
                other = mid;
        }
    }
    Arc raw;
    if (shoot_back(fr, conv, delta, ball, &raw) != BackOutcome::Converged)
        throw NoConnection("bisected backward shot failed to re-converge");
    // Reverse into forward orientation.
    Arc fwd;
    double tend = raw.t.back();
    for (size_t i = raw.t.size(); i-- > 0;) {
        fwd.t.push_back(raw.t[i] - tend); // negative eta, increasing to 0
        fwd.x.push_back(raw.x[i]);
    }
    double t0 = fwd.t.front();
    for (double& t : fwd.t)
        t -= t0;
    return fwd;
}

struct FwdShot {
    Arc arc;
    double dmin = 0.0; // closest approach to M1
    size_t imin = 0;
    int outcome = 0;  // 0: r hit zero, 1: escaped past M1, 2: reached M1 ball
    double a3 = 0.0;  // X03 coefficient this shot was fired with
};

FwdShot shoot_forward(const Frame& fr, double delta0, double a3) {
    Vec3 seed = fr.M0 + delta0 * fr.X02u;
    seed[2] += a3;
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.h_max = 0.5;
    cfg.max_steps = 2000000;
    Vec3 M1 = fr.M1;
    double Rfar = 8.0;
    std::vector<integrate::Event> evts = {
        {[](double, const State& y) { return y[2] - 1e-4; }, true},
        {[M1, Rfar](double, const State& y) {
             return dist({y[0], y[1], y[2]}, M1) - Rfar;
         },
         true},
        {[M1](double, const State& y) { return dist({y[0], y[1], y[2]}, M1) - 0.02; }, true},
    };
    Trajectory tr;
    FwdShot out;
    out.a3 = a3;
    try {
        tr = integrate::integrate(make_field(fr.n, fr.lam), {seed[0], seed[1], seed[2]}, 0.0,
                                  4000.0, cfg, evts);
    } catch (const NumericalFailure&) {
        out.outcome = 1;
        return out;
    }
    out.arc.t = tr.x;
    out.arc.x.reserve(tr.y.size());
    for (auto& y : tr.y)
        out.arc.x.push_back({y[0], y[1], y[2]});
    out.dmin = 1e300;
    for (size_t i = 0; i < out.arc.x.size(); ++i) {
        double d = dist(out.arc.x[i], fr.M1);
        if (d < out.dmin) {
            out.dmin = d;
            out.imin = i;
        }
    }
    out.outcome = tr.stopped_by_event ? tr.stop_event_id : 1;
    if (out.outcome == 2)
        out.outcome = 2;
    return out;
}

// Bisection on the X03-coefficient a3 separating "r crashes to 0" from "escapes past
// M1"; keeps the trajectory of closest approach to M1.
FwdShot forward_arc(const Frame& fr, double delta0) {
    FwdShot s0 = shoot_forward(fr, delta0, 0.0);
    if (s0.outcome == 2)
        return s0;
    int side0 = s0.outcome;
    double b = delta0 * 1e-10;
    FwdShot sb;
    int guard = 0;
    for (;;) {
        sb = shoot_forward(fr, delta0, b);
        if (sb.outcome == 2)
            return sb;
        if (sb.outcome != side0)
            break;
        b *= 4.0;
        if (++guard > 60 || b > 1.0)
            throw NoConnection("no bracket for the X03 coefficient in the forward shot");
    }
    double lo = 0.0, hi = b;
    FwdShot best = (s0.dmin < sb.dmin) ? s0 : sb;
    for (int it = 0; it < 140; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        FwdShot sm = shoot_forward(fr, delta0, mid);
        if (sm.outcome == 2)
            return sm;
        if (sm.dmin < best.dmin)
            best = sm;
        if (sm.outcome == side0)
            lo = mid;
        else
            hi = mid;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Multiple-shooting Newton
// ---------------------------------------------------------------------------

struct BvpSolution {
    std::vector<Vec3> nodes; // N+1 nodes, uniform spacing T/N
    double T = 0.0;
    double a3 = 0.0, b1 = 0.0, b2 = 1.0;
    double res = 0.0;
};

constexpr double kStepsPerUnit = 220.0;

int segment_steps(double h) {
    return std::max(8, static_cast<int>(std::ceil(h * kStepsPerUnit)));
}

Vec3 rk4_flow(const Frame& fr, Vec3 x, double h, int nst, Vec3* fend = nullptr) {
    double dt = h / nst;
    for (int s = 0; s < nst; ++s) {
        Vec3 k1 = pqr::vector_field(x, fr.n, fr.lam);
        Vec3 k2 = pqr::vector_field(x + (0.5 * dt) * k1, fr.n, fr.lam);
        Vec3 k3 = pqr::vector_field(x + (0.5 * dt) * k2, fr.n, fr.lam);
        Vec3 k4 = pqr::vector_field(x + dt * k3, fr.n, fr.lam);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (fend)
        *fend = pqr::vector_field(x, fr.n, fr.lam);
    return x;
}

Vec3 bc_left(const Frame& fr, double delta0, double a3) {
    Vec3 x = fr.M0 + delta0 * fr.X02u;
    x[2] += a3;
    return x;
}

Vec3 bc_right(const Frame& fr, double delta1, double b1, double b2) {
    return fr.M1 + delta1 * (b1 * fr.X11u + b2 * fr.X12u);
}

// Residual: [flow(X_i) - X_{i+1}]_{i=0..N-1}, b1^2 + b2^2 - 1.
// Unknowns:  a3, X_1..X_{N-1}, b1, b2, T.
std::optional<BvpSolution> newton_solve(const Frame& fr, BvpSolution guess, double delta0,
                                        double delta1, double tol, int maxit) {
    const int N = static_cast<int>(guess.nodes.size()) - 1;
    if (N < 4)
        return std::nullopt;
    const int nunk = 3 * N + 1;

    auto residual = [&](const BvpSolution& z, std::vector<Vec3>& ends,
                        std::vector<Vec3>& fends) -> std::optional<Eigen::VectorXd> {
        Eigen::VectorXd F(nunk);
        double h = z.T / N;
        int nst = segment_steps(h);
        ends.resize(static_cast<size_t>(N));
        fends.resize(static_cast<size_t>(N));
        std::vector<Vec3> nodes = z.nodes;
        nodes[0] = bc_left(fr, delta0, z.a3);
        nodes[static_cast<size_t>(N)] = bc_right(fr, delta1, z.b1, z.b2);
        for (int i = 0; i < N; ++i) {
            Vec3 fe;
            Vec3 e = rk4_flow(fr, nodes[static_cast<size_t>(i)], h, nst, &fe);
            ends[static_cast<size_t>(i)] = e;
            fends[static_cast<size_t>(i)] = fe;
            Vec3 d = e - nodes[static_cast<size_t>(i + 1)];
            for (int k = 0; k < 3; ++k) {
                if (!std::isfinite(d[k]))
                    return std::nullopt;
                F[3 * i + k] = d[k];
            }
        }
        F[3 * N] = z.b1 * z.b1 + z.b2 * z.b2 - 1.0;
        return F;
    };

    std::vector<Vec3> ends, fends;
    auto Fopt = residual(guess, ends, fends);
    if (!Fopt) {
        if (het_debug())
            std::fprintf(stderr, "[het] initial residual non-finite (N=%d T=%g)\n", N, guess.T);
        return std::nullopt;
    }
    Eigen::VectorXd F = *Fopt;
    double nF = F.lpNorm<Eigen::Infinity>();
    if (het_debug())
        std::fprintf(stderr, "[het] newton start N=%d T=%g |F|=%g b=(%g,%g)\n", N, guess.T, nF,
                     guess.b1, guess.b2);

    const int col_a3 = 0;
    auto col_node = [](int i) { return 1 + 3 * (i - 1); };
    const int col_b1 = 1 + 3 * (N - 1), col_b2 = col_b1 + 1, col_T = col_b1 + 2;

    // On success, bake the boundary points into the stored nodes so downstream
    // consumers (renode, orbit sampling) start from the actual solution endpoints.
    auto finish = [&](BvpSolution z, double res) {
        z.nodes[0] = bc_left(fr, delta0, z.a3);
        z.nodes[static_cast<size_t>(N)] = bc_right(fr, delta1, z.b1, z.b2);
        z.res = res;
        return z;
    };

    for (int it = 0; it < maxit; ++it) {
        if (nF < tol)
            return finish(guess, nF);
        double h = guess.T / N;
        int nst = segment_steps(h);
        std::vector<Vec3> nodes = guess.nodes;
        nodes[0] = bc_left(fr, delta0, guess.a3);
        nodes[static_cast<size_t>(N)] = bc_right(fr, delta1, guess.b1, guess.b2);

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(nunk) * 8);
        for (int i = 0; i < N; ++i) {
            const Vec3& xi = nodes[static_cast<size_t>(i)];
            double d = 1e-7 * std::max(1.0, std::max({std::abs(xi[0]), std::abs(xi[1]),
                                                      std::abs(xi[2])}));
            Mat3 S;
            for (int k = 0; k < 3; ++k) {
                Vec3 xp = xi;
                xp[k] += d;
                Vec3 ep = rk4_flow(fr, xp, h, nst);
                for (int rr = 0; rr < 3; ++rr)
                    S[rr][k] = (ep[rr] - ends[static_cast<size_t>(i)][rr]) / d;
            }
            if (i == 0) {
                for (int rr = 0; rr < 3; ++rr)
                    trip.emplace_back(rr, col_a3, S[rr][2]); // dX0/da3 = e3
            } else {
                for (int rr = 0; rr < 3; ++rr)
                    for (int k = 0; k < 3; ++k)
                        trip.emplace_back(3 * i + rr, col_node(i) + k, S[rr][k]);
            }
            if (i + 1 < N) {
                for (int k = 0; k < 3; ++k)
                    trip.emplace_back(3 * i + k, col_node(i + 1) + k, -1.0);
            } else {
                for (int rr = 0; rr < 3; ++rr) {
                    trip.emplace_back(3 * i + rr, col_b1, -delta1 * fr.X11u[rr]);
                    trip.emplace_back(3 * i + rr, col_b2, -delta1 * fr.X12u[rr]);
                }
            }
            for (int rr = 0; rr < 3; ++rr)
                trip.emplace_back(3 * i + rr, col_T, fends[static_cast<size_t>(i)][rr] / N);
        }
        trip.emplace_back(3 * N, col_b1, 2.0 * guess.b1);
        trip.emplace_back(3 * N, col_b2, 2.0 * guess.b2);

        // Row/column equilibration: the (b1, b2) columns carry delta1-scale entries
        // next to O(e^{mu03 h}) node columns, which otherwise corrupts the LU
        // solution in the b-subspace and stalls the line search.
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(nunk), cs = Eigen::VectorXd::Zero(nunk);
        for (const auto& tp : trip)
            rs[tp.row()] = std::max(rs[tp.row()], std::abs(tp.value()));
        for (int i = 0; i < nunk; ++i)
            rs[i] = (rs[i] > 0.0) ? 1.0 / rs[i] : 1.0;
        for (const auto& tp : trip)
            cs[tp.col()] = std::max(cs[tp.col()], std::abs(tp.value()) * rs[tp.row()]);
        for (int i = 0; i < nunk; ++i)
            cs[i] = (cs[i] > 0.0) ? 1.0 / cs[i] : 1.0;
        for (auto& tp : trip)
            tp = {tp.row(), tp.col(), tp.value() * rs[tp.row()] * cs[tp.col()]};

        Eigen::SparseMatrix<double> J(nunk, nunk);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) {
            if (het_debug())
                std::fprintf(stderr, "[het] it=%d sparse LU factorization failed\n", it);
            return std::nullopt;
        }
        Eigen::VectorXd dz = lu.solve(-(rs.asDiagonal() * F));
        if (lu.info() != Eigen::Success || !dz.allFinite()) {
            if (het_debug())
                std::fprintf(stderr, "[het] it=%d sparse LU solve failed\n", it);
            return std::nullopt;
        }
        dz = cs.asDiagonal() * dz;

        bool accepted = false;
        double alpha = 1.0;
        for (int ls = 0; ls < 11; ++ls, alpha *= 0.5) {
            BvpSolution cand = guess;
            cand.a3 += alpha * dz[col_a3];
            for (int i = 1; i < N; ++i)
                for (int k = 0; k < 3; ++k)
                    cand.nodes[static_cast<size_t>(i)][k] += alpha * dz[col_node(i) + k];
            cand.b1 += alpha * dz[col_b1];
            cand.b2 += alpha * dz[col_b2];
            cand.T += alpha * dz[col_T];
            if (!(cand.T > 1.0))
                continue;
            std::vector<Vec3> ends2, fends2;
            auto F2 = residual(cand, ends2, fends2);
            if (!F2)
                continue;
            double nF2 = F2->lpNorm<Eigen::Infinity>();
            if (nF2 < nF || nF2 < tol) {
                guess = std::move(cand);
                F = std::move(*F2);
                nF = nF2;
                ends = std::move(ends2);
                fends = std::move(fends2);
                accepted = true;
                break;
            }
        }
        if (het_debug())
            std::fprintf(stderr,
                         "[het] it=%d |F|=%g T=%g alpha=%g |dz|=%g a3=%g b=(%g,%g) accepted=%d\n",
                         it, nF, guess.T, alpha * 2.0, dz.lpNorm<Eigen::Infinity>(), guess.a3,
                         guess.b1, guess.b2, static_cast<int>(accepted));
        if (!accepted)
            return std::nullopt;
    }
    if (nF < tol)
        return finish(guess, nF);
    return std::nullopt;
}

double seg_len_for(double mu03) { return std::min(0.5, 6.0 / mu03); }

// Re-node an existing solution onto a new uniform grid of spacing ~seg_len,
// integrating the segments with the field the solution was computed for.
BvpSolution renode(const Frame& old_frame, const BvpSolution& sol, double seg_len) {
    const int N = static_cast<int>(sol.nodes.size()) - 1;
    double h = sol.T / N;
    int nst = segment_steps(h);
    std::vector<double> ts;
    std::vector<Vec3> xs;
    ts.reserve(static_cast<size_t>(N) * static_cast<size_t>(nst) + 1);
    for (int i = 0; i < N; ++i) {
        Vec3 x = sol.nodes[static_cast<size_t>(i)];
        double t0 = i * h, dt = h / nst;
        for (int s = 0; s < nst; ++s) {
            ts.push_back(t0 + s * dt);
            xs.push_back(x);
            x = rk4_flow(old_frame, x, dt, 1);
        }
    }
    ts.push_back(sol.T);
    xs.push_back(sol.nodes[static_cast<size_t>(N)]);

    int N2 = std::max(8, static_cast<int>(std::lround(sol.T / seg_len)));
    BvpSolution out = sol;
    out.nodes.assign(static_cast<size_t>(N2) + 1, Vec3{});
    size_t k = 0;
    for (int j = 0; j <= N2; ++j) {
        double t = sol.T * j / N2;
        while (k + 2 < ts.size() && ts[k + 1] <= t)
            ++k;
        double span = ts[k + 1] - ts[k];
        double w = (span > 0.0) ? std::clamp((t - ts[k]) / span, 0.0, 1.0) : 0.0;
        out.nodes[static_cast<size_t>(j)] = (1.0 - w) * xs[k] + w * xs[k + 1];
    }
    out.nodes[0] = sol.nodes.front();
    out.nodes[static_cast<size_t>(N2)] = sol.nodes.back();
    return out;
}

// Glue the forward and backward arcs at their closest point pair into an initial
// multiple-shooting guess.
BvpSolution glue_guess(const Frame& fr, const FwdShot& fwd, const Arc& back, double delta1) {
    // Thin both arcs for the pair search.
    auto thin = [](const Arc& a, size_t cap) {
        std::vector<size_t> idx;
        size_t step = std::max<size_t>(1, a.x.size() / cap);
        for (size_t i = 0; i < a.x.size(); i += step)
            idx.push_back(i);
        if (idx.back() != a.x.size() - 1)
            idx.push_back(a.x.size() - 1);
        return idx;
    };
    size_t flim = fwd.imin + 1;
    Arc ftrunc;
    ftrunc.t.assign(fwd.arc.t.begin(), fwd.arc.t.begin() + static_cast<long>(flim));
    ftrunc.x.assign(fwd.arc.x.begin(), fwd.arc.x.begin() + static_cast<long>(flim));
    auto fi = thin(ftrunc, 1500), bi = thin(back, 1500);
    // Only seam near the forward arc's closest approach to M1; otherwise the search
    // can degenerate to a pair near M0, where both arcs pass within their stop balls.
    double tseam_lo = ftrunc.t[fwd.imin] - 6.0;
    std::erase_if(fi, [&](size_t ii) { return ftrunc.t[ii] < tseam_lo; });
    double dbest = 1e300;
    size_t ib = 0, jb = 0;
    for (size_t ii : fi)
        for (size_t jj : bi) {
            double d = dist(ftrunc.x[ii], back.x[jj]);
            if (d < dbest) {
                dbest = d;
                ib = ii;
                jb = jj;
            }
        }

    std::vector<double> ts;
    std::vector<Vec3> xs;
    for (size_t i = 0; i <= ib; ++i) {
        ts.push_back(ftrunc.t[i]);
        xs.push_back(ftrunc.x[i]);
    }
    double toff = ftrunc.t[ib] - back.t[jb];
    for (size_t j = jb + 1; j < back.x.size(); ++j) {
        ts.push_back(back.t[j] + toff);
        xs.push_back(back.x[j]);
    }

    BvpSolution sol;
    sol.T = ts.back();
    double h = seg_len_for(fr.mu03);
    int N = std::max(8, static_cast<int>(std::lround(sol.T / h)));
    sol.nodes.assign(static_cast<size_t>(N) + 1, Vec3{});
    size_t k = 0;
    for (int j = 0; j <= N; ++j) {
        double t = sol.T * j / N;
        while (k + 1 < ts.size() && ts[k + 1] < t)
            ++k;
        if (k + 1 < ts.size() && ts[k + 1] > ts[k]) {
            double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
            w = std::clamp(w, 0.0, 1.0);
            sol.nodes[static_cast<size_t>(j)] = (1.0 - w) * xs[k] + w * xs[k + 1];
        } else {
            sol.nodes[static_cast<size_t>(j)] = xs[k];
        }
    }
    // Project the terminal deviation onto the stable eigenvectors for (b1, b2).
    Vec3 dev = back.x.back() - fr.M1;
    double g11 = dot(fr.X11u, fr.X11u), g12 = dot(fr.X11u, fr.X12u), g22 = dot(fr.X12u, fr.X12u);
    double r1v = dot(dev, fr.X11u), r2v = dot(dev, fr.X12u);
    double det = g11 * g22 - g12 * g12;
    double c1 = (g22 * r1v - g12 * r2v) / det, c2 = (g11 * r2v - g12 * r1v) / det;
    double cn = std::hypot(c1, c2);
    sol.b1 = (cn > 0.0) ? c1 / cn : 0.0;
    sol.b2 = (cn > 0.0) ? c2 / cn : 1.0;
    sol.a3 = fwd.a3;
    return sol;
}

BvpSolution solve_at(const Frame& fr, const HetOptions& opts) {
    Arc back = backward_boundary_arc(fr, kDelta1Bvp, kBackBall, opts.theta_bisect_budget);
    FwdShot fwd = forward_arc(fr, kDelta0Bvp);
    BvpSolution guess = glue_guess(fr, fwd, back, kDelta1Bvp);
    auto sol = newton_solve(fr, guess, kDelta0Bvp, kDelta1Bvp, opts.newton_tol, opts.newton_maxit);
    if (!sol)
        throw SelectionFailed("multiple-shooting Newton failed to converge from the glued guess");
    return *sol;
}

BvpSolution solve_with_continuation(double n, double lambda, const HetOptions& opts,
                                    Frame& fr_out) {
    Frame target = make_frame(n, lambda);
    if (target.mu03 <= opts.mu03_direct) {
        fr_out = target;
        return solve_at(target, opts);
    }
    Frame fr = make_frame(opts.anchor_n, opts.anchor_lambda);
    BvpSolution sol = solve_at(fr, opts);
    double s = 0.0, ds = 0.1;
    int guard = 0;
    while (s < 1.0) {
        if (++guard > 4000)
            throw SelectionFailed("continuation budget exceeded");
        double s2 = std::min(1.0, s + ds);
        double n2 = opts.anchor_n + s2 * (n - opts.anchor_n);
        double l2 = opts.anchor_lambda + s2 * (lambda - opts.anchor_lambda);
        Frame fr2;
        try {
            fr2 = make_frame(n2, l2);
        } catch (const DegenerateLambda&) {
            s2 = std::min(1.0, s2 + 1e-6);
            n2 = opts.anchor_n + s2 * (n - opts.anchor_n);
            l2 = opts.anchor_lambda + s2 * (lambda - opts.anchor_lambda);
            fr2 = make_frame(n2, l2);
        }
        BvpSolution guess = renode(fr, sol, seg_len_for(fr2.mu03));
        auto next = newton_solve(fr2, guess, kDelta0Bvp, kDelta1Bvp, opts.newton_tol,
                                 opts.newton_maxit);
        if (next) {
            fr = fr2;
            sol = *next;
            s = s2;
            ds = std::min(0.25, ds * 1.4);
        } else {
            ds *= 0.5;
            if (ds < 1e-4)
                throw SelectionFailed("continuation step underflow before reaching the target");
        }
    }
    fr_out = fr;
    return sol;
}

// Dense sampling of a converged solution plus asymptotic diagnostics.
Orbit orbit_from_solution(const Frame& fr, const BvpSolution& sol, const HetOptions& opts) {
    Orbit orb;
    orb.n = fr.n;
    orb.lambda = fr.lam;
    orb.T = sol.T;
    const int N = static_cast<int>(sol.nodes.size()) - 1;
    double h = sol.T / N;
    int nst = segment_steps(h);
    double dt = h / nst;
    int stride = std::max(1, static_cast<int>(std::floor(opts.sample_spacing / dt)));
    std::vector<Vec3> nodes = sol.nodes;
    nodes[0] = bc_left(fr, kDelta0Bvp, sol.a3);
    nodes[static_cast<size_t>(N)] = bc_right(fr, kDelta1Bvp, sol.b1, sol.b2);

    // Extend the orbit from the BVP's M0 anchor down to deviation delta_seed; all
    // rates at M0 are positive, so the reverse-time flow contracts onto it.
    {
        std::vector<double> pre_t;
        std::vector<Vec3> pre_x;
        Vec3 x = nodes[0];
        double t = 0.0;
        int guard = 0;
        while (dist(x, fr.M0) > opts.delta_seed && ++guard < 100000) {
            x = rk4_flow(fr, x, -opts.sample_spacing, 4);
            t -= opts.sample_spacing;
            pre_t.push_back(t);
            pre_x.push_back(x);
        }
        for (size_t i = pre_t.size(); i-- > 0;) {
            orb.eta.push_back(pre_t[i]);
            orb.x.push_back(pre_x[i]);
        }
    }

    for (int i = 0; i < N; ++i) {
        Vec3 x = nodes[static_cast<size_t>(i)];
        for (int s = 0; s < nst; ++s) {
            if (s % stride == 0) {
                orb.eta.push_back(i * h + s * dt);
                orb.x.push_back(x);
            }
            x = rk4_flow(fr, x, dt, 1);
        }
    }
    orb.eta.push_back(sol.T);
    orb.x.push_back(nodes[static_cast<size_t>(N)]);

    // Extend from the BVP's M1 anchor down to deviation delta_seed.  Forward
    // integration is unusable here: the 2D stable manifold of M1 coexists with an
    // unstable direction, and any off-manifold roundoff blows up.  Inside the
    // stable subspace the flow is the linear eigen-decay up to O(kDelta1Bvp^2)
    // corrections, so sample that instead.
    {
        double t = sol.T;
        int guard = 0;
        Vec3 x = nodes[static_cast<size_t>(N)];
        while (dist(x, fr.M1) > opts.delta_seed && ++guard < 1000000) {
            t += opts.sample_spacing;
            double s = t - sol.T;
            x = fr.M1 + kDelta1Bvp * (sol.b1 * std::exp(fr.mu11 * s) * fr.X11u +
                                      sol.b2 * std::exp(fr.mu12 * s) * fr.X12u);
            orb.eta.push_back(t);
            orb.x.push_back(x);
        }
    }

    // Normalize eta to start at 0 (the backward extension introduced negative values).
    double eta_first = orb.eta.front();
    for (double& e : orb.eta)
        e -= eta_first;
    orb.T = orb.eta.back();

    orb.endpoint_dev_m0 = dist(orb.x.front(), fr.M0);
    orb.endpoint_dev_m1 = dist(orb.x.back(), fr.M1);
    orb.r_start = orb.x.front()[2];
    orb.q_end = orb.x.back()[1];
    orb.r_end = orb.x.back()[2];

    // Fitted exponents over the [1e-6, ball_fit] windows at both ends.
    auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        size_t m = xs.size();
        for (size_t i = 0; i < m; ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    std::vector<double> e0, l0, e1, l1;
    for (size_t i = 0; i < orb.x.size(); ++i) {
        double d0 = dist(orb.x[i], fr.M0);
        if (d0 >= 1e-6 && d0 <= opts.ball_fit) {
            e0.push_back(orb.eta[i]);
            l0.push_back(std::log(d0));
        }
        double d1 = dist(orb.x[i], fr.M1);
        if (d1 >= 1e-6 && d1 <= opts.ball_fit && orb.x[i][0] > 0.0) {
            e1.push_back(orb.eta[i]);
            l1.push_back(std::log(orb.x[i][0]));
        }
    }
    if (e0.size() >= 20)
        orb.exponent_m0 = slope(e0, l0);
    if (e1.size() >= 20)
        orb.exponent_m1 = slope(e1, l1);
    return orb;
}

} // namespace

std::vector<Orbit> shoot_family(double n, double lambda, int ntheta, double delta_seed) {
    if (!(delta_seed >= 1e-8 && delta_seed <= 1e-4))
        throw DomainError("delta_seed must lie in [1e-8, 1e-4]");
    Frame fr = make_frame(n, lambda);
    std::vector<Orbit> out;
    for (int k = 1; k <= ntheta; ++k) {
        double theta = k * std::numbers::pi / (ntheta + 1);
        Arc raw;
        if (shoot_back(fr, theta, delta_seed, 1e-2, &raw) != BackOutcome::Converged)
            continue;
        Orbit orb;
        orb.n = n;
        orb.lambda = lambda;
        double tend = raw.t.back();
        for (size_t i = raw.t.size(); i-- > 0;) {
            orb.eta.push_back(raw.t[i] - tend);
            orb.x.push_back(raw.x[i]);
        }
        orb.T = orb.eta.back() - orb.eta.front();
        orb.endpoint_dev_m0 = dist(orb.x.front(), fr.M0);
        orb.endpoint_dev_m1 = dist(orb.x.back(), fr.M1);
        out.push_back(std::move(orb));
    }
    if (out.empty())
        throw NoConnection("no backward shot from M1 reached the M0 ball");
    return out;
}

Orbit select_x02_orbit(double n, double lambda, const HetOptions& opts) {
    Frame fr;
    BvpSolution sol = solve_with_continuation(n, lambda, opts, fr);
    return orbit_from_solution(fr, sol, opts);
}

double fit_kappa2(Orbit& orbit, double ball_fit) {
    Frame fr = make_frame(orbit.n, orbit.lambda);
    double g = dot(fr.X02p, fr.X02p);
    // Fit the compensated coefficient k(eta) = y / e^{2 eta} = kappa2 + O(e^{2 eta})
    // as a quadratic in w = e^{2 eta} and take the intercept.  The higher-order
    // contamination is a smooth function of w over the window, so it is absorbed
    // by the slope/curvature terms instead of biasing kappa2 at relative
    // O(ball_fit); data that is exactly kappa2 e^{2 eta} is recovered exactly.
    std::vector<double> ws, ks;
    double wmax = 0.0;
    for (size_t i = 0; i < orbit.x.size(); ++i) {
        double d0 = dist(orbit.x[i], fr.M0);
        if (d0 < 1e-6 || d0 > ball_fit)
            continue;
        double w = std::exp(2.0 * orbit.eta[i]);
        ws.push_back(w);
        ks.push_back(dot(orbit.x[i] - fr.M0, fr.X02p) / (g * w));
        wmax = std::max(wmax, w);
    }
    if (ws.size() < 10)
        throw FitIllConditioned("fewer than 10 samples in the kappa2 fit window");
    // Normal equations for k = a0 + a1 (w/wmax) + a2 (w/wmax)^2.
    double S[5] = {0, 0, 0, 0, 0}, B[3] = {0, 0, 0};
    for (size_t i = 0; i < ws.size(); ++i) {
        double u = ws[i] / wmax;
        double up[5] = {1.0, u, u * u, u * u * u, u * u * u * u};
        for (int p = 0; p < 5; ++p)
            S[p] += up[p];
        for (int p = 0; p < 3; ++p)
            B[p] += up[p] * ks[i];
    }
    double A[3][4] = {{S[0], S[1], S[2], B[0]},
                     {S[1], S[2], S[3], B[1]},
                     {S[2], S[3], S[4], B[2]}};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c]))
                piv = r;
        std::swap(A[c], A[piv]);
        if (std::abs(A[c][c]) < 1e-14 * S[0])
            throw FitIllConditioned("kappa2 fit abscissas are numerically degenerate");
        for (int r = 0; r < 3; ++r) {
            if (r == c)
                continue;
            double f = A[r][c] / A[c][c];
            for (int cc = c; cc < 4; ++cc)
                A[r][cc] -= f * A[c][cc];
        }
    }
    orbit.kappa2 = A[0][3] / A[0][0];
    return orbit.kappa2;
}

void apply_translation(Orbit& orbit, const ModelParams& params) {
    if (!std::isfinite(orbit.kappa2))
        fit_kappa2(orbit);
    double kappa = params.gamma_bar0 * std::pow(params.u_bar0, 1.0 - params.n);
    double eta0 = 0.5 * std::log(orbit.kappa2 / kappa);
    for (double& e : orbit.eta)
        e += eta0;
    orbit.eta0 += eta0;
    fit_kappa2(orbit); // now ~kappa; a second application is a no-op up to fit noise
}

Orbit build_orbit(const ModelParams& params, const HetOptions& opts) {
    Orbit orb = select_x02_orbit(params.n, params.lambda, opts);
    fit_kappa2(orb, opts.ball_fit);
    apply_translation(orb, params);
    return orb;
}

} // namespace shearband::het
