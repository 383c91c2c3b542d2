// shearband: numerical laboratory for shear-band localization in a
// rate-dependent strain-softening material (sigma = gamma^-1 gamma_t^n).
//
// Subcommands: spectrum, effective, equilibria, orbit, profiles, fields,
// pde-linrate, pde-residual, reproduce-figures.
// Exit codes: 0 success, 2 constraint/validation error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearband/effective.hpp"
#include "shearband/errors.hpp"
#include "shearband/heteroclinic.hpp"
#include "shearband/linstab.hpp"
#include "shearband/model.hpp"
#include "shearband/output.hpp"
#include "shearband/pdecheck.hpp"
#include "shearband/pqr.hpp"
#include "shearband/reconstruct.hpp"

namespace sb = shearband;
using nlohmann::json;

namespace {

struct Ctx {
    // Common
    std::string out = "out";
    std::vector<std::string> formats = {"csv", "json", "svg"};
    std::string config;
    double rtol = 1e-10, atol = 1e-12, hmax = 0.5;
    long max_steps = 1000000;
    // Model
    double n = NAN, lambda = NAN, gamma_bar0 = NAN, u_bar0 = NAN, gamma0 = NAN;
    double seed_delta = 1e-6;

    // Each key is registered by several subcommands; all entries share one target.
    std::map<std::string, std::pair<std::vector<CLI::Option*>, double*>> cfg_doubles;
    std::vector<std::string> written;

    void add_common(CLI::App* cmd) {
        cmd->add_option("--out", out, "output directory")->capture_default_str();
        cmd->add_option("--format", formats, "output formats (csv json svg)")
            ->capture_default_str();
        cmd->add_option("--config", config, "flat key=value config file");
        reg(cmd->add_option("--rtol", rtol, "integrator relative tolerance"), "rtol", &rtol);
        reg(cmd->add_option("--atol", atol, "integrator absolute tolerance"), "atol", &atol);
        reg(cmd->add_option("--hmax", hmax, "integrator max step"), "hmax", &hmax);
        cmd->add_option("--max-steps", max_steps, "integrator step budget");
    }
    void add_model(CLI::App* cmd, bool need_lambda = true) {
        reg(cmd->add_option("--n", n, "rate sensitivity n"), "n", &n);
        if (need_lambda) {
            reg(cmd->add_option("--lambda", lambda, "focusing rate lambda"), "lambda", &lambda);
            reg(cmd->add_option("--gamma-bar0", gamma_bar0, "profile strain at the origin"),
                "gamma_bar0", &gamma_bar0);
            reg(cmd->add_option("--u-bar0", u_bar0, "profile strain rate at the origin"),
                "u_bar0", &u_bar0);
            reg(cmd->add_option("--gamma0", gamma0, "base strain gamma0"), "gamma0", &gamma0);
        }
    }
    void reg(CLI::Option* opt, const std::string& key, double* target) {
        auto& entry = cfg_doubles[key];
        entry.first.push_back(opt);
        entry.second = target;
    }

    // Precedence: CLI flag > config file > default.
    void apply_config() {
        if (config.empty())
            return;
        std::ifstream f(config);
        if (!f)
            throw sb::ConstraintViolation("cannot read config file " + config);
        std::string line;
        while (std::getline(f, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            auto trim = [](std::string s) {
                size_t a = s.find_first_not_of(" \t\r");
                size_t b = s.find_last_not_of(" \t\r");
                return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
            };
            std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
            auto it = cfg_doubles.find(key);
            if (it == cfg_doubles.end())
                continue;
            bool set_on_cli = false;
            for (const CLI::Option* opt : it->second.first)
                set_on_cli = set_on_cli || opt->count() > 0;
            if (!set_on_cli)
                *it->second.second = std::stod(val);
        }
    }

    sb::RawParams raw_params() const {
        sb::RawParams r;
        if (!std::isnan(n))
            r.n = n;
        if (!std::isnan(lambda))
            r.lambda = lambda;
        if (!std::isnan(gamma_bar0))
            r.gamma_bar0 = gamma_bar0;
        if (!std::isnan(u_bar0))
            r.u_bar0 = u_bar0;
        if (!std::isnan(gamma0))
            r.gamma0 = gamma0;
        return r;
    }

    bool wants(const std::string& f) const {
        for (const auto& s : formats)
            if (s == f)
                return true;
        return false;
    }
    std::string path(const std::string& name) const {
        return (std::filesystem::path(out) / name).string();
    }
    void emit(const std::string& name, const std::string& content) {
        sb::output::write_file(path(name), content);
        written.push_back(name);
    }
    void manifest(const std::string& sub, const json& params) {
        json m;
        m["schema_version"] = "1";
        m["subcommand"] = sub;
        m["params"] = params;
        m["outputs"] = written;
        sb::output::write_file(path(sub + "_manifest.json"), m.dump(2) + "\n");
    }
};

json params_json(const sb::ModelParams& p) {
    return json{{"n", p.n},
                {"lambda", p.lambda},
                {"gamma_bar0", p.gamma_bar0},
                {"u_bar0", p.u_bar0},
                {"gamma0", p.gamma0}};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void run_spectrum(Ctx& c, int jmax) {
    if (std::isnan(c.n) || c.n < 0.0)
        throw sb::ConstraintViolation("spectrum requires --n >= 0");
    auto spec = sb::linstab::spectrum(c.n, jmax);
    double bound = (c.n > 0.0 && c.n < 1.0) ? sb::linstab::turing_bound(c.n)
                                            : std::numeric_limits<double>::infinity();
    sb::output::Column cj{"j", {}}, cp{"lambda_plus", {}}, cm{"lambda_minus", {}},
        cb{"bound", {}};
    for (const auto& e : spec.entries) {
        cj.values.push_back(e.j);
        cp.values.push_back(e.lambda_plus);
        cm.values.push_back(e.lambda_minus);
        cb.values.push_back(bound);
    }
    if (c.wants("csv"))
        c.emit("spectrum.csv", sb::output::csv_table({cj, cp, cm, cb}));
    if (c.wants("json")) {
        json j;
        j["schema_version"] = "1";
        j["n"] = c.n;
        j["bound"] = bound;
        const char* cls[] = {"Hadamard", "Turing", "Stable"};
        j["classification"] = cls[static_cast<int>(sb::linstab::classify(c.n))];
        j["modes"] = json::array();
        for (const auto& e : spec.entries)
            j["modes"].push_back({{"j", e.j},
                                  {"lambda_plus", e.lambda_plus},
                                  {"lambda_minus", e.lambda_minus},
                                  {"constrained", e.constrained}});
        c.emit("spectrum.json", j.dump(2) + "\n");
    }
    if (c.wants("svg")) {
        sb::output::Series s{"lambda_plus", {}, {}};
        for (const auto& e : spec.entries)
            if (e.j >= 1) {
                s.x.push_back(e.j);
                s.y.push_back(e.lambda_plus);
            }
        c.emit("spectrum.svg", sb::output::svg_plot("growth rate vs mode", {s}, false));
    }
    c.manifest("spectrum", json{{"n", c.n}, {"jmax", jmax}});
}

void run_effective(Ctx& c, double eps, double ximax, int nxi) {
    if (std::isnan(c.n))
        throw sb::ConstraintViolation("effective requires --n");
    sb::output::Column cx{"xi", {}}, cs{"symbol", {}};
    for (int i = 0; i <= nxi; ++i) {
        double xi = ximax * i / nxi;
        cx.values.push_back(xi);
        cs.values.push_back(sb::effective::linear_symbol(xi, c.n, eps));
    }
    if (c.wants("csv"))
        c.emit("effective.csv", sb::output::csv_table({cx, cs}));
    if (c.wants("json")) {
        json j;
        j["schema_version"] = "1";
        j["n"] = c.n;
        j["eps"] = eps;
        j["cutoff_xi"] = sb::effective::cutoff_xi(c.n, eps);
        j["cutoff_bound"] = sb::effective::cutoff_bound(c.n, eps);
        c.emit("effective.json", j.dump(2) + "\n");
    }
    if (c.wants("svg"))
        c.emit("effective.svg",
               sb::output::svg_plot("effective dispersion", {{"symbol", cx.values, cs.values}},
                                    false));
    c.manifest("effective", json{{"n", c.n}, {"eps", eps}, {"ximax", ximax}});
}

const char* classify_eq(const std::array<sb::pqr::EigenPair, 3>& eig) {
    int pos = 0;
    for (const auto& e : eig)
        if (e.mu > 0)
            ++pos;
    if (pos == 3)
        return "unstable node";
    if (pos == 0)
        return "stable node";
    return "saddle";
}

void run_equilibria(Ctx& c) {
    if (std::isnan(c.n) || std::isnan(c.lambda))
        throw sb::ConstraintViolation("equilibria requires --n and --lambda");
    auto eqs = sb::pqr::equilibria(c.n, c.lambda);
    json j;
    j["schema_version"] = "1";
    j["n"] = c.n;
    j["lambda"] = c.lambda;
    j["equilibria"] = json::array();
    for (const auto& e : eqs) {
        json je;
        je["label"] = e.label;
        je["point"] = {e.point[0], e.point[1], e.point[2]};
        je["classification"] = classify_eq(e.eigenpairs);
        je["eigenvalues"] = json::array();
        je["eigenvectors"] = json::array();
        for (const auto& ep : e.eigenpairs) {
            je["eigenvalues"].push_back(ep.mu);
            je["eigenvectors"].push_back({ep.X[0], ep.X[1], ep.X[2]});
        }
        j["equilibria"].push_back(je);
    }
    c.emit("equilibria.json", j.dump(2) + "\n");
    c.manifest("equilibria", json{{"n", c.n}, {"lambda", c.lambda}});
}

sb::het::Orbit make_orbit(Ctx& c, const sb::ModelParams& p) {
    sb::het::HetOptions opts;
    opts.delta_seed = c.seed_delta;
    return sb::het::build_orbit(p, opts);
}

json orbit_sidecar(const sb::het::Orbit& orb) {
    return json{{"schema_version", "1"},
                {"n", orb.n},
                {"lambda", orb.lambda},
                {"kappa2", orb.kappa2},
                {"eta0", orb.eta0},
                {"exponent_m0", orb.exponent_m0},
                {"exponent_m1", orb.exponent_m1},
                {"endpoint_dev_m0", orb.endpoint_dev_m0},
                {"endpoint_dev_m1", orb.endpoint_dev_m1},
                {"r_start", orb.r_start},
                {"q_end", orb.q_end},
                {"r_end", orb.r_end},
                {"T", orb.T}};
}

void emit_orbit(Ctx& c, const sb::het::Orbit& orb, const std::string& stem) {
    if (c.wants("csv")) {
        sb::output::Column ce{"eta", orb.eta}, cp{"p", {}}, cq{"q", {}}, cr{"r", {}};
        for (const auto& x : orb.x) {
            cp.values.push_back(x[0]);
            cq.values.push_back(x[1]);
            cr.values.push_back(x[2]);
        }
        c.emit(stem + ".csv", sb::output::csv_table({ce, cp, cq, cr}));
    }
    if (c.wants("json"))
        c.emit(stem + ".json", orbit_sidecar(orb).dump(2) + "\n");
    if (c.wants("svg")) {
        sb::output::Series sp{"p", orb.eta, {}}, sq{"q", orb.eta, {}}, sr{"r", orb.eta, {}};
        for (const auto& x : orb.x) {
            sp.y.push_back(x[0]);
            sq.y.push_back(x[1]);
            sr.y.push_back(x[2]);
        }
        c.emit(stem + ".svg",
               sb::output::svg_plot("heteroclinic orbit", {sp, sq, sr}, false));
    }
}

void run_orbit(Ctx& c) {
    sb::ModelParams p = sb::validate(c.raw_params());
    auto orb = make_orbit(c, p);
    emit_orbit(c, orb, "orbit");
    c.manifest("orbit", params_json(p));
}

void emit_profile(Ctx& c, const sb::reconstruct::Profile& pr, const std::string& stem) {
    if (c.wants("csv"))
        c.emit(stem + ".csv", sb::output::csv_table({{"xi", pr.xi},
                                                     {"v_bar", pr.v_bar},
                                                     {"gamma_bar", pr.gamma_bar},
                                                     {"sigma_bar", pr.sigma_bar},
                                                     {"u_bar", pr.u_bar}}));
    if (c.wants("json")) {
        auto lim = sb::reconstruct::limits_at_zero(pr);
        json j;
        j["schema_version"] = "1";
        j["gamma_bar_limit0"] = lim[0];
        j["u_bar_limit0"] = lim[1];
        j["sigma_bar_limit0"] = lim[2];
        j["gamma_bar_xx0"] = pr.gamma_bar_xx0;
        j["u_bar_xx0"] = pr.u_bar_xx0;
        j["xi_min"] = pr.xi_min;
        j["xi_max"] = pr.xi_max;
        c.emit(stem + ".json", j.dump(2) + "\n");
    }
}

void run_profiles(Ctx& c) {
    sb::ModelParams p = sb::validate(c.raw_params());
    auto orb = make_orbit(c, p);
    auto pr = sb::reconstruct::profile_from_orbit(orb, p);
    emit_profile(c, pr, "profiles");
    c.manifest("profiles", params_json(p));
}

void run_fields(Ctx& c, const std::vector<double>& times, double xmax, int nx) {
    sb::ModelParams p = sb::validate(c.raw_params());
    auto orb = make_orbit(c, p);
    auto pr = sb::reconstruct::profile_from_orbit(orb, p);
    std::vector<double> grid;
    for (int i = 0; i <= nx; ++i)
        grid.push_back(xmax * i / nx);
    std::vector<sb::output::Series> sv, sg, ss, su;
    for (size_t k = 0; k < times.size(); ++k) {
        auto fr = sb::reconstruct::fields_at_time(pr, times[k], grid);
        if (c.wants("csv"))
            c.emit("fields_t" + std::to_string(k) + ".csv",
                   sb::output::csv_table({{"x", fr.x},
                                          {"v", fr.v},
                                          {"gamma", fr.gamma},
                                          {"sigma", fr.sigma},
                                          {"u", fr.u}}));
        std::string lbl = "t=" + sb::output::fmt(times[k]);
        sv.push_back({lbl, fr.x, fr.v});
        sg.push_back({lbl, fr.x, fr.gamma});
        ss.push_back({lbl, fr.x, fr.sigma});
        su.push_back({lbl, fr.x, fr.u});
    }
    if (c.wants("svg")) {
        c.emit("fields_v.svg", sb::output::svg_plot("v", sv, false));
        c.emit("fields_gamma.svg", sb::output::svg_plot("gamma", sg, true));
        c.emit("fields_sigma.svg", sb::output::svg_plot("sigma", ss, true));
        c.emit("fields_u.svg", sb::output::svg_plot("u", su, true));
    }
    json jp = params_json(p);
    jp["times"] = times;
    jp["xmax"] = xmax;
    jp["nx"] = nx;
    c.manifest("fields", jp);
}

void run_pde_linrate(Ctx& c, int j, int N, double tau_end) {
    if (std::isnan(c.n))
        throw sb::ConstraintViolation("pde-linrate requires --n");
    double measured = sb::pdecheck::run_linearized(j, c.n, tau_end, N);
    double predicted = sb::linstab::eigenvalues(j, c.n)[0];
    json out;
    out["schema_version"] = "1";
    out["n"] = c.n;
    out["j"] = j;
    out["N"] = N;
    out["measured"] = measured;
    out["predicted"] = predicted;
    out["rel_err"] = std::abs(measured - predicted) / std::max(std::abs(predicted), 1e-12);
    c.emit("pde_linrate.json", out.dump(2) + "\n");
    c.manifest("pde-linrate", json{{"n", c.n}, {"j", j}, {"N", N}, {"tau_end", tau_end}});
}

void run_pde_residual(Ctx& c, const std::vector<double>& times, double xi_window, int nx,
                      double dt_frac) {
    sb::ModelParams p = sb::validate(c.raw_params());
    auto orb = make_orbit(c, p);
    auto pr = sb::reconstruct::profile_from_orbit(orb, p);
    sb::output::Column ct{"t", {}}, m1{"res_mom_Linf", {}}, m2{"res_mom_L2", {}},
        k1{"res_kin_Linf", {}}, k2{"res_kin_L2", {}};
    for (double t : times) {
        double xmax = xi_window * std::pow(1.0 + t / p.gamma0, -p.lambda);
        auto r = sb::pdecheck::selfsimilar_residual(pr, {t}, xmax, nx, dt_frac)[0];
        ct.values.push_back(t);
        m1.values.push_back(r.mom_linf);
        m2.values.push_back(r.mom_l2);
        k1.values.push_back(r.kin_linf);
        k2.values.push_back(r.kin_l2);
    }
    c.emit("pde_residual.csv", sb::output::csv_table({ct, m1, m2, k1, k2}));
    json jp = params_json(p);
    jp["times"] = times;
    jp["xi_window"] = xi_window;
    jp["nx"] = nx;
    jp["dt_frac"] = dt_frac;
    c.manifest("pde-residual", jp);
}

void run_figures(Ctx& c, int figure) {
    if (figure == 3) {
        if (std::isnan(c.n))
            c.n = 0.3;
        if (std::isnan(c.lambda))
            c.lambda = 2.0;
        sb::ModelParams p = sb::validate(c.raw_params());
        auto orb = make_orbit(c, p);
        emit_orbit(c, orb, "fig3_orbit");
        c.manifest("reproduce-figures", params_json(p));
        return;
    }
    if (figure != 4)
        throw sb::ConstraintViolation("--figure must be 3 or 4");
    if (std::isnan(c.n))
        c.n = 0.05;
    if (std::isnan(c.lambda))
        c.lambda = 10.0;
    sb::ModelParams p = sb::validate(c.raw_params());
    auto orb = make_orbit(c, p);
    emit_orbit(c, orb, "fig4_orbit");
    auto pr = sb::reconstruct::profile_from_orbit(orb, p);
    emit_profile(c, pr, "fig4_profile");

    std::vector<double> taus = {0.0, 0.35, 0.7, 1.05, 1.4, 1.75, 2.1};
    const double xmax = 0.2;
    const int nx = 400;
    std::vector<double> grid;
    for (int i = 0; i <= nx; ++i)
        grid.push_back(xmax * i / nx);
    std::vector<sb::output::Series> sv, sg, ss, su;
    std::vector<double> logs_s, log_gc, log_uc, log_sc, tlist;
    for (size_t k = 0; k < taus.size(); ++k) {
        double t = sb::t_of_tau(taus[k], p.gamma0);
        auto fr = sb::reconstruct::fields_at_time(pr, t, grid);
        if (c.wants("csv"))
            c.emit("fig4_fields_t" + std::to_string(k) + ".csv",
                   sb::output::csv_table({{"x", fr.x},
                                          {"v", fr.v},
                                          {"gamma", fr.gamma},
                                          {"sigma", fr.sigma},
                                          {"u", fr.u}}));
        std::string lbl = "t=" + sb::output::fmt(t);
        sv.push_back({lbl, fr.x, fr.v});
        sg.push_back({lbl, fr.x, fr.gamma});
        ss.push_back({lbl, fr.x, fr.sigma});
        su.push_back({lbl, fr.x, fr.u});
        tlist.push_back(t);
        logs_s.push_back(std::log(1.0 + t / p.gamma0));
        log_gc.push_back(std::log(fr.gamma[0]));
        log_uc.push_back(std::log(fr.u[0]));
        log_sc.push_back(std::log(fr.sigma[0]));
    }
    if (c.wants("svg")) {
        c.emit("fig4_v.svg", sb::output::svg_plot("v", sv, false));
        c.emit("fig4_gamma.svg", sb::output::svg_plot("gamma", sg, true));
        c.emit("fig4_sigma.svg", sb::output::svg_plot("sigma", ss, true));
        c.emit("fig4_u.svg", sb::output::svg_plot("u", su, true));
    }
    json summary;
    summary["schema_version"] = "1";
    summary["params"] = params_json(p);
    summary["times"] = tlist;
    summary["gamma_center_exponent"] = fit_slope(logs_s, log_gc);
    summary["u_center_exponent"] = fit_slope(logs_s, log_uc);
    summary["sigma_center_exponent"] = fit_slope(logs_s, log_sc);
    summary["gamma_center_exponent_predicted"] = 1.0 + 2.0 * p.lambda / (2.0 - p.n);
    summary["u_center_exponent_predicted"] = 2.0 * p.lambda / (2.0 - p.n);
    summary["sigma_center_exponent_predicted"] =
        -1.0 - 2.0 * p.lambda * (1.0 - p.n) / (2.0 - p.n);
    c.emit("fig4_summary.json", summary.dump(2) + "\n");
    c.manifest("reproduce-figures", params_json(p));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shear-band localization laboratory"};
    app.require_subcommand(1);
    Ctx c;

    int jmax = 64;
    auto* sc_spectrum = app.add_subcommand("spectrum", "linearized mode spectrum");
    c.add_common(sc_spectrum);
    c.add_model(sc_spectrum, false);
    sc_spectrum->add_option("--jmax", jmax, "largest mode index")->capture_default_str();

    double eps = 0.01, ximax = 10.0;
    int nxi = 400;
    auto* sc_eff = app.add_subcommand("effective", "effective-equation dispersion");
    c.add_common(sc_eff);
    c.add_model(sc_eff, false);
    sc_eff->add_option("--eps", eps, "expansion parameter")->capture_default_str();
    sc_eff->add_option("--ximax", ximax, "largest frequency")->capture_default_str();
    sc_eff->add_option("--nxi", nxi, "frequency samples")->capture_default_str();

    auto* sc_eq = app.add_subcommand("equilibria", "equilibria of the autonomous system");
    c.add_common(sc_eq);
    c.add_model(sc_eq);

    auto* sc_orbit = app.add_subcommand("orbit", "heteroclinic orbit construction");
    c.add_common(sc_orbit);
    c.add_model(sc_orbit);
    sc_orbit->add_option("--seed-delta", c.seed_delta, "boundary offset at the equilibria")
        ->capture_default_str();

    auto* sc_prof = app.add_subcommand("profiles", "self-similar profiles");
    c.add_common(sc_prof);
    c.add_model(sc_prof);
    sc_prof->add_option("--seed-delta", c.seed_delta, "boundary offset at the equilibria");

    std::vector<double> times = {0.0, 1.0};
    double xmax = 0.5;
    int nx = 400;
    auto* sc_fields = app.add_subcommand("fields", "reconstructed physical fields");
    c.add_common(sc_fields);
    c.add_model(sc_fields);
    sc_fields->add_option("--times", times, "frame times")->capture_default_str();
    sc_fields->add_option("--xmax", xmax, "half-width of the spatial window")
        ->capture_default_str();
    sc_fields->add_option("--nx", nx, "spatial samples")->capture_default_str();

    int jmode = 1, Ngrid = 256;
    double tau_end = 3.0;
    auto* sc_lin = app.add_subcommand("pde-linrate", "linearized PDE growth-rate check");
    c.add_common(sc_lin);
    c.add_model(sc_lin, false);
    sc_lin->add_option("--j", jmode, "mode index")->capture_default_str();
    sc_lin->add_option("--N", Ngrid, "grid intervals")->capture_default_str();
    sc_lin->add_option("--tau-end", tau_end, "integration horizon")->capture_default_str();

    std::vector<double> rtimes = {1.0};
    double xi_window = 2.0, dt_frac = 1e-4;
    int rnx = 1000;
    auto* sc_res = app.add_subcommand("pde-residual", "self-similar PDE residual");
    c.add_common(sc_res);
    c.add_model(sc_res);
    sc_res->add_option("--times", rtimes, "evaluation times")->capture_default_str();
    sc_res->add_option("--xi-window", xi_window, "similarity window half-width")
        ->capture_default_str();
    sc_res->add_option("--nx", rnx, "spatial samples")->capture_default_str();
    sc_res->add_option("--dt-frac", dt_frac, "time-stencil fraction")->capture_default_str();

    int figure = 0;
    auto* sc_fig = app.add_subcommand("reproduce-figures", "rebuild the reference figures");
    c.add_common(sc_fig);
    c.add_model(sc_fig);
    sc_fig->add_option("--figure", figure, "figure number (3 or 4)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        c.apply_config();
        if (sc_spectrum->parsed())
            run_spectrum(c, jmax);
        else if (sc_eff->parsed())
            run_effective(c, eps, ximax, nxi);
        else if (sc_eq->parsed())
            run_equilibria(c);
        else if (sc_orbit->parsed())
            run_orbit(c);
        else if (sc_prof->parsed())
            run_profiles(c);
        else if (sc_fields->parsed())
            run_fields(c, times, xmax, nx);
        else if (sc_lin->parsed())
            run_pde_linrate(c, jmode, Ngrid, tau_end);
        else if (sc_res->parsed())
            run_pde_residual(c, rtimes, xi_window, rnx, dt_frac);
        else if (sc_fig->parsed())
            run_figures(c, figure);
    } catch (const sb::ConstraintViolation& e) {
        std::cerr << "error: constraint: " << e.what() << "\n";
        return 2;
    } catch (const sb::NumericalFailure& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
