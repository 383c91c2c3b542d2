#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef SHEARBAND_BIN
#error "SHEARBAND_BIN must point at the CLI executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
    std::string cmd = std::string(SHEARBAND_BIN) + " " + args + " >" + so.string() + " 2>" +
                      se.string();
    int status = std::system(cmd.c_str());
    RunResult r;
#ifdef _WIN32
    r.exit_code = status;
#else
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

std::string first_line(const std::string& s) {
    auto pos = s.find('\n');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

fs::path sandbox(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "shearband_cli_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("spectrum writes csv, json and a manifest") {
    fs::path d = sandbox("spectrum");
    auto r = run_cli("spectrum --n 0.3 --jmax 16 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    std::string csv = slurp(d / "out" / "spectrum.csv");
    CHECK(first_line(csv) == "j,lambda_plus,lambda_minus,bound");

    json j = json::parse(slurp(d / "out" / "spectrum.json"));
    CHECK(j["schema_version"] == "1");
    CHECK(j["classification"] == "Turing");
    CHECK(j["modes"].size() == 17);

    json m = json::parse(slurp(d / "out" / "spectrum_manifest.json"));
    CHECK(m["schema_version"] == "1");
    CHECK(m["subcommand"] == "spectrum");
    CHECK(m["params"]["n"] == 0.3);
    for (const auto& f : m["outputs"])
        CHECK(fs::exists(d / "out" / f.get<std::string>()));
}

TEST_CASE("effective csv header") {
    fs::path d = sandbox("effective");
    auto r = run_cli("effective --n 0.3 --eps 0.01 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    CHECK(first_line(slurp(d / "out" / "effective.csv")) == "xi,symbol");
}

TEST_CASE("constraint violations exit 2 with a one-line message") {
    fs::path d = sandbox("constraint");
    auto r = run_cli("equilibria --n 0.3 --lambda 10 --out " + (d / "out").string(), d);
    CHECK(r.exit_code == 2);
    CHECK(r.err.rfind("error: constraint:", 0) == 0);
    // Exactly one line on stderr.
    CHECK(r.err.find('\n') == r.err.size() - 1);

    // Unknown flags are usage errors, also exit 2.
    auto r2 = run_cli("spectrum --does-not-exist 1", d);
    CHECK(r2.exit_code == 2);

    // Unknown subcommand.
    auto r3 = run_cli("frobnicate", d);
    CHECK(r3.exit_code == 2);
}

TEST_CASE("help exits 0") {
    fs::path d = sandbox("help");
    CHECK(run_cli("--help", d).exit_code == 0);
    CHECK(run_cli("spectrum --help", d).exit_code == 0);
}

TEST_CASE("equilibria json content") {
    fs::path d = sandbox("equilibria");
    auto r = run_cli("equilibria --n 0.3 --lambda 2 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(slurp(d / "out" / "equilibria.json"));
    REQUIRE(j["equilibria"].size() == 4);
    CHECK(j["equilibria"][0]["label"] == "M0");
    CHECK(j["equilibria"][0]["point"][2].get<double>() == doctest::Approx(1.0 + 4.0 / 1.7));
    CHECK(j["equilibria"][1]["eigenvalues"][0].get<double>() == doctest::Approx(-1.0));
}

TEST_CASE("config file supplies defaults; flags take precedence") {
    fs::path d = sandbox("config");
    {
        std::ofstream cfg(d / "run.cfg");
        cfg << "# comment\nn = 0.9\njunk_line_without_equals\n";
    }
    auto r1 = run_cli("spectrum --jmax 4 --config " + (d / "run.cfg").string() + " --out " +
                          (d / "o1").string(),
                      d);
    REQUIRE(r1.exit_code == 0);
    CHECK(json::parse(slurp(d / "o1" / "spectrum.json"))["n"] == 0.9);

    auto r2 = run_cli("spectrum --jmax 4 --n 0.3 --config " + (d / "run.cfg").string() +
                          " --out " + (d / "o2").string(),
                      d);
    REQUIRE(r2.exit_code == 0);
    CHECK(json::parse(slurp(d / "o2" / "spectrum.json"))["n"] == 0.3);
}

TEST_CASE("pde-linrate matches the dispersion relation") {
    fs::path d = sandbox("linrate");
    auto r = run_cli("pde-linrate --n 0.3 --j 1 --N 64 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(slurp(d / "out" / "pde_linrate.json"));
    CHECK(j["rel_err"].get<double>() < 0.02);
    CHECK(j["predicted"].get<double>() == doctest::Approx(1.3105878).epsilon(1e-5));
}

TEST_CASE("orbit subcommand emits csv plus json sidecar") {
    fs::path d = sandbox("orbit");
    auto r = run_cli("orbit --n 0.3 --lambda 2 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    CHECK(first_line(slurp(d / "out" / "orbit.csv")) == "eta,p,q,r");
    json j = json::parse(slurp(d / "out" / "orbit.json"));
    CHECK(j["q_end"].get<double>() == doctest::Approx(0.85).epsilon(1e-3));
    CHECK(j["exponent_m0"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(j["endpoint_dev_m0"].get<double>() < 1e-5);
}

TEST_CASE("profiles csv header") {
    fs::path d = sandbox("profiles");
    auto r = run_cli("profiles --n 0.3 --lambda 2 --out " + (d / "out").string(), d);
    REQUIRE(r.exit_code == 0);
    CHECK(first_line(slurp(d / "out" / "profiles.csv")) ==
          "xi,v_bar,gamma_bar,sigma_bar,u_bar");
    json j = json::parse(slurp(d / "out" / "profiles.json"));
    CHECK(j["gamma_bar_limit0"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
}

} // TEST_SUITE
