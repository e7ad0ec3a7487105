#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <numbers>
#include <string>

#include "catforge/config.hpp"
#include "catforge/run.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace catforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("catforge_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

RunConfig preset(const std::string& name, const std::string& mode, std::vector<std::string> sets = {}) {
    return parse_config(ConfigSources{"", mode, name, std::move(sets)});
}

int run_in(const RunConfig& cfg, const fs::path& dir, int workers = 1) {
    std::ostringstream log;
    return run(cfg, RunOptions{dir, workers}, log);
}

int cli(const std::string& args) {
    const int status = std::system((std::string(CATFORGE_BIN) + " " + args + " 2>/dev/null").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    if (header) {
        std::stringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream s(line);
        std::string cell;
        while (std::getline(s, cell, ',')) row.push_back(cell.empty() ? std::nan("") : std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

TEST_CASE("run resolution") {
    const RunConfig cfg = preset("fig2", "open");
    const ResolvedRun r = resolve_run(cfg, cfg.params, true);
    CHECK(r.t_d == 12.6664);
    CHECK(r.t_end == 12.6664);
    CHECK(r.n_max == 30);
    CHECK(r.dt * r.solver().steps() == doctest::Approx(r.t_end).epsilon(1e-14));

    const RunConfig closed = preset("figS1", "closed");
    const ResolvedRun rc = resolve_run(closed, closed.params, false);
    CHECK(rc.t_end == doctest::Approx(2.0 * rc.derived.t0()).epsilon(1e-14));
    CHECK(rc.n_max == default_cutoff(2.0).n_max());

    // without t_d the candidate closest to t0 is used
    const RunConfig bare = preset("figS1", "closed", {"t_end_over_t0=1"});
    const ResolvedRun rb = resolve_run(bare, bare.params, false);
    CHECK(std::abs(rb.t_d - rb.derived.t0()) < 2.0 * std::numbers::pi / bare.params.omega_0);
    CHECK_FALSE(rb.notes.empty());
}

TEST_CASE("matrix json layout") {
    ComplexMatrix m(2, 3);
    m << complex(1, 2), complex(3, 4), complex(5, 6), complex(7, 8), complex(9, 10), complex(11, 12);
    const auto j = matrix_to_json(m);
    CHECK(j["dim"] == nlohmann::json::array({2, 3}));
    CHECK(j["data"][2] == 3.0);
    CHECK(j["data"][7] == 8.0);
    CHECK(matrix_from_json(j) == m);
}

TEST_CASE("amplitude table preset") {
    const fs::path dir = scratch("fig1a");
    REQUIRE(run_in(preset("fig1a", "sweep"), dir) == 0);
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "sweep_beta_max.csv", &header);
    CHECK(header == std::vector<std::string>{"xi", "delta_over_g0", "beta_max"});
    REQUIRE(rows.size() == 92);
    for (const auto& row : rows) {
        const double expect = std::abs(bessel_j(2, 2.0 * row[0])) / row[1];
        CHECK(row[2] == doctest::Approx(expect).epsilon(1e-11));
    }
    CHECK(rows.front()[0] == 1.5271);
    CHECK(rows.back()[0] == 4.9847);
    CHECK(rows.back()[1] == doctest::Approx(0.5));
}

TEST_CASE("single-mode comparison preset") {
    const fs::path dir = scratch("figS1");
    REQUIRE(run_in(preset("figS1", "closed"), dir) == 0);
    std::vector<std::string> header;
    const auto rows = read_csv(dir / "closed.csv", &header);
    CHECK(header == closed_columns());
    const auto single = read_csv(dir / "single_mode.csv", &header);
    CHECK(header.back() == "x_closed_form");
    for (const auto& row : single) CHECK(std::abs(row[1] - row[2]) < 1e-6);
    const auto m = manifest(dir);
    CHECK(m["invariants"]["max_norm_drift"].get<double>() < 1e-8);
    CHECK(std::isnan(rows.back()[7]));
}

TEST_CASE("manifest contents and round trip") {
    const fs::path dir = scratch("manifest");
    const RunConfig cfg = preset("fig2", "open", {"t_d=1.5", "snapshot_times=0.5"});
    REQUIRE(run_in(cfg, dir) == 0);
    const auto m = manifest(dir);
    for (const char* k : {"params", "derived", "solver", "wall_time_s", "invariants", "config", "overrides", "outputs"}) {
        CHECK_MESSAGE(m.contains(k), k);
    }
    for (const char* k : {"omega_c", "omega_m", "g0", "xi", "n0", "omega_0", "gamma_c", "gamma_m", "n_th"}) {
        CHECK_MESSAGE(m["params"].contains(k), k);
    }
    CHECK(m["derived"].contains("g"));
    CHECK(m["derived"].contains("delta"));
    CHECK(m["solver"]["n_max"] == 30);
    CHECK(m["solver"]["dt"].get<double>() > 0.0);
    CHECK(m["invariants"]["max_trace_drift"].get<double>() < 1e-8);
    CHECK(m["overrides"].size() == 1);

    const RunConfig back = config_from_manifest(m);
    CHECK(back.canonical() == cfg.canonical());
    CHECK(back.params == cfg.params);

    const auto snap = nlohmann::json::parse(slurp(dir / "snapshot_0.json"));
    const ComplexMatrix rho = matrix_from_json(snap);
    CHECK(rho.rows() == 93);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-8);
    CHECK(std::abs(snap["t"].get<double>() - 0.5) < 1e-3);
}

TEST_CASE("tomography modes") {
    SUBCASE("analytic source") {
        const fs::path dir = scratch("figS5");
        REQUIRE(run_in(preset("figS5", "wigner"), dir) == 0);
        const auto rows = read_csv(dir / "wigner_L.csv");
        CHECK(rows.size() == 181u * 181u);
        const auto m = manifest(dir);
        CHECK(std::abs(m["invariants"]["grid_integral"].get<double>() - 1.0) < 1e-3);
        REQUIRE(run_in(preset("figS5", "quadrature"), dir) == 0);
        const auto q = read_csv(dir / "quadrature_L.csv");
        CHECK(q.size() == 1601u);
        for (const auto& row : q) CHECK(row[1] >= 0.0);
        CHECK(std::abs(manifest(dir)["invariants"]["integral"].get<double>() - 1.0) < 1e-6);
    }
    SUBCASE("closed-system source") {
        const fs::path dir = scratch("tomo_closed");
        REQUIRE(run_in(preset("figS5", "quadrature", {"source=closed", "branch=R", "x_points=401"}), dir) == 0);
        const auto m = manifest(dir);
        CHECK(m["tomography"]["probability"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
        CHECK(fs::exists(dir / "quadrature_R.csv"));
    }
}

TEST_CASE("detection-time table") {
    const fs::path dir = scratch("detect");
    REQUIRE(run_in(preset("fig2", "detect-times"), dir) == 0);
    const auto rows = read_csv(dir / "detect_times.csv");
    bool found = false;
    for (const auto& row : rows) {
        found = found || std::abs(row[0] - 12.6664) < 1e-4;
        CHECK(std::abs(std::abs(row[3]) - 1.0) < 1e-9);
    }
    CHECK(found);
}

TEST_CASE("command-line driver") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const std::string out = " --out " + dir.string();

    CHECK(cli("closed --config /dev/null" + out) == 2);
    {
        std::ofstream(dir / "typo.cfg") << "omega_m = 20\nxi = 1.5271\ndelta_over_g = 1\ngama_c = 0.1\n";
    }
    CHECK(cli("closed --config " + (dir / "typo.cfg").string() + out) == 2);
    CHECK(cli("closed --preset nope" + out) == 2);
    CHECK(cli("closed --preset figS1 --set gamma_c=-1" + out) == 2);
    CHECK(cli("closed --preset figS1 --set t_end_over_t0=0.2" + out) == 0);
    CHECK(fs::exists(dir / "closed.csv"));

    // positivity abort from an unresolvable decay rate
    CHECK(cli("open --preset fig2 --set gamma_c=20000 --set t_d=0.3 --set n_max=3" + out) == 3);
    CHECK(fs::exists(dir / "diagnostic.txt"));
    CHECK(manifest(dir).contains("abort"));

    const fs::path env_dir = scratch("cli_env");
    const std::string cmd = "CATFORGE_OUT=" + env_dir.string() + " " + std::string(CATFORGE_BIN) +
                            " detect-times --preset fig2 2>/dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(env_dir / "detect_times.csv"));
}

TEST_CASE("determinism") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const RunConfig cfg = preset("fig2", "open");
    REQUIRE(run_in(cfg, a) == 0);
    REQUIRE(run_in(cfg, b, 4) == 0);
    CHECK(slurp(a / "open.csv") == slurp(b / "open.csv"));
    CHECK(slurp(a / "open.csv").size() > 1000);
}

TEST_CASE("scale invariance of the physical-units preset") {
    const fs::path a = scratch("units_scaled");
    const fs::path b = scratch("units_device");
    REQUIRE(run_in(preset("fig2", "open", {"t_d=2"}), a) == 0);
    REQUIRE(run_in(preset("device", "open", {"t_d=" + exact(2.0 / (2.0 * std::numbers::pi * 5e5))}), b) == 0);
    const auto ra = read_csv(a / "open.csv");
    const auto rb = read_csv(b / "open.csv");
    REQUIRE(ra.size() == rb.size());
    double err = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        for (std::size_t c = 0; c < ra[k].size(); ++c) {
            if (c == 7 || c == 8) continue;     // round-off diagnostics
            if (std::isnan(ra[k][c]) && std::isnan(rb[k][c])) continue;
            err = std::max(err, std::abs(ra[k][c] - rb[k][c]));
        }
    }
    CHECK(err < 1e-9);
}
