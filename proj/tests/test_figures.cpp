#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catforge/config.hpp"
#include "catforge/run.hpp"
#include "doctest.h"

using namespace catforge;
namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<double>>;

Table read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    Table rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream s(line);
        std::string cell;
        while (std::getline(s, cell, ',')) row.push_back(cell.empty() ? std::nan("") : std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

fs::path run_preset(const std::string& name, const std::string& mode, std::vector<std::string> sets = {}) {
    fs::path dir = fs::temp_directory_path() / ("catforge_fig_" + name + "_" + mode);
    for (const auto& s : sets) dir += "_" + s.substr(0, s.find('='));
    fs::remove_all(dir);
    std::ostringstream log;
    const RunConfig cfg = parse_config(ConfigSources{"", mode, name, std::move(sets)});
    REQUIRE(run(cfg, RunOptions{dir, 2}, log) == 0);
    return dir;
}

} // namespace

TEST_CASE("mechanical damping and temperature sweeps") {
    for (const char* name : {"fig3a", "fig3b"}) {
        CAPTURE(name);
        const fs::path dir = run_preset(name, "sweep");
        const Table summary = read_csv(dir / (std::string("sweep_") + (name == std::string("fig3a") ? "gamma_m" : "n_th") + ".csv"));
        REQUIRE(summary.size() == 3);
        for (std::size_t k = 1; k < summary.size(); ++k) {
            CHECK(summary[k][4] < summary[k - 1][4]);     // F_L
            CHECK(summary[k][5] < summary[k - 1][5]);     // F_R
            CHECK(summary[k][6] < summary[k - 1][6]);     // fringe visibility
        }
        // heralding probabilities do not depend on the mechanical bath
        std::vector<Table> runs;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path().filename().string().rfind("open_", 0) == 0) runs.push_back(read_csv(e.path()));
        }
        REQUIRE(runs.size() == 3);
        double spread = 0.0;
        for (std::size_t r = 1; r < runs.size(); ++r) {
            REQUIRE(runs[r].size() == runs[0].size());
            for (std::size_t k = 0; k < runs[0].size(); ++k) {
                spread = std::max(spread, std::abs(runs[r][k][1] - runs[0][k][1]));
                spread = std::max(spread, std::abs(runs[r][k][2] - runs[0][k][2]));
            }
        }
        CHECK(spread < 1e-3);
        // photon loss alone sets the heralding total
        for (const auto& row : runs[0]) {
            CHECK(std::abs(row[1] + row[2] - std::exp(-0.2 * row[0])) < 1e-6);
        }
    }
}

TEST_CASE("mechanical frequency ladder") {
    const fs::path dir = run_preset("figS3", "sweep");
    const Table s = read_csv(dir / "sweep_omega_m.csv");
    REQUIRE(s.size() == 3);
    // F envelope at t0 grows and the phonon-number error shrinks with omega_m
    CHECK(s[1][7] > s[0][7]);
    CHECK(s[2][7] > s[1][7]);
    CHECK(s[1][8] <= s[0][8]);
    CHECK(s[2][8] <= s[1][8]);
    CHECK(s[2][9] < 0.02);
    for (const auto& row : s) CHECK(std::abs(row[2] - 0.5) < 0.05);
}

TEST_CASE("detuning sweep at large mechanical frequency") {
    const fs::path dir = run_preset("figS4", "sweep");
    const Table s = read_csv(dir / "sweep_delta_over_g.csv");
    REQUIRE(s.size() == 7);
    // envelope stays flat near one; the oscillation amplitude 1 - min F near t0 shrinks with delta/g
    std::vector<double> swing;
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s[k][7] > 0.99);
        const Table traj = read_csv(dir / fs::path("closed_delta_over_g_" + [&] {
                                        char buf[32];
                                        std::snprintf(buf, sizeof buf, "%g", s[k][0]);
                                        return std::string(buf);
                                    }() + ".csv"));
        const double t0 = s[k][1];
        double lo = 1.0;
        for (const auto& row : traj) {
            if (std::abs(row[0] - t0) < 0.2 * t0) lo = std::min(lo, row[7]);
        }
        swing.push_back(1.0 - lo);
    }
    CHECK(swing.back() < swing.front());
}

TEST_CASE("quadrature symmetry improves with mechanical frequency") {
    auto asymmetry = [](const std::string& omega_m, const std::string& t_d) {
        std::vector<Table> p;
        for (const char* branch : {"L", "R"}) {
            const fs::path dir = run_preset("figS5", "quadrature",
                                            {"source=closed", std::string("branch=") + branch, "omega_m=" + omega_m,
                                             "t_d=" + t_d, "x_min=-8", "x_max=8", "x_points=801"});
            p.push_back(read_csv(dir / (std::string("quadrature_") + branch + ".csv")));
        }
        double sup = 0.0;
        const std::size_t n = p[0].size();
        for (std::size_t k = 0; k < n; ++k) sup = std::max(sup, std::abs(p[0][k][1] - p[1][n - 1 - k][1]));
        return sup;
    };
    const double a20 = asymmetry("20", "12.6664");
    const double a100 = asymmetry("100", "12.9228");
    MESSAGE("asymmetry " << a20 << " -> " << a100);
    CHECK(a100 < a20);
}
