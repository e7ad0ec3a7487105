#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "catforge/config.hpp"

namespace catforge {

/// Solver settings after defaults are filled in for one parameter set.
struct ResolvedRun {
    SystemParams params;
    DerivedModulation derived;
    int n_max = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double t_d = 0.0;
    int record_stride = 1;
    std::vector<std::string> notes;

    SolverConfig solver() const { return {dt, t_end, record_stride}; }
};

/// Fill in t_d, t_end, n_max, dt and record_stride for `params` (which may
/// differ from cfg.params inside a sweep). `open_system` selects the
/// density-matrix defaults.
ResolvedRun resolve_run(const RunConfig& cfg, const SystemParams& params, bool open_system);

struct RunOptions {
    std::filesystem::path output_dir = "catforge_out";
    int workers = 1;
};

/// Execute the configured mode, writing CSV/JSON outputs and manifest.json
/// into the output directory. Returns 0 on success, 3 on a solver abort (a
/// diagnostic.txt is written); configuration problems throw ConfigError.
int run(const RunConfig& cfg, const RunOptions& options, std::ostream& log);

/// Rebuild the run configuration recorded in a manifest.
RunConfig config_from_manifest(const nlohmann::json& manifest);

/// Dense complex matrix as {"dim": [rows, cols], "data": [re, im, ...]}
/// in row-major order.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

} // namespace catforge
