#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catforge/analysis.hpp"
#include "catforge/model.hpp"
#include "catforge/open.hpp"

namespace catforge {

enum class Mode { closed, open, wigner, quadrature, sweep, detect_times };
enum class InitialState { bell, left, right };
enum class StateSource { analytic, closed, open };
enum class SweepKind { beta_max, gamma_c, gamma_m, n_th, delta_over_g, omega_m };

/// How the modulation frequency is specified.
enum class TuningKind { omega_0, delta, delta_over_g };

struct Tuning {
    TuningKind kind = TuningKind::delta_over_g;
    double value = 1.0;

    /// params with omega_0 set from this tuning (omega_m, xi, n0, g0 taken
    /// from params).
    SystemParams apply(SystemParams params) const;
};

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// Fully parsed run description. Optional solver settings left empty are
/// resolved per run (see ResolvedRun in run.hpp).
struct RunConfig {
    Mode mode = Mode::closed;
    std::optional<std::string> preset;
    SystemParams params;        // omega_0 already resolved from `tuning`
    Tuning tuning;

    std::optional<double> t_d;
    std::optional<double> t_end;
    std::optional<double> t_end_over_t0;
    std::optional<double> dt;
    std::optional<int> record_stride;
    std::optional<int> n_max;
    InitialState initial = InitialState::bell;
    std::vector<double> snapshot_times;
    bool single_mode_reference = false;

    std::optional<StateSource> source;
    PhotonSector branch = PhotonSector::L;
    PhaseSpaceGrid grid;
    std::optional<double> theta;
    std::optional<double> x_min;
    std::optional<double> x_max;
    int x_points = 1601;

    std::optional<SweepKind> sweep;
    std::vector<double> sweep_values;
    std::vector<double> sweep_xi{1.5271, 4.9847};

    std::optional<double> window_center;
    std::optional<double> window_half_width;

    /// "key: old -> new (layer)" for every value replaced after the preset.
    std::vector<std::string> override_log;

    /// Canonical key/value form in scaled units. Two configs are equivalent
    /// when their canonical forms are equal; parse_config(to_document())
    /// reproduces the same canonical form.
    std::map<std::string, std::string> canonical() const;
    std::string to_document() const;
};

/// Layers of a run description, applied in order preset, document, --set.
struct ConfigSources {
    std::string document;
    std::optional<std::string> mode;        // command-line mode wins over the document
    std::optional<std::string> preset;      // command-line preset wins over the document
    std::vector<std::string> sets;          // "key=value"
};

/// Parse a flat "key = value" document ('#' starts a comment). Throws
/// ConfigError on unknown keys, malformed values, missing required fields
/// or parameter constraint violations.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const ConfigSources& sources);

/// Names of the built-in presets.
std::vector<std::string> preset_names();

/// Raw key/value entries of a preset (before unit normalization).
std::map<std::string, std::string> preset_entries(const std::string& name);

/// Every key accepted in a document.
const std::vector<std::string>& config_keys();

} // namespace catforge
