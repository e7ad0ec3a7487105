#include "catforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>

#include "catforge/errors.hpp"

namespace catforge {

namespace {

using Entries = std::map<std::string, std::string>;

const std::vector<std::string> kKeys = {
    "mode", "preset", "units",
    "omega_c", "omega_m", "g0", "xi", "n0", "omega_0", "delta", "delta_over_g", "gamma_c", "gamma_m", "n_th",
    "t_d", "t_end", "t_end_over_t0", "dt", "record_stride", "n_max", "initial", "snapshot_times",
    "single_mode_reference",
    "source", "branch", "grid_re_min", "grid_re_max", "grid_im_min", "grid_im_max", "grid_n_re", "grid_n_im",
    "theta", "x_min", "x_max", "x_points",
    "sweep", "sweep_values", "sweep_xi",
    "window_center", "window_half_width",
};

// Keys that name the same quantity; setting one drops the others.
const std::vector<std::vector<std::string>> kExclusive = {
    {"omega_0", "delta", "delta_over_g"},
    {"t_end", "t_end_over_t0"},
};

const std::set<std::string> kRateKeys = {"omega_c", "omega_m", "omega_0", "delta", "gamma_c", "gamma_m"};
const std::set<std::string> kTimeKeys = {"t_d", "t_end", "dt", "window_center", "window_half_width"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    // shortest text that parses back to the same double
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += fmt(v[k]);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(key, item));
    }
    return out;
}

std::string linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = std::round((lo + (hi - lo) * k / (n - 1)) * 1e12) / 1e12;
    return fmt_list(v);
}

Entries parse_document(const std::string& text) {
    Entries out;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (out.count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        out[key] = value;
    }
    return out;
}

struct Merged {
    Entries values;
    std::map<std::string, std::string> origin;
    std::vector<std::string> log;

    void apply(const Entries& layer, const std::string& name) {
        for (const auto& group : kExclusive) {
            int count = 0;
            for (const auto& k : group) count += static_cast<int>(layer.count(k));
            if (count > 1) {
                std::string msg = "only one of";
                for (const auto& k : group) msg += " " + k;
                throw ConfigError(msg + " may be given (" + name + ")");
            }
        }
        for (const auto& [key, value] : layer) {
            for (const auto& group : kExclusive) {
                if (std::find(group.begin(), group.end(), key) == group.end()) continue;
                for (const auto& other : group) {
                    if (other != key && values.count(other)) {
                        log.push_back(other + ": " + values[other] + " -> (replaced by " + key + ") (" + name + ")");
                        values.erase(other);
                    }
                }
            }
            auto it = values.find(key);
            if (it != values.end() && it->second != value) {
                log.push_back(key + ": " + it->second + " -> " + value + " (" + name + ")");
            }
            values[key] = value;
            origin[key] = name;
        }
    }

    bool has(const std::string& k) const { return values.count(k) > 0; }
    const std::string& get(const std::string& k) const { return values.at(k); }
};

const char* sweep_name(SweepKind k) {
    switch (k) {
    case SweepKind::beta_max: return "beta_max";
    case SweepKind::gamma_c: return "gamma_c";
    case SweepKind::gamma_m: return "gamma_m";
    case SweepKind::n_th: return "n_th";
    case SweepKind::delta_over_g: return "delta_over_g";
    case SweepKind::omega_m: return "omega_m";
    }
    return "?";
}

SweepKind parse_sweep(const std::string& s) {
    for (auto k : {SweepKind::beta_max, SweepKind::gamma_c, SweepKind::gamma_m, SweepKind::n_th,
                   SweepKind::delta_over_g, SweepKind::omega_m}) {
        if (s == sweep_name(k)) return k;
    }
    throw ConfigError("sweep: unknown kind '" + s + "'");
}

const char* source_name(StateSource s) {
    switch (s) {
    case StateSource::analytic: return "analytic";
    case StateSource::closed: return "closed";
    case StateSource::open: return "open";
    }
    return "?";
}

const char* initial_name(InitialState s) {
    switch (s) {
    case InitialState::bell: return "bell";
    case InitialState::left: return "left";
    case InitialState::right: return "right";
    }
    return "?";
}

const char* tuning_key(TuningKind k) {
    switch (k) {
    case TuningKind::omega_0: return "omega_0";
    case TuningKind::delta: return "delta";
    case TuningKind::delta_over_g: return "delta_over_g";
    }
    return "?";
}

// Physical-unit documents give rates as ordinary frequencies in Hz and times
// in seconds; everything is rescaled to g0 = 1.
void normalize_units(Merged& m) {
    const std::string units = m.has("units") ? m.get("units") : "scaled";
    if (units == "scaled") return;
    if (units != "physical") throw ConfigError("units: expected 'scaled' or 'physical', got '" + units + "'");
    if (!m.has("g0")) throw ConfigError("units = physical requires g0 (Hz)");
    const double g0_hz = to_double("g0", m.get("g0"));
    if (!(g0_hz > 0.0)) throw ConfigError("g0 must be > 0");
    const double time_scale = 2.0 * std::numbers::pi * g0_hz;
    for (auto& [key, value] : m.values) {
        if (kRateKeys.count(key)) value = fmt(to_double(key, value) / g0_hz);
        if (kTimeKeys.count(key)) value = fmt(to_double(key, value) * time_scale);
    }
    if (m.has("snapshot_times")) {
        auto v = to_list("snapshot_times", m.get("snapshot_times"));
        for (auto& x : v) x *= time_scale;
        m.values["snapshot_times"] = fmt_list(v);
    }
    if (m.has("sweep") && m.has("sweep_values")) {
        const std::string kind = m.get("sweep");
        if (kind == "gamma_c" || kind == "gamma_m" || kind == "omega_m") {
            auto v = to_list("sweep_values", m.get("sweep_values"));
            for (auto& x : v) x /= g0_hz;
            m.values["sweep_values"] = fmt_list(v);
        }
    }
    m.values["g0"] = "1";
    m.values.erase("units");
}

const Entries& base_entries() {
    static const Entries base = {
        {"omega_c", "0"}, {"omega_m", "20"}, {"g0", "1"}, {"xi", "1.5271"}, {"n0", "1"}, {"delta_over_g", "1"},
    };
    return base;
}

Entries with_base(Entries extra) {
    Entries out = base_entries();
    for (auto& [k, v] : extra) out[k] = v;
    return out;
}

} // namespace

SystemParams Tuning::apply(SystemParams params) const {
    switch (kind) {
    case TuningKind::omega_0:
        params.omega_0 = value;
        break;
    case TuningKind::delta:
        params.omega_0 = omega0_for_detuning(params.omega_m, params.n0, value);
        break;
    case TuningKind::delta_over_g:
        params.omega_0 =
            omega0_for_detuning(params.omega_m, params.n0, value * effective_coupling(params.g0, params.xi, params.n0));
        break;
    }
    return params;
}

const char* mode_name(Mode m) {
    switch (m) {
    case Mode::closed: return "closed";
    case Mode::open: return "open";
    case Mode::wigner: return "wigner";
    case Mode::quadrature: return "quadrature";
    case Mode::sweep: return "sweep";
    case Mode::detect_times: return "detect-times";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    for (auto m : {Mode::closed, Mode::open, Mode::wigner, Mode::quadrature, Mode::sweep, Mode::detect_times}) {
        if (s == mode_name(m)) return m;
    }
    throw ConfigError("unknown mode '" + s + "' (expected closed, open, wigner, quadrature, sweep, detect-times)");
}

std::vector<std::string> preset_names() {
    return {"fig1a", "fig2", "fig3a", "fig3b", "figS1", "figS3", "figS4", "figS5", "device"};
}

std::map<std::string, std::string> preset_entries(const std::string& name) {
    const Entries open_base = {{"gamma_c", "0.2"}, {"gamma_m", "0.0001"}, {"n_th", "4"}, {"t_d", "12.6664"}};
    auto merge = [](Entries a, const Entries& b) {
        for (const auto& [k, v] : b) a[k] = v;
        return a;
    };
    if (name == "fig1a") {
        return with_base({{"sweep", "beta_max"}, {"sweep_xi", "1.5271, 4.9847"}, {"sweep_values", linspace(0.05, 0.5, 46)}});
    }
    if (name == "fig2") {
        return with_base(merge(open_base, {{"sweep", "gamma_c"}, {"sweep_values", "0.05, 0.1, 0.2, 0.4"}}));
    }
    if (name == "fig3a") {
        return with_base(merge(open_base, {{"sweep", "gamma_m"}, {"sweep_values", "0.0001, 0.0005, 0.001"}}));
    }
    if (name == "fig3b") {
        return with_base(merge(open_base, {{"sweep", "n_th"}, {"sweep_values", "1, 5, 10"}}));
    }
    if (name == "figS1") {
        return with_base({{"initial", "right"}, {"single_mode_reference", "true"}, {"t_end_over_t0", "2"}});
    }
    if (name == "figS3") {
        return with_base({{"t_end_over_t0", "2"}, {"sweep", "omega_m"}, {"sweep_values", "20, 40, 100"}});
    }
    if (name == "figS4") {
        return with_base({{"omega_m", "100"}, {"sweep", "delta_over_g"},
                          {"sweep_values", "0.5, 0.75, 1, 1.25, 1.5, 1.75, 2"}});
    }
    if (name == "figS5") {
        return with_base({{"t_d", "12.6664"}, {"source", "analytic"}, {"branch", "L"}});
    }
    if (name == "device") {
        // Device-scale column of the parameter table: g0 = 2 pi x 500 kHz.
        const double g0_hz = 5e5;
        return {{"units", "physical"},
                {"g0", "500000"},
                {"omega_m", "10000000"},
                {"omega_c", "7500000000"},
                {"xi", "1.5271"},
                {"n0", "1"},
                {"delta_over_g", "1"},
                {"gamma_c", "100000"},
                {"gamma_m", "50"},
                {"n_th", "4"},
                {"t_d", fmt(12.6664 / (2.0 * std::numbers::pi * g0_hz))},
                {"sweep", "gamma_c"},
                {"sweep_values", "25000, 50000, 100000, 200000"}};
    }
    throw ConfigError("unknown preset '" + name + "'");
}

const std::vector<std::string>& config_keys() { return kKeys; }

RunConfig parse_config(const std::string& text) { return parse_config(ConfigSources{text, {}, {}, {}}); }

RunConfig parse_config(const ConfigSources& sources) {
    const Entries doc = parse_document(sources.document);
    Entries sets;
    for (const auto& s : sources.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ConfigError("--set: unknown key '" + key + "'");
        }
        sets[key] = trim(s.substr(eq + 1));
    }

    std::optional<std::string> preset = sources.preset;
    if (!preset && sets.count("preset")) preset = sets.at("preset");
    if (!preset && doc.count("preset")) preset = doc.at("preset");

    Merged m;
    if (preset) m.apply(preset_entries(*preset), "preset " + *preset);
    Entries doc_fields = doc;
    doc_fields.erase("preset");
    sets.erase("preset");
    m.apply(doc_fields, "document");
    m.apply(sets, "--set");
    normalize_units(m);

    RunConfig cfg;
    cfg.preset = preset;
    cfg.override_log = m.log;

    std::vector<std::string> missing;
    std::optional<std::string> mode_text = sources.mode;
    if (!mode_text && m.has("mode")) mode_text = m.get("mode");
    if (!mode_text) missing.push_back("mode");
    for (const char* k : {"omega_m", "xi"}) {
        if (!m.has(k)) missing.push_back(k);
    }
    if (!m.has("omega_0") && !m.has("delta") && !m.has("delta_over_g")) {
        missing.push_back("omega_0|delta|delta_over_g");
    }
    if (!missing.empty()) {
        std::string msg = "missing required fields:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }
    cfg.mode = parse_mode(*mode_text);

    auto num = [&](const char* k, double fallback) { return m.has(k) ? to_double(k, m.get(k)) : fallback; };
    auto opt_num = [&](const char* k) -> std::optional<double> {
        if (!m.has(k)) return std::nullopt;
        return to_double(k, m.get(k));
    };

    SystemParams& p = cfg.params;
    p.omega_c = num("omega_c", 0.0);
    p.omega_m = num("omega_m", 0.0);
    p.g0 = num("g0", 1.0);
    p.xi = num("xi", 0.0);
    p.n0 = m.has("n0") ? to_int("n0", m.get("n0")) : 1;
    p.gamma_c = num("gamma_c", 0.0);
    p.gamma_m = num("gamma_m", 0.0);
    p.n_th = num("n_th", 0.0);
    if (m.has("omega_0")) cfg.tuning = {TuningKind::omega_0, to_double("omega_0", m.get("omega_0"))};
    if (m.has("delta")) cfg.tuning = {TuningKind::delta, to_double("delta", m.get("delta"))};
    if (m.has("delta_over_g")) cfg.tuning = {TuningKind::delta_over_g, to_double("delta_over_g", m.get("delta_over_g"))};
    if (p.n0 < 1) throw ConfigError("n0 must be >= 1");
    if (!(p.g0 > 0.0)) throw ConfigError("g0 must be > 0");
    p = cfg.tuning.apply(p);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }

    cfg.t_d = opt_num("t_d");
    cfg.t_end = opt_num("t_end");
    cfg.t_end_over_t0 = opt_num("t_end_over_t0");
    cfg.dt = opt_num("dt");
    if (m.has("record_stride")) cfg.record_stride = to_int("record_stride", m.get("record_stride"));
    if (m.has("n_max")) cfg.n_max = to_int("n_max", m.get("n_max"));
    if (cfg.t_d && !(*cfg.t_d > 0.0)) throw ConfigError("t_d must be > 0");
    if (cfg.t_end && !(*cfg.t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (cfg.t_end_over_t0 && !(*cfg.t_end_over_t0 > 0.0)) throw ConfigError("t_end_over_t0 must be > 0");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt must be > 0");
    if (cfg.record_stride && *cfg.record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (cfg.n_max && *cfg.n_max < 1) throw ConfigError("n_max must be >= 1");

    if (m.has("initial")) {
        const std::string v = m.get("initial");
        if (v == "bell") cfg.initial = InitialState::bell;
        else if (v == "left") cfg.initial = InitialState::left;
        else if (v == "right") cfg.initial = InitialState::right;
        else throw ConfigError("initial: expected bell, left or right, got '" + v + "'");
    }
    if (m.has("snapshot_times")) cfg.snapshot_times = to_list("snapshot_times", m.get("snapshot_times"));
    if (m.has("single_mode_reference")) {
        cfg.single_mode_reference = to_bool("single_mode_reference", m.get("single_mode_reference"));
    }

    if (m.has("source")) {
        const std::string v = m.get("source");
        if (v == "analytic") cfg.source = StateSource::analytic;
        else if (v == "closed") cfg.source = StateSource::closed;
        else if (v == "open") cfg.source = StateSource::open;
        else throw ConfigError("source: expected analytic, closed or open, got '" + v + "'");
    }
    if (m.has("branch")) {
        const std::string v = m.get("branch");
        if (v == "L") cfg.branch = PhotonSector::L;
        else if (v == "R") cfg.branch = PhotonSector::R;
        else throw ConfigError("branch: expected L or R, got '" + v + "'");
    }
    cfg.grid.re_min = num("grid_re_min", cfg.grid.re_min);
    cfg.grid.re_max = num("grid_re_max", cfg.grid.re_max);
    cfg.grid.im_min = num("grid_im_min", cfg.grid.im_min);
    cfg.grid.im_max = num("grid_im_max", cfg.grid.im_max);
    if (m.has("grid_n_re")) cfg.grid.n_re = to_int("grid_n_re", m.get("grid_n_re"));
    if (m.has("grid_n_im")) cfg.grid.n_im = to_int("grid_n_im", m.get("grid_n_im"));
    try {
        cfg.grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.theta = opt_num("theta");
    cfg.x_min = opt_num("x_min");
    cfg.x_max = opt_num("x_max");
    if (m.has("x_points")) cfg.x_points = to_int("x_points", m.get("x_points"));
    if (cfg.x_points < 2) throw ConfigError("x_points must be >= 2");
    if (cfg.x_min && cfg.x_max && !(*cfg.x_min < *cfg.x_max)) throw ConfigError("x_min must be below x_max");

    if (m.has("sweep")) cfg.sweep = parse_sweep(m.get("sweep"));
    if (m.has("sweep_values")) cfg.sweep_values = to_list("sweep_values", m.get("sweep_values"));
    if (m.has("sweep_xi")) cfg.sweep_xi = to_list("sweep_xi", m.get("sweep_xi"));
    if (cfg.mode == Mode::sweep) {
        if (!cfg.sweep) throw ConfigError("missing required fields: sweep");
        if (cfg.sweep_values.empty()) throw ConfigError("missing required fields: sweep_values");
    }

    cfg.window_center = opt_num("window_center");
    cfg.window_half_width = opt_num("window_half_width");
    return cfg;
}

std::map<std::string, std::string> RunConfig::canonical() const {
    Entries c;
    c["mode"] = mode_name(mode);
    c["omega_c"] = fmt(params.omega_c);
    c["omega_m"] = fmt(params.omega_m);
    c["g0"] = fmt(params.g0);
    c["xi"] = fmt(params.xi);
    c["n0"] = std::to_string(params.n0);
    c[tuning_key(tuning.kind)] = fmt(tuning.value);
    c["gamma_c"] = fmt(params.gamma_c);
    c["gamma_m"] = fmt(params.gamma_m);
    c["n_th"] = fmt(params.n_th);
    if (t_d) c["t_d"] = fmt(*t_d);
    if (t_end) c["t_end"] = fmt(*t_end);
    if (t_end_over_t0) c["t_end_over_t0"] = fmt(*t_end_over_t0);
    if (dt) c["dt"] = fmt(*dt);
    if (record_stride) c["record_stride"] = std::to_string(*record_stride);
    if (n_max) c["n_max"] = std::to_string(*n_max);
    c["initial"] = initial_name(initial);
    if (!snapshot_times.empty()) c["snapshot_times"] = fmt_list(snapshot_times);
    c["single_mode_reference"] = single_mode_reference ? "true" : "false";
    if (source) c["source"] = source_name(*source);
    c["branch"] = sector_name(branch);
    c["grid_re_min"] = fmt(grid.re_min);
    c["grid_re_max"] = fmt(grid.re_max);
    c["grid_im_min"] = fmt(grid.im_min);
    c["grid_im_max"] = fmt(grid.im_max);
    c["grid_n_re"] = std::to_string(grid.n_re);
    c["grid_n_im"] = std::to_string(grid.n_im);
    if (theta) c["theta"] = fmt(*theta);
    if (x_min) c["x_min"] = fmt(*x_min);
    if (x_max) c["x_max"] = fmt(*x_max);
    c["x_points"] = std::to_string(x_points);
    if (sweep) c["sweep"] = sweep_name(*sweep);
    if (!sweep_values.empty()) c["sweep_values"] = fmt_list(sweep_values);
    c["sweep_xi"] = fmt_list(sweep_xi);
    if (window_center) c["window_center"] = fmt(*window_center);
    if (window_half_width) c["window_half_width"] = fmt(*window_half_width);
    return c;
}

std::string RunConfig::to_document() const {
    std::string out;
    for (const auto& [k, v] : canonical()) out += k + " = " + v + "\n";
    return out;
}

} // namespace catforge
