#include "catforge/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>

#include "catforge/analysis.hpp"
#include "catforge/closed.hpp"
#include "catforge/errors.hpp"
#include "catforge/open.hpp"

namespace catforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const SystemParams& p) {
    return {{"omega_c", p.omega_c}, {"omega_m", p.omega_m}, {"g0", p.g0},         {"xi", p.xi},
            {"n0", p.n0},           {"omega_0", p.omega_0}, {"gamma_c", p.gamma_c}, {"gamma_m", p.gamma_m},
            {"n_th", p.n_th}};
}

json derived_json(const SystemParams& p, const DerivedModulation& d) {
    const RwaDiagnostic rwa = rwa_diagnostic(p, d);
    return {{"g", d.g},
            {"delta", d.delta},
            {"beta_max", finite_or_null(d.beta_max)},
            {"unbounded", d.unbounded},
            {"t0", finite_or_null(d.t0())},
            {"rwa_valid", rwa.valid},
            {"rwa_worst_ratio", rwa.worst_ratio},
            {"success_probability_estimate", success_probability_estimate(p)}};
}

json solver_json(const ResolvedRun& r) {
    return {{"integrator", "rk4"},
            {"n_max", r.n_max},
            {"dt", r.dt},
            {"steps", r.solver().steps()},
            {"t_end", r.t_end},
            {"t_d", r.t_d},
            {"record_stride", r.record_stride},
            {"notes", r.notes}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_record(const fs::path& path, const TrajectoryRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    rec.write_csv(out);
}

std::string tag(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

SinglePhotonState closed_initial(InitialState s, FockCutoff cutoff) {
    switch (s) {
    case InitialState::left: return SinglePhotonState::photon_left(cutoff);
    case InitialState::right: return SinglePhotonState::photon_right(cutoff);
    case InitialState::bell: break;
    }
    return SinglePhotonState::bell_photon(cutoff);
}

SystemDensityMatrix open_initial(InitialState s, FockCutoff cutoff) {
    switch (s) {
    case InitialState::left: return SystemDensityMatrix::photon_in(PhotonSector::L, cutoff);
    case InitialState::right: return SystemDensityMatrix::photon_in(PhotonSector::R, cutoff);
    case InitialState::bell: break;
    }
    return SystemDensityMatrix::bell_photon(cutoff);
}

json closed_invariants(const ClosedRun& run) {
    double prob_err = 0.0;
    const auto pl = run.record.column("P_L");
    const auto pr = run.record.column("P_R");
    for (std::size_t k = 0; k < pl.size(); ++k) prob_err = std::max(prob_err, std::abs(pl[k] + pr[k] - 1.0));
    return {{"max_norm_drift", run.max_norm_drift}, {"max_tail_population", run.max_tail},
            {"max_probability_sum_error", prob_err}};
}

json open_invariants(const OpenRun& run) {
    return {{"max_trace_drift", run.max_trace_drift},
            {"min_eigenvalue", run.min_eigenvalue},
            {"max_hermiticity_error", run.max_hermiticity_error},
            {"max_cross_sector_coherence", run.max_cross_coherence},
            {"max_tail_population", run.max_tail}};
}

// Mechanical state at t_d for tomography modes.
struct MechanicalState {
    bool analytic = false;
    CatState cat{};
    ComplexMatrix rho;
    double probability = 1.0;
    json invariants = json::object();
};

StateSource default_source(const RunConfig& cfg) {
    if (cfg.source) return *cfg.source;
    return (cfg.params.gamma_c > 0.0 || cfg.params.gamma_m > 0.0) ? StateSource::open : StateSource::closed;
}

MechanicalState mechanical_state(const RunConfig& cfg, const ResolvedRun& r) {
    MechanicalState out;
    const StateSource source = default_source(cfg);
    if (source == StateSource::analytic) {
        const auto [phi_l, phi_r] = target_states(r.params, r.derived, r.t_d);
        out.analytic = true;
        out.cat = cfg.branch == PhotonSector::L ? phi_l : phi_r;
        return out;
    }
    if (source == StateSource::closed) {
        const ClosedRun run = evolve_closed(SinglePhotonState::bell_photon(FockCutoff(r.n_max)), r.params, r.solver());
        const ConditionalStates cs = conditional_states(run.final_state);
        const ComplexVector& psi = cfg.branch == PhotonSector::L ? cs.psi_left : cs.psi_right;
        out.rho = psi * psi.adjoint();
        out.probability = cfg.branch == PhotonSector::L ? cs.p_left : cs.p_right;
        out.invariants = closed_invariants(run);
        return out;
    }
    const OpenRun run = evolve_open(SystemDensityMatrix::bell_photon(FockCutoff(r.n_max)), r.params, r.solver());
    auto [rho, prob] = reduce_mechanical(run.final_state, cfg.branch);
    out.rho = std::move(rho);
    out.probability = prob;
    out.invariants = open_invariants(run);
    return out;
}

QuadratureAxis quadrature_axis(const RunConfig& cfg, const ResolvedRun& r) {
    const complex beta = beta_of_t(r.derived, r.params.omega_m, r.t_d);
    const double theta = cfg.theta ? *cfg.theta : theta_perpendicular(beta);
    const double reach = std::sqrt(2.0) * std::abs(beta) + 6.0;
    return QuadratureAxis::uniform(theta, cfg.x_min.value_or(-reach), cfg.x_max.value_or(reach), cfg.x_points);
}

void write_quadrature(const fs::path& path, const QuadratureAxis& axis, const std::vector<double>& p) {
    std::string text = "x,P\n";
    for (std::size_t k = 0; k < p.size(); ++k) {
        // tiny negative values from round-off are emitted as zero
        const double v = (p[k] < 0.0 && p[k] > -1e-10) ? 0.0 : p[k];
        text += format_number(axis.x_values[k]) + "," + format_number(v) + "\n";
    }
    write_text(path, text);
}

// Largest F over one modulation period centred on t.
double fidelity_envelope(const TrajectoryRecord& rec, double t, double half_width) {
    const auto ts = rec.column("t");
    const auto f = rec.column("F");
    double best = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (std::abs(ts[k] - t) <= half_width && std::isfinite(f[k])) best = std::max(best, f[k]);
    }
    return best;
}

template <typename Fn>
void parallel_runs(int count, int workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
    for (int k = 0; k < count; ++k) {
        try {
            fn(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Context {
    const RunConfig& cfg;
    const RunOptions& options;
    std::ostream& log;
    json manifest;
    std::vector<std::string> outputs;

    fs::path path(const std::string& name) {
        outputs.push_back(name);
        return options.output_dir / name;
    }
};

void run_closed(Context& ctx) {
    const ResolvedRun r = resolve_run(ctx.cfg, ctx.cfg.params, false);
    ctx.manifest["solver"] = solver_json(r);
    const ClosedRun run = evolve_closed(closed_initial(ctx.cfg.initial, FockCutoff(r.n_max)), r.params, r.solver());
    write_record(ctx.path("closed.csv"), run.record);
    json inv = closed_invariants(run);

    if (ctx.cfg.single_mode_reference) {
        SystemParams single = r.params;
        single.xi = 0.0;
        const ClosedRun ref = evolve_closed(SinglePhotonState::photon_right(FockCutoff(r.n_max)), single, r.solver());
        TrajectoryRecord rec({"t", "x_over_x0", "x_closed_form"});
        const auto ts = ref.record.column("t");
        const auto xs = ref.record.column("x_over_x0");
        double err = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double s = std::sin(0.5 * single.omega_m * ts[k]);
            const double closed_form = 4.0 * single.g0 / single.omega_m * s * s;
            err = std::max(err, std::abs(xs[k] - closed_form));
            rec.append({ts[k], xs[k], closed_form});
        }
        write_record(ctx.path("single_mode.csv"), rec);
        inv["single_mode_max_abs_error"] = err;
    }
    ctx.manifest["invariants"] = inv;
}

void write_snapshot(const fs::path& path, const SystemDensityMatrix& s) {
    json j = matrix_to_json(s.rho);
    j["t"] = s.t;
    j["n_max"] = s.n_max();
    j["sectors"] = {"L", "R", "V"};
    j["layout"] = "row-major interleaved re/im; index = sector * (n_max + 1) + phonon";
    write_text(path, j.dump() + "\n");
}

void run_open(Context& ctx) {
    const ResolvedRun r = resolve_run(ctx.cfg, ctx.cfg.params, true);
    ctx.manifest["solver"] = solver_json(r);
    const OpenRun run = evolve_open(open_initial(ctx.cfg.initial, FockCutoff(r.n_max)), r.params, r.solver(),
                                    OpenSnapshotRequest{ctx.cfg.snapshot_times});
    write_record(ctx.path("open.csv"), run.record);
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        write_snapshot(ctx.path("snapshot_" + std::to_string(k) + ".json"), run.snapshots[k]);
    }
    ctx.manifest["invariants"] = open_invariants(run);
}

void run_wigner(Context& ctx) {
    const ResolvedRun r = resolve_run(ctx.cfg, ctx.cfg.params, default_source(ctx.cfg) == StateSource::open);
    ctx.manifest["solver"] = solver_json(r);
    const MechanicalState ms = mechanical_state(ctx.cfg, r);
    const RealField field = ms.analytic ? wigner_analytic(ms.cat, ctx.cfg.grid) : wigner_numeric(ms.rho, ctx.cfg.grid);
    {
        std::ofstream out(ctx.path(std::string("wigner_") + sector_name(ctx.cfg.branch) + ".csv"), std::ios::binary);
        field.write_csv(out);
    }
    const complex beta = beta_of_t(r.derived, r.params.omega_m, r.t_d);
    // coherent lobes only; the central fringes can be as tall as the lobes
    json peaks = json::array();
    for (const auto& pk : field_peaks(field, 2, 0.5 * std::abs(beta))) {
        peaks.push_back({{"re", pk.re}, {"im", pk.im}, {"W", pk.value}});
    }
    json inv = ms.invariants;
    inv["grid_integral"] = field.integral();
    ctx.manifest["invariants"] = inv;
    ctx.manifest["tomography"] = {{"source", ms.analytic ? "analytic" : "numeric"},
                                  {"branch", sector_name(ctx.cfg.branch)},
                                  {"probability", ms.probability},
                                  {"beta_re", beta.real()},
                                  {"beta_im", beta.imag()},
                                  {"peaks", peaks}};
}

void run_quadrature(Context& ctx) {
    const ResolvedRun r = resolve_run(ctx.cfg, ctx.cfg.params, default_source(ctx.cfg) == StateSource::open);
    ctx.manifest["solver"] = solver_json(r);
    const MechanicalState ms = mechanical_state(ctx.cfg, r);
    const QuadratureAxis axis = quadrature_axis(ctx.cfg, r);
    const std::vector<double> p = ms.analytic ? quadrature_analytic(ms.cat, axis) : quadrature_numeric(ms.rho, axis);
    write_quadrature(ctx.path(std::string("quadrature_") + sector_name(ctx.cfg.branch) + ".csv"), axis, p);
    json inv = ms.invariants;
    inv["integral"] = trapezoid(axis.x_values, p);
    ctx.manifest["invariants"] = inv;
    ctx.manifest["tomography"] = {{"source", ms.analytic ? "analytic" : "numeric"},
                                  {"branch", sector_name(ctx.cfg.branch)},
                                  {"probability", ms.probability},
                                  {"theta", axis.theta},
                                  {"fringe_visibility", fringe_visibility(axis, p)}};
}

void run_detect_times(Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    const DerivedModulation d = derive(p);
    if (d.unbounded && !ctx.cfg.window_center) {
        throw ConfigError("detect-times at delta = 0 needs window_center");
    }
    const double center = ctx.cfg.window_center.value_or(d.t0());
    const double half = ctx.cfg.window_half_width.value_or(0.0);
    const auto cands = detection_time_candidates(p, d, center, half);
    TrajectoryRecord rec({"t", "level", "beta_abs", "tan_half_mu"});
    for (const auto& c : cands) rec.append({c.t, static_cast<double>(c.level), c.beta_abs, std::tan(0.5 * mu_of_t(p, c.t))});
    write_record(ctx.path("detect_times.csv"), rec);
    ctx.manifest["window"] = {{"center", center}, {"half_width", half > 0.0 ? half : 2.0 * std::numbers::pi / p.omega_0}};
}

void run_sweep(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const SweepKind kind = *cfg.sweep;
    const std::vector<double>& values = cfg.sweep_values;
    const int count = static_cast<int>(values.size());
    json runs = json::array();

    if (kind == SweepKind::beta_max) {
        std::vector<double> deltas;
        for (double v : values) deltas.push_back(v * cfg.params.g0);
        const auto rows = sweep_beta_max(cfg.sweep_xi, deltas, cfg.params.n0, cfg.params.g0);
        TrajectoryRecord rec({"xi", "delta_over_g0", "beta_max"});
        for (const auto& row : rows) rec.append({row.xi, row.delta / cfg.params.g0, row.beta_max});
        write_record(ctx.path("sweep_beta_max.csv"), rec);
        ctx.manifest["runs"] = runs;
        return;
    }

    auto params_for = [&](double v) {
        SystemParams p = cfg.params;
        Tuning tuning = cfg.tuning;
        switch (kind) {
        case SweepKind::gamma_c: p.gamma_c = v; break;
        case SweepKind::gamma_m: p.gamma_m = v; break;
        case SweepKind::n_th: p.n_th = v; break;
        case SweepKind::omega_m: p.omega_m = v; break;
        case SweepKind::delta_over_g: tuning = {TuningKind::delta_over_g, v}; break;
        case SweepKind::beta_max: break;
        }
        p = tuning.apply(p);
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("sweep value ") + tag(v) + ": " + e.what());
        }
        return p;
    };
    const std::string name = [&] {
        switch (kind) {
        case SweepKind::gamma_c: return "gamma_c";
        case SweepKind::gamma_m: return "gamma_m";
        case SweepKind::n_th: return "n_th";
        case SweepKind::omega_m: return "omega_m";
        case SweepKind::delta_over_g: return "delta_over_g";
        case SweepKind::beta_max: break;
        }
        return "beta_max";
    }();

    std::vector<TrajectoryRecord::Row> summary(count);
    std::vector<json> run_info(count);
    std::vector<std::string> files(count);
    const bool open_sweep = kind == SweepKind::gamma_c || kind == SweepKind::gamma_m || kind == SweepKind::n_th;

    for (int k = 0; k < count; ++k) {
        files[k] = (open_sweep ? "open_" : "closed_") + name + "_" + tag(values[k]) + ".csv";
        ctx.outputs.push_back(files[k]);
    }

    parallel_runs(count, ctx.options.workers, [&](int k) {
        const double v = values[k];
        const SystemParams p = params_for(v);
        if (open_sweep) {
            const ResolvedRun r = resolve_run(cfg, p, true);
            const OpenRun run = evolve_open(SystemDensityMatrix::bell_photon(FockCutoff(r.n_max)), p, r.solver());
            write_record(ctx.options.output_dir / files[k], run.record);
            const auto& last = run.record.rows().back();
            auto [rho_l, prob_l] = reduce_mechanical(run.final_state, PhotonSector::L);
            const complex beta = beta_of_t(r.derived, p.omega_m, r.t_d);
            const double reach = std::sqrt(2.0) * std::abs(beta) + 6.0;
            const QuadratureAxis axis = QuadratureAxis::uniform(theta_perpendicular(beta), -reach, reach, cfg.x_points);
            const double vis = fringe_visibility(axis, quadrature_numeric(rho_l, axis));
            summary[k] = {v, r.t_d, last[1], last[2], last[5], last[6], vis};
            run_info[k] = {{"value", v}, {"params", params_json(p)}, {"derived", derived_json(p, r.derived)},
                           {"solver", solver_json(r)}, {"invariants", open_invariants(run)}, {"output", files[k]}};
            return;
        }
        // closed-system sweeps evaluate at t0 = pi / delta
        ResolvedRun r = resolve_run(cfg, p, false);
        const double t0 = r.derived.t0();
        if (!std::isfinite(t0)) throw ConfigError("closed sweep needs delta != 0");
        if (kind == SweepKind::delta_over_g && !cfg.t_end && !cfg.t_end_over_t0) {
            r.t_end = t0;
            r.dt = default_solver_config(p, t0).dt;
            r.record_stride = std::max(1, SolverConfig{r.dt, t0, 1}.steps() / 2000);
            r.notes.push_back("t_end = t0 for the detuning sweep");
        }
        const ClosedRun run = evolve_closed(SinglePhotonState::bell_photon(FockCutoff(r.n_max)), p, r.solver());
        write_record(ctx.options.output_dir / files[k], run.record);

        SolverConfig to_t0 = default_solver_config(p, t0);
        if (cfg.dt) to_t0.dt = t0 / SolverConfig{*cfg.dt, t0, 1}.steps();
        const ClosedRun at_t0 = evolve_closed(SinglePhotonState::bell_photon(FockCutoff(r.n_max)), p, to_t0);
        const SinglePhotonState& s0 = at_t0.final_state;
        const double f0 = fidelity_total(s0, p, r.derived, t0);
        const auto [fl, fr] = fidelity_conditional(s0, p, r.derived, t0);
        const ClosedObservables o = observe(s0);

        // <n_b> against |beta(t)|^2 over the recorded trajectory
        const auto ts = run.record.column("t");
        const auto nb = run.record.column("nb");
        double sup = 0.0;
        double peak = 0.0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const double b2 = std::norm(beta_of_t(r.derived, p.omega_m, ts[j]));
            sup = std::max(sup, std::abs(nb[j] - b2));
            peak = std::max(peak, b2);
        }
        const double envelope = fidelity_envelope(run.record, t0, std::numbers::pi / p.omega_0);
        summary[k] = {v, t0, o.n_left, o.n_right, f0, fl, fr, envelope, sup, peak > 0.0 ? sup / peak : 0.0};
        run_info[k] = {{"value", v}, {"params", params_json(p)}, {"derived", derived_json(p, r.derived)},
                       {"solver", solver_json(r)}, {"invariants", closed_invariants(run)}, {"output", files[k]}};
    });

    TrajectoryRecord rec(open_sweep ? std::vector<std::string>{name, "t_d", "P_L", "P_R", "F_L", "F_R", "visibility_L"}
                                    : std::vector<std::string>{name, "t0", "P_L", "P_R", "F", "F_L", "F_R",
                                                               "F_envelope", "nb_sup_err", "nb_sup_rel"});
    for (auto& row : summary) rec.append(std::move(row));
    write_record(ctx.path("sweep_" + name + ".csv"), rec);
    for (auto& info : run_info) runs.push_back(std::move(info));
    ctx.manifest["runs"] = runs;
}

} // namespace

ResolvedRun resolve_run(const RunConfig& cfg, const SystemParams& params, bool open_system) {
    ResolvedRun r;
    r.params = params;
    r.derived = derive(params);
    const DerivedModulation& d = r.derived;
    const double t0 = d.t0();

    if (cfg.t_d) {
        r.t_d = *cfg.t_d;
    } else if (!d.unbounded) {
        const auto cands = detection_time_candidates(params, d, t0);
        if (cands.empty()) {
            r.t_d = t0;
            r.notes.push_back("t_d = t0: equal weights unreachable at this xi");
        } else {
            const auto best = std::min_element(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.t - t0) < std::abs(b.t - t0);
            });
            r.t_d = best->t;
            r.notes.push_back("t_d = detection candidate closest to t0");
        }
    } else if (cfg.t_end) {
        r.t_d = *cfg.t_end;
        r.notes.push_back("t_d = t_end (delta = 0)");
    } else {
        throw ConfigError("delta = 0 needs an explicit t_d or t_end");
    }

    if (cfg.t_end) {
        r.t_end = *cfg.t_end;
    } else if (cfg.t_end_over_t0) {
        if (d.unbounded) throw ConfigError("t_end_over_t0 needs delta != 0");
        r.t_end = *cfg.t_end_over_t0 * t0;
    } else {
        r.t_end = r.t_d;
    }

    double reach = 0.0;
    if (d.unbounded) {
        reach = std::abs(d.g) * r.t_end;
    } else if (r.t_end >= t0) {
        reach = d.beta_max;
    } else {
        reach = std::abs(beta_of_t(d, params.omega_m, r.t_end));
    }
    if (cfg.n_max) {
        r.n_max = *cfg.n_max;
    } else {
        r.n_max = default_cutoff(reach).n_max();
        if (open_system) r.n_max = std::max(30, r.n_max);
    }

    const SolverConfig def = default_solver_config(params, r.t_end);
    r.dt = cfg.dt.value_or(def.dt);
    const int steps = SolverConfig{r.dt, r.t_end, 1}.steps();
    r.record_stride = cfg.record_stride.value_or(std::max(1, steps / (open_system ? 500 : 2000)));
    try {
        r.solver().validate(params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return r;
}

json matrix_to_json(const ComplexMatrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()) * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            data.push_back(m(i, j).real());
            data.push_back(m(i, j).imag());
        }
    }
    return {{"dim", {m.rows(), m.cols()}}, {"data", data}};
}

ComplexMatrix matrix_from_json(const json& j) {
    const auto rows = j.at("dim").at(0).get<Eigen::Index>();
    const auto cols = j.at("dim").at(1).get<Eigen::Index>();
    const auto& data = j.at("data");
    if (data.size() != static_cast<std::size_t>(rows * cols * 2)) throw std::invalid_argument("matrix_from_json: size");
    ComplexMatrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c, k += 2) m(i, c) = complex(data[k].get<double>(), data[k + 1].get<double>());
    }
    return m;
}

RunConfig config_from_manifest(const json& manifest) {
    std::string doc;
    for (const auto& [k, v] : manifest.at("config").items()) doc += k + " = " + v.get<std::string>() + "\n";
    return parse_config(doc);
}

int run(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
    fs::create_directories(options.output_dir);
    const auto started = std::chrono::steady_clock::now();
    Context ctx{cfg, options, log, json::object(), {}};
    ctx.manifest["mode"] = mode_name(cfg.mode);
    ctx.manifest["preset"] = cfg.preset ? json(*cfg.preset) : json(nullptr);
    ctx.manifest["config"] = cfg.canonical();
    ctx.manifest["overrides"] = cfg.override_log;
    ctx.manifest["params"] = params_json(cfg.params);
    ctx.manifest["derived"] = derived_json(cfg.params, derive(cfg.params));
    for (const auto& line : cfg.override_log) log << "override " << line << "\n";

    int status = 0;
    try {
        switch (cfg.mode) {
        case Mode::closed: run_closed(ctx); break;
        case Mode::open: run_open(ctx); break;
        case Mode::wigner: run_wigner(ctx); break;
        case Mode::quadrature: run_quadrature(ctx); break;
        case Mode::sweep: run_sweep(ctx); break;
        case Mode::detect_times: run_detect_times(ctx); break;
        }
    } catch (const SolverAbort& e) {
        write_text(options.output_dir / "diagnostic.txt", std::string(e.what()) + "\n" + e.diagnostic() + "\n");
        ctx.outputs.push_back("diagnostic.txt");
        ctx.manifest["abort"] = {{"what", e.what()}, {"diagnostic", e.diagnostic()}};
        log << "solver abort: " << e.what() << "\n" << e.diagnostic() << "\n";
        status = 3;
    }
    ctx.manifest["outputs"] = ctx.outputs;
    ctx.manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_text(options.output_dir / "manifest.json", ctx.manifest.dump(2) + "\n");
    return status;
}

} // namespace catforge
