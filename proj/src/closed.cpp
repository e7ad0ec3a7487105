#include "catforge/closed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "catforge/errors.hpp"
#include "catforge/rk4.hpp"

namespace catforge {

namespace {

constexpr double kNormAbort = 1e-6;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

int step_count(double span, double dt) {
    return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

// State vector layout [A_0..A_nmax, B_0..B_nmax] in the frame rotating with
// omega_c N + omega_m b^dag b. In that frame only the hopping and the
// phase-carrying radiation-pressure terms remain.
struct InteractionRhs {
    const SystemParams& p;
    int dim;
    std::vector<double> sqrt_n;

    InteractionRhs(const SystemParams& params, int dim_) : p(params), dim(dim_), sqrt_n(dim_ + 1) {
        for (int n = 0; n <= dim; ++n) sqrt_n[n] = std::sqrt(static_cast<double>(n));
    }

    void operator()(double t, const ComplexVector& y, ComplexVector& dy) const {
        const complex i(0.0, 1.0);
        const complex hop = i * (p.xi * p.omega_0 * std::cos(p.omega_0 * t));
        const complex lower = i * p.g0 * std::polar(1.0, -p.omega_m * t); // couples B_{m+1} into B_m
        const complex raise = i * p.g0 * std::polar(1.0, p.omega_m * t);  // couples B_{m-1} into B_m
        const complex* a = y.data();
        const complex* b = y.data() + dim;
        complex* da = dy.data();
        complex* db = dy.data() + dim;
        for (int m = 0; m < dim; ++m) {
            da[m] = hop * b[m];
            complex v = hop * a[m];
            if (m + 1 < dim) v += lower * sqrt_n[m + 1] * b[m + 1];
            if (m > 0) v += raise * sqrt_n[m] * b[m - 1];
            db[m] = v;
        }
    }
};

ComplexVector to_interaction(const SinglePhotonState& s, const SystemParams& p) {
    const int dim = static_cast<int>(s.a.size());
    ComplexVector y(2 * dim);
    for (int m = 0; m < dim; ++m) {
        const complex phase = std::polar(1.0, (p.omega_c + m * p.omega_m) * s.t);
        y[m] = phase * s.a[m];
        y[dim + m] = phase * s.b[m];
    }
    return y;
}

SinglePhotonState to_lab(const ComplexVector& y, const SystemParams& p, double t) {
    const int dim = static_cast<int>(y.size() / 2);
    SinglePhotonState s;
    s.a.resize(dim);
    s.b.resize(dim);
    s.t = t;
    for (int m = 0; m < dim; ++m) {
        const complex phase = std::polar(1.0, -(p.omega_c + m * p.omega_m) * t);
        s.a[m] = phase * y[m];
        s.b[m] = phase * y[dim + m];
    }
    return s;
}

bool is_bell_vacuum(const SinglePhotonState& s) {
    if (s.t != 0.0) return false;
    const double h = 1.0 / std::sqrt(2.0);
    double err = std::abs(s.a[0] - h) + std::abs(s.b[0] - h);
    for (Eigen::Index m = 1; m < s.a.size(); ++m) err += std::abs(s.a[m]) + std::abs(s.b[m]);
    return err < 1e-12;
}

} // namespace

SinglePhotonState SinglePhotonState::photon_left(FockCutoff cutoff) {
    SinglePhotonState s{ComplexVector::Zero(cutoff.dim()), ComplexVector::Zero(cutoff.dim()), 0.0};
    s.a[0] = 1.0;
    return s;
}

SinglePhotonState SinglePhotonState::photon_right(FockCutoff cutoff) {
    SinglePhotonState s{ComplexVector::Zero(cutoff.dim()), ComplexVector::Zero(cutoff.dim()), 0.0};
    s.b[0] = 1.0;
    return s;
}

SinglePhotonState SinglePhotonState::bell_photon(FockCutoff cutoff) {
    SinglePhotonState s{ComplexVector::Zero(cutoff.dim()), ComplexVector::Zero(cutoff.dim()), 0.0};
    s.a[0] = s.b[0] = 1.0 / std::sqrt(2.0);
    return s;
}

double SinglePhotonState::tail_population() const {
    return catforge::tail_population(a) + catforge::tail_population(b);
}

int SolverConfig::steps() const { return step_count(t_end, dt); }

void SolverConfig::validate(const SystemParams& params) const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
    if (record_stride < 1) throw std::invalid_argument("SolverConfig: record_stride must be >= 1");
    const double limit = (2.0 * std::numbers::pi / max_resolved_frequency(params)) / 40.0;
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "SolverConfig: dt = " << dt << " exceeds (2 pi / omega_max) / 40 = " << limit;
        throw std::invalid_argument(msg.str());
    }
}

double max_resolved_frequency(const SystemParams& params) {
    return std::max(params.omega_m, params.omega_0 * (2.0 * params.n0 + 2.0));
}

SolverConfig default_solver_config(const SystemParams& params, double t_end, int record_stride) {
    const double dt_max = (2.0 * std::numbers::pi / max_resolved_frequency(params)) / 256.0;
    SolverConfig cfg;
    cfg.t_end = t_end;
    cfg.record_stride = record_stride;
    cfg.dt = t_end > 0.0 ? t_end / step_count(t_end, dt_max) : dt_max;
    return cfg;
}

SinglePhotonState rhs_closed(const SinglePhotonState& state, const SystemParams& params) {
    const complex i(0.0, 1.0);
    const int dim = static_cast<int>(state.a.size());
    const complex hop = i * (params.xi * params.omega_0 * std::cos(params.omega_0 * state.t));
    SinglePhotonState out{ComplexVector(dim), ComplexVector(dim), state.t};
    for (int m = 0; m < dim; ++m) {
        const complex free = -i * (params.omega_c + m * params.omega_m);
        out.a[m] = free * state.a[m] + hop * state.b[m];
        complex push = 0.0;
        if (m + 1 < dim) push += std::sqrt(m + 1.0) * state.b[m + 1];
        if (m > 0) push += std::sqrt(static_cast<double>(m)) * state.b[m - 1];
        out.b[m] = free * state.b[m] + hop * state.a[m] + i * params.g0 * push;
    }
    return out;
}

ClosedObservables observe(const SinglePhotonState& s) {
    ClosedObservables o;
    o.n_left = s.a.squaredNorm();
    o.n_right = s.b.squaredNorm();
    double x = 0.0;
    double nb = 0.0;
    for (Eigen::Index n = 0; n < s.a.size(); ++n) {
        nb += n * (std::norm(s.a[n]) + std::norm(s.b[n]));
        if (n + 1 < s.a.size()) {
            const complex c = std::conj(s.a[n]) * s.a[n + 1] + std::conj(s.b[n]) * s.b[n + 1];
            x += 2.0 * std::sqrt(n + 1.0) * c.real();
        }
    }
    o.x_over_x0 = x;
    o.n_phonon = nb;
    return o;
}

double fidelity_total(const SinglePhotonState& state, const SystemParams& params,
                      const DerivedModulation& d, double t) {
    const complex beta = beta_of_t(d, params.omega_m, t);
    const double half_mu = mu_of_t(params, t) / 2.0;
    const double c = std::cos(half_mu);
    const complex is(0.0, std::sin(half_mu));
    const ComplexVector coh = coherent_coeffs(beta, FockCutoff(static_cast<int>(state.a.size()) - 1));
    complex sum = 0.0;
    for (Eigen::Index m = 0; m < state.a.size(); ++m) {
        const complex a = std::conj(state.a[m]);
        const complex b = std::conj(state.b[m]);
        sum += coh[m] * ((a * c + b * is) + parity(static_cast<int>(m)) * (b * c + a * is));
    }
    return 0.5 * std::norm(sum);
}

ConditionalStates conditional_states(const SinglePhotonState& state) {
    ConditionalStates out;
    out.p_left = state.a.squaredNorm();
    out.p_right = state.b.squaredNorm();
    if (out.p_left < 1e-12 || out.p_right < 1e-12) {
        throw UndefinedBranch("conditional_states: detection probability below 1e-12");
    }
    out.psi_left = state.a / std::sqrt(out.p_left);
    out.psi_right = state.b / std::sqrt(out.p_right);
    return out;
}

std::pair<double, double> fidelity_conditional(const SinglePhotonState& state, const SystemParams& params,
                                               const DerivedModulation& d, double t) {
    const double p_left = state.a.squaredNorm();
    const double p_right = state.b.squaredNorm();
    if (p_left < 1e-12 || p_right < 1e-12) {
        throw UndefinedBranch("fidelity_conditional: detection probability below 1e-12");
    }
    const complex beta = beta_of_t(d, params.omega_m, t);
    const double half_mu = mu_of_t(params, t) / 2.0;
    const double c = std::cos(half_mu);
    const complex is(0.0, std::sin(half_mu));
    const ComplexVector coh = coherent_coeffs(beta, FockCutoff(static_cast<int>(state.a.size()) - 1));
    complex sum_l = 0.0;
    complex sum_r = 0.0;
    for (Eigen::Index m = 0; m < state.a.size(); ++m) {
        const double sgn = parity(static_cast<int>(m));
        sum_l += std::conj(state.a[m]) * coh[m] * (c + sgn * is);
        sum_r += std::conj(state.b[m]) * coh[m] * (is + sgn * c);
    }
    return {std::norm(sum_l) / p_left, std::norm(sum_r) / p_right};
}

const std::vector<std::string>& closed_columns() {
    static const std::vector<std::string> cols{"t", "nL", "nR", "x_over_x0", "nb", "P_L", "P_R", "F", "F_L", "F_R"};
    return cols;
}

ClosedRun evolve_closed(const SinglePhotonState& initial, const SystemParams& params, const SolverConfig& cfg) {
    params.validate();
    cfg.validate(params);
    if (initial.a.size() != initial.b.size() || initial.a.size() < 2) {
        throw std::invalid_argument("evolve_closed: malformed initial state");
    }
    const double norm0 = initial.norm_squared();
    if (std::abs(norm0 - 1.0) > 1e-10) {
        throw std::invalid_argument("evolve_closed: initial state is not normalized");
    }

    const bool with_fidelity = is_bell_vacuum(initial);
    const DerivedModulation d = derive(params);
    const int dim = static_cast<int>(initial.a.size());
    const double span = cfg.t_end - initial.t;
    const int n_steps = span > 0.0 ? step_count(span, cfg.dt) : 0;
    const double h = n_steps > 0 ? span / n_steps : 0.0;

    ClosedRun run{TrajectoryRecord(closed_columns()), initial, 0.0, initial.tail_population()};

    auto record = [&](const SinglePhotonState& s) {
        const ClosedObservables o = observe(s);
        TrajectoryRecord::Row row{s.t, o.n_left, o.n_right, o.x_over_x0, o.n_phonon, o.n_left, o.n_right,
                                  std::nullopt, std::nullopt, std::nullopt};
        if (with_fidelity) {
            row[7] = fidelity_total(s, params, d, s.t);
            const auto [fl, fr] = fidelity_conditional(s, params, d, s.t);
            row[8] = fl;
            row[9] = fr;
        }
        run.record.append(std::move(row));
        run.max_tail = std::max(run.max_tail, s.tail_population());
    };

    InteractionRhs rhs(params, dim);
    Rk4Workspace<ComplexVector> ws;
    ComplexVector y = to_interaction(initial, params);
    record(initial);
    for (int step = 1; step <= n_steps; ++step) {
        const double t_prev = initial.t + (step - 1) * h;
        rk4_step(y, t_prev, h, rhs, ws);
        const double t = (step == n_steps) ? cfg.t_end : initial.t + step * h;
        const double drift = std::abs(y.squaredNorm() - norm0);
        run.max_norm_drift = std::max(run.max_norm_drift, drift);
        if (!(drift <= kNormAbort)) {
            std::ostringstream diag;
            diag << "closed solver: norm drift " << drift << " at t = " << t << " (step " << step << ", dt = " << h
                 << "); reduce dt below " << h / 2.0 << " or raise n_max";
            throw SolverAbort("norm drift exceeded 1e-6", diag.str());
        }
        if (step % cfg.record_stride == 0 || step == n_steps) {
            record(to_lab(y, params, t));
        }
    }
    run.final_state = to_lab(y, params, n_steps > 0 ? cfg.t_end : initial.t);
    return run;
}

} // namespace catforge
