#pragma once

#include <utility>

#include "catforge/fock.hpp"
#include "catforge/model.hpp"
#include "catforge/trajectory.hpp"

namespace catforge {

/// Single-photon state sum_m [A_m |1,0,m> + B_m |0,1,m>] in the lab frame.
struct SinglePhotonState {
    ComplexVector a;    // photon in the left cavity
    ComplexVector b;    // photon in the right cavity
    double t = 0.0;

    static SinglePhotonState photon_left(FockCutoff cutoff);
    static SinglePhotonState photon_right(FockCutoff cutoff);
    /// (|1,0> + |0,1>) |0>_M / sqrt(2)
    static SinglePhotonState bell_photon(FockCutoff cutoff);

    FockCutoff cutoff() const { return FockCutoff(static_cast<int>(a.size()) - 1); }
    double norm_squared() const { return a.squaredNorm() + b.squaredNorm(); }
    double tail_population() const;
};

/// Fixed-step RK4 settings shared by the closed and open solvers.
struct SolverConfig {
    double dt = 0.0;
    double t_end = 0.0;
    int record_stride = 1;

    int steps() const;
    /// Throws std::invalid_argument when dt is not positive or fails to
    /// resolve the fastest retained oscillation (40 points per period).
    void validate(const SystemParams& params) const;
};

/// Fastest frequency the integrator must resolve: max(omega_m, omega_0 (2 n0 + 2)).
double max_resolved_frequency(const SystemParams& params);

/// dt = (2 pi / omega_max) / 256, shortened so that an integer number of
/// steps lands exactly on t_end.
SolverConfig default_solver_config(const SystemParams& params, double t_end, int record_stride = 1);

/// Lab-frame time derivative (the amplitude equations of motion).
SinglePhotonState rhs_closed(const SinglePhotonState& state, const SystemParams& params);

struct ClosedObservables {
    double n_left = 0.0;
    double n_right = 0.0;
    double x_over_x0 = 0.0;
    double n_phonon = 0.0;
};

ClosedObservables observe(const SinglePhotonState& state);

/// |<Psi(t)|psi_RWA(t)>|^2 for the Bell-photon initial condition.
double fidelity_total(const SinglePhotonState& state, const SystemParams& params,
                      const DerivedModulation& d, double t);

/// Mechanical states heralded by detecting the photon left or right.
struct ConditionalStates {
    ComplexVector psi_left;     // normalized
    double p_left = 0.0;
    ComplexVector psi_right;
    double p_right = 0.0;
};

/// Throws UndefinedBranch if either detection probability is below 1e-12.
ConditionalStates conditional_states(const SinglePhotonState& state);

/// (F_L, F_R) of the heralded states against the target cat states.
std::pair<double, double> fidelity_conditional(const SinglePhotonState& state, const SystemParams& params,
                                               const DerivedModulation& d, double t);

struct ClosedRun {
    TrajectoryRecord record;
    SinglePhotonState final_state;
    double max_norm_drift = 0.0;
    double max_tail = 0.0;
};

/// Columns of the closed-system trajectory CSV.
const std::vector<std::string>& closed_columns();

/// RK4 trajectory from `initial` (taken at time initial.t) to cfg.t_end.
/// Fidelity columns are filled only when `initial` is the Bell-photon vacuum
/// state at t = 0. Norm drift above 1e-6 raises SolverAbort.
ClosedRun evolve_closed(const SinglePhotonState& initial, const SystemParams& params, const SolverConfig& cfg);

} // namespace catforge
