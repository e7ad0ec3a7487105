#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "catforge/closed.hpp"
#include "catforge/fock.hpp"
#include "catforge/model.hpp"
#include "catforge/trajectory.hpp"

namespace catforge {

/// Photon sectors kept in the open-system basis.
enum class PhotonSector { L = 0, R = 1, V = 2 };

const char* sector_name(PhotonSector s);

/// Density matrix over {L, R, V} x {0..n_max} phonons. Row index is
/// sector * (n_max + 1) + phonon.
struct SystemDensityMatrix {
    ComplexMatrix rho;
    double t = 0.0;

    int n_max() const { return static_cast<int>(rho.rows() / 3) - 1; }
    int phonon_dim() const { return static_cast<int>(rho.rows() / 3); }

    auto block(PhotonSector s, PhotonSector u) const {
        const int n = phonon_dim();
        return rho.block(static_cast<int>(s) * n, static_cast<int>(u) * n, n, n);
    }

    /// (|1,0> + |0,1>)/sqrt(2) times the phonon vacuum.
    static SystemDensityMatrix bell_photon(FockCutoff cutoff);
    /// Pure state |psi><psi| built from a single-photon amplitude state.
    static SystemDensityMatrix from_pure(const SinglePhotonState& state);
    /// One photon in `sector` (L or R) or none (V), phonon vacuum.
    static SystemDensityMatrix photon_in(PhotonSector sector, FockCutoff cutoff);
};

/// Reference frame of the density-matrix coordinates.
enum class Frame {
    lab,
    interaction,    // rotating with omega_c N_photon + omega_m b^dag b
};

/// d rho / dt of the master equation at time t, written into `out`.
/// OpenMP-parallel over columns; see reference::apply_lindblad for the
/// serial dense-operator version.
void apply_lindblad(const ComplexMatrix& rho, double t, const SystemParams& params, Frame frame,
                    ComplexMatrix& out);

/// Lab-frame time derivative of `rho` at rho.t.
ComplexMatrix rhs_lindblad(const SystemDensityMatrix& rho, const SystemParams& params);

/// Rotate coordinates between frames at time t.
ComplexMatrix to_interaction_frame(const ComplexMatrix& rho_lab, const SystemParams& params, double t);
ComplexMatrix to_lab_frame(const ComplexMatrix& rho_int, const SystemParams& params, double t);

/// Normalized mechanical state conditioned on `sector` and its probability.
/// Throws UndefinedBranch when the probability is below 1e-12.
std::pair<ComplexMatrix, double> reduce_mechanical(const SystemDensityMatrix& rho, PhotonSector sector);

/// <phi_s|rho_M^(s)|phi_s> for s = L, R against the target cat states.
std::pair<double, double> fidelity_open(const SystemDensityMatrix& rho, const SystemParams& params,
                                        const DerivedModulation& d, double t);

/// Largest magnitude of a coherence between a one-photon sector and V.
double cross_sector_coherence(const ComplexMatrix& rho);

struct OpenSnapshotRequest {
    std::vector<double> times;  // snapshots at the step closest to each time
};

struct OpenRun {
    TrajectoryRecord record;
    SystemDensityMatrix final_state;
    std::vector<SystemDensityMatrix> snapshots;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    double max_hermiticity_error = 0.0;
    double max_cross_coherence = 0.0;
    double max_tail = 0.0;
};

const std::vector<std::string>& open_columns();

/// RK4 evolution in the interaction frame; records and snapshots are in the
/// lab frame. Aborts on trace drift > 1e-6, eigenvalue < -1e-6 or a
/// photon/vacuum coherence above 1e-12. F_L and F_R are recorded only when
/// the initial state is the Bell-photon vacuum at t = 0.
OpenRun evolve_open(const SystemDensityMatrix& initial, const SystemParams& params, const SolverConfig& cfg,
                    const OpenSnapshotRequest& snapshots = {});

/// Occupation <b^dag b> summed over all photon sectors.
double phonon_number(const ComplexMatrix& rho);

} // namespace catforge
