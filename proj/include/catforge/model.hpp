#pragma once

#include <utility>

#include "catforge/fock.hpp"

namespace catforge {

/// Physical parameters of the modulated two-cavity optomechanical system.
/// Every rate is expressed in units of the single-photon coupling g0.
struct SystemParams {
    double omega_c = 0.0;
    double omega_m = 20.0;
    double g0 = 1.0;
    double xi = 1.5271;
    int n0 = 1;
    double omega_0 = 9.8784;
    double gamma_c = 0.0;
    double gamma_m = 0.0;
    double n_th = 0.0;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    bool operator==(const SystemParams&) const = default;
};

/// Effective coupling g, detuning delta and the largest coherent amplitude.
struct DerivedModulation {
    double g = 0.0;
    double delta = 0.0;
    double beta_max = 0.0;      // +inf when unbounded
    bool unbounded = false;     // delta == 0: amplitude grows linearly

    double t0() const;          // first amplitude peak pi/|delta|
};

/// Sideband-RWA validity check: |delta| and g0/2 both below omega_0/5 and omega_m/5.
struct RwaDiagnostic {
    bool valid = false;
    double worst_ratio = 0.0;   // max(|delta|, g0/2) / min(omega_0, omega_m)
};

/// Superposition w_plus |beta> + w_minus |-beta> (weights unnormalized).
struct CatState {
    complex beta;
    complex weight_plus;
    complex weight_minus;

    /// <psi|psi> with the exact overlap <beta|-beta> = exp(-2|beta|^2).
    double norm_squared() const;

    /// Normalized Fock expansion on the cutoff.
    ComplexVector fock_coefficients(FockCutoff cutoff) const;

    /// Normalized density matrix on the cutoff.
    ComplexMatrix density_matrix(FockCutoff cutoff) const;
};

/// Bessel function of the first kind J_n(z), n >= 0, by Miller's downward
/// recurrence normalized with J_0 + 2 sum J_2k = 1.
double bessel_j(int order, double z);

DerivedModulation derive(const SystemParams& params);

RwaDiagnostic rwa_diagnostic(const SystemParams& params, const DerivedModulation& d);

/// Modulation frequency that produces the requested detuning:
/// omega_0 = (omega_m - delta) / (2 n0).
double omega0_for_detuning(double omega_m, int n0, double delta);

/// Effective coupling g = g0 J_{2 n0}(2 xi) / 2.
double effective_coupling(double g0, double xi, int n0);

/// beta(t) = -(2 i g / delta) sin(delta t / 2) exp(-i (omega_m - delta/2) t);
/// at delta == 0 the resonant limit -i g t exp(-i omega_m t).
complex beta_of_t(const DerivedModulation& d, double omega_m, double t);

/// mu(t) = 2 xi sin(omega_0 t).
double mu_of_t(const SystemParams& params, double t);

/// Global phase theta(t); returns -omega_c t when delta == 0 (no closed form
/// is available there and the phase is unobservable).
double theta_of_t(const SystemParams& params, const DerivedModulation& d, double t);

/// Target mechanical states (phi_L, phi_R) at time t.
std::pair<CatState, CatState> target_states(const SystemParams& params,
                                            const DerivedModulation& d, double t);

/// Heralding probability estimate exp(-4 pi gamma_c / g0) at delta = g.
double success_probability_estimate(const SystemParams& params);

} // namespace catforge
