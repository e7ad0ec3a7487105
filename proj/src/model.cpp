#include "catforge/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace catforge {

void SystemParams::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(omega_m > 0.0)) fail("omega_m must be > 0");
    if (!(g0 > 0.0)) fail("g0 must be > 0");
    if (!(omega_0 > 0.0)) fail("omega_0 must be > 0");
    if (!(gamma_c >= 0.0)) fail("gamma_c must be >= 0");
    if (!(gamma_m >= 0.0)) fail("gamma_m must be >= 0");
    if (!(n_th >= 0.0)) fail("n_th must be >= 0");
    if (n0 < 1) fail("n0 must be >= 1");
    if (!std::isfinite(omega_c) || !std::isfinite(xi)) fail("omega_c and xi must be finite");
}

double DerivedModulation::t0() const {
    return unbounded ? std::numeric_limits<double>::infinity() : std::numbers::pi / std::abs(delta);
}

double CatState::norm_squared() const {
    const double overlap = std::exp(-2.0 * std::norm(beta));
    return std::norm(weight_plus) + std::norm(weight_minus) +
           2.0 * (std::conj(weight_plus) * weight_minus).real() * overlap;
}

ComplexVector CatState::fock_coefficients(FockCutoff cutoff) const {
    const ComplexVector plus = coherent_coeffs(beta, cutoff);
    ComplexVector out(cutoff.dim());
    for (int n = 0; n < cutoff.dim(); ++n) {
        const double parity = (n % 2 == 0) ? 1.0 : -1.0;
        out[n] = (weight_plus + parity * weight_minus) * plus[n];
    }
    return out / std::sqrt(norm_squared());
}

ComplexMatrix CatState::density_matrix(FockCutoff cutoff) const {
    const ComplexVector psi = fock_coefficients(cutoff);
    return psi * psi.adjoint();
}

double bessel_j(int order, double z) {
    if (order < 0) {
        throw std::invalid_argument("bessel_j: negative order");
    }
    if (z == 0.0) {
        return order == 0 ? 1.0 : 0.0;
    }
    const double sign = (z < 0.0 && order % 2 == 1) ? -1.0 : 1.0;
    const double ax = std::abs(z);

    // Start well above both the order and the argument so the minimal
    // solution dominates by the time the recurrence reaches `order`.
    const double scale = std::max<double>(order, ax);
    int start = static_cast<int>(scale + 30.0 + std::sqrt(160.0 * scale));
    start += start % 2;

    constexpr double big = 1e250;
    double j_next = 0.0;
    double j_cur = 1e-300;
    double norm_sum = 0.0;
    double result = 0.0;
    for (int k = start; k > 0; --k) {
        const double j_prev = (2.0 * k / ax) * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if (std::abs(j_cur) > big) {
            j_cur /= big;
            j_next /= big;
            result /= big;
            norm_sum /= big;
        }
        // j_cur now holds the unnormalized J_{k-1}.
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            norm_sum += j_cur;
        }
        if (k - 1 == order) {
            result = j_cur;
        }
    }
    norm_sum = 2.0 * norm_sum + j_cur;
    return sign * result / norm_sum;
}

double effective_coupling(double g0, double xi, int n0) {
    return g0 * bessel_j(2 * n0, 2.0 * xi) / 2.0;
}

double omega0_for_detuning(double omega_m, int n0, double delta) {
    return (omega_m - delta) / (2.0 * n0);
}

DerivedModulation derive(const SystemParams& params) {
    DerivedModulation d;
    d.g = effective_coupling(params.g0, params.xi, params.n0);
    d.delta = params.omega_m - 2.0 * params.n0 * params.omega_0;
    if (d.delta == 0.0) {
        d.unbounded = true;
        d.beta_max = std::numeric_limits<double>::infinity();
    } else {
        d.beta_max = 2.0 * std::abs(d.g) / std::abs(d.delta);
    }
    return d;
}

RwaDiagnostic rwa_diagnostic(const SystemParams& params, const DerivedModulation& d) {
    const double fast = std::max(std::abs(d.delta), params.g0 / 2.0);
    const double slow = std::min(params.omega_0, params.omega_m);
    RwaDiagnostic diag;
    diag.worst_ratio = fast / slow;
    diag.valid = diag.worst_ratio < 0.2;
    return diag;
}

complex beta_of_t(const DerivedModulation& d, double omega_m, double t) {
    const complex i(0.0, 1.0);
    if (d.delta == 0.0) {
        return -i * d.g * t * std::exp(-i * omega_m * t);
    }
    return -(2.0 * i * d.g / d.delta) * std::sin(d.delta * t / 2.0) *
           std::exp(-i * (omega_m - d.delta / 2.0) * t);
}

double mu_of_t(const SystemParams& params, double t) {
    return 2.0 * params.xi * std::sin(params.omega_0 * t);
}

double theta_of_t(const SystemParams& params, const DerivedModulation& d, double t) {
    if (d.delta == 0.0) {
        return -params.omega_c * t;
    }
    const double r = d.g / d.delta;
    return -(params.omega_c - d.g * r) * t - r * r * std::sin(d.delta * t);
}

std::pair<CatState, CatState> target_states(const SystemParams& params,
                                            const DerivedModulation& d, double t) {
    const complex beta = beta_of_t(d, params.omega_m, t);
    const double half_mu = mu_of_t(params, t) / 2.0;
    const complex c = std::cos(half_mu);
    const complex is = complex(0.0, std::sin(half_mu));
    return {CatState{beta, c, is}, CatState{beta, is, c}};
}

double success_probability_estimate(const SystemParams& params) {
    return std::exp(-4.0 * std::numbers::pi * params.gamma_c / params.g0);
}

} // namespace catforge
