#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace catforge {

using complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Highest retained Fock index of a truncated oscillator ladder.
class FockCutoff {
public:
    explicit FockCutoff(int n_max);

    int n_max() const { return n_max_; }
    int dim() const { return n_max_ + 1; }

    bool operator==(const FockCutoff&) const = default;

private:
    int n_max_;
};

/// Cutoff keeping the Poisson tail of a coherent state of amplitude
/// |beta| <= beta_abs_max below ~1e-8: ceil(b^2 + 8 sqrt(b^2 + 1)), floor 20.
FockCutoff default_cutoff(double beta_abs_max);

/// Population of the two highest Fock levels.
double tail_population(const ComplexVector& amplitudes);
double tail_population(const ComplexMatrix& rho);

/// c_n = exp(-|beta|^2/2) beta^n / sqrt(n!), n = 0..n_max.
ComplexVector coherent_coeffs(complex beta, FockCutoff cutoff);

/// Generalized Laguerre polynomial L_n^alpha(x) by forward recurrence in n.
double laguerre(int n, int alpha, double x);

/// <m|D(eta)|n> with D(eta) = exp(eta b^dag - conj(eta) b).
complex displacement_matrix_element(int m, int n, complex eta);

/// Dense block <m|D(eta)|n> for m < rows, n < cols. Walks each diagonal with a
/// single Laguerre recurrence, so the cost is O(rows * cols).
ComplexMatrix displacement_matrix(complex eta, int rows, int cols);

/// Normalized oscillator eigenfunction psi_n(x) = <x|n> (real part of the
/// rotated-quadrature wavefunction; callers apply exp(-i theta n)).
double oscillator_eigenfunction(int n, double x);

/// psi_0(x) .. psi_{n_max}(x) in one pass of the normalized recurrence.
std::vector<double> oscillator_eigenfunctions(int n_max, double x);

/// Truncated annihilation operator b on the cutoff (dense).
ComplexMatrix annihilation(FockCutoff cutoff);

} // namespace catforge
