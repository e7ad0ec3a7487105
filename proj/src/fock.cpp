#include "catforge/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace catforge {

FockCutoff::FockCutoff(int n_max) : n_max_(n_max) {
    if (n_max < 1) {
        throw std::invalid_argument("FockCutoff: n_max must be >= 1, got " + std::to_string(n_max));
    }
}

FockCutoff default_cutoff(double beta_abs_max) {
    const double b2 = beta_abs_max * beta_abs_max;
    const int n = static_cast<int>(std::ceil(b2 + 8.0 * std::sqrt(b2 + 1.0)));
    return FockCutoff(std::max(20, n));
}

double tail_population(const ComplexVector& amplitudes) {
    const Eigen::Index n = amplitudes.size();
    double tail = 0.0;
    for (Eigen::Index k = std::max<Eigen::Index>(0, n - 2); k < n; ++k) {
        tail += std::norm(amplitudes[k]);
    }
    return tail;
}

double tail_population(const ComplexMatrix& rho) {
    const Eigen::Index n = rho.rows();
    double tail = 0.0;
    for (Eigen::Index k = std::max<Eigen::Index>(0, n - 2); k < n; ++k) {
        tail += rho(k, k).real();
    }
    return tail;
}

ComplexVector coherent_coeffs(complex beta, FockCutoff cutoff) {
    ComplexVector c(cutoff.dim());
    c[0] = std::exp(-0.5 * std::norm(beta));
    for (int n = 0; n < cutoff.n_max(); ++n) {
        c[n + 1] = c[n] * beta / std::sqrt(static_cast<double>(n + 1));
    }
    return c;
}

double laguerre(int n, int alpha, double x) {
    if (n < 0) {
        throw std::invalid_argument("laguerre: negative degree");
    }
    double prev = 1.0;
    if (n == 0) {
        return prev;
    }
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

complex displacement_matrix_element(int m, int n, complex eta) {
    if (m < 0 || n < 0) {
        throw std::invalid_argument("displacement_matrix_element: negative Fock index");
    }
    const double x = std::norm(eta);
    const int lo = std::min(m, n);
    const int k = std::abs(m - n);
    // m >= n carries eta^(m-n); m < n carries (-conj(eta))^(n-m).
    const complex z = (m >= n) ? eta : -std::conj(eta);
    if (k > 0 && z == complex(0.0)) {
        return 0.0;
    }
    double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) - 0.5 * x;
    double phase = 0.0;
    if (k > 0) {
        log_mag += k * std::log(std::abs(z));
        phase = k * std::arg(z);
    }
    return std::polar(std::exp(log_mag), phase) * laguerre(lo, k, x);
}

namespace {

// Fill entries (lo + k, lo) (lower == true) or (lo, lo + k) of `out` for all lo
// that fit, using one Laguerre recurrence in lo.
void fill_diagonal(ComplexMatrix& out, int k, complex z, double x, bool lower) {
    const int rows = static_cast<int>(out.rows());
    const int cols = static_cast<int>(out.cols());
    const int count = lower ? std::min(cols, rows - k) : std::min(rows, cols - k);
    if (count <= 0) {
        return;
    }
    complex unit_k = 1.0;
    double log_pref = -0.5 * x - 0.5 * std::lgamma(k + 1.0);
    if (k > 0) {
        if (z == complex(0.0)) {
            for (int lo = 0; lo < count; ++lo) {
                (lower ? out(lo + k, lo) : out(lo, lo + k)) = 0.0;
            }
            return;
        }
        const double r = std::abs(z);
        unit_k = std::polar(1.0, k * std::arg(z));
        log_pref += k * std::log(r);
    }
    double pref = std::exp(log_pref);
    double lag_prev = 0.0;
    double lag = 1.0;
    for (int lo = 0; lo < count; ++lo) {
        if (lo == 1) {
            lag_prev = lag;
            lag = 1.0 + k - x;
        } else if (lo > 1) {
            const int j = lo - 1;
            const double next = ((2.0 * j + 1.0 + k - x) * lag - (j + k) * lag_prev) / (j + 1.0);
            lag_prev = lag;
            lag = next;
        }
        if (lo > 0) {
            pref *= std::sqrt(lo / static_cast<double>(lo + k));
        }
        (lower ? out(lo + k, lo) : out(lo, lo + k)) = unit_k * (pref * lag);
    }
}

} // namespace

ComplexMatrix displacement_matrix(complex eta, int rows, int cols) {
    ComplexMatrix out(rows, cols);
    const double x = std::norm(eta);
    for (int k = 0; k < rows; ++k) {
        fill_diagonal(out, k, eta, x, true);
    }
    for (int k = 1; k < cols; ++k) {
        fill_diagonal(out, k, -std::conj(eta), x, false);
    }
    return out;
}

double oscillator_eigenfunction(int n, double x) {
    if (n < 0) {
        throw std::invalid_argument("oscillator_eigenfunction: negative Fock index");
    }
    return oscillator_eigenfunctions(n, x)[n];
}

std::vector<double> oscillator_eigenfunctions(int n_max, double x) {
    std::vector<double> psi(n_max + 1);
    psi[0] = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
    if (n_max >= 1) {
        psi[1] = std::sqrt(2.0) * x * psi[0];
    }
    for (int n = 1; n < n_max; ++n) {
        psi[n + 1] = x * std::sqrt(2.0 / (n + 1)) * psi[n] - std::sqrt(n / (n + 1.0)) * psi[n - 1];
    }
    return psi;
}

ComplexMatrix annihilation(FockCutoff cutoff) {
    ComplexMatrix b = ComplexMatrix::Zero(cutoff.dim(), cutoff.dim());
    for (int n = 1; n <= cutoff.n_max(); ++n) {
        b(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return b;
}

} // namespace catforge
