#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

double bessel_series(int n, double z) {
    long double sum = 0.0L;
    long double term = std::pow(0.5L * z, n) / std::tgamma(static_cast<long double>(n + 1));
    for (int k = 0; k < 200; ++k) {
        sum += term;
        term *= -(0.25L * z * z) / ((k + 1.0L) * (k + n + 1.0L));
        if (std::abs(term) < 1e-30L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

Matrix ladder(int dim) {
    Matrix b = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

Matrix displacement_expm(complex eta, int dim, int padding) {
    const int big = dim + padding;
    const Matrix b = ladder(big);
    const Matrix gen = eta * b.adjoint() - std::conj(eta) * b;
    const Matrix d = gen.exp();
    return d.topLeftCorner(dim, dim);
}

Vector coherent_expm(complex beta, int dim) { return displacement_expm(beta, dim).col(0); }

Matrix element_equation_rhs(const Matrix& rho, double t, const catforge::SystemParams& p) {
    const int n_ph = static_cast<int>(rho.rows() / 3);
    const int top = n_ph - 1;
    // photon occupations (m, j) of the three sectors
    const int occ[3][2] = {{1, 0}, {0, 1}, {0, 0}};
    auto sector = [](int m, int j) -> int {
        if (m == 1 && j == 0) return 0;
        if (m == 0 && j == 1) return 1;
        if (m == 0 && j == 0) return 2;
        return -1;
    };
    auto el = [&](int m, int j, int pp, int n, int k, int q) -> complex {
        if (m < 0 || j < 0 || n < 0 || k < 0 || pp < 0 || q < 0 || pp > top || q > top) return 0.0;
        const int s = sector(m, j);
        const int u = sector(n, k);
        if (s < 0 || u < 0) return 0.0;
        return rho(s * n_ph + pp, u * n_ph + q);
    };
    auto rt = [](double v) { return std::sqrt(v); };
    // truncated b b^dag eigenvalue
    auto bbd = [&](int level) { return level < top ? level + 1.0 : 0.0; };

    const complex I(0.0, 1.0);
    const double hop = p.xi * p.omega_0 * std::cos(p.omega_0 * t);
    const double nth = p.n_th;
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (int s = 0; s < 3; ++s) {
        for (int u = 0; u < 3; ++u) {
            const int m = occ[s][0], j = occ[s][1], n = occ[u][0], k = occ[u][1];
            for (int pp = 0; pp < n_ph; ++pp) {
                for (int q = 0; q < n_ph; ++q) {
                    const double decay = 0.5 * p.gamma_c * (m + n + j + k) +
                                         0.5 * p.gamma_m * ((nth + 1.0) * (pp + q) + nth * (bbd(pp) + bbd(q)));
                    complex v = (I * ((n - m + k - j) * p.omega_c + (q - pp) * p.omega_m) - decay) *
                                el(m, j, pp, n, k, q);
                    v += -I * hop *
                         (rt((n + 1.0) * k) * el(m, j, pp, n + 1, k - 1, q) +
                          rt(n * (k + 1.0)) * el(m, j, pp, n - 1, k + 1, q));
                    v += I * hop *
                         (rt(m * (j + 1.0)) * el(m - 1, j + 1, pp, n, k, q) +
                          rt((m + 1.0) * j) * el(m + 1, j - 1, pp, n, k, q));
                    v += -I * (k * p.g0) *
                         (rt(q) * el(m, j, pp, n, k, q - 1) + rt(q + 1.0) * el(m, j, pp, n, k, q + 1));
                    v += I * (j * p.g0) *
                         (rt(pp + 1.0) * el(m, j, pp + 1, n, k, q) + rt(pp) * el(m, j, pp - 1, n, k, q));
                    v += p.gamma_c * (rt((m + 1.0) * (n + 1.0)) * el(m + 1, j, pp, n + 1, k, q) +
                                      rt((j + 1.0) * (k + 1.0)) * el(m, j + 1, pp, n, k + 1, q));
                    v += p.gamma_m * (rt((pp + 1.0) * (q + 1.0)) * (nth + 1.0) * el(m, j, pp + 1, n, k, q + 1) +
                                      rt(static_cast<double>(q) * pp) * nth * el(m, j, pp - 1, n, k, q - 1));
                    out(s * n_ph + pp, u * n_ph + q) = v;
                }
            }
        }
    }
    return out;
}

double wigner_parity_route(const Matrix& rho, complex eta) {
    const int dim = static_cast<int>(rho.rows());
    const int padding = 60 + static_cast<int>(std::ceil(8.0 * std::norm(eta)));
    const Matrix d = displacement_expm(2.0 * eta, dim, padding);
    complex sum = 0.0;
    for (int q = 0; q < dim; ++q) {
        const double parity = (q % 2 == 0) ? 1.0 : -1.0;
        for (int p = 0; p < dim; ++p) sum += rho(q, p) * parity * d(p, q);
    }
    return 2.0 / std::numbers::pi * sum.real();
}

complex coherent_wavefunction(complex alpha, double x) {
    const double norm = std::pow(std::numbers::pi, -0.25);
    return norm * std::exp(-0.5 * x * x + std::sqrt(2.0) * alpha * x - 0.5 * alpha * alpha - 0.5 * std::norm(alpha));
}

double cat_quadrature(complex beta, complex w_plus, complex w_minus, double theta, double x) {
    // X(theta) measures the rotated amplitude beta exp(-i theta)
    const complex rot = std::exp(complex(0.0, -theta));
    const complex amp = w_plus * coherent_wavefunction(beta * rot, x) + w_minus * coherent_wavefunction(-beta * rot, x);
    const double overlap = std::exp(-2.0 * std::norm(beta));
    const double norm2 =
        std::norm(w_plus) + std::norm(w_minus) + 2.0 * overlap * (std::conj(w_plus) * w_minus).real();
    return std::norm(amp) / norm2;
}

Matrix thermal_state(double n_th, int dim) {
    Matrix rho = Matrix::Zero(dim, dim);
    const double r = n_th / (n_th + 1.0);
    double total = 0.0;
    for (int n = 0; n < dim; ++n) total += std::pow(r, n);
    for (int n = 0; n < dim; ++n) rho(n, n) = std::pow(r, n) / total;
    return rho;
}

double trapezoid_uniform(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
    return s * h;
}

} // namespace oracle
