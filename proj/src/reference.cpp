#include "catforge/reference.hpp"

#include <cmath>
#include <numbers>

namespace catforge::reference {

namespace {

ComplexMatrix embed(int n, int s, int u, const ComplexMatrix& m) {
    ComplexMatrix out = ComplexMatrix::Zero(3 * n, 3 * n);
    out.block(s * n, u * n, n, n) = m;
    return out;
}

} // namespace

void apply_lindblad(const ComplexMatrix& rho, double t, const SystemParams& params, Frame frame, ComplexMatrix& out) {
    const int n = static_cast<int>(rho.rows() / 3);
    const FockCutoff cutoff(n - 1);
    const complex i(0.0, 1.0);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix b = annihilation(cutoff);
    ComplexMatrix num = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) num(k, k) = k;

    const bool lab = frame == Frame::lab;
    const complex phase = lab ? complex(1.0) : std::polar(1.0, -params.omega_m * t);
    const ComplexMatrix x = phase * b + std::conj(phase) * b.adjoint();

    ComplexMatrix h = ComplexMatrix::Zero(3 * n, 3 * n);
    if (lab) {
        h += embed(n, 0, 0, params.omega_c * id + params.omega_m * num);
        h += embed(n, 1, 1, params.omega_c * id + params.omega_m * num);
        h += embed(n, 2, 2, params.omega_m * num);
    }
    const double hop = -params.xi * params.omega_0 * std::cos(params.omega_0 * t);
    h += embed(n, 0, 1, hop * id) + embed(n, 1, 0, hop * id);
    h -= embed(n, 1, 1, params.g0 * x);

    std::vector<ComplexMatrix> jumps;
    jumps.push_back(std::sqrt(params.gamma_c) * embed(n, 2, 0, id));
    jumps.push_back(std::sqrt(params.gamma_c) * embed(n, 2, 1, id));
    ComplexMatrix b_full = ComplexMatrix::Zero(3 * n, 3 * n);
    for (int s = 0; s < 3; ++s) b_full += embed(n, s, s, b);
    jumps.push_back(std::sqrt(params.gamma_m * (params.n_th + 1.0)) * b_full);
    jumps.push_back(std::sqrt(params.gamma_m * params.n_th) * b_full.adjoint());

    ComplexMatrix h_eff = h;
    for (const auto& l : jumps) h_eff -= 0.5 * i * (l.adjoint() * l);

    out = -i * (h_eff * rho - rho * h_eff.adjoint());
    for (const auto& l : jumps) out += l * rho * l.adjoint();
}

RealField wigner_numeric(const ComplexMatrix& rho, const PhaseSpaceGrid& grid) {
    grid.validate();
    const int dim = static_cast<int>(rho.rows());
    RealField field{grid, std::vector<double>(grid.size())};
    for (int i = 0; i < grid.n_re; ++i) {
        for (int j = 0; j < grid.n_im; ++j) {
            const complex eta(grid.re(i), grid.im(j));
            const int cols = wigner_column_count(dim, std::abs(eta));
            double w = 0.0;
            for (int l = 0; l < cols; ++l) {
                ComplexVector col(dim);
                for (int p = 0; p < dim; ++p) col[p] = displacement_matrix_element(p, l, eta);
                const double sign = (l % 2 == 0) ? 1.0 : -1.0;
                w += sign * col.dot(rho * col).real();
            }
            field.values[static_cast<std::size_t>(i) * grid.n_im + j] = (2.0 / std::numbers::pi) * w;
        }
    }
    return field;
}

std::vector<double> quadrature_numeric(const ComplexMatrix& rho, const QuadratureAxis& axis) {
    axis.validate();
    const int dim = static_cast<int>(rho.rows());
    std::vector<double> out;
    out.reserve(axis.x_values.size());
    for (double x : axis.x_values) {
        complex sum = 0.0;
        for (int p = 0; p < dim; ++p) {
            const double psi_p = oscillator_eigenfunction(p, x);
            for (int q = 0; q < dim; ++q) {
                sum += rho(p, q) * psi_p * oscillator_eigenfunction(q, x) * std::polar(1.0, axis.theta * (q - p));
            }
        }
        out.push_back(sum.real());
    }
    return out;
}

} // namespace catforge::reference
