#pragma once

#include <vector>

#include "catforge/analysis.hpp"
#include "catforge/model.hpp"
#include "catforge/open.hpp"

/// Serial reference kernels. They share no code with the parallel kernels
/// beyond the special functions, and exist for cross-checks and benchmarks.
namespace catforge::reference {

/// Master-equation derivative from dense operators:
/// -i (H_eff rho - rho H_eff^dag) + sum_k L_k rho L_k^dag.
void apply_lindblad(const ComplexMatrix& rho, double t, const SystemParams& params, Frame frame, ComplexMatrix& out);

/// Wigner function from element-wise displacement matrix elements.
RealField wigner_numeric(const ComplexMatrix& rho, const PhaseSpaceGrid& grid);

/// Double Hermite sum evaluated term by term.
std::vector<double> quadrature_numeric(const ComplexMatrix& rho, const QuadratureAxis& axis);

} // namespace catforge::reference
