#pragma once

#include <ostream>
#include <vector>

#include "catforge/fock.hpp"
#include "catforge/model.hpp"

namespace catforge {

/// Rectangular grid of phase-space points eta = re + i im.
struct PhaseSpaceGrid {
    double re_min = -4.5;
    double re_max = 4.5;
    double im_min = -4.5;
    double im_max = 4.5;
    int n_re = 181;
    int n_im = 181;

    void validate() const;
    double re(int i) const { return re_min + i * step_re(); }
    double im(int j) const { return im_min + j * step_im(); }
    double step_re() const { return (re_max - re_min) / (n_re - 1); }
    double step_im() const { return (im_max - im_min) / (n_im - 1); }
    std::size_t size() const { return static_cast<std::size_t>(n_re) * n_im; }
};

/// Rotation angle theta and the sample points of X(theta).
struct QuadratureAxis {
    double theta = 0.0;
    std::vector<double> x_values;

    void validate() const;
    static QuadratureAxis uniform(double theta, double x_min, double x_max, int n);
};

/// Real values on a PhaseSpaceGrid, stored re-major: values[i * n_im + j].
struct RealField {
    PhaseSpaceGrid grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_im + j]; }
    /// Two-dimensional trapezoid integral over the grid.
    double integral() const;
    /// CSV with header eta_re,eta_im,W.
    void write_csv(std::ostream& out) const;
};

/// Closed-form Wigner function of a cat state, normalized with the exact
/// coherent overlap.
RealField wigner_analytic(const CatState& state, const PhaseSpaceGrid& grid);

/// W(eta) = (2/pi) sum_l (-1)^l (D^dag(eta) rho D(eta))_ll for a phonon
/// density matrix. OpenMP-parallel over grid points.
RealField wigner_numeric(const ComplexMatrix& rho, const PhaseSpaceGrid& grid);

/// Number of displaced Fock columns l kept at |eta| for a density matrix of
/// dimension `dim`.
int wigner_column_count(int dim, double eta_abs);

/// Distribution of X(theta) for a cat state from its Hermite expansion.
std::vector<double> quadrature_analytic(const CatState& state, const QuadratureAxis& axis);

/// P[X(theta)] = sum_pq rho_pq psi_p psi_q exp(i theta (q - p)). Values are
/// returned unclamped. OpenMP-parallel over sample points.
std::vector<double> quadrature_numeric(const ComplexMatrix& rho, const QuadratureAxis& axis);

/// Trapezoid integral of samples on the axis.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

/// Quadrature angle perpendicular to the line joining +-beta.
double theta_perpendicular(complex beta);

/// (max - min) / (max + min) of P over |X| <= half_width.
double fringe_visibility(const QuadratureAxis& axis, const std::vector<double>& p, double half_width = 1.0);

struct FieldPeak {
    double re = 0.0;
    double im = 0.0;
    double value = 0.0;
};

/// Strict local maxima (8-neighbourhood) with |eta| >= min_radius, sorted by
/// decreasing value.
std::vector<FieldPeak> field_peaks(const RealField& field, std::size_t max_count = 8, double min_radius = 0.0);

struct BetaMaxRow {
    double xi = 0.0;
    double delta = 0.0;
    double beta_max = 0.0;
};

/// |beta|_max = g0 |J_{2 n0}(2 xi)| / delta for every (xi, delta) pair,
/// xi-major. Throws std::invalid_argument for non-positive delta.
std::vector<BetaMaxRow> sweep_beta_max(const std::vector<double>& xi_list, const std::vector<double>& delta_grid,
                                       int n0, double g0 = 1.0);

struct DetectionCandidate {
    double t = 0.0;
    int level = 0;              // mu(t) = (level + 1/2) pi
    double beta_abs = 0.0;
};

/// Times with mu(t) = (k + 1/2) pi inside [center - half_width, center + half_width],
/// found by bisection on each monotone branch of sin(omega_0 t). Empty when
/// 2 xi < pi/2. half_width <= 0 selects one modulation period 2 pi / omega_0.
std::vector<DetectionCandidate> detection_time_candidates(const SystemParams& params, const DerivedModulation& d,
                                                          double window_center, double half_width = 0.0);

} // namespace catforge
