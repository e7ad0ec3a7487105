#include "catforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "catforge/trajectory.hpp"

namespace catforge {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

} // namespace

void PhaseSpaceGrid::validate() const {
    if (n_re < 2 || n_im < 2) throw std::invalid_argument("PhaseSpaceGrid: need at least 2 points per axis");
    if (!(re_min < re_max) || !(im_min < im_max)) throw std::invalid_argument("PhaseSpaceGrid: bounds not ordered");
}

void QuadratureAxis::validate() const {
    if (x_values.size() < 2) throw std::invalid_argument("QuadratureAxis: need at least 2 points");
    for (std::size_t k = 1; k < x_values.size(); ++k) {
        if (!(x_values[k] > x_values[k - 1])) throw std::invalid_argument("QuadratureAxis: grid not increasing");
    }
}

QuadratureAxis QuadratureAxis::uniform(double theta, double x_min, double x_max, int n) {
    if (n < 2 || !(x_min < x_max)) throw std::invalid_argument("QuadratureAxis::uniform: bad range");
    QuadratureAxis axis{theta, std::vector<double>(n)};
    const double h = (x_max - x_min) / (n - 1);
    for (int k = 0; k < n; ++k) axis.x_values[k] = x_min + k * h;
    return axis;
}

double RealField::integral() const {
    const double hr = grid.step_re();
    const double hi = grid.step_im();
    double sum = 0.0;
    for (int i = 0; i < grid.n_re; ++i) {
        const double wr = (i == 0 || i == grid.n_re - 1) ? 0.5 : 1.0;
        for (int j = 0; j < grid.n_im; ++j) {
            const double wi = (j == 0 || j == grid.n_im - 1) ? 0.5 : 1.0;
            sum += wr * wi * at(i, j);
        }
    }
    return sum * hr * hi;
}

void RealField::write_csv(std::ostream& out) const {
    out << "eta_re,eta_im,W\n";
    for (int i = 0; i < grid.n_re; ++i) {
        for (int j = 0; j < grid.n_im; ++j) {
            out << format_number(grid.re(i)) << ',' << format_number(grid.im(j)) << ',' << format_number(at(i, j))
                << '\n';
        }
    }
}

RealField wigner_analytic(const CatState& state, const PhaseSpaceGrid& grid) {
    grid.validate();
    const double norm2 = state.norm_squared();
    if (!(norm2 > 0.0)) throw std::invalid_argument("wigner_analytic: cat state has zero norm");
    const complex beta = state.beta;
    const double wp = std::norm(state.weight_plus);
    const double wm = std::norm(state.weight_minus);
    // coefficient of |beta><-beta|
    const complex cross = state.weight_plus * std::conj(state.weight_minus);

    RealField field{grid, std::vector<double>(grid.size())};
#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.n_re; ++i) {
        for (int j = 0; j < grid.n_im; ++j) {
            const complex eta(grid.re(i), grid.im(j));
            const double g_plus = std::exp(-2.0 * std::norm(eta - beta));
            const double g_minus = std::exp(-2.0 * std::norm(eta + beta));
            const double phase = -4.0 * (eta * std::conj(beta)).imag();
            const double interference = 2.0 * (cross * std::polar(std::exp(-2.0 * std::norm(eta)), phase)).real();
            field.values[static_cast<std::size_t>(i) * grid.n_im + j] =
                kTwoOverPi * (wp * g_plus + wm * g_minus + interference) / norm2;
        }
    }
    return field;
}

int wigner_column_count(int dim, double eta_abs) {
    const double reach = eta_abs + std::sqrt(static_cast<double>(dim)) + 6.0;
    return std::max(dim, static_cast<int>(std::ceil(reach * reach)));
}

RealField wigner_numeric(const ComplexMatrix& rho, const PhaseSpaceGrid& grid) {
    grid.validate();
    const int dim = static_cast<int>(rho.rows());
    RealField field{grid, std::vector<double>(grid.size())};
    const int total = static_cast<int>(grid.size());

#pragma omp parallel for schedule(dynamic, 16)
    for (int idx = 0; idx < total; ++idx) {
        const int i = idx / grid.n_im;
        const int j = idx % grid.n_im;
        const complex eta(grid.re(i), grid.im(j));
        const int cols = wigner_column_count(dim, std::abs(eta));
        const ComplexMatrix d = displacement_matrix(eta, dim, cols);
        const ComplexMatrix rd = rho * d;
        double w = 0.0;
        for (int l = 0; l < cols; ++l) {
            w += parity(l) * d.col(l).dot(rd.col(l)).real();
        }
        field.values[idx] = kTwoOverPi * w;
    }
    return field;
}

std::vector<double> quadrature_analytic(const CatState& state, const QuadratureAxis& axis) {
    axis.validate();
    const FockCutoff cutoff = default_cutoff(std::abs(state.beta) + 1.0);
    const ComplexVector c = state.fock_coefficients(cutoff);
    std::vector<complex> rotated(cutoff.dim());
    for (int n = 0; n < cutoff.dim(); ++n) rotated[n] = c[n] * std::polar(1.0, -axis.theta * n);

    std::vector<double> p(axis.x_values.size());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < axis.x_values.size(); ++k) {
        const std::vector<double> psi = oscillator_eigenfunctions(cutoff.n_max(), axis.x_values[k]);
        complex amp = 0.0;
        for (int n = 0; n < cutoff.dim(); ++n) amp += rotated[n] * psi[n];
        p[k] = std::norm(amp);
    }
    return p;
}

std::vector<double> quadrature_numeric(const ComplexMatrix& rho, const QuadratureAxis& axis) {
    axis.validate();
    const int dim = static_cast<int>(rho.rows());
    ComplexVector phase(dim);
    for (int n = 0; n < dim; ++n) phase[n] = std::polar(1.0, axis.theta * n);

    std::vector<double> p(axis.x_values.size());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < axis.x_values.size(); ++k) {
        const std::vector<double> psi = oscillator_eigenfunctions(dim - 1, axis.x_values[k]);
        ComplexVector u(dim);
        for (int n = 0; n < dim; ++n) u[n] = psi[n] * phase[n];
        p[k] = u.dot(rho * u).real();
    }
    return p;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
    double sum = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) sum += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    return sum;
}

double theta_perpendicular(complex beta) { return std::arg(beta) - 0.5 * std::numbers::pi; }

double fringe_visibility(const QuadratureAxis& axis, const std::vector<double>& p, double half_width) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < axis.x_values.size(); ++k) {
        if (std::abs(axis.x_values[k]) <= half_width) {
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
    }
    if (!(hi >= lo)) throw std::invalid_argument("fringe_visibility: no samples inside the window");
    return (hi + lo) > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

std::vector<FieldPeak> field_peaks(const RealField& field, std::size_t max_count, double min_radius) {
    const PhaseSpaceGrid& g = field.grid;
    std::vector<FieldPeak> peaks;
    for (int i = 1; i + 1 < g.n_re; ++i) {
        for (int j = 1; j + 1 < g.n_im; ++j) {
            if (std::hypot(g.re(i), g.im(j)) < min_radius) continue;
            const double v = field.at(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di != 0 || dj != 0) && field.at(i + di, j + dj) >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({g.re(i), g.im(j), v});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const FieldPeak& a, const FieldPeak& b) { return a.value > b.value; });
    if (peaks.size() > max_count) peaks.resize(max_count);
    return peaks;
}

std::vector<BetaMaxRow> sweep_beta_max(const std::vector<double>& xi_list, const std::vector<double>& delta_grid,
                                       int n0, double g0) {
    if (n0 < 1) throw std::invalid_argument("sweep_beta_max: n0 must be >= 1");
    std::vector<BetaMaxRow> rows;
    rows.reserve(xi_list.size() * delta_grid.size());
    for (double xi : xi_list) {
        const double j = std::abs(bessel_j(2 * n0, 2.0 * xi));
        for (double delta : delta_grid) {
            if (!(delta > 0.0)) throw std::invalid_argument("sweep_beta_max: delta must be > 0");
            rows.push_back({xi, delta, g0 * j / delta});
        }
    }
    return rows;
}

std::vector<DetectionCandidate> detection_time_candidates(const SystemParams& params, const DerivedModulation& d,
                                                          double window_center, double half_width) {
    std::vector<DetectionCandidate> out;
    const double xi = std::abs(params.xi);
    const double pi = std::numbers::pi;
    if (2.0 * xi < 0.5 * pi) return out;
    const double w0 = params.omega_0;
    if (half_width <= 0.0) half_width = 2.0 * pi / w0;
    const double t_lo = std::max(0.0, window_center - half_width);
    const double t_hi = window_center + half_width;

    // mu = 2 xi sin(w0 t) = (k + 1/2) pi  <=>  sin(w0 t) = (k + 1/2) pi / (2 xi)
    std::vector<std::pair<int, double>> levels;
    for (int k = -static_cast<int>(std::ceil(2.0 * xi / pi)) - 1; k <= static_cast<int>(std::ceil(2.0 * xi / pi)); ++k) {
        const double s = (k + 0.5) * pi / (2.0 * params.xi);
        if (std::abs(s) < 1.0) levels.emplace_back(k, s);
    }

    // Monotone branches of sin(w0 t) lie between consecutive extrema (m + 1/2) pi / w0.
    const int m_first = static_cast<int>(std::floor(t_lo * w0 / pi - 0.5));
    const int m_last = static_cast<int>(std::ceil(t_hi * w0 / pi - 0.5));
    for (int m = m_first; m < m_last; ++m) {
        const double a0 = (m + 0.5) * pi / w0;
        const double b0 = (m + 1.5) * pi / w0;
        for (const auto& [k, s] : levels) {
            auto f = [&](double t) { return std::sin(w0 * t) - s; };
            double a = a0;
            double b = b0;
            double fa = f(a);
            if (fa * f(b) > 0.0) continue;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double t = 0.5 * (a + b);
            if (t >= t_lo && t <= t_hi) out.push_back({t, k, std::abs(beta_of_t(d, params.omega_m, t))});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
    return out;
}

} // namespace catforge
