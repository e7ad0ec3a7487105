#include "catforge/open.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "catforge/errors.hpp"
#include "catforge/rk4.hpp"

namespace catforge {

namespace {

constexpr double kTraceAbort = 1e-6;
constexpr double kEigenAbort = -1e-6;
constexpr double kCoherenceAbort = 1e-12;

int step_count(double span, double dt) {
    return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

double sector_energy(int s, const SystemParams& p) { return s == 2 ? 0.0 : p.omega_c; }

// Diagonal of the frame rotation exp(-i H0 t) in the sector-major basis.
ComplexVector frame_phases(int n, const SystemParams& p, double t) {
    ComplexVector ph(3 * n);
    for (int s = 0; s < 3; ++s) {
        for (int k = 0; k < n; ++k) {
            ph[s * n + k] = std::polar(1.0, -(sector_energy(s, p) + k * p.omega_m) * t);
        }
    }
    return ph;
}

double min_eigenvalue(const ComplexMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_bell_vacuum(const SystemDensityMatrix& r) {
    if (r.t != 0.0) return false;
    const SystemDensityMatrix ref = SystemDensityMatrix::bell_photon(FockCutoff(r.n_max()));
    return (r.rho - ref.rho).cwiseAbs().maxCoeff() < 1e-12;
}

} // namespace

const char* sector_name(PhotonSector s) {
    switch (s) {
    case PhotonSector::L: return "L";
    case PhotonSector::R: return "R";
    case PhotonSector::V: return "V";
    }
    return "?";
}

SystemDensityMatrix SystemDensityMatrix::bell_photon(FockCutoff cutoff) {
    return from_pure(SinglePhotonState::bell_photon(cutoff));
}

SystemDensityMatrix SystemDensityMatrix::from_pure(const SinglePhotonState& state) {
    const int n = static_cast<int>(state.a.size());
    ComplexVector psi = ComplexVector::Zero(3 * n);
    psi.segment(0, n) = state.a;
    psi.segment(n, n) = state.b;
    return {psi * psi.adjoint(), state.t};
}

SystemDensityMatrix SystemDensityMatrix::photon_in(PhotonSector sector, FockCutoff cutoff) {
    const int n = cutoff.dim();
    SystemDensityMatrix r{ComplexMatrix::Zero(3 * n, 3 * n), 0.0};
    const int k = static_cast<int>(sector) * n;
    r.rho(k, k) = 1.0;
    return r;
}

namespace {

struct BlockTerms {
    const complex* x;           // rho_su column q
    const complex* x_prev;      // column q - 1 (null at q = 0)
    const complex* x_next;      // column q + 1 (null at q = top)
    const complex* swap_s;      // rho_{s'u} column q (null for s = V)
    const complex* swap_u;      // rho_{su'} column q (null for u = V)
    const complex* refill_l;    // rho_LL column q (V V block only)
    const complex* refill_r;    // rho_RR column q
    const complex* left;        // per-row diagonal factor
    complex right;              // column diagonal factor
    complex hop_s, hop_u;
    complex rad_down, rad_up;   // s = R: coefficients of x[p + 1], x[p - 1]
    complex col_prev, col_next; // u = R: coefficients of x_prev[p], x_next[p]
    double jump_down, jump_up;  // phonon jump prefactors including sqrt(q + 1), sqrt(q)
    double refill;
    const double* sq;           // sq[k] = sqrt(k)
    int top;
};

template <bool Interior>
inline complex block_element(const BlockTerms& b, int p) {
    complex v = (b.left[p] + b.right) * b.x[p];
    if (b.swap_s) v += b.hop_s * b.swap_s[p];
    if (b.swap_u) v += b.hop_u * b.swap_u[p];
    if (Interior || p < b.top) v += b.rad_down * b.sq[p + 1] * b.x[p + 1];
    if (Interior || p > 0) v += b.rad_up * b.sq[p] * b.x[p - 1];
    if (b.x_prev) v += b.col_prev * b.x_prev[p];
    if (b.x_next) v += b.col_next * b.x_next[p];
    if (b.x_next && (Interior || p < b.top)) v += b.jump_down * b.sq[p + 1] * b.x_next[p + 1];
    if (b.x_prev && (Interior || p > 0)) v += b.jump_up * b.sq[p] * b.x_prev[p - 1];
    if (b.refill_l) v += b.refill * (b.refill_l[p] + b.refill_r[p]);
    return v;
}

} // namespace

void apply_lindblad(const ComplexMatrix& rho, double t, const SystemParams& params, Frame frame,
                    ComplexMatrix& out) {
    const int dim = static_cast<int>(rho.rows());
    const int n = dim / 3;
    const int top = n - 1;
    out.resize(dim, dim);

    const complex i(0.0, 1.0);
    const bool lab = frame == Frame::lab;
    const double h = -params.xi * params.omega_0 * std::cos(params.omega_0 * t);
    // X = c_down b + c_up b^dag in the chosen frame
    const complex c_down = lab ? complex(1.0) : std::polar(1.0, -params.omega_m * t);
    const complex c_up = std::conj(c_down);
    const double gc = params.gamma_c;
    const double down = params.gamma_m * (params.n_th + 1.0);
    const double up = params.gamma_m * params.n_th;

    std::vector<double> sq(n + 1);
    for (int k = 0; k <= n; ++k) sq[k] = std::sqrt(static_cast<double>(k));
    // -(1/2){L^dag L, .} and -i[H_free, .] split into row and column factors;
    // b b^dag is truncated to zero at the top level.
    std::vector<double> anti(n);
    for (int k = 0; k < n; ++k) anti[k] = -0.5 * down * k - 0.5 * up * (k < top ? k + 1.0 : 0.0);
    std::vector<complex> row_factor(3 * n);
    for (int s = 0; s < 3; ++s) {
        const double photon = s == 2 ? 0.0 : -0.5 * gc;
        for (int k = 0; k < n; ++k) {
            const double energy = lab ? sector_energy(s, params) + k * params.omega_m : 0.0;
            row_factor[s * n + k] = complex(anti[k] + photon, -energy);
        }
    }

    // Upper block triangle (s <= u), one task per block column; the lower
    // triangle follows from Hermiticity.
    const int tasks = 6 * n;
#pragma omp parallel for schedule(static)
    for (int task = 0; task < tasks; ++task) {
        static constexpr int pair_s[6] = {0, 0, 0, 1, 1, 2};
        static constexpr int pair_u[6] = {0, 1, 2, 1, 2, 2};
        const int s = pair_s[task / n];
        const int u = pair_u[task / n];
        const int q = task % n;
        auto column = [&](int sector, int sector_col, int k) {
            return rho.data() + static_cast<std::ptrdiff_t>(sector_col * n + k) * dim + sector * n;
        };

        BlockTerms b{};
        b.x = column(s, u, q);
        b.x_prev = q > 0 ? column(s, u, q - 1) : nullptr;
        b.x_next = q < top ? column(s, u, q + 1) : nullptr;
        b.swap_s = s != 2 ? column(1 - s, u, q) : nullptr;
        b.swap_u = u != 2 ? column(s, 1 - u, q) : nullptr;
        b.left = row_factor.data() + s * n;
        b.right = std::conj(row_factor[u * n + q]);
        b.hop_s = -i * h;
        b.hop_u = i * h;
        if (s == 1) {
            b.rad_down = i * params.g0 * c_down;
            b.rad_up = i * params.g0 * c_up;
        }
        if (u == 1) {
            b.col_prev = -i * params.g0 * c_down * sq[q];
            b.col_next = -i * params.g0 * c_up * sq[q + 1];
        }
        b.jump_down = down * sq[q + 1];
        b.jump_up = up * sq[q];
        if (s == 2 && u == 2) {
            b.refill_l = column(0, 0, q);
            b.refill_r = column(1, 1, q);
            b.refill = gc;
        }
        b.sq = sq.data();
        b.top = top;

        complex* dst = out.data() + static_cast<std::ptrdiff_t>(u * n + q) * dim + s * n;
        dst[0] = block_element<false>(b, 0);
        for (int p = 1; p < top; ++p) dst[p] = block_element<true>(b, p);
        dst[top] = block_element<false>(b, top);
    }

    for (int s = 0; s < 3; ++s) {
        for (int u = s + 1; u < 3; ++u) {
            out.block(u * n, s * n, n, n) = out.block(s * n, u * n, n, n).adjoint();
        }
    }
}

ComplexMatrix rhs_lindblad(const SystemDensityMatrix& rho, const SystemParams& params) {
    ComplexMatrix out;
    apply_lindblad(rho.rho, rho.t, params, Frame::lab, out);
    return out;
}

ComplexMatrix to_interaction_frame(const ComplexMatrix& rho_lab, const SystemParams& params, double t) {
    const ComplexVector ph = frame_phases(static_cast<int>(rho_lab.rows() / 3), params, t);
    // rho_I = U0^dag rho U0 with U0 = diag(ph)
    return ph.conjugate().asDiagonal() * rho_lab * ph.asDiagonal();
}

ComplexMatrix to_lab_frame(const ComplexMatrix& rho_int, const SystemParams& params, double t) {
    const ComplexVector ph = frame_phases(static_cast<int>(rho_int.rows() / 3), params, t);
    return ph.asDiagonal() * rho_int * ph.conjugate().asDiagonal();
}

std::pair<ComplexMatrix, double> reduce_mechanical(const SystemDensityMatrix& rho, PhotonSector sector) {
    ComplexMatrix blk = rho.block(sector, sector);
    const double p = blk.trace().real();
    if (p < 1e-12) {
        std::ostringstream msg;
        msg << "reduce_mechanical: probability of sector " << sector_name(sector) << " is " << p;
        throw UndefinedBranch(msg.str());
    }
    blk /= p;
    return {blk, p};
}

std::pair<double, double> fidelity_open(const SystemDensityMatrix& rho, const SystemParams& params,
                                        const DerivedModulation& d, double t) {
    const auto [phi_l, phi_r] = target_states(params, d, t);
    const FockCutoff cutoff(rho.n_max());
    const auto [rho_l, p_l] = reduce_mechanical(rho, PhotonSector::L);
    const auto [rho_r, p_r] = reduce_mechanical(rho, PhotonSector::R);
    const ComplexVector vl = phi_l.fock_coefficients(cutoff);
    const ComplexVector vr = phi_r.fock_coefficients(cutoff);
    return {(vl.adjoint() * rho_l * vl)(0, 0).real(), (vr.adjoint() * rho_r * vr)(0, 0).real()};
}

double cross_sector_coherence(const ComplexMatrix& rho) {
    const int n = static_cast<int>(rho.rows() / 3);
    const double upper = rho.block(0, 2 * n, 2 * n, n).cwiseAbs2().maxCoeff();
    const double lower = rho.block(2 * n, 0, n, 2 * n).cwiseAbs2().maxCoeff();
    return std::sqrt(std::max(upper, lower));
}

double phonon_number(const ComplexMatrix& rho) {
    const int n = static_cast<int>(rho.rows() / 3);
    double nb = 0.0;
    for (int s = 0; s < 3; ++s) {
        for (int k = 1; k < n; ++k) nb += k * rho(s * n + k, s * n + k).real();
    }
    return nb;
}

const std::vector<std::string>& open_columns() {
    static const std::vector<std::string> cols{"t", "P_L", "P_R", "P_V", "nb", "F_L", "F_R", "trace_err", "min_eig"};
    return cols;
}

OpenRun evolve_open(const SystemDensityMatrix& initial, const SystemParams& params, const SolverConfig& cfg,
                    const OpenSnapshotRequest& snapshots) {
    params.validate();
    cfg.validate(params);
    const int dim = static_cast<int>(initial.rho.rows());
    if (dim != initial.rho.cols() || dim % 3 != 0 || dim < 6) {
        throw std::invalid_argument("evolve_open: density matrix must be square with 3 (n_max + 1) rows");
    }
    const double herm0 = (initial.rho - initial.rho.adjoint()).cwiseAbs().maxCoeff();
    const double trace0 = initial.rho.trace().real();
    if (herm0 > 1e-10 || std::abs(trace0 - 1.0) > 1e-8 || min_eigenvalue(initial.rho) < -1e-8) {
        throw std::invalid_argument("evolve_open: initial state is not a valid density matrix");
    }
    if (cross_sector_coherence(initial.rho) > kCoherenceAbort) {
        throw std::invalid_argument("evolve_open: initial state has photon/vacuum coherences");
    }

    const bool with_fidelity = is_bell_vacuum(initial);
    const DerivedModulation d = derive(params);
    const int n = dim / 3;
    const double span = cfg.t_end - initial.t;
    const int n_steps = span > 0.0 ? step_count(span, cfg.dt) : 0;
    const double h = n_steps > 0 ? span / n_steps : 0.0;

    OpenRun run{TrajectoryRecord(open_columns()), initial, {}, 0.0, 0.0, herm0, cross_sector_coherence(initial.rho), 0.0};
    run.min_eigenvalue = min_eigenvalue(initial.rho);

    auto abort = [&](const std::string& what, double t, int step) {
        std::ostringstream diag;
        diag << "open solver: " << what << " at t = " << t << " (step " << step << ", dt = " << h
             << ", n_max = " << n - 1 << "); reduce dt or raise n_max";
        throw SolverAbort(what, diag.str());
    };

    auto record = [&](const ComplexMatrix& rho_int, double t, int step) {
        const SystemDensityMatrix lab{to_lab_frame(rho_int, params, t), t};
        const double trace_err = lab.rho.trace().real() - 1.0;
        const double mineig = min_eigenvalue(lab.rho);
        run.min_eigenvalue = std::min(run.min_eigenvalue, mineig);
        run.max_hermiticity_error =
            std::max(run.max_hermiticity_error, (lab.rho - lab.rho.adjoint()).cwiseAbs().maxCoeff());
        if (!(mineig >= kEigenAbort)) {
            std::ostringstream w;
            w << "min eigenvalue " << mineig << " below -1e-6";
            abort(w.str(), t, step);
        }
        double tail = 0.0;
        for (int s = 0; s < 3; ++s) {
            tail += lab.rho(s * n + n - 1, s * n + n - 1).real() + lab.rho(s * n + n - 2, s * n + n - 2).real();
        }
        run.max_tail = std::max(run.max_tail, tail);

        const double p_l = lab.block(PhotonSector::L, PhotonSector::L).trace().real();
        const double p_r = lab.block(PhotonSector::R, PhotonSector::R).trace().real();
        const double p_v = lab.block(PhotonSector::V, PhotonSector::V).trace().real();
        TrajectoryRecord::Row row{t, p_l, p_r, p_v, phonon_number(lab.rho), std::nullopt, std::nullopt,
                                  trace_err, mineig};
        if (with_fidelity && p_l >= 1e-12 && p_r >= 1e-12) {
            const auto [fl, fr] = fidelity_open(lab, params, d, t);
            row[5] = fl;
            row[6] = fr;
        }
        run.record.append(std::move(row));
        for (double ts : snapshots.times) {
            if (std::abs(ts - t) <= 0.5 * h + 1e-12) run.snapshots.push_back(lab);
        }
    };

    // Snapshot requests between record times force a record at that step.
    auto wants_snapshot = [&](double t) {
        for (double ts : snapshots.times) {
            if (std::abs(ts - t) <= 0.5 * h + 1e-12) return true;
        }
        return false;
    };

    ComplexMatrix y = to_interaction_frame(initial.rho, params, initial.t);
    Rk4Workspace<ComplexMatrix> ws;
    auto rhs = [&](double t, const ComplexMatrix& x, ComplexMatrix& dx) {
        apply_lindblad(x, t, params, Frame::interaction, dx);
    };

    record(y, initial.t, 0);
    for (int step = 1; step <= n_steps; ++step) {
        rk4_step(y, initial.t + (step - 1) * h, h, rhs, ws);
        const double t = (step == n_steps) ? cfg.t_end : initial.t + step * h;
        const double drift = std::abs(y.trace().real() - trace0);
        run.max_trace_drift = std::max(run.max_trace_drift, drift);
        if (!(drift <= kTraceAbort)) {
            std::ostringstream w;
            w << "trace drift " << drift << " above 1e-6";
            abort(w.str(), t, step);
        }
        const double coh = cross_sector_coherence(y);
        run.max_cross_coherence = std::max(run.max_cross_coherence, coh);
        if (!(coh <= kCoherenceAbort)) {
            std::ostringstream w;
            w << "photon/vacuum coherence " << coh << " above 1e-12";
            abort(w.str(), t, step);
        }
        if (step % cfg.record_stride == 0 || step == n_steps || wants_snapshot(t)) record(y, t, step);
    }
    const double t_final = n_steps > 0 ? cfg.t_end : initial.t;
    run.final_state = SystemDensityMatrix{to_lab_frame(y, params, t_final), t_final};
    return run;
}

} // namespace catforge
