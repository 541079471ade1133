/// Ground states by constrained minimization: minimize K(v) over the cone of
/// non-negative radial fields with P(v) = 1, then rescale the minimizer into a
/// solution of -gamma_k Lap psi_k = f_k(psi) via the discrete Lagrange
/// multiplier. Emits the dichotomy thresholds K(psi), Ecrit(psi) and the sharp
/// constant of the critical Sobolev-type inequality P <= C_opt K^{d/(d-2)}.
#pragma once

#include <optional>
#include <string>

#include "cnls/grid.hpp"
#include "cnls/system.hpp"

namespace cnls {

struct SolveOptions {
    double step0 = 0.5;          // initial pseudo-time step
    double step_min = 1e-7;      // stagnation threshold for the damping schedule
    double step_max = 4.0;
    double step_grow = 1.25;
    double step_shrink = 0.5;
    int max_iterations = 50000;
    double grad_tol = 1e-8;      // relative projected-gradient tolerance
    double guess_amplitude = 1.0;
    double guess_width = 1.4;
    std::optional<std::string> guess_file;  // snapshot path overriding the Gaussian
    double drift_restart_factor = 2.0;  // half-mass-radius drift triggering a restart
    int max_restarts = 2;

    void validate() const {
        if (!(step0 > 0)) throw std::invalid_argument("SolveOptions: step0 must be > 0");
        if (!(grad_tol > 0)) throw std::invalid_argument("SolveOptions: grad_tol must be > 0");
        if (max_iterations < 1)
            throw std::invalid_argument("SolveOptions: max_iterations must be >= 1");
    }
};

enum class SolveStatus { Converged, NonConvergence, CollapseToZero, DegenerateF };

std::string to_string(SolveStatus s);

struct GroundState {
    SolveStatus status = SolveStatus::NonConvergence;
    bool converged = false;
    RadialState psi;          // real non-negative minimizer, rescaled to solve the PDE
    double Kpsi = 0.0;
    double Ppsi = 0.0;
    double Ecrit_psi = 0.0;   // K - 2P
    double Jpsi = 0.0;        // K^{d/(d-2)} / P
    double Copt = 0.0;        // sharp constant
    double residual = 0.0;    // stationarity residual of psi
    double lambda = 0.0;      // discrete Lagrange multiplier of the constrained minimum
    int iterations = 0;
    double J_initial = 0.0;   // J of the initial guess
    std::string message;
};

GroundState solve_ground_state(const GridPtr& grid, const NonlinearSystem& sys,
                               const SolveOptions& opts);

/// max_k ||gamma_k Lap psi_k + f_k(psi)||_{L2(w)} / ||f_k(psi)||_{L2(w)}.
/// Rejects identically-zero fields.
double stationarity_residual(const RadialGrid& g, const NonlinearSystem& sys,
                             const RadialState& psi);

struct CoptResult {
    double formula = 0.0;   // (1/C_d) (2/Ecrit(psi))^{2/(d-2)},  C_d = (2/(d-2)) d^{d/(d-2)}
    double direct = 0.0;    // 1 / J(psi)
    double rel_gap = 0.0;
};

CoptResult compute_copt(const GroundState& gs, int d);

struct ThresholdPair {
    double Kpsi = 0.0;
    double Ecrit_psi = 0.0;
};

/// Returns K(psi) and Ecrit(psi), asserting K = (d/2) Ecrit to 1e-10 relative.
ThresholdPair thresholds(const GroundState& gs, int d);

}  // namespace cnls
