/// Time integration on the radial grid: Strang splitting with Crank-Nicolson
/// linear half-steps (tridiagonal, unitary for the discrete Laplacian) and a
/// pointwise RK4 nonlinear substep, adaptive step control with an amplitude
/// cap, and blow-up classification by verdict.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cnls/diagnostics_types.hpp"
#include "cnls/grid.hpp"
#include "cnls/system.hpp"

namespace cnls {

struct StepControls {
    double dt0 = 1e-3;
    double dt_min = 1e-10;
    double dt_max = 0.05;
    double safety = 0.9;
    double c_amp = 0.5;          // amplitude cap factor for the nonlinear time scale
    double tol = 1e-9;           // per-step relative error tolerance
    double record_interval = 0.01;
    std::vector<double> snapshot_times;

    void validate() const {
        if (!(dt_min > 0 && dt_min <= dt0 && dt0 <= dt_max))
            throw std::invalid_argument("StepControls: need 0 < dt_min <= dt0 <= dt_max");
        if (!(tol > 0) || !(safety > 0))
            throw std::invalid_argument("StepControls: tol and safety must be > 0");
    }
};

struct BlowupRule {
    double growth_factor = 10.0;  // K growth over K(t=0) that signals blow-up
    int window = 3;               // records over which K must be increasing
};

struct TrajectorySample {
    double t = 0.0;
    double dt = 0.0;  // step size in effect when the sample was recorded
    FunctionalRecord f;
    double V = 0.0;         // weighted second moment
    double Vprime = 0.0;    // virial first-derivative formula
    double R = 0.0;         // Morawetz quantity (alpha-weighted, equals Vprime)
    double Rprime = 0.0;    // Morawetz derivative formula
    double max_amp = 0.0;
    std::vector<double> snorm_density;  // per-component int |u_k|^{2(d+2)/(d-2)} dx
};

struct BlowUpEvidence {
    double k_growth_factor = 0.0;  // K(t*) / K(0)
    double final_dt = 0.0;
    double t_star = 0.0;
};

struct Verdict {
    enum class Kind { Completed, BlowUp, Unresolved } kind = Kind::Unresolved;
    double T = 0.0;  // final time reached
    BlowUpEvidence evidence;
    std::string reason;
};

std::string to_string(Verdict::Kind k);

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<RadialState> snapshots;
    RadialState final_state;
    Verdict verdict;
};

/// Crank-Nicolson evolution of i alpha_k dt u_k = -(gamma_k Lap - beta_k) u_k
/// over a time interval half_dt, per component (tridiagonal solve). Unitary in
/// the discrete L2(w) norm.
RadialState linear_halfstep(const RadialState& state, double half_dt,
                            const SystemParams& params);

/// One classical RK4 step of the node-local ODE dt u_k = (i/alpha_k) f_k(u)
/// over dt at every node.
RadialState nonlinear_substep(const RadialState& state, double dt,
                              const NonlinearSystem& sys);

/// Strang composition: linear(dt/2) o nonlinear(dt) o linear(dt/2).
RadialState step(const RadialState& state, double dt, const NonlinearSystem& sys);

/// dt <- clamp(safety dt (tol/err)^{1/3}, dt_min, dt_max), additionally capped
/// by c_amp / (1 + max |u|^{4/(d-2)}).
double adapt_dt(const RadialState& state, const StepControls& controls, double dt,
                double last_error);

/// Classify a record history: BlowUp iff K exceeded growth_factor x K(first
/// record), K increasing over the last `window` records, and dt <= 2 dt_min;
/// Unresolved if dt reached dt_min without that signature; nullopt otherwise.
std::optional<Verdict> detect_blowup(const std::vector<TrajectorySample>& history,
                                     const BlowupRule& rule, double dt_min);

using SampleCallback = std::function<void(const TrajectorySample&)>;

/// Advance to time T with adaptive Strang stepping, recording functionals and
/// diagnostics at the configured cadence. All failures become verdicts.
Trajectory evolve_until(RadialState state, double T, const NonlinearSystem& sys,
                        const StepControls& controls, const RadialWeight& weight,
                        const BlowupRule& rule = {},
                        const SampleCallback& on_sample = {});

}  // namespace cnls
