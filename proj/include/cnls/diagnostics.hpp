/// Virial and Morawetz-type quantities: weight construction (quadratic and
/// plateau cutoff), the V, V', R, R' quadratures, formula-versus-finite-
/// difference consistency checks, and scattering indicators.
#pragma once

#include "cnls/diagnostics_types.hpp"
#include "cnls/evolve.hpp"
#include "cnls/grid.hpp"
#include "cnls/system.hpp"

namespace cnls {

RadialWeight make_quadratic_weight(const RadialGrid& g);

/// Cutoff weight: phi = r^2 up to a*R (a in [1,3) chosen from the target
/// plateau constant c), a smoothstep-shaped transition with 0 <= phi' <= 2r
/// and phi'' <= 2 by construction, and phi = c R^2 for r >= 3R. Constraints
/// are verified at every node; on violation nearby plateau constants in [5,9]
/// are retried before failing.
RadialWeight make_cutoff_chi(const RadialGrid& g, double R, double c);

/// V = int phi sum_k (alpha_k^2/gamma_k) |u_k|^2.
double virial_V(const RadialGrid& g, const SystemParams& params, const RadialWeight& w,
                const RadialState& state);

/// V' = 2 sum_k alpha_k Im int phi' (dr u_k) conj(u_k).
double virial_Vprime(const RadialGrid& g, const SystemParams& params,
                     const RadialWeight& w, const RadialState& state);

/// Same integrand as virial_Vprime (the alpha-weighted Morawetz quantity).
double morawetz_R(const RadialGrid& g, const SystemParams& params, const RadialWeight& w,
                  const RadialState& state);

/// R' = 4 int phi'' sum gamma_k |dr u_k|^2 - int Lap^2 phi sum gamma_k |u_k|^2
///      - (8/(d-2)) Re int Lap phi F(u). The gradient term uses the same face
/// quadrature as the kinetic functional, so with the quadratic weight the
/// identity R' = 8 tau(u) holds to roundoff.
double morawetz_Rprime_formula(const RadialGrid& g, const NonlinearSystem& sys,
                               const RadialWeight& w, const RadialState& state);

struct ConsistencyReport {
    double dV_vs_Vprime = 0.0;  // max |centered FD of V - V'| / max |V'|
    double dR_vs_Rprime = 0.0;
    int interior_points = 0;
};

/// Centered finite differences of the recorded V and R series against the
/// recorded formula values; endpoints excluded. Requires a uniformly sampled
/// series of at least 5 points.
ConsistencyReport consistency_report(const std::vector<TrajectorySample>& series);

/// Indicators of dispersive behavior for a Completed trajectory; K_psi is the
/// trapping threshold K(psi). The free-flow deviation is measured over the
/// final 10% window by propagating the stored window-start snapshot linearly.
ScatteringIndicators scattering_indicators(const Trajectory& traj,
                                           const NonlinearSystem& sys, double K_psi);

}  // namespace cnls
