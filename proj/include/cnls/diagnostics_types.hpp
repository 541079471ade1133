/// Radial virial/Morawetz weight functions sampled on a grid.
#pragma once

#include <string>
#include <vector>

namespace cnls {

struct RadialWeight {
    enum class Kind { Quadratic, CutoffChi, Custom } kind = Kind::Quadratic;
    double R = 0.0;  // cutoff radius (CutoffChi)
    double c = 0.0;  // plateau constant: phi = c R^2 for r >= 3R (CutoffChi)
    std::vector<double> phi;     // phi(r_j)
    std::vector<double> dphi;    // phi'(r_j)
    std::vector<double> d2phi;   // phi''(r_j)
    std::vector<double> lap;     // (Lap phi)(r_j)
    std::vector<double> bilap;   // (Lap^2 phi)(r_j)
    double measured_lap_bound = 0.0;    // max |Lap phi| over r >= R
    double measured_bilap_bound = 0.0;  // max |Lap^2 phi| over r >= R
};

struct ScatteringIndicators {
    std::vector<double> s_norm;     // per-component accumulated space-time norm
    double p_decay_ratio = 0.0;     // P_peak / P_final
    bool no_peak = false;           // P never rose meaningfully above zero
    double trapping_margin = 0.0;   // min_t (K(psi) - K(u(t)))
    double linear_deviation = 0.0;  // relative deviation from the free flow at T
};

}  // namespace cnls
