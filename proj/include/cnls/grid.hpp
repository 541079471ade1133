/// Radial discretization of R^d on half-offset nodes r_j = (j+1/2)h, with the
/// self-adjoint flux-form radial Laplacian, midpoint quadrature, and the
/// functionals M, E, K, L, P, Ecrit, tau evaluated on discrete states.
#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cnls/params.hpp"
#include "cnls/potential.hpp"

namespace cnls {

struct RadialGrid {
    int d = 0;
    int N = 0;
    double r_max = 0.0;
    double h = 0.0;
    double sphere_area = 0.0;   // omega_{d-1} = 2 pi^{d/2} / Gamma(d/2)
    std::vector<double> r;      // node radii, strictly increasing
    std::vector<double> w;      // quadrature weights omega * r^{d-1} * h
    std::vector<double> face_g; // N+1 face coefficients of the Laplacian, face_g[0] = 0
    std::vector<double> lap_scale;  // 1 / (h^2 r_j^{d-1}), cached for the stencils
};

/// Nodes, weights and Laplacian face coefficients. The face coefficients obey
/// (j+1) g_{j+1} = j g_j + d r_j^{d-1} h^{d-1}, which makes the flux-form
/// operator exact on constants and on r^2 while staying symmetric w.r.t. the
/// quadrature weights (g_f ~ (f h)^{d-1} away from the axis).
RadialGrid make_grid(int d, int N, double r_max);

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid_ptr(int d, int N, double r_max);

struct RadialState {
    double t = 0.0;
    GridPtr grid;
    std::vector<std::vector<Complex>> u;  // l x N samples u_k(r_j)

    int ncomp() const { return static_cast<int>(u.size()); }
    bool finite() const;
};

RadialState make_state(GridPtr grid, int ncomp, double t = 0.0);

/// One evaluation of the conserved and virial functionals at an instant.
/// E = K + L - 2P and Ecrit = K - 2P hold exactly as computed; tau satisfies
/// tau = (d/(d-2))E - (2/(d-2))K - (d/(d-2))L to roundoff.
struct FunctionalRecord {
    double t = 0.0;
    double M = 0.0;      // sum_k (sigma_k alpha_k / 2) ||u_k||^2
    double E = 0.0;      // K + L - 2P
    double K = 0.0;      // sum_k gamma_k ||dr u_k||^2
    double L = 0.0;      // sum_k beta_k ||u_k||^2
    double P = 0.0;      // Re int F(u)
    double Ecrit = 0.0;  // K - 2P
    double tau = 0.0;    // K - (2d/(d-2)) P
    bool sigma_defaulted = false;
};

/// Flux-form radial Laplacian: zero flux through r = 0 (even reflection),
/// homogeneous Dirichlet ghost at r_max.
std::vector<Complex> laplacian_apply(const RadialGrid& g, std::span<const Complex> v);

double integrate(const RadialGrid& g, std::span<const double> s);

/// Node-centered radial derivative: centered differences at interior nodes,
/// second-order one-sided stencils at both ends.
std::vector<Complex> radial_derivative(const RadialGrid& g, std::span<const Complex> v);

/// Dirichlet form of the discrete Laplacian: (omega/h) sum_f g_f |v_f - v_{f-1}|^2
/// with the Dirichlet ghost v_N = 0. Equals <-Lap v, v>_w by summation by parts;
/// an O(h^2) quadrature of int |dr v|^2.
double gradient_quadrature(const RadialGrid& g, std::span<const Complex> v);

/// Same face sum with an extra face-sampled weight function psi(r_f), where
/// psi is supplied at nodes and averaged onto faces.
double gradient_quadrature_weighted(const RadialGrid& g, std::span<const Complex> v,
                                    std::span<const double> psi_nodes);

FunctionalRecord functionals(const RadialGrid& g, const SystemParams& params,
                             const PotentialF& F, const RadialState& state);

/// Binary field snapshot ("CNLS" magic, version, d, l, N, r_max, t, then l*N
/// complex128 samples, little-endian).
void save_snapshot(const std::string& path, const RadialState& state);
RadialState load_snapshot(const std::string& path);

}  // namespace cnls
