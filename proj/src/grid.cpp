#include "cnls/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cnls {

RadialGrid make_grid(int d, int N, double r_max) {
    if (d < 3 || d > 6) throw std::invalid_argument("make_grid: d must be in [3,6]");
    if (N < 16) throw std::invalid_argument("make_grid: N must be >= 16");
    if (!(r_max > 0)) throw std::invalid_argument("make_grid: r_max must be > 0");

    RadialGrid g;
    g.d = d;
    g.N = N;
    g.r_max = r_max;
    g.h = r_max / N;
    g.sphere_area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    g.r.resize(N);
    g.w.resize(N);
    for (int j = 0; j < N; ++j) {
        g.r[j] = (j + 0.5) * g.h;
        g.w[j] = g.sphere_area * std::pow(g.r[j], d - 1) * g.h;
    }
    g.face_g.assign(N + 1, 0.0);
    const double hd1 = std::pow(g.h, d - 1);
    for (int j = 0; j < N; ++j) {
        // (j+1) g_{j+1} = j g_j + d r_j^{d-1} h^{d-1}
        g.face_g[j + 1] =
            (j * g.face_g[j] + d * std::pow(j + 0.5, d - 1) * hd1) / (j + 1);
    }
    g.lap_scale.resize(N);
    for (int j = 0; j < N; ++j)
        g.lap_scale[j] = 1.0 / (g.h * g.h * std::pow(g.r[j], d - 1));
    return g;
}

GridPtr make_grid_ptr(int d, int N, double r_max) {
    return std::make_shared<const RadialGrid>(make_grid(d, N, r_max));
}

bool RadialState::finite() const {
    for (const auto& comp : u)
        for (const Complex& z : comp)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

RadialState make_state(GridPtr grid, int ncomp, double t) {
    RadialState s;
    s.t = t;
    s.grid = std::move(grid);
    s.u.assign(ncomp, std::vector<Complex>(s.grid->N, Complex{0.0, 0.0}));
    return s;
}

std::vector<Complex> laplacian_apply(const RadialGrid& g, std::span<const Complex> v) {
    if (static_cast<int>(v.size()) != g.N)
        throw std::invalid_argument("laplacian_apply: size mismatch");
    std::vector<Complex> out(g.N);
    for (int j = 0; j < g.N; ++j) {
        const Complex up = (j + 1 < g.N) ? v[j + 1] : Complex{0.0, 0.0};  // Dirichlet ghost
        Complex flux = g.face_g[j + 1] * (up - v[j]);
        if (j > 0) flux -= g.face_g[j] * (v[j] - v[j - 1]);  // zero axis flux at j = 0
        out[j] = flux * g.lap_scale[j];
    }
    return out;
}

double integrate(const RadialGrid& g, std::span<const double> s) {
    if (static_cast<int>(s.size()) != g.N)
        throw std::invalid_argument("integrate: size mismatch");
    double acc = 0.0;
    for (int j = 0; j < g.N; ++j) acc += g.w[j] * s[j];
    return acc;
}

std::vector<Complex> radial_derivative(const RadialGrid& g, std::span<const Complex> v) {
    if (static_cast<int>(v.size()) != g.N)
        throw std::invalid_argument("radial_derivative: size mismatch");
    const int N = g.N;
    std::vector<Complex> out(N);
    const double inv2h = 1.0 / (2.0 * g.h);
    for (int j = 1; j + 1 < N; ++j) out[j] = (v[j + 1] - v[j - 1]) * inv2h;
    if (N >= 3) {
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
        out[N - 1] = (3.0 * v[N - 1] - 4.0 * v[N - 2] + v[N - 3]) * inv2h;
    } else {
        out[0] = out[N - 1] = (v[N - 1] - v[0]) / ((N - 1) * g.h);
    }
    return out;
}

double gradient_quadrature(const RadialGrid& g, std::span<const Complex> v) {
    if (static_cast<int>(v.size()) != g.N)
        throw std::invalid_argument("gradient_quadrature: size mismatch");
    double acc = 0.0;
    for (int f = 1; f < g.N; ++f) acc += g.face_g[f] * std::norm(v[f] - v[f - 1]);
    acc += g.face_g[g.N] * std::norm(v[g.N - 1]);  // Dirichlet ghost v_N = 0
    return acc * g.sphere_area / g.h;
}

double gradient_quadrature_weighted(const RadialGrid& g, std::span<const Complex> v,
                                    std::span<const double> psi_nodes) {
    if (static_cast<int>(v.size()) != g.N || static_cast<int>(psi_nodes.size()) != g.N)
        throw std::invalid_argument("gradient_quadrature_weighted: size mismatch");
    double acc = 0.0;
    for (int f = 1; f < g.N; ++f) {
        const double psi = 0.5 * (psi_nodes[f - 1] + psi_nodes[f]);
        acc += psi * g.face_g[f] * std::norm(v[f] - v[f - 1]);
    }
    acc += psi_nodes[g.N - 1] * g.face_g[g.N] * std::norm(v[g.N - 1]);
    return acc * g.sphere_area / g.h;
}

FunctionalRecord functionals(const RadialGrid& g, const SystemParams& params,
                             const PotentialF& F, const RadialState& state) {
    if (state.ncomp() != params.l || params.l != F.ncomp)
        throw std::invalid_argument("functionals: inconsistent shapes");
    if (static_cast<int>(state.u[0].size()) != g.N)
        throw std::invalid_argument("functionals: state/grid size mismatch");
    if (!state.finite()) throw std::invalid_argument("functionals: poisoned state");

    FunctionalRecord rec;
    rec.t = state.t;
    rec.sigma_defaulted = !params.sigma.has_value();
    const std::vector<double> sigma =
        params.sigma ? *params.sigma : std::vector<double>(params.l, 1.0);

    std::vector<Complex> zbuf(params.l);
    double P = 0.0;
    for (int j = 0; j < g.N; ++j) {
        for (int k = 0; k < params.l; ++k) zbuf[k] = state.u[k][j];
        P += g.w[j] * eval_potential(F, zbuf).real();
    }
    rec.P = P;

    for (int k = 0; k < params.l; ++k) {
        double mass2 = 0.0;
        for (int j = 0; j < g.N; ++j) mass2 += g.w[j] * std::norm(state.u[k][j]);
        rec.M += 0.5 * sigma[k] * params.alpha[k] * mass2;
        rec.L += params.beta[k] * mass2;
        rec.K += params.gamma[k] * gradient_quadrature(g, state.u[k]);
    }
    rec.E = rec.K + rec.L - 2.0 * rec.P;
    rec.Ecrit = rec.K - 2.0 * rec.P;
    rec.tau = rec.K - (2.0 * g.d / (g.d - 2.0)) * rec.P;
    return rec;
}

// ---------------------------------------------------------------------------
// Snapshot format: "CNLS" | u32 version | u32 d | u32 l | u32 N | f64 r_max |
// f64 t | l*N complex128 (re, im), little-endian.
// ---------------------------------------------------------------------------

namespace {
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_snapshot(const std::string& path, const RadialState& state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_snapshot: cannot open " + path);
    os.write("CNLS", 4);
    put(os, kSnapshotVersion);
    put(os, static_cast<std::uint32_t>(state.grid->d));
    put(os, static_cast<std::uint32_t>(state.ncomp()));
    put(os, static_cast<std::uint32_t>(state.grid->N));
    put(os, state.grid->r_max);
    put(os, state.t);
    for (const auto& comp : state.u)
        for (const Complex& z : comp) {
            put(os, z.real());
            put(os, z.imag());
        }
    if (!os) throw std::runtime_error("save_snapshot: write failed for " + path);
}

RadialState load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CNLS", 4) != 0)
        throw std::runtime_error("load_snapshot: bad magic in " + path);
    std::uint32_t version = 0, d = 0, l = 0, N = 0;
    double r_max = 0.0, t = 0.0;
    get(is, version);
    get(is, d);
    get(is, l);
    get(is, N);
    get(is, r_max);
    get(is, t);
    if (!is || version != kSnapshotVersion)
        throw std::runtime_error("load_snapshot: unsupported version in " + path);
    RadialState state = make_state(make_grid_ptr(static_cast<int>(d), static_cast<int>(N), r_max),
                                   static_cast<int>(l), t);
    for (auto& comp : state.u)
        for (Complex& z : comp) {
            double re = 0.0, im = 0.0;
            get(is, re);
            get(is, im);
            z = Complex{re, im};
        }
    if (!is) throw std::runtime_error("load_snapshot: truncated file " + path);
    return state;
}

}  // namespace cnls
