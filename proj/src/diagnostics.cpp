#include "cnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnls {

namespace {

/// Dense polynomial in one variable, coefficients low-to-high.
struct Poly {
    std::vector<double> c;
    double eval(double x) const {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * static_cast<double>(i);
        return d;
    }
    Poly antiderivative() const {
        Poly a;
        a.c.assign(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) a.c[i + 1] = c[i] / static_cast<double>(i + 1);
        return a;
    }
};

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly r;
    r.c.assign(p.c.size() + q.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.c.size(); ++i)
        for (std::size_t j = 0; j < q.c.size(); ++j) r.c[i + j] += p.c[i] * q.c[j];
    return r;
}

struct CutoffPieces {
    double a = 0.0;       // transition starts at a*R
    double b = 0.0;       // 3 - a
    double R = 0.0;
    double plateau = 0.0; // c R^2
    Poly phi, p1, p2, p3, p4;  // phi and derivatives of phi' in x

    double x_of(double r) const { return (r - a * R) / (b * R); }
};

/// Transition piece from phi' = 2r s(x) with the falling quintic smoothstep
/// s(x) = 1 - (10x^3 - 15x^4 + 6x^5); 0 <= phi' <= 2r and phi'' <= 2 hold by
/// construction for any start point a >= 1.
CutoffPieces build_cutoff(double R, double c) {
    const double disc = 56.0 * c - 63.0;
    if (!(disc > 0.0)) throw std::invalid_argument("make_cutoff_chi: plateau constant too small");
    CutoffPieces out;
    out.R = R;
    out.a = (-9.0 + std::sqrt(disc)) / 4.0;
    if (!(out.a >= 1.0 && out.a < 3.0))
        throw std::invalid_argument("make_cutoff_chi: plateau constant out of range");
    out.b = 3.0 - out.a;
    out.plateau = c * R * R;

    Poly s;  // falling smoothstep
    s.c = {1.0, 0.0, 0.0, -10.0, 15.0, -6.0};
    Poly rlin;  // r(x) = R(a + b x)
    rlin.c = {R * out.a, R * out.b};
    Poly two;
    two.c = {2.0};
    out.p1 = poly_mul(poly_mul(two, rlin), s);  // phi'(x)
    // phi(x) = (aR)^2 + bR * int_0^x p1
    out.phi = out.p1.antiderivative();
    for (double& coef : out.phi.c) coef *= out.b * R;
    out.phi.c[0] += out.a * out.a * R * R;
    out.p2 = out.p1.derivative();
    out.p3 = out.p2.derivative();
    out.p4 = out.p3.derivative();
    return out;
}

struct WeightSamples {
    double phi, dphi, d2phi, d3phi, d4phi;
};

WeightSamples sample_cutoff(const CutoffPieces& p, int d, double r) {
    (void)d;
    WeightSamples s{};
    if (r <= p.a * p.R) {
        s.phi = r * r;
        s.dphi = 2.0 * r;
        s.d2phi = 2.0;
    } else if (r >= 3.0 * p.R) {
        s.phi = p.plateau;
    } else {
        const double x = p.x_of(r);
        const double inv = 1.0 / (p.b * p.R);
        s.phi = p.phi.eval(x);
        s.dphi = p.p1.eval(x);
        s.d2phi = p.p2.eval(x) * inv;
        s.d3phi = p.p3.eval(x) * inv * inv;
        s.d4phi = p.p4.eval(x) * inv * inv * inv;
    }
    return s;
}

/// Radial Laplacian and bilaplacian of a weight from its radial derivatives.
void fill_laplacians(int d, double r, const WeightSamples& s, double& lap, double& bilap) {
    lap = s.d2phi + (d - 1) * s.dphi / r;
    bilap = s.d4phi + 2.0 * (d - 1) * s.d3phi / r +
            (d - 1) * (d - 3) * (s.d2phi / (r * r) - s.dphi / (r * r * r));
}

}  // namespace

RadialWeight make_quadratic_weight(const RadialGrid& g) {
    RadialWeight w;
    w.kind = RadialWeight::Kind::Quadratic;
    w.phi.resize(g.N);
    w.dphi.resize(g.N);
    w.d2phi.assign(g.N, 2.0);
    w.lap.assign(g.N, 2.0 * g.d);
    w.bilap.assign(g.N, 0.0);
    for (int j = 0; j < g.N; ++j) {
        w.phi[j] = g.r[j] * g.r[j];
        w.dphi[j] = 2.0 * g.r[j];
    }
    return w;
}

RadialWeight make_cutoff_chi(const RadialGrid& g, double R, double c) {
    if (!(R > 0.0 && R < g.r_max / 3.0))
        throw std::invalid_argument("make_cutoff_chi: need 0 < R < r_max/3");

    auto attempt = [&](double c_try, RadialWeight& w) -> bool {
        const CutoffPieces p = build_cutoff(R, c_try);
        w = RadialWeight{};
        w.kind = RadialWeight::Kind::CutoffChi;
        w.R = R;
        w.c = c_try;
        w.phi.resize(g.N);
        w.dphi.resize(g.N);
        w.d2phi.resize(g.N);
        w.lap.resize(g.N);
        w.bilap.resize(g.N);
        for (int j = 0; j < g.N; ++j) {
            const double r = g.r[j];
            const WeightSamples s = sample_cutoff(p, g.d, r);
            w.phi[j] = s.phi;
            w.dphi[j] = s.dphi;
            w.d2phi[j] = s.d2phi;
            fill_laplacians(g.d, r, s, w.lap[j], w.bilap[j]);
            if (s.d2phi > 2.0 + 1e-12) return false;
            if (s.dphi < -1e-12 || s.dphi > 2.0 * r + 1e-12) return false;
            if (r >= R) {
                w.measured_lap_bound = std::max(w.measured_lap_bound, std::abs(w.lap[j]));
                w.measured_bilap_bound =
                    std::max(w.measured_bilap_bound, std::abs(w.bilap[j]));
            }
        }
        return true;
    };

    RadialWeight w;
    if (attempt(c, w)) return w;
    for (double c_try = 5.0; c_try <= 9.0 + 1e-9; c_try += 0.5)
        if (attempt(c_try, w)) return w;
    throw std::runtime_error("make_cutoff_chi: no plateau constant in [5,9] satisfies the constraints");
}

double virial_V(const RadialGrid& g, const SystemParams& params, const RadialWeight& w,
                const RadialState& state) {
    double acc = 0.0;
    for (int k = 0; k < state.ncomp(); ++k) {
        const double coef = params.alpha[k] * params.alpha[k] / params.gamma[k];
        for (int j = 0; j < g.N; ++j)
            acc += g.w[j] * w.phi[j] * coef * std::norm(state.u[k][j]);
    }
    return acc;
}

double virial_Vprime(const RadialGrid& g, const SystemParams& params,
                     const RadialWeight& w, const RadialState& state) {
    double acc = 0.0;
    for (int k = 0; k < state.ncomp(); ++k) {
        const auto du = radial_derivative(g, state.u[k]);
        double part = 0.0;
        for (int j = 0; j < g.N; ++j)
            part += g.w[j] * w.dphi[j] * std::imag(du[j] * std::conj(state.u[k][j]));
        acc += 2.0 * params.alpha[k] * part;
    }
    return acc;
}

double morawetz_R(const RadialGrid& g, const SystemParams& params, const RadialWeight& w,
                  const RadialState& state) {
    return virial_Vprime(g, params, w, state);
}

double morawetz_Rprime_formula(const RadialGrid& g, const NonlinearSystem& sys,
                               const RadialWeight& w, const RadialState& state) {
    const int l = state.ncomp();
    double grad_term = 0.0;
    for (int k = 0; k < l; ++k)
        grad_term += sys.params.gamma[k] *
                     gradient_quadrature_weighted(g, state.u[k], w.d2phi);
    double mass_term = 0.0;
    for (int k = 0; k < l; ++k) {
        double part = 0.0;
        for (int j = 0; j < g.N; ++j)
            part += g.w[j] * w.bilap[j] * std::norm(state.u[k][j]);
        mass_term += sys.params.gamma[k] * part;
    }
    double pot_term = 0.0;
    std::vector<Complex> zbuf(l);
    for (int j = 0; j < g.N; ++j) {
        for (int k = 0; k < l; ++k) zbuf[k] = state.u[k][j];
        pot_term += g.w[j] * w.lap[j] * eval_potential(sys.F, zbuf).real();
    }
    return 4.0 * grad_term - mass_term - 8.0 / (g.d - 2.0) * pot_term;
}

ConsistencyReport consistency_report(const std::vector<TrajectorySample>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 5) throw std::invalid_argument("consistency_report: need at least 5 samples");
    const double dt = series[1].t - series[0].t;
    for (int i = 1; i + 1 < n; ++i)
        if (std::abs((series[i + 1].t - series[i].t) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw std::invalid_argument("consistency_report: series not uniformly sampled");

    ConsistencyReport rep;
    rep.interior_points = n - 2;
    double vp_scale = 0.0, rp_scale = 0.0;
    for (const auto& s : series) {
        vp_scale = std::max(vp_scale, std::abs(s.Vprime));
        rp_scale = std::max(rp_scale, std::abs(s.Rprime));
    }
    double dv = 0.0, dr = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double fdV = (series[i + 1].V - series[i - 1].V) / (2.0 * dt);
        const double fdR = (series[i + 1].R - series[i - 1].R) / (2.0 * dt);
        dv = std::max(dv, std::abs(fdV - series[i].Vprime));
        dr = std::max(dr, std::abs(fdR - series[i].Rprime));
    }
    rep.dV_vs_Vprime = vp_scale > 0.0 ? dv / vp_scale : dv;
    rep.dR_vs_Rprime = rp_scale > 0.0 ? dr / rp_scale : dr;
    return rep;
}

ScatteringIndicators scattering_indicators(const Trajectory& traj,
                                           const NonlinearSystem& sys, double K_psi) {
    if (traj.verdict.kind != Verdict::Kind::Completed)
        throw std::invalid_argument("scattering_indicators: trajectory not Completed");
    const auto& samples = traj.samples;
    if (samples.size() < 2)
        throw std::invalid_argument("scattering_indicators: too few samples");

    ScatteringIndicators ind;
    const int l = static_cast<int>(samples.front().snorm_density.size());
    ind.s_norm.assign(l, 0.0);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double dt = samples[i].t - samples[i - 1].t;
        for (int k = 0; k < l; ++k)
            ind.s_norm[k] += 0.5 * dt *
                             (samples[i].snorm_density[k] + samples[i - 1].snorm_density[k]);
    }

    double p_peak = 0.0;
    for (const auto& s : samples) p_peak = std::max(p_peak, s.f.P);
    const double p_final = samples.back().f.P;
    if (p_peak <= 1e-300) {
        ind.no_peak = true;
        ind.p_decay_ratio = 0.0;
    } else if (p_final <= 0.0) {
        ind.p_decay_ratio = std::numeric_limits<double>::infinity();
    } else {
        ind.p_decay_ratio = p_peak / p_final;
    }

    ind.trapping_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        ind.trapping_margin = std::min(ind.trapping_margin, K_psi - s.f.K);

    // Free-flow deviation over the tail window: propagate the latest stored
    // snapshot linearly to the final time and compare.
    const RadialState* start = nullptr;
    for (const auto& snap : traj.snapshots)
        if (snap.t < traj.final_state.t - 1e-12 &&
            (!start || snap.t > start->t))
            start = &snap;
    if (start) {
        const double span = traj.final_state.t - start->t;
        const int nsteps = std::max(1, static_cast<int>(std::ceil(span / 0.01)));
        const double dt_free = span / nsteps;
        RadialState freeflow = *start;
        for (int i = 0; i < nsteps; ++i)
            freeflow = linear_halfstep(freeflow, dt_free, sys.params);
        double num = 0.0, den = 0.0;
        const RadialGrid& g = *traj.final_state.grid;
        for (int k = 0; k < freeflow.ncomp(); ++k)
            for (int j = 0; j < g.N; ++j) {
                num += g.w[j] * std::norm(traj.final_state.u[k][j] - freeflow.u[k][j]);
                den += g.w[j] * std::norm(traj.final_state.u[k][j]);
            }
        ind.linear_deviation = den > 0.0 ? std::sqrt(num / den) : 0.0;
    } else {
        ind.linear_deviation = std::numeric_limits<double>::quiet_NaN();
    }
    return ind;
}

}  // namespace cnls
