#include "cnls/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "cnls/diagnostics.hpp"

namespace cnls {

namespace {

/// Complex Thomas solve of the tridiagonal system (I - z (gamma Lap - beta))x = rhs
/// for one component; z = i h / (2 alpha).
void cn_solve(const RadialGrid& g, Complex z, double gamma, double beta,
              std::span<const Complex> rhs, std::vector<Complex>& x,
              std::vector<Complex>& cw, std::vector<Complex>& dw) {
    const int N = g.N;
    x.resize(N);
    cw.resize(N);
    dw.resize(N);
    auto scale = [&](int j) { return g.lap_scale[j]; };
    {
        const double s = scale(0);
        const Complex b = 1.0 + z * (gamma * (g.face_g[0] + g.face_g[1]) * s + beta);
        const Complex c = -z * gamma * g.face_g[1] * s;
        cw[0] = c / b;
        dw[0] = rhs[0] / b;
    }
    for (int j = 1; j < N; ++j) {
        const double s = scale(j);
        const Complex a = -z * gamma * g.face_g[j] * s;
        const Complex b = 1.0 + z * (gamma * (g.face_g[j] + g.face_g[j + 1]) * s + beta);
        const Complex c = -z * gamma * g.face_g[j + 1] * s;
        const Complex m = b - a * cw[j - 1];
        cw[j] = c / m;
        dw[j] = (rhs[j] - a * dw[j - 1]) / m;
    }
    x[N - 1] = dw[N - 1];
    for (int j = N - 2; j >= 0; --j) x[j] = dw[j] - cw[j] * x[j + 1];
}

/// (I + z (gamma Lap - beta)) u for one component.
void cn_apply(const RadialGrid& g, Complex z, double gamma, double beta,
              std::span<const Complex> u, std::vector<Complex>& out) {
    const int N = g.N;
    out.resize(N);
    for (int j = 0; j < N; ++j) {
        const double s = g.lap_scale[j];
        const Complex up = (j + 1 < N) ? u[j + 1] : Complex{0.0, 0.0};
        Complex lap = g.face_g[j + 1] * (up - u[j]);
        if (j > 0) lap -= g.face_g[j] * (u[j] - u[j - 1]);
        lap *= s;
        out[j] = u[j] + z * (gamma * lap - beta * u[j]);
    }
}

double rel_wdiff(const RadialGrid& g, const RadialState& a, const RadialState& b) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < a.ncomp(); ++k)
        for (int j = 0; j < g.N; ++j) {
            num += g.w[j] * std::norm(a.u[k][j] - b.u[k][j]);
            den += g.w[j] * std::norm(b.u[k][j]);
        }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

double max_amplitude(const RadialState& s) {
    double m = 0.0;
    for (const auto& comp : s.u)
        for (const Complex& z : comp) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

std::string to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::Completed: return "Completed";
        case Verdict::Kind::BlowUp: return "BlowUp";
        case Verdict::Kind::Unresolved: return "Unresolved";
    }
    return "?";
}

RadialState linear_halfstep(const RadialState& state, double half_dt,
                            const SystemParams& params) {
    if (!(half_dt > 0)) throw std::invalid_argument("linear_halfstep: dt must be > 0");
    const RadialGrid& g = *state.grid;
    RadialState out = state;
    std::vector<Complex> rhs, x, cw, dw;
    for (int k = 0; k < state.ncomp(); ++k) {
        const Complex z{0.0, half_dt / (2.0 * params.alpha[k])};
        cn_apply(g, z, params.gamma[k], params.beta[k], state.u[k], rhs);
        cn_solve(g, z, params.gamma[k], params.beta[k], rhs, x, cw, dw);
        out.u[k] = x;
    }
    return out;
}

RadialState nonlinear_substep(const RadialState& state, double dt,
                              const NonlinearSystem& sys) {
    if (!(dt > 0)) throw std::invalid_argument("nonlinear_substep: dt must be > 0");
    const RadialGrid& g = *state.grid;
    const int l = state.ncomp();
    RadialState out = state;
    std::vector<Complex> y(l), k1(l), k2(l), k3(l), k4(l), tmp(l);
    auto rate = [&](const std::vector<Complex>& z, std::vector<Complex>& k) {
        for (int m = 0; m < l; ++m)
            k[m] = Complex{0.0, 1.0 / sys.params.alpha[m]} * eval_fk(sys.f[m], z);
    };
    for (int j = 0; j < g.N; ++j) {
        for (int m = 0; m < l; ++m) y[m] = state.u[m][j];
        rate(y, k1);
        for (int m = 0; m < l; ++m) tmp[m] = y[m] + 0.5 * dt * k1[m];
        rate(tmp, k2);
        for (int m = 0; m < l; ++m) tmp[m] = y[m] + 0.5 * dt * k2[m];
        rate(tmp, k3);
        for (int m = 0; m < l; ++m) tmp[m] = y[m] + dt * k3[m];
        rate(tmp, k4);
        for (int m = 0; m < l; ++m)
            out.u[m][j] = y[m] + dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
    }
    return out;
}

RadialState step(const RadialState& state, double dt, const NonlinearSystem& sys) {
    RadialState s = linear_halfstep(state, 0.5 * dt, sys.params);
    s = nonlinear_substep(s, dt, sys);
    s = linear_halfstep(s, 0.5 * dt, sys.params);
    s.t = state.t + dt;
    return s;
}

double adapt_dt(const RadialState& state, const StepControls& controls, double dt,
                double last_error) {
    double next = controls.dt_max;
    if (last_error > 0.0)
        next = controls.safety * dt * std::cbrt(controls.tol / last_error);
    const double p = 4.0 / (state.grid->d - 2.0);
    const double cap = controls.c_amp / (1.0 + std::pow(max_amplitude(state), p));
    next = std::min(next, cap);
    return std::clamp(next, controls.dt_min, controls.dt_max);
}

std::optional<Verdict> detect_blowup(const std::vector<TrajectorySample>& history,
                                     const BlowupRule& rule, double dt_min) {
    if (static_cast<int>(history.size()) < std::max(rule.window, 3))
        throw std::invalid_argument("detect_blowup: need at least 3 records");
    const double K0 = history.front().f.K;
    const auto& last = history.back();
    bool grew = K0 > 0.0 && last.f.K > rule.growth_factor * K0;
    bool increasing = true;
    for (int i = static_cast<int>(history.size()) - rule.window;
         i + 1 < static_cast<int>(history.size()); ++i)
        if (!(history[i + 1].f.K > history[i].f.K)) increasing = false;

    if (grew && increasing && last.dt <= 2.0 * dt_min) {
        Verdict v;
        v.kind = Verdict::Kind::BlowUp;
        v.T = last.t;
        v.evidence = {last.f.K / K0, last.dt, last.t};
        v.reason = "kinetic growth with step collapse";
        return v;
    }
    if (last.dt <= dt_min * (1.0 + 1e-12)) {
        Verdict v;
        v.kind = Verdict::Kind::Unresolved;
        v.T = last.t;
        v.evidence = {K0 > 0.0 ? last.f.K / K0 : 0.0, last.dt, last.t};
        v.reason = "step floor reached without blow-up signature";
        return v;
    }
    return std::nullopt;
}

Trajectory evolve_until(RadialState state, double T, const NonlinearSystem& sys,
                        const StepControls& controls, const RadialWeight& weight,
                        const BlowupRule& rule, const SampleCallback& on_sample) {
    controls.validate();
    if (!(T > state.t)) throw std::invalid_argument("evolve_until: need T > state.t");
    const RadialGrid& g = *state.grid;
    const double qs = 2.0 * (g.d + 2.0) / (g.d - 2.0);

    Trajectory traj;
    auto record = [&](const RadialState& s, double dt_now) {
        TrajectorySample smp;
        smp.t = s.t;
        smp.dt = dt_now;
        smp.f = functionals(g, sys.params, sys.F, s);
        smp.V = virial_V(g, sys.params, weight, s);
        smp.Vprime = virial_Vprime(g, sys.params, weight, s);
        smp.R = morawetz_R(g, sys.params, weight, s);
        smp.Rprime = morawetz_Rprime_formula(g, sys, weight, s);
        smp.max_amp = max_amplitude(s);
        smp.snorm_density.resize(s.ncomp());
        for (int k = 0; k < s.ncomp(); ++k) {
            double acc = 0.0;
            for (int j = 0; j < g.N; ++j)
                acc += g.w[j] * std::pow(std::abs(s.u[k][j]), qs);
            smp.snorm_density[k] = acc;
        }
        traj.samples.push_back(smp);
        if (on_sample) on_sample(traj.samples.back());
    };

    double dt = std::clamp(controls.dt0, controls.dt_min, controls.dt_max);
    record(state, dt);
    double next_record = state.t + controls.record_interval;
    std::size_t next_snapshot = 0;
    auto snapshot_times = controls.snapshot_times;
    std::sort(snapshot_times.begin(), snapshot_times.end());

    const long max_steps = 50'000'000;
    for (long n = 0; n < max_steps; ++n) {
        if (state.t >= T - 1e-12 * std::max(1.0, std::abs(T))) {
            traj.verdict.kind = Verdict::Kind::Completed;
            traj.verdict.T = state.t;
            break;
        }
        // Land exactly on record / snapshot times so the recorded series is
        // uniformly sampled for the finite-difference consistency checks.
        double dt_try = std::min(dt, T - state.t);
        if (next_record > state.t + 1e-14)
            dt_try = std::min(dt_try, next_record - state.t);
        if (next_snapshot < snapshot_times.size() &&
            snapshot_times[next_snapshot] > state.t + 1e-14)
            dt_try = std::min(dt_try, snapshot_times[next_snapshot] - state.t);

        RadialState big = step(state, dt_try, sys);
        RadialState half = step(step(state, 0.5 * dt_try, sys), 0.5 * dt_try, sys);
        const bool finite = big.finite() && half.finite();
        const double err = finite ? rel_wdiff(g, big, half)
                                  : std::numeric_limits<double>::infinity();

        const bool at_floor = dt_try <= controls.dt_min * (1.0 + 1e-9);
        if (err <= controls.tol && finite) {
            state = std::move(half);
            const double dt_used = dt_try;
            dt = adapt_dt(state, controls, dt_used, err);
            if (state.t >= next_record - 1e-12) {
                record(state, dt_used);
                while (next_record <= state.t + 1e-12) next_record += controls.record_interval;
                if (traj.samples.size() >= 3) {
                    if (auto v = detect_blowup(traj.samples, rule, controls.dt_min);
                        v && v->kind == Verdict::Kind::BlowUp) {
                        traj.verdict = *v;
                        break;
                    }
                }
            }
            while (next_snapshot < snapshot_times.size() &&
                   state.t >= snapshot_times[next_snapshot] - 1e-12) {
                traj.snapshots.push_back(state);
                ++next_snapshot;
            }
        } else if (!at_floor) {
            dt = std::max(finite ? controls.safety * dt_try *
                                       std::cbrt(controls.tol / err)
                                 : 0.25 * dt_try,
                          controls.dt_min);
        } else {
            // Step floor reached without meeting the tolerance: classify.
            record(state, controls.dt_min);
            if (traj.samples.size() >= 3) {
                if (auto v = detect_blowup(traj.samples, rule, controls.dt_min)) {
                    traj.verdict = *v;
                    break;
                }
            }
            traj.verdict.kind = Verdict::Kind::Unresolved;
            traj.verdict.T = state.t;
            traj.verdict.reason = finite ? "step floor reached without blow-up signature"
                                         : "state poisoned without kinetic growth";
            break;
        }
        if (n + 1 == max_steps) {
            traj.verdict.kind = Verdict::Kind::Unresolved;
            traj.verdict.T = state.t;
            traj.verdict.reason = "step budget exhausted";
        }
    }

    if (traj.samples.empty() || traj.samples.back().t < state.t - 1e-12)
        record(state, dt);
    traj.final_state = std::move(state);
    if (traj.verdict.kind == Verdict::Kind::Completed) traj.verdict.T = traj.final_state.t;
    return traj;
}

}  // namespace cnls
