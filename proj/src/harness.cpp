#include "cnls/harness.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace cnls {

namespace {

double falling_smoothstep(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

/// Smooth radial mollifier: 1 for r <= Rm, 0 beyond 2 Rm.
double mollifier(double r, double Rm) {
    if (Rm <= 0.0) return 1.0;
    return falling_smoothstep(r / Rm - 1.0);
}

std::string system_key(const Scenario& sc) {
    std::ostringstream os;
    os << sc.potential_source << '|' << sc.params.d << '|' << sc.params.l << '|' << sc.N
       << '|' << sc.r_max;
    for (int k = 0; k < sc.params.l; ++k)
        os << '|' << sc.params.alpha[k] << ',' << sc.params.gamma[k] << ','
           << sc.params.beta[k];
    return os.str();
}

struct PreparedSystem {
    GridPtr grid;
    NonlinearSystem sys;
    GroundState gs;
};

/// Ground states are deterministic given options, so a shared memo keyed by
/// the system is safe across worker threads.
class GroundStateCache {
  public:
    const PreparedSystem& get(const Scenario& sc) {
        const std::string key = system_key(sc);
        std::scoped_lock lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        PreparedSystem ps;
        ps.grid = make_grid_ptr(sc.params.d, sc.N, sc.r_max);
        ps.sys = make_system(sc.params, parse_potential(sc.potential_source, sc.params.l));
        ps.gs = solve_ground_state(ps.grid, ps.sys, sc.gs_options);
        return cache_.emplace(key, std::move(ps)).first->second;
    }

  private:
    std::mutex mu_;
    std::map<std::string, PreparedSystem> cache_;
};

RadialState build_state(const Scenario& sc, const GroundState& gs, const GridPtr& grid,
                        double mollifier_radius) {
    const RadialGrid& g = *grid;
    RadialState u0 = make_state(grid, sc.params.l);
    switch (sc.kind) {
        case Scenario::Kind::ScaledGroundState:
            for (int k = 0; k < sc.params.l; ++k)
                for (int j = 0; j < g.N; ++j)
                    u0.u[k][j] = sc.amplitude * gs.psi.u[k][j] *
                                 mollifier(g.r[j], mollifier_radius);
            break;
        case Scenario::Kind::Gaussian:
            for (int k = 0; k < sc.params.l; ++k)
                for (int j = 0; j < g.N; ++j)
                    u0.u[k][j] = sc.gauss_amplitude *
                                 std::exp(-g.r[j] * g.r[j] /
                                          (2.0 * sc.gauss_width * sc.gauss_width));
            break;
        case Scenario::Kind::FromFile: {
            RadialState loaded = load_snapshot(sc.file);
            if (loaded.ncomp() != sc.params.l || loaded.grid->N != g.N ||
                loaded.grid->d != g.d)
                throw std::invalid_argument("scenario file does not match the grid/system");
            u0.u = loaded.u;
            break;
        }
    }
    u0.t = 0.0;
    return u0;
}

RadialWeight scenario_weight(const Scenario& sc, const RadialGrid& g) {
    if (sc.weight_cutoff_R > 0.0)
        return make_cutoff_chi(g, sc.weight_cutoff_R, sc.weight_cutoff_c);
    return make_quadratic_weight(g);
}

}  // namespace

std::string to_string(Scenario::Regime r) {
    switch (r) {
        case Scenario::Regime::Scatter: return "Scatter";
        case Scenario::Regime::BlowUp: return "BlowUp";
        case Scenario::Regime::Unspecified: return "Unspecified";
    }
    return "?";
}

std::pair<RadialState, RegimeReport> prepare_initial_data(const Scenario& sc,
                                                          const GroundState& gs,
                                                          const GridPtr& grid,
                                                          const NonlinearSystem& sys) {
    if (sc.kind == Scenario::Kind::ScaledGroundState && !gs.converged)
        throw std::invalid_argument("prepare_initial_data: ground state not converged");
    if (sc.kind == Scenario::Kind::ScaledGroundState && !(sc.amplitude > 0.0))
        throw std::invalid_argument("prepare_initial_data: amplitude must be > 0");

    RegimeReport rep;
    rep.name = sc.name;
    rep.expected = sc.expected;
    rep.K_psi = gs.converged ? gs.Kpsi : 0.0;
    rep.Ecrit_psi = gs.converged ? gs.Ecrit_psi : 0.0;

    const RadialGrid& g = *grid;
    double Rm = sc.mollifier_radius;
    RadialState u0 = build_state(sc, gs, grid, Rm);
    FunctionalRecord rec = functionals(g, sys.params, sys.F, u0);

    auto hypotheses = [&](const FunctionalRecord& r) {
        rep.E0 = r.E;
        rep.Ecrit0 = r.Ecrit;
        rep.K0 = r.K;
        rep.M0 = r.M;
        rep.scatter_hypotheses = rep.Ecrit0 < rep.Ecrit_psi && rep.K0 < rep.K_psi;
        rep.blowup_hypotheses = rep.E0 < rep.Ecrit_psi && rep.K0 > rep.K_psi;
    };
    hypotheses(rec);

    // Mollification trims both K and E; widen the mollifier until the blow-up
    // hypotheses hold on the measured numbers (the untrimmed amplitude family
    // satisfies them for a > 1).
    if (sc.kind == Scenario::Kind::ScaledGroundState &&
        sc.expected == Scenario::Regime::BlowUp && Rm > 0.0) {
        for (int attempt = 0; attempt < 6 && !rep.blowup_hypotheses; ++attempt) {
            Rm *= 1.4;
            if (2.0 * Rm > 0.95 * g.r_max) break;
            u0 = build_state(sc, gs, grid, Rm);
            rec = functionals(g, sys.params, sys.F, u0);
            hypotheses(rec);
        }
    }
    rep.mollifier_radius_used = Rm;
    rep.prepared = true;

    if (sc.expected == Scenario::Regime::Scatter && !rep.scatter_hypotheses) {
        std::ostringstream os;
        os << "scattering hypotheses fail: Ecrit0=" << rep.Ecrit0 << " vs Ecrit(psi)="
           << rep.Ecrit_psi << ", K0=" << rep.K0 << " vs K(psi)=" << rep.K_psi;
        throw HypothesisMismatch(os.str());
    }
    if (sc.expected == Scenario::Regime::BlowUp && !rep.blowup_hypotheses) {
        std::ostringstream os;
        os << "blow-up hypotheses fail: E0=" << rep.E0 << " vs Ecrit(psi)=" << rep.Ecrit_psi
           << ", K0=" << rep.K0 << " vs K(psi)=" << rep.K_psi;
        throw HypothesisMismatch(os.str());
    }
    return {std::move(u0), std::move(rep)};
}

namespace {

RegimeReport run_one(const Scenario& sc, GroundStateCache& cache,
                     const std::function<void(const Trajectory&)>& emit) {
    const PreparedSystem& ps = cache.get(sc);
    RegimeReport rep;
    rep.name = sc.name;
    rep.expected = sc.expected;
    try {
        if (sc.kind == Scenario::Kind::ScaledGroundState && !ps.gs.converged) {
            rep.note = "ground state: " + to_string(ps.gs.status);
            return rep;
        }
        auto [u0, prep] = prepare_initial_data(sc, ps.gs, ps.grid, ps.sys);
        rep = std::move(prep);

        StepControls controls = sc.controls;
        if (controls.snapshot_times.empty() && sc.T > 0.0)
            controls.snapshot_times = {0.9 * sc.T};
        const RadialWeight weight = scenario_weight(sc, *ps.grid);
        Trajectory traj = evolve_until(std::move(u0), sc.T, ps.sys, controls, weight);
        rep.verdict = traj.verdict;
        if (emit) emit(traj);

        rep.min_tau = std::numeric_limits<double>::infinity();
        rep.max_K = 0.0;
        for (const auto& s : traj.samples) {
            rep.min_tau = std::min(rep.min_tau, s.f.tau);
            rep.max_K = std::max(rep.max_K, s.f.K);
        }
        const bool tau_negative =
            std::all_of(traj.samples.begin(), traj.samples.end(),
                        [](const TrajectorySample& s) { return s.f.tau < 0.0; });

        if (traj.verdict.kind == Verdict::Kind::Completed && ps.gs.converged) {
            rep.indicators = scattering_indicators(traj, ps.sys, ps.gs.Kpsi);
            rep.trapping_margin = rep.indicators->trapping_margin;
            rep.p_decay_ratio = rep.indicators->p_decay_ratio;
        }

        switch (sc.expected) {
            case Scenario::Regime::Scatter:
                rep.confirms = rep.scatter_hypotheses &&
                               rep.verdict.kind == Verdict::Kind::Completed &&
                               rep.trapping_margin > 0.0;
                break;
            case Scenario::Regime::BlowUp:
                rep.confirms = rep.blowup_hypotheses &&
                               rep.verdict.kind == Verdict::Kind::BlowUp && tau_negative;
                break;
            case Scenario::Regime::Unspecified:
                rep.confirms = true;
                break;
        }
    } catch (const HypothesisMismatch& e) {
        rep.note = e.what();
        rep.confirms = false;
    }
    return rep;
}

}  // namespace

std::vector<RegimeReport> run_dichotomy(const std::vector<Scenario>& scenarios,
                                        int workers, const TrajectorySink& sink) {
    std::vector<RegimeReport> reports(scenarios.size());
    if (scenarios.empty()) return reports;
    GroundStateCache cache;
    std::mutex sink_mu;
    auto emit_for = [&](std::size_t i) -> std::function<void(const Trajectory&)> {
        if (!sink) return {};
        return [&, i](const Trajectory& t) {
            std::scoped_lock lk(sink_mu);
            sink(i, t);
        };
    };
    workers = std::max(1, std::min<int>(workers, static_cast<int>(scenarios.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            reports[i] = run_one(scenarios[i], cache, emit_for(i));
        return reports;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= scenarios.size()) return;
                reports[i] = run_one(scenarios[i], cache, emit_for(i));
            }
        });
    for (auto& th : pool) th.join();
    return reports;
}

SweepResult sweep_amplitude(double a_min, double a_max, int steps,
                            const Scenario& scenario_template, int workers) {
    if (!(0.0 < a_min && a_min < a_max))
        throw std::invalid_argument("sweep_amplitude: need 0 < a_min < a_max");
    if (steps < 1) throw std::invalid_argument("sweep_amplitude: steps must be >= 1");

    std::vector<Scenario> scenarios(steps, scenario_template);
    for (int i = 0; i < steps; ++i) {
        const double a =
            steps == 1 ? a_min : a_min + (a_max - a_min) * i / (steps - 1.0);
        scenarios[i].amplitude = a;
        scenarios[i].kind = Scenario::Kind::ScaledGroundState;
        scenarios[i].expected = Scenario::Regime::Unspecified;
        scenarios[i].name = scenario_template.name + "[a=" + std::to_string(a) + "]";
    }
    const auto reports = run_dichotomy(scenarios, workers);

    SweepResult out;
    out.rows.resize(steps);
    for (int i = 0; i < steps; ++i) {
        out.rows[i] = {scenarios[i].amplitude, reports[i].verdict.kind, reports[i].max_K,
                       reports[i].min_tau};
    }
    for (int i = 0; i + 1 < steps; ++i) {
        const bool lo_ok = out.rows[i].verdict == Verdict::Kind::Completed;
        const bool hi_ok = out.rows[i + 1].verdict == Verdict::Kind::Completed;
        if (lo_ok && !hi_ok) {
            out.transition_bracket = {out.rows[i].amplitude, out.rows[i + 1].amplitude};
            break;
        }
    }
    return out;
}

}  // namespace cnls
