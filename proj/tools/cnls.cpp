/// cnls — command-line laboratory for focusing energy-critical coupled
/// nonlinear Schrodinger systems on radial grids.
///
/// Subcommands:
///   check         verify structural hypotheses and mass resonance of a system
///   ground-state  constrained minimization for the ground state and thresholds
///   evolve        adaptive split-step time integration with verdicts
///   dichotomy     scenario set: verify hypotheses, evolve, classify outcomes
///   sweep         amplitude sweep around the dichotomy threshold
///
/// Exit codes: 0 success / criteria met; 1 domain failure (hypothesis failure,
/// non-convergence, regime mismatch); 2 configuration error; 3 blow-up verdict
/// (evolve); 4 unresolved verdict (evolve).
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

#include "cnls/runio.hpp"

namespace fs = std::filesystem;
using namespace cnls;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    auto* s = cmd->add_option("--seed", args.seed, "RNG seed (overrides config)");
    cmd->callback([&args, s]() { args.seed_set = s->count() > 0; });
    cmd->add_option("--workers", args.workers, "worker pool size (0 = logical cores)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

RunConfig load(const CommonArgs& args, const std::string& command) {
    RunConfig cfg = load_config(args.config_path, command);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_set) cfg.seed = args.seed;
    fs::create_directories(cfg.out_dir);
    return cfg;
}

struct SystemBundle {
    GridPtr grid;
    NonlinearSystem sys;
    std::string potential_source;
};

SystemBundle build_system(const RunConfig& cfg, bool need_grid) {
    SystemBundle b;
    b.potential_source = cfg.raw.at("potential").get<std::string>();
    SystemParams params = params_from_json(cfg.raw.at("params"));
    PotentialF F;
    try {
        F = parse_potential(b.potential_source, params.l);
    } catch (const ParseError& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }
    b.sys = make_system(std::move(params), std::move(F));
    if (need_grid) {
        int N;
        double r_max;
        grid_from_json(cfg.raw.at("grid"), N, r_max);
        b.grid = make_grid_ptr(b.sys.params.d, N, r_max);
    }
    return b;
}

int cmd_check(const CommonArgs& args) {
    RunConfig cfg = load(args, "check");
    SystemBundle b = build_system(cfg, false);

    int samples = kDefaultSamples;
    double tol = kDefaultTol;
    std::vector<std::string> require = {"H1", "H2", "H3", "H4",  "H5",
                                        "H6", "H7", "H8", "gauge", "mass_resonance"};
    if (cfg.raw.contains("check")) {
        const Json& c = cfg.raw.at("check");
        samples = c.value("samples", samples);
        tol = c.value("tol", tol);
        if (c.contains("require")) require = c.at("require").get<std::vector<std::string>>();
    }

    const HypothesisReport rep = check_hypotheses(b.sys.F, b.sys.params, samples,
                                                  cfg.seed, tol);
    const Json jrep = to_json(rep);
    write_report_json(cfg.out_dir + "/check.json", cfg.raw, b.potential_source, jrep);

    bool ok = true;
    for (const std::string& name : require) {
        const CheckStatus* st = nullptr;
        static const char* hyp_names[8] = {"H1", "H2", "H3", "H4",
                                           "H5", "H6", "H7", "H8"};
        for (int i = 0; i < 8; ++i)
            if (name == hyp_names[i]) st = &rep.hyp[i];
        if (name == "gauge") st = &rep.gauge;
        if (name == "mass_resonance") st = &rep.mass_resonance;
        if (!st) throw ConfigError("check: unknown requirement '" + name + "'");
        const bool pass = rep.passed(*st);
        if (!args.quiet)
            std::cout << name << ": " << to_string(st->kind)
                      << " (residual " << st->residual << ")\n";
        ok = ok && pass;
    }
    if (!args.quiet)
        std::cout << "report: " << cfg.out_dir << "/check.json\n";
    return ok ? 0 : 1;
}

int cmd_ground_state(const CommonArgs& args) {
    RunConfig cfg = load(args, "ground-state");
    SystemBundle b = build_system(cfg, true);

    // Gate: the minimization needs F(0)=0, a declared potential, critical
    // homogeneity, and a real potential non-negative on the cone.
    const HypothesisReport rep =
        check_hypotheses(b.sys.F, b.sys.params, 2000, cfg.seed, kDefaultTol);
    for (int idx : {1, 3, 5, 7}) {
        const CheckStatus& st = rep[idx];
        if (!rep.passed(st)) {
            std::cerr << "hypothesis H" << idx << " fails; not solving\n";
            write_report_json(cfg.out_dir + "/ground_state.json", cfg.raw,
                              b.potential_source,
                              Json{{"gate", to_json(rep)}, {"solved", false}});
            return 1;
        }
    }

    // Nontrivial stationary states need beta = 0; the solve ignores beta.
    NonlinearSystem solve_sys = b.sys;
    std::fill(solve_sys.params.beta.begin(), solve_sys.params.beta.end(), 0.0);

    SolveOptions opts;
    if (cfg.raw.contains("ground_state"))
        opts = solve_options_from_json(cfg.raw.at("ground_state"));
    const GroundState gs = solve_ground_state(b.grid, solve_sys, opts);

    Json results = to_json(gs);
    if (gs.converged) {
        const CoptResult copt = compute_copt(gs, b.sys.params.d);
        results["copt_direct"] = copt.direct;
        results["copt_gap"] = copt.rel_gap;
        const std::string snap = cfg.out_dir + "/ground_state.cnls";
        save_snapshot(snap, gs.psi);
        write_snapshot_sidecar(snap, b.sys.params, b.potential_source);
        results["snapshot"] = snap;
    }
    results["grid"] = {{"N", b.grid->N}, {"r_max", b.grid->r_max}};
    write_report_json(cfg.out_dir + "/ground_state.json", cfg.raw, b.potential_source,
                      results);

    if (!gs.converged) {
        if (!args.quiet) std::cerr << "solve failed: " << to_string(gs.status) << "\n";
        return 1;
    }
    const double pohozaev_gap =
        std::abs(gs.Kpsi / gs.Ppsi - 2.0 * b.sys.params.d / (b.sys.params.d - 2.0)) /
        (2.0 * b.sys.params.d / (b.sys.params.d - 2.0));
    if (pohozaev_gap > 5e-3) {
        if (!args.quiet) std::cerr << "Pohozaev ratio out of tolerance\n";
        return 1;
    }
    if (!args.quiet)
        std::cout << "K(psi)=" << gs.Kpsi << " Ecrit(psi)=" << gs.Ecrit_psi
                  << " residual=" << gs.residual << " iterations=" << gs.iterations
                  << "\n";
    return 0;
}

RadialState initial_state_from_config(const RunConfig& cfg, const SystemBundle& b,
                                      const Json& evolve_cfg, Json& results) {
    const Json& init = evolve_cfg.at("initial");
    const std::string kind = init.value("kind", "");
    if (kind == "gaussian") {
        RadialState u0 = make_state(b.grid, b.sys.params.l);
        const double amp = init.value("amplitude", 1.0);
        const double width = init.value("width", 1.0);
        for (int k = 0; k < b.sys.params.l; ++k)
            for (int j = 0; j < b.grid->N; ++j)
                u0.u[k][j] = amp * std::exp(-b.grid->r[j] * b.grid->r[j] /
                                            (2.0 * width * width));
        return u0;
    }
    if (kind == "file") {
        RadialState u0 = load_snapshot(init.at("path").get<std::string>());
        if (u0.ncomp() != b.sys.params.l || u0.grid->N != b.grid->N)
            throw ConfigError("evolve: initial file does not match the grid/system");
        return u0;
    }
    if (kind == "scaled_ground_state") {
        NonlinearSystem solve_sys = b.sys;
        std::fill(solve_sys.params.beta.begin(), solve_sys.params.beta.end(), 0.0);
        SolveOptions opts;
        if (cfg.raw.contains("ground_state"))
            opts = solve_options_from_json(cfg.raw.at("ground_state"));
        const GroundState gs = solve_ground_state(b.grid, solve_sys, opts);
        if (!gs.converged)
            throw std::runtime_error("ground state did not converge: " +
                                     to_string(gs.status));
        results["ground_state"] = to_json(gs);
        Scenario sc;
        sc.kind = Scenario::Kind::ScaledGroundState;
        sc.params = b.sys.params;
        sc.amplitude = init.value("a", 1.0);
        sc.mollifier_radius = init.value("mollifier_radius", 0.0);
        auto [u0, prep] = prepare_initial_data(sc, gs, b.grid, b.sys);
        results["prepared"] = to_json(prep);
        return u0;
    }
    throw ConfigError("evolve: initial.kind must be gaussian, file or scaled_ground_state");
}

int cmd_evolve(const CommonArgs& args) {
    RunConfig cfg = load(args, "evolve");
    SystemBundle b = build_system(cfg, true);
    const Json& ej = cfg.raw.at("evolve");

    StepControls controls = controls_from_json(ej);
    const BlowupRule rule = blowup_rule_from_json(ej);
    const double T = ej.at("T").get<double>();

    RadialWeight weight = make_quadratic_weight(*b.grid);
    if (ej.contains("weight")) {
        const Json& w = ej.at("weight");
        if (w.value("kind", "quadratic") == "cutoff")
            weight = make_cutoff_chi(*b.grid, w.at("R").get<double>(), w.value("c", 6.0));
    }

    Json results;
    RadialState u0 = initial_state_from_config(cfg, b, ej, results);
    const Trajectory traj = evolve_until(std::move(u0), T, b.sys, controls, weight, rule);

    write_timeseries_csv(cfg.out_dir + "/timeseries.csv", traj.samples);
    const std::string snap = cfg.out_dir + "/state_final.cnls";
    save_snapshot(snap, traj.final_state);
    write_snapshot_sidecar(snap, b.sys.params, b.potential_source);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const std::string p = cfg.out_dir + "/snapshot_" + std::to_string(i) + ".cnls";
        save_snapshot(p, traj.snapshots[i]);
        write_snapshot_sidecar(p, b.sys.params, b.potential_source);
    }

    results["verdict"] = to_json(traj.verdict);
    results["final"] = to_json(traj.samples.back().f);
    if (traj.samples.size() >= 5) {
        try {
            const ConsistencyReport cons = consistency_report(traj.samples);
            results["consistency"] = {{"dV_vs_Vprime", cons.dV_vs_Vprime},
                                      {"dR_vs_Rprime", cons.dR_vs_Rprime}};
        } catch (const std::invalid_argument&) {
            // non-uniform sampling; consistency omitted
        }
    }
    write_report_json(cfg.out_dir + "/evolve.json", cfg.raw, b.potential_source, results);

    if (!args.quiet)
        std::cout << "verdict: " << to_string(traj.verdict.kind) << " at t="
                  << traj.verdict.T << "\n";
    switch (traj.verdict.kind) {
        case Verdict::Kind::Completed: return 0;
        case Verdict::Kind::BlowUp: return 3;
        case Verdict::Kind::Unresolved: return 4;
    }
    return 4;
}

int cmd_dichotomy(const CommonArgs& args) {
    RunConfig cfg = load(args, "dichotomy");
    const Json& dj = cfg.raw.at("dichotomy");
    int workers = args.workers > 0 ? args.workers : dj.value("workers", 0);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());

    std::vector<Scenario> scenarios;
    for (const auto& sj : dj.at("scenarios")) scenarios.push_back(scenario_from_json(sj));

    const auto reports = run_dichotomy(
        scenarios, workers, [&](std::size_t i, const Trajectory& t) {
            write_timeseries_csv(cfg.out_dir + "/scenario_" + std::to_string(i) + ".csv",
                                 t.samples);
        });

    Json jr = Json::array();
    bool all_match = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        jr.push_back(to_json(reports[i]));
        if (scenarios[i].expected != Scenario::Regime::Unspecified)
            all_match = all_match && reports[i].confirms;
        if (!args.quiet)
            std::cout << reports[i].name << ": " << to_string(reports[i].verdict.kind)
                      << (reports[i].confirms ? " (confirms)" : " (MISMATCH)") << "\n";
    }
    write_report_json(cfg.out_dir + "/dichotomy.json", cfg.raw, "", Json{{"scenarios", jr}});
    return all_match ? 0 : 1;
}

int cmd_sweep(const CommonArgs& args) {
    RunConfig cfg = load(args, "sweep");
    const Json& sj = cfg.raw.at("sweep");
    int workers = args.workers > 0 ? args.workers : sj.value("workers", 0);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());

    const Scenario tpl = scenario_from_json(sj.at("template"));
    const SweepResult sweep = sweep_amplitude(sj.at("a_min").get<double>(),
                                              sj.at("a_max").get<double>(),
                                              sj.at("steps").get<int>(), tpl, workers);
    write_report_json(cfg.out_dir + "/sweep.json", cfg.raw, tpl.potential_source,
                      to_json(sweep));
    if (!args.quiet)
        for (const auto& row : sweep.rows)
            std::cout << "a=" << row.amplitude << " -> " << to_string(row.verdict)
                      << " (max K " << row.max_K << ", min tau " << row.min_tau << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for energy-critical coupled Schrodinger systems"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handlers[])(const CommonArgs&) = {cmd_check, cmd_ground_state, cmd_evolve,
                                            cmd_dichotomy, cmd_sweep};
    const char* names[] = {"check", "ground-state", "evolve", "dichotomy", "sweep"};
    const char* descs[] = {"verify hypotheses and mass resonance",
                           "solve the constrained ground-state problem",
                           "time-evolve initial data with verdicts",
                           "run scenario sets against expected regimes",
                           "amplitude sweep around the threshold"};
    int selected = -1;
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        add_common(sub, args);
        sub->parse_complete_callback([&selected, i]() { selected = i; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return handlers[selected](args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
