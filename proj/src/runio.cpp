#include "cnls/runio.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

namespace cnls {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

double require_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(where + ": missing numeric '" + key + "'");
    return j.at(key).get<double>();
}

std::vector<double> number_list(const Json& j, const std::string& key,
                                const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError(where + ": missing array '" + key + "'");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json status_json(const CheckStatus& s) {
    Json j;
    j["status"] = to_string(s.kind);
    j["residual"] = s.residual;
    if (!s.note.empty()) j["note"] = s.note;
    if (!s.witness.empty()) {
        Json w = Json::array();
        for (const Complex& z : s.witness) w.push_back({z.real(), z.imag()});
        j["witness"] = std::move(w);
    }
    return j;
}

}  // namespace

SystemParams params_from_json(const Json& j) {
    check_keys(j, {"d", "l", "alpha", "gamma", "beta", "sigma"}, "params");
    SystemParams p;
    p.d = static_cast<int>(require_number(j, "d", "params"));
    p.l = static_cast<int>(require_number(j, "l", "params"));
    p.alpha = number_list(j, "alpha", "params");
    p.gamma = number_list(j, "gamma", "params");
    p.beta = j.contains("beta") ? number_list(j, "beta", "params")
                                : std::vector<double>(p.l, 0.0);
    if (j.contains("sigma")) p.sigma = number_list(j, "sigma", "params");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    return p;
}

void grid_from_json(const Json& j, int& N, double& r_max) {
    check_keys(j, {"N", "r_max"}, "grid");
    N = static_cast<int>(require_number(j, "N", "grid"));
    r_max = require_number(j, "r_max", "grid");
}

StepControls controls_from_json(const Json& j) {
    check_keys(j,
               {"T", "dt0", "dt_min", "dt_max", "safety", "c_amp", "tol",
                "record_interval", "snapshot_times", "initial", "weight",
                "growth_factor", "window"},
               "evolve");
    StepControls c;
    if (j.contains("dt0")) c.dt0 = j.at("dt0").get<double>();
    if (j.contains("dt_min")) c.dt_min = j.at("dt_min").get<double>();
    if (j.contains("dt_max")) c.dt_max = j.at("dt_max").get<double>();
    if (j.contains("safety")) c.safety = j.at("safety").get<double>();
    if (j.contains("c_amp")) c.c_amp = j.at("c_amp").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("record_interval")) c.record_interval = j.at("record_interval").get<double>();
    if (j.contains("snapshot_times"))
        c.snapshot_times = number_list(j, "snapshot_times", "evolve");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("evolve: ") + e.what());
    }
    return c;
}

BlowupRule blowup_rule_from_json(const Json& j) {
    BlowupRule r;
    if (j.contains("growth_factor")) r.growth_factor = j.at("growth_factor").get<double>();
    if (j.contains("window")) r.window = j.at("window").get<int>();
    return r;
}

SolveOptions solve_options_from_json(const Json& j) {
    check_keys(j,
               {"step0", "step_min", "step_max", "step_grow", "step_shrink",
                "max_iterations", "grad_tol", "guess_amplitude", "guess_width",
                "guess_file", "drift_restart_factor", "max_restarts"},
               "ground_state");
    SolveOptions o;
    if (j.contains("step0")) o.step0 = j.at("step0").get<double>();
    if (j.contains("step_min")) o.step_min = j.at("step_min").get<double>();
    if (j.contains("step_max")) o.step_max = j.at("step_max").get<double>();
    if (j.contains("step_grow")) o.step_grow = j.at("step_grow").get<double>();
    if (j.contains("step_shrink")) o.step_shrink = j.at("step_shrink").get<double>();
    if (j.contains("max_iterations")) o.max_iterations = j.at("max_iterations").get<int>();
    if (j.contains("grad_tol")) o.grad_tol = j.at("grad_tol").get<double>();
    if (j.contains("guess_amplitude")) o.guess_amplitude = j.at("guess_amplitude").get<double>();
    if (j.contains("guess_width")) o.guess_width = j.at("guess_width").get<double>();
    if (j.contains("guess_file")) o.guess_file = j.at("guess_file").get<std::string>();
    if (j.contains("drift_restart_factor"))
        o.drift_restart_factor = j.at("drift_restart_factor").get<double>();
    if (j.contains("max_restarts")) o.max_restarts = j.at("max_restarts").get<int>();
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ground_state: ") + e.what());
    }
    return o;
}

Scenario scenario_from_json(const Json& j) {
    check_keys(j,
               {"name", "kind", "expected", "params", "potential", "grid", "T",
                "controls", "a", "mollifier_radius", "gauss_amplitude", "gauss_width",
                "file", "weight", "ground_state"},
               "scenario");
    Scenario sc;
    if (j.contains("name")) sc.name = j.at("name").get<std::string>();
    const std::string kind = j.value("kind", "gaussian");
    if (kind == "scaled_ground_state") sc.kind = Scenario::Kind::ScaledGroundState;
    else if (kind == "gaussian") sc.kind = Scenario::Kind::Gaussian;
    else if (kind == "file") sc.kind = Scenario::Kind::FromFile;
    else throw ConfigError("scenario: unknown kind '" + kind + "'");
    const std::string expected = j.value("expected", "unspecified");
    if (expected == "scatter") sc.expected = Scenario::Regime::Scatter;
    else if (expected == "blowup") sc.expected = Scenario::Regime::BlowUp;
    else if (expected == "unspecified") sc.expected = Scenario::Regime::Unspecified;
    else throw ConfigError("scenario: unknown expected regime '" + expected + "'");

    if (!j.contains("params")) throw ConfigError("scenario: missing 'params'");
    sc.params = params_from_json(j.at("params"));
    if (!j.contains("potential")) throw ConfigError("scenario: missing 'potential'");
    sc.potential_source = j.at("potential").get<std::string>();
    if (j.contains("grid")) grid_from_json(j.at("grid"), sc.N, sc.r_max);
    sc.T = j.value("T", 1.0);
    if (j.contains("controls")) sc.controls = controls_from_json(j.at("controls"));
    if (j.contains("a")) sc.amplitude = j.at("a").get<double>();
    if (j.contains("mollifier_radius"))
        sc.mollifier_radius = j.at("mollifier_radius").get<double>();
    if (j.contains("gauss_amplitude")) sc.gauss_amplitude = j.at("gauss_amplitude").get<double>();
    if (j.contains("gauss_width")) sc.gauss_width = j.at("gauss_width").get<double>();
    if (j.contains("file")) sc.file = j.at("file").get<std::string>();
    if (j.contains("weight")) {
        const Json& w = j.at("weight");
        check_keys(w, {"kind", "R", "c"}, "weight");
        const std::string wk = w.value("kind", "quadratic");
        if (wk == "cutoff") {
            sc.weight_cutoff_R = require_number(w, "R", "weight");
            sc.weight_cutoff_c = w.value("c", 6.0);
        } else if (wk != "quadratic") {
            throw ConfigError("weight: unknown kind '" + wk + "'");
        }
    }
    if (j.contains("ground_state")) sc.gs_options = solve_options_from_json(j.at("ground_state"));
    return sc;
}

RunConfig parse_config(const Json& j, const std::string& command) {
    static const std::set<std::string> top = {"params", "potential", "grid",   "seed",
                                              "out",    "check",     "ground_state",
                                              "evolve", "dichotomy", "sweep"};
    check_keys(j, top, "config");

    RunConfig cfg;
    cfg.raw = j;
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

    auto need = [&](const char* section) {
        if (!j.contains(section))
            throw ConfigError("config: command '" + command + "' needs section '" +
                              section + "'");
    };
    auto need_system = [&]() {
        need("params");
        need("potential");
        params_from_json(j.at("params"));
        if (!j.at("potential").is_string())
            throw ConfigError("config: 'potential' must be a string");
    };

    if (command == "check") {
        need_system();
        if (j.contains("check"))
            check_keys(j.at("check"), {"samples", "tol", "require"}, "check");
    } else if (command == "ground-state") {
        need_system();
        need("grid");
        int N;
        double r_max;
        grid_from_json(j.at("grid"), N, r_max);
        if (j.contains("ground_state")) solve_options_from_json(j.at("ground_state"));
    } else if (command == "evolve") {
        need_system();
        need("grid");
        need("evolve");
        int N;
        double r_max;
        grid_from_json(j.at("grid"), N, r_max);
        controls_from_json(j.at("evolve"));
        if (!j.at("evolve").contains("T"))
            throw ConfigError("evolve: missing horizon 'T'");
        if (!j.at("evolve").contains("initial"))
            throw ConfigError("evolve: missing 'initial'");
    } else if (command == "dichotomy") {
        need("dichotomy");
        check_keys(j.at("dichotomy"), {"workers", "scenarios"}, "dichotomy");
        if (!j.at("dichotomy").contains("scenarios") ||
            !j.at("dichotomy").at("scenarios").is_array())
            throw ConfigError("dichotomy: missing 'scenarios' array");
        for (const auto& s : j.at("dichotomy").at("scenarios")) scenario_from_json(s);
    } else if (command == "sweep") {
        need("sweep");
        check_keys(j.at("sweep"), {"a_min", "a_max", "steps", "template", "workers"},
                   "sweep");
        require_number(j.at("sweep"), "a_min", "sweep");
        require_number(j.at("sweep"), "a_max", "sweep");
        require_number(j.at("sweep"), "steps", "sweep");
        if (!j.at("sweep").contains("template"))
            throw ConfigError("sweep: missing 'template'");
        scenario_from_json(j.at("sweep").at("template"));
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    Json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    return parse_config(j, command);
}

Json to_json(const HypothesisReport& rep) {
    Json j;
    static const char* names[8] = {"H1", "H2", "H3", "H4", "H5", "H6", "H7", "H8"};
    for (int i = 0; i < 8; ++i) j[names[i]] = status_json(rep.hyp[i]);
    j["gauge"] = status_json(rep.gauge);
    j["mass_resonance"] = status_json(rep.mass_resonance);
    j["mass_resonant"] = rep.mass_resonant;
    j["samples"] = rep.samples;
    j["seed"] = rep.seed;
    j["tol"] = rep.tol;
    return j;
}

Json to_json(const GroundState& gs) {
    Json j;
    j["status"] = to_string(gs.status);
    j["converged"] = gs.converged;
    j["iterations"] = gs.iterations;
    if (!gs.message.empty()) j["message"] = gs.message;
    if (gs.converged) {
        j["K"] = gs.Kpsi;
        j["P"] = gs.Ppsi;
        j["Ecrit"] = gs.Ecrit_psi;
        j["J"] = gs.Jpsi;
        j["Copt"] = gs.Copt;
        j["lambda"] = gs.lambda;
        j["stationarity_residual"] = gs.residual;
        j["pohozaev_ratio"] = gs.Kpsi / gs.Ppsi;
    }
    return j;
}

Json to_json(const Verdict& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    j["T"] = v.T;
    if (!v.reason.empty()) j["reason"] = v.reason;
    if (v.kind == Verdict::Kind::BlowUp) {
        j["evidence"] = {{"k_growth_factor", v.evidence.k_growth_factor},
                         {"final_dt", v.evidence.final_dt},
                         {"t_star", v.evidence.t_star}};
    }
    return j;
}

Json to_json(const FunctionalRecord& r) {
    return Json{{"t", r.t},         {"M", r.M},     {"E", r.E},
                {"K", r.K},         {"L", r.L},     {"P", r.P},
                {"Ecrit", r.Ecrit}, {"tau", r.tau}, {"sigma_defaulted", r.sigma_defaulted}};
}

Json to_json(const ScatteringIndicators& ind) {
    Json j;
    j["s_norm"] = ind.s_norm;
    j["p_decay_ratio"] = ind.p_decay_ratio;
    j["no_peak"] = ind.no_peak;
    j["trapping_margin"] = ind.trapping_margin;
    if (std::isfinite(ind.linear_deviation)) j["linear_deviation"] = ind.linear_deviation;
    return j;
}

Json to_json(const RegimeReport& r) {
    Json j;
    j["name"] = r.name;
    j["prepared"] = r.prepared;
    j["E0"] = r.E0;
    j["Ecrit0"] = r.Ecrit0;
    j["K0"] = r.K0;
    j["M0"] = r.M0;
    j["K_psi"] = r.K_psi;
    j["Ecrit_psi"] = r.Ecrit_psi;
    j["scatter_hypotheses"] = r.scatter_hypotheses;
    j["blowup_hypotheses"] = r.blowup_hypotheses;
    j["mollifier_radius_used"] = r.mollifier_radius_used;
    j["expected"] = to_string(r.expected);
    j["verdict"] = to_json(r.verdict);
    j["confirms"] = r.confirms;
    j["min_tau"] = r.min_tau;
    j["max_K"] = r.max_K;
    j["trapping_margin"] = r.trapping_margin;
    j["p_decay_ratio"] = r.p_decay_ratio;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.indicators) j["indicators"] = to_json(*r.indicators);
    return j;
}

Json to_json(const SweepResult& s) {
    Json rows = Json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"a", r.amplitude},
                        {"verdict", to_string(r.verdict)},
                        {"max_K", r.max_K},
                        {"min_tau", r.min_tau}});
    Json j;
    j["rows"] = std::move(rows);
    if (s.transition_bracket)
        j["transition_bracket"] = {s.transition_bracket->first, s.transition_bracket->second};
    return j;
}

void write_timeseries_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,dt,M,E,K,L,P,Ecrit,tau,V,Vprime_formula,R,Rprime_formula,max_amp";
    const int l = samples.empty() ? 0 : static_cast<int>(samples.front().snorm_density.size());
    for (int k = 1; k <= l; ++k) os << ",snorm_" << k;
    os << "\n";
    for (const auto& s : samples) {
        os << fmt17(s.t) << ',' << fmt17(s.dt) << ',' << fmt17(s.f.M) << ','
           << fmt17(s.f.E) << ',' << fmt17(s.f.K) << ',' << fmt17(s.f.L) << ','
           << fmt17(s.f.P) << ',' << fmt17(s.f.Ecrit) << ',' << fmt17(s.f.tau) << ','
           << fmt17(s.V) << ',' << fmt17(s.Vprime) << ',' << fmt17(s.R) << ','
           << fmt17(s.Rprime) << ',' << fmt17(s.max_amp);
        for (double v : s.snorm_density) os << ',' << fmt17(v);
        os << "\n";
    }
}

void write_report_json(const std::string& path, const Json& resolved_config,
                       const std::string& potential_source, const Json& results) {
    Json j;
    j["metadata"]["timestamp"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    j["resolved_config"] = resolved_config;
    j["potential_source"] = potential_source;
    j["results"] = results;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

void write_snapshot_sidecar(const std::string& snapshot_path, const SystemParams& params,
                            const std::string& potential_source) {
    Json j;
    j["params"] = {{"d", params.d},       {"l", params.l},   {"alpha", params.alpha},
                   {"gamma", params.gamma}, {"beta", params.beta}};
    if (params.sigma) j["params"]["sigma"] = *params.sigma;
    j["potential"] = potential_source;
    std::ofstream os(snapshot_path + ".json");
    if (!os) throw std::runtime_error("cannot open sidecar for " + snapshot_path);
    os << j.dump(2) << "\n";
}

}  // namespace cnls
