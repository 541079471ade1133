/// Run configuration (strict-schema JSON), result serialization, and the CSV
/// time-series writer shared by the CLI and the test harnesses.
#pragma once

#include <string>
#include <vector>

#include "cnls/evolve.hpp"
#include "cnls/groundstate.hpp"
#include "cnls/harness.hpp"
#include "cnls/hypotheses.hpp"

#include "json.hpp"  // vendored nlohmann::json

namespace cnls {

using Json = nlohmann::json;

/// Parsed top-level run configuration. Section presence is validated per
/// subcommand; unknown keys anywhere are rejected.
struct RunConfig {
    Json raw;
    std::string out_dir = ".";
    std::uint64_t seed = 20240915ull;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path, const std::string& command);
RunConfig parse_config(const Json& j, const std::string& command);

SystemParams params_from_json(const Json& j);
void grid_from_json(const Json& j, int& N, double& r_max);
StepControls controls_from_json(const Json& j);
SolveOptions solve_options_from_json(const Json& j);
BlowupRule blowup_rule_from_json(const Json& j);
Scenario scenario_from_json(const Json& j);

Json to_json(const HypothesisReport& rep);
Json to_json(const GroundState& gs);
Json to_json(const Verdict& v);
Json to_json(const FunctionalRecord& r);
Json to_json(const RegimeReport& r);
Json to_json(const ScatteringIndicators& ind);
Json to_json(const SweepResult& s);

/// Time-series CSV: t, dt, M, E, K, L, P, Ecrit, tau, V, Vprime_formula, R,
/// Rprime_formula, max_amp, then snorm_1..snorm_l.
void write_timeseries_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples);

/// Report JSON with provenance: resolved config and potential source embedded;
/// wall-clock time isolated under metadata.timestamp.
void write_report_json(const std::string& path, const Json& resolved_config,
                       const std::string& potential_source, const Json& results);

/// Snapshot sidecar: system parameters and the potential source next to the
/// binary field file.
void write_snapshot_sidecar(const std::string& snapshot_path, const SystemParams& params,
                            const std::string& potential_source);

}  // namespace cnls
