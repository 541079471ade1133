/// Scenario construction and the dichotomy experiments: verify the threshold
/// hypotheses on measured initial data, evolve, and classify outcomes against
/// the scattering / blow-up regimes.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnls/diagnostics.hpp"
#include "cnls/evolve.hpp"
#include "cnls/groundstate.hpp"
#include "cnls/system.hpp"

namespace cnls {

struct Scenario {
    enum class Kind { ScaledGroundState, Gaussian, FromFile } kind = Kind::Gaussian;
    enum class Regime { Scatter, BlowUp, Unspecified } expected = Regime::Unspecified;

    std::string name;
    SystemParams params;
    std::string potential_source;
    int N = 2048;
    double r_max = 100.0;
    double T = 1.0;
    StepControls controls;
    SolveOptions gs_options;

    // ScaledGroundState
    double amplitude = 1.0;        // a in u0 = a psi m(r)
    double mollifier_radius = 0.0; // R_m; 0 keeps the profile unmollified

    // Gaussian
    double gauss_amplitude = 1.0;
    double gauss_width = 1.0;

    // FromFile
    std::string file;

    // Diagnostics weight: cutoff radius (0 selects the quadratic weight).
    double weight_cutoff_R = 0.0;
    double weight_cutoff_c = 6.0;
};

std::string to_string(Scenario::Regime r);

struct RegimeReport {
    std::string name;
    double E0 = 0.0;      // full energy of the prepared data
    double Ecrit0 = 0.0;  // K - 2P of the prepared data
    double K0 = 0.0;
    double M0 = 0.0;
    double K_psi = 0.0;
    double Ecrit_psi = 0.0;
    bool scatter_hypotheses = false;  // Ecrit0 < Ecrit_psi and K0 < K_psi
    bool blowup_hypotheses = false;   // E0 < Ecrit_psi and K0 > K_psi
    double mollifier_radius_used = 0.0;
    Scenario::Regime expected = Scenario::Regime::Unspecified;
    Verdict verdict;
    bool confirms = false;
    bool prepared = false;
    std::string note;
    double trapping_margin = 0.0;
    double min_tau = 0.0;
    double max_K = 0.0;
    double p_decay_ratio = 0.0;
    std::optional<ScatteringIndicators> indicators;
};

struct HypothesisMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Build the initial state for a scenario and evaluate the regime hypotheses
/// from the measured functionals. For ScaledGroundState data the mollifier
/// radius is increased until the requested regime's hypotheses hold (or the
/// grid runs out of room). Throws HypothesisMismatch when the requested
/// regime's hypotheses fail on the measured numbers.
std::pair<RadialState, RegimeReport> prepare_initial_data(const Scenario& sc,
                                                          const GroundState& gs,
                                                          const GridPtr& grid,
                                                          const NonlinearSystem& sys);

using TrajectorySink = std::function<void(std::size_t, const Trajectory&)>;

/// Run every scenario (ground states computed per system and memoized),
/// attach verdicts and indicators, and evaluate the confirmation rule:
/// Scatter scenarios confirm on Completed with positive trapping margin,
/// BlowUp scenarios confirm on a BlowUp verdict with tau < 0 throughout.
/// The sink, when set, receives each scenario's trajectory (serialized by a
/// lock; scenario index identifies the run).
std::vector<RegimeReport> run_dichotomy(const std::vector<Scenario>& scenarios,
                                        int workers = 1,
                                        const TrajectorySink& sink = {});

struct SweepRow {
    double amplitude = 0.0;
    Verdict::Kind verdict = Verdict::Kind::Unresolved;
    double max_K = 0.0;
    double min_tau = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<std::pair<double, double>> transition_bracket;
};

/// Uniform amplitude sweep of a ScaledGroundState template; reports the
/// verdict transition bracket when one exists.
SweepResult sweep_amplitude(double a_min, double a_max, int steps,
                            const Scenario& scenario_template, int workers = 1);

}  // namespace cnls
