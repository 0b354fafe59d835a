// SPDX-License-Identifier: Apache-2.0
//
// Scenario description, per-trial instance construction and the three
// comparison methods (EA-FA, PA-FA, PA-SA), plus the Monte Carlo driver.

#ifndef XLSWIPT_ORCHESTRATOR_HPP
#define XLSWIPT_ORCHESTRATOR_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xlswipt/channel.hpp"
#include "xlswipt/geometry.hpp"
#include "xlswipt/metrics.hpp"
#include "xlswipt/pa_solver.hpp"

namespace xlswipt {

/// A visibility region described relative to the array, so the same plan
/// works for every S in a sweep.
struct RegionPlan {
    Role kind = Role::ID;
    double center_x_fraction = 0.0;  // center x as a fraction of the array width
    double r_min_fraction = 0.0;     // of the role distance cap
    double r_max_fraction = 1.0;
    AngularBounds angles;
    std::optional<std::vector<bool>> subarray_mask;
};

struct Scenario {
    std::size_t subarrays = 4;
    std::size_t elements_x = 32;
    std::size_t elements_y = 8;
    double wavelength = 0.1;          // meters
    double element_dimension = 0.025; // meters
    double element_pitch = 0.05;      // meters
    double subarray_gap = 0.0;        // meters
    double boresight_exponent = 2.0;

    std::size_t id_users = 2;
    std::size_t eh_users = 1;
    std::vector<RegionPlan> regions;
    std::uint64_t seed = 1;
    std::size_t trials = 1;

    PowerModelParams power;
    EHModelParams eh;
    double noise_power = 1e-11;  // watts per ID user

    AdmmConfig admm;
    double outer_tolerance = 1e-7;  // delta, watts

    std::optional<double> rate_threshold;    // bits/s/Hz, overrides the EA-FA floor
    std::optional<double> energy_threshold;  // watts, overrides the EA-FA floor
};

/// The default region plan: one ID region on each half of the array and one
/// EH region in the middle.
std::vector<RegionPlan> default_regions();

struct TrialInstance {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    ArrayGeometry geometry;
    std::vector<User> users;
    GainTables tables;
    QoSThresholds thresholds;
};

/// Seed for trial `index`; distinct, deterministic, independent of S.
std::uint64_t trial_seed(std::uint64_t base, std::size_t index);

std::vector<VisibilityRegionSpec> resolve_regions(const std::vector<RegionPlan>& plan, const ArrayGeometry& geom);

/// Geometry, user drop, gain tables and QoS floors for one trial.
TrialInstance build_trial(const Scenario& scenario, std::size_t index);

enum class Method { EaFa, PaFa, PaSa };
enum class RunStatus { Converged, ConvergedWithRollback, MaxIterations, Infeasible };

const char* to_string(Method method);
const char* to_string(RunStatus status);

struct SolverReport {
    Method method = Method::EaFa;
    double power_consumption = 0.0;  // watts
    double transmit_power = 0.0;     // watts
    std::vector<double> rates;       // [L], bits/s/Hz
    std::vector<double> harvested;   // [M], watts
    std::vector<bool> activation;    // [S]
    std::size_t active_count = 0;
    std::size_t outer_iterations = 0;
    std::size_t inner_iterations = 0;
    std::size_t pa_solves = 0;     // ADMM runs
    std::size_t pa_converged = 0;
    std::size_t pa_screened = 0;   // subproblems proved infeasible before any ADMM run
    RunStatus status = RunStatus::Converged;
    PowerAllocation allocation;
    std::vector<double> trace;  // P_C per inner iteration, concatenated over solves
    std::vector<std::vector<bool>> activation_history;  // candidate activation per outer iteration
};

/// Metrics of `pa` under binary activation `active`.
SolverReport evaluate(Method method, const PowerAllocation& pa, const std::vector<bool>& active,
                      const TrialInstance& trial, const Scenario& scenario);

SolverReport run_ea_fa(const TrialInstance& trial, const Scenario& scenario);
SolverReport run_pa_fa(const TrialInstance& trial, const Scenario& scenario);

/// Alternates surrogate-based activation and PA solves. The first outer
/// iteration is the full-activation solve; pass a PA-FA report of the same
/// trial to reuse it. A step that loses feasibility or raises P_C is rolled
/// back and ends the loop.
SolverReport run_pa_sa(const TrialInstance& trial, const Scenario& scenario,
                       const std::optional<SolverReport>& full_activation = std::nullopt);

/// P_C of `report` over P_C of `baseline`.
double power_consumption_ratio(const SolverReport& report, const SolverReport& baseline);

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    SolverReport ea_fa;
    SolverReport pa_fa;
    SolverReport pa_sa;
};

/// Runs every trial of `scenario` on `workers` threads. Results are ordered
/// by trial index and do not depend on the worker count.
std::vector<TrialResult> run_trials(const Scenario& scenario, std::size_t workers, bool keep_traces = false);

struct Summary {
    std::size_t trials = 0;
    std::size_t feasible_trials = 0;  // PA-FA and PA-SA both not infeasible
    double mean_pc_ea_fa = 0.0;
    double mean_pc_pa_fa = 0.0;
    double mean_pc_pa_sa = 0.0;
    double mean_ptx_ea_fa = 0.0;
    double eta_pa_fa = 0.0;
    double eta_pa_sa = 0.0;
    double active_ratio = 0.0;         // S_a / S
    double active_ratio_stderr = 0.0;
    double pa_converged_fraction = 0.0;  // over every ADMM run of the trials
    std::size_t max_outer_iterations = 0;
};

/// Means over trials; ratios and S_a/S use the feasible trials only.
Summary summarize(const std::vector<TrialResult>& results, std::size_t subarrays);

}  // namespace xlswipt

#endif  // XLSWIPT_ORCHESTRATOR_HPP
