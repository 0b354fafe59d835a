// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "xlswipt/errors.hpp"
#include "xlswipt/sa_selector.hpp"

namespace xlswipt {

std::vector<RegionPlan> default_regions() {
    RegionPlan id_left;
    id_left.kind = Role::ID;
    id_left.center_x_fraction = -0.25;
    id_left.r_min_fraction = 0.1;
    id_left.r_max_fraction = 1.0;
    id_left.angles = {0.0, std::numbers::pi / 3.0, 0.0, 2.0 * std::numbers::pi};

    RegionPlan id_right = id_left;
    id_right.center_x_fraction = 0.25;

    RegionPlan eh;
    eh.kind = Role::EH;
    eh.center_x_fraction = 0.0;
    eh.r_min_fraction = 0.1;
    eh.r_max_fraction = 1.0;
    eh.angles = {0.0, std::numbers::pi / 3.0, 0.0, 2.0 * std::numbers::pi};
    return {id_left, id_right, eh};
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t index) {
    // splitmix64 finalizer over base + index
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<VisibilityRegionSpec> resolve_regions(const std::vector<RegionPlan>& plan, const ArrayGeometry& geom) {
    const double width = static_cast<double>(geom.subarrays * geom.elements_x) * geom.element_pitch +
                         static_cast<double>(geom.subarrays - 1) * geom.subarray_gap;
    const double dfa = fraunhofer_array_distance(geom);
    std::vector<VisibilityRegionSpec> out;
    out.reserve(plan.size());
    for (const auto& p : plan) {
        VisibilityRegionSpec r;
        r.kind = p.kind;
        r.center = {p.center_x_fraction * width, 0.0, 0.0};
        const double cap = role_distance_cap(p.kind, dfa);
        r.r_min = p.r_min_fraction * cap;
        r.r_max = p.r_max_fraction * cap;
        r.angles = p.angles;
        r.subarray_mask = p.subarray_mask;
        out.push_back(std::move(r));
    }
    return out;
}

TrialInstance build_trial(const Scenario& sc, std::size_t index) {
    TrialInstance t;
    t.index = index;
    t.seed = trial_seed(sc.seed, index);
    t.geometry = build_array(sc.subarrays, sc.elements_x, sc.elements_y, sc.wavelength, sc.element_dimension,
                             sc.element_pitch, sc.subarray_gap);
    const auto regions = resolve_regions(sc.regions.empty() ? default_regions() : sc.regions, t.geometry);
    t.users = sample_users(regions, sc.id_users, sc.eh_users, sc.subarrays, fraunhofer_array_distance(t.geometry),
                           t.seed);
    t.tables = compute_gain_tables(t.geometry, t.users, sc.boresight_exponent,
                                   std::vector<double>(sc.id_users, sc.noise_power));
    t.thresholds = compute_thresholds(t.tables, t.geometry, sc.power, sc.eh);
    if (sc.rate_threshold || sc.energy_threshold) {
        const QoSThresholds ex = explicit_thresholds(
            std::vector<double>(sc.id_users, sc.rate_threshold.value_or(0.0)),
            std::vector<double>(sc.eh_users, sc.energy_threshold.value_or(0.0)), sc.eh);
        if (sc.rate_threshold) {
            t.thresholds.rate_floor = ex.rate_floor;
        }
        if (sc.energy_threshold) {
            t.thresholds.energy_floor = ex.energy_floor;
            t.thresholds.energy_input_floor = ex.energy_input_floor;
        }
    }
    return t;
}

const char* to_string(Method method) {
    switch (method) {
        case Method::EaFa:
            return "EA-FA";
        case Method::PaFa:
            return "PA-FA";
        case Method::PaSa:
            return "PA-SA";
    }
    return "?";
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged:
            return "converged";
        case RunStatus::ConvergedWithRollback:
            return "converged-with-rollback";
        case RunStatus::MaxIterations:
            return "max-iterations";
        case RunStatus::Infeasible:
            return "infeasible";
    }
    return "?";
}

namespace {

std::vector<double> weights_of(const std::vector<bool>& a) {
    std::vector<double> w(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        w[s] = a[s] ? 1.0 : 0.0;
    }
    return w;
}

RunStatus status_of(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged:
            return RunStatus::Converged;
        case SolveStatus::MaxIterations:
            return RunStatus::MaxIterations;
        case SolveStatus::Infeasible:
            return RunStatus::Infeasible;
    }
    return RunStatus::Infeasible;
}

struct Attempt {
    std::optional<PaSolution> solution;
    bool feasible = false;
};

Attempt attempt_solve(std::span<const double> weights, const TrialInstance& trial, const Scenario& sc,
                      const std::optional<PowerAllocation>& start) {
    Attempt a;
    try {
        a.solution = solve_pa(weights, trial.tables, trial.thresholds, sc.power,
                              trial.geometry.elements_per_subarray(), sc.admm, start);
        a.feasible = a.solution->status != SolveStatus::Infeasible;
    } catch (const InfeasibleThreshold&) {
    } catch (const Divergence&) {
    }
    return a;
}

void account(SolverReport& r, const PaSolution& sol, bool keep_trace) {
    if (sol.screened) {
        ++r.pa_screened;
        return;
    }
    ++r.pa_solves;
    r.pa_converged += sol.status == SolveStatus::Converged ? 1 : 0;
    r.inner_iterations += sol.iterations;
    if (keep_trace) {
        r.trace.insert(r.trace.end(), sol.objective_trace.begin(), sol.objective_trace.end());
    }
}

SolverReport infeasible_report(Method method, const TrialInstance& trial) {
    SolverReport r;
    r.method = method;
    r.status = RunStatus::Infeasible;
    r.activation.assign(trial.tables.subarrays, true);
    r.active_count = trial.tables.subarrays;
    r.rates.assign(trial.tables.id_users, 0.0);
    r.harvested.assign(trial.tables.eh_users, 0.0);
    r.allocation = PowerAllocation::zeros(trial.tables.subarrays, trial.tables.id_users, trial.tables.eh_users);
    r.power_consumption = std::numeric_limits<double>::quiet_NaN();
    r.transmit_power = std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace

SolverReport evaluate(Method method, const PowerAllocation& pa, const std::vector<bool>& active,
                      const TrialInstance& trial, const Scenario& sc) {
    const std::vector<double> w = weights_of(active);
    SolverReport r;
    r.method = method;
    r.allocation = pa;
    r.activation = active;
    r.active_count = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
    r.power_consumption = power_consumption(pa, w, sc.power, trial.geometry.elements_per_subarray());
    r.transmit_power = transmit_power(pa, w);
    r.rates.resize(trial.tables.id_users);
    for (std::size_t l = 0; l < r.rates.size(); ++l) {
        r.rates[l] = downlink_rate(l, pa, w, trial.tables);
    }
    r.harvested.resize(trial.tables.eh_users);
    for (std::size_t m = 0; m < r.harvested.size(); ++m) {
        r.harvested[m] = eh_forward(input_energy(m, pa, w, trial.tables), sc.eh);
    }
    return r;
}

SolverReport run_ea_fa(const TrialInstance& trial, const Scenario& sc) {
    const auto& t = trial.tables;
    const PowerAllocation pa = PowerAllocation::equal(t.subarrays, t.id_users, t.eh_users,
                                                      sc.power.subarray_budget(trial.geometry.elements_per_subarray()));
    SolverReport r = evaluate(Method::EaFa, pa, std::vector<bool>(t.subarrays, true), trial, sc);
    r.outer_iterations = 1;
    return r;
}

SolverReport run_pa_fa(const TrialInstance& trial, const Scenario& sc) {
    const std::vector<bool> all(trial.tables.subarrays, true);
    const std::vector<double> w = weights_of(all);
    const Attempt at = attempt_solve(w, trial, sc, std::nullopt);
    if (!at.solution) {
        return infeasible_report(Method::PaFa, trial);
    }
    SolverReport r = evaluate(Method::PaFa, at.solution->allocation, all, trial, sc);
    r.outer_iterations = 1;
    r.status = status_of(at.solution->status);
    account(r, *at.solution, true);
    return r;
}

SolverReport run_pa_sa(const TrialInstance& trial, const Scenario& sc,
                       const std::optional<SolverReport>& full_activation) {
    const std::size_t S = trial.tables.subarrays;

    // Outer iteration 1: uniform surrogate, every subarray on, weights 1/S
    // normalised to 1, i.e. the full-activation solve.
    SolverReport current = full_activation ? *full_activation : run_pa_fa(trial, sc);
    current.method = Method::PaSa;
    current.outer_iterations = 1;
    if (current.status == RunStatus::Infeasible) {
        return current;
    }
    current.activation_history = {current.activation};
    // P_C before the first iteration counts as +inf, so an infinite tolerance
    // stops right here.
    if (std::isinf(sc.outer_tolerance)) {
        return current;
    }
    PowerAllocation surrogate_source = current.allocation;
    std::vector<bool> active = current.activation;

    for (std::size_t t = 2; t <= S + 1; ++t) {
        const SurrogateVector h = surrogate(surrogate_source);
        std::vector<bool> next = binary_decision(h);
        for (std::size_t s = 0; s < S; ++s) {
            next[s] = next[s] && active[s];
        }
        if (next == active) {
            break;
        }

        current.activation_history.push_back(next);
        const std::vector<double> scaled = scale_activation(h, next);
        const double peak = *std::max_element(scaled.begin(), scaled.end());
        std::vector<double> weights(S);
        for (std::size_t s = 0; s < S; ++s) {
            weights[s] = scaled[s] / peak;
        }
        const std::vector<double> binary = weights_of(next);

        SolverReport candidate = current;
        candidate.outer_iterations = t;
        const Attempt param = attempt_solve(weights, trial, sc, surrogate_source);
        if (param.solution) {
            account(candidate, *param.solution, true);
        }
        Attempt polished = param;
        if (weights != binary) {
            const std::optional<PowerAllocation> warm =
                param.feasible ? std::optional<PowerAllocation>(param.solution->allocation) : surrogate_source;
            polished = attempt_solve(binary, trial, sc, warm);
            if (polished.solution) {
                account(candidate, *polished.solution, true);
            }
        }

        // A warm start can trap the solver on the wrong side of the energy
        // row; the cold start is the equal split.
        if (!polished.feasible && !(polished.solution && polished.solution->screened)) {
            polished = attempt_solve(binary, trial, sc, std::nullopt);
            if (polished.solution) {
                account(candidate, *polished.solution, true);
            }
        }

        bool accept = polished.feasible;
        SolverReport evaluated;
        if (accept) {
            evaluated = evaluate(Method::PaSa, polished.solution->allocation, next, trial, sc);
            accept = evaluated.power_consumption <= current.power_consumption + sc.admm.tolerance;
        }
        if (!accept) {
            current.outer_iterations = t;
            current.inner_iterations = candidate.inner_iterations;
            current.pa_solves = candidate.pa_solves;
            current.pa_converged = candidate.pa_converged;
            current.pa_screened = candidate.pa_screened;
            current.trace = std::move(candidate.trace);
            current.status = RunStatus::ConvergedWithRollback;
            return current;
        }

        evaluated.outer_iterations = t;
        evaluated.inner_iterations = candidate.inner_iterations;
        evaluated.pa_solves = candidate.pa_solves;
        evaluated.pa_converged = candidate.pa_converged;
        evaluated.pa_screened = candidate.pa_screened;
        evaluated.trace = std::move(candidate.trace);
        evaluated.activation_history = std::move(current.activation_history);
        evaluated.status = status_of(polished.solution->status);
        const double change = std::abs(evaluated.power_consumption - current.power_consumption);
        current = std::move(evaluated);
        active = next;
        surrogate_source = param.feasible ? param.solution->allocation : polished.solution->allocation;
        if (change <= sc.outer_tolerance) {
            break;
        }
    }
    return current;
}

double power_consumption_ratio(const SolverReport& report, const SolverReport& baseline) {
    return report.power_consumption / baseline.power_consumption;
}

std::vector<TrialResult> run_trials(const Scenario& sc, std::size_t workers, bool keep_traces) {
    std::vector<TrialResult> results(sc.trials);
    std::vector<std::exception_ptr> errors(sc.trials);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < sc.trials; i = next++) {
            try {
                const TrialInstance trial = build_trial(sc, i);
                TrialResult r;
                r.index = i;
                r.seed = trial.seed;
                r.ea_fa = run_ea_fa(trial, sc);
                r.pa_fa = run_pa_fa(trial, sc);
                r.pa_sa = run_pa_sa(trial, sc, r.pa_fa);
                if (!keep_traces) {
                    r.pa_fa.trace.clear();
                    r.pa_sa.trace.clear();
                }
                results[i] = std::move(r);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(sc.trials, 1));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

Summary summarize(const std::vector<TrialResult>& results, std::size_t subarrays) {
    Summary s;
    s.trials = results.size();
    std::vector<double> ratios;
    std::size_t solves = 0;
    std::size_t converged = 0;
    double pc_fa = 0.0;
    double pc_sa = 0.0;
    for (const auto& r : results) {
        s.mean_pc_ea_fa += r.ea_fa.power_consumption;
        s.mean_ptx_ea_fa += r.ea_fa.transmit_power;
        // The PA-SA counters already include the shared full-activation solve.
        solves += r.pa_sa.pa_solves;
        converged += r.pa_sa.pa_converged;
        s.max_outer_iterations = std::max(s.max_outer_iterations, r.pa_sa.outer_iterations);
        if (r.pa_fa.status == RunStatus::Infeasible || r.pa_sa.status == RunStatus::Infeasible) {
            continue;
        }
        ++s.feasible_trials;
        pc_fa += r.pa_fa.power_consumption;
        pc_sa += r.pa_sa.power_consumption;
        s.eta_pa_fa += power_consumption_ratio(r.pa_fa, r.ea_fa);
        s.eta_pa_sa += power_consumption_ratio(r.pa_sa, r.ea_fa);
        ratios.push_back(static_cast<double>(r.pa_sa.active_count) / static_cast<double>(subarrays));
    }
    const double n = static_cast<double>(std::max<std::size_t>(s.trials, 1));
    s.mean_pc_ea_fa /= n;
    s.mean_ptx_ea_fa /= n;
    s.pa_converged_fraction = solves ? static_cast<double>(converged) / static_cast<double>(solves) : 0.0;
    if (s.feasible_trials == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        s.mean_pc_pa_fa = s.mean_pc_pa_sa = s.eta_pa_fa = s.eta_pa_sa = s.active_ratio = s.active_ratio_stderr = nan;
        return s;
    }
    const double f = static_cast<double>(s.feasible_trials);
    s.mean_pc_pa_fa = pc_fa / f;
    s.mean_pc_pa_sa = pc_sa / f;
    s.eta_pa_fa /= f;
    s.eta_pa_sa /= f;
    for (double v : ratios) {
        s.active_ratio += v;
    }
    s.active_ratio /= f;
    if (ratios.size() > 1) {
        double var = 0.0;
        for (double v : ratios) {
            var += (v - s.active_ratio) * (v - s.active_ratio);
        }
        var /= f - 1.0;
        s.active_ratio_stderr = std::sqrt(var / f);
    }
    return s;
}

}  // namespace xlswipt
