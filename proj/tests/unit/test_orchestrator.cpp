// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "xlswipt/orchestrator.hpp"

using namespace xlswipt;
using xlswipt::test::small_scenario;

TEST_CASE("trial construction is deterministic") {
    const auto sc = small_scenario(4, 4, 4);
    const auto a = build_trial(sc, 3);
    const auto b = build_trial(sc, 3);
    CHECK(a.seed == b.seed);
    CHECK(a.thresholds.rate_floor == b.thresholds.rate_floor);
    CHECK(a.thresholds.energy_floor == b.thresholds.energy_floor);
    CHECK(build_trial(sc, 4).seed != a.seed);
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("equal allocation reaches the floors exactly") {
    const Scenario sc;  // S = 4, 32x8
    const auto trial = build_trial(sc, 0);
    const auto r = run_ea_fa(trial, sc);
    CHECK(r.power_consumption == doctest::Approx(137.5282286).epsilon(1e-9));
    CHECK(r.transmit_power == doctest::Approx(30.72).epsilon(1e-14));
    for (std::size_t l = 0; l < sc.id_users; ++l) {
        CHECK(r.rates[l] == doctest::Approx(trial.thresholds.rate_floor[l]).epsilon(1e-12));
    }
    CHECK(r.harvested[0] == doctest::Approx(trial.thresholds.energy_floor[0]).epsilon(1e-12));
    CHECK(power_consumption_ratio(r, r) == 1.0);
}

TEST_CASE("optimised methods do not exceed equal allocation") {
    auto sc = small_scenario(4, 8, 4);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto trial = build_trial(sc, i);
        const auto ea = run_ea_fa(trial, sc);
        const auto fa = run_pa_fa(trial, sc);
        if (fa.status == RunStatus::Infeasible) {
            continue;
        }
        const auto sa = run_pa_sa(trial, sc, fa);
        CHECK(fa.power_consumption <= ea.power_consumption + sc.admm.tolerance);
        CHECK(sa.power_consumption <= fa.power_consumption + sc.admm.tolerance);
        CHECK(sa.outer_iterations <= sc.subarrays + 1);
        // activations only ever switch off
        for (std::size_t t = 1; t < sa.activation_history.size(); ++t) {
            for (std::size_t s = 0; s < sc.subarrays; ++s) {
                CHECK((!sa.activation_history[t][s] || sa.activation_history[t - 1][s]));
            }
        }
        CHECK(sa.active_count >= 1);
    }
}

TEST_CASE("single subarray: PA-SA equals PA-FA") {
    const auto sc = small_scenario(1, 8, 4);
    const auto trial = build_trial(sc, 0);
    const auto fa = run_pa_fa(trial, sc);
    const auto sa = run_pa_sa(trial, sc);
    CHECK(sa.power_consumption == fa.power_consumption);
    CHECK(sa.transmit_power == fa.transmit_power);
    CHECK(sa.activation == fa.activation);
}

TEST_CASE("infinite outer tolerance stops after the first iteration") {
    auto sc = small_scenario(4, 8, 4);
    sc.outer_tolerance = std::numeric_limits<double>::infinity();
    const auto trial = build_trial(sc, 1);
    const auto fa = run_pa_fa(trial, sc);
    const auto sa = run_pa_sa(trial, sc);
    CHECK(sa.outer_iterations == 1);
    CHECK(sa.power_consumption == fa.power_consumption);
}

TEST_CASE("saturated energy floor is infeasible") {
    auto sc = small_scenario(2, 4, 4);
    sc.energy_threshold = 0.03;
    const auto trial = build_trial(sc, 0);
    CHECK(run_pa_fa(trial, sc).status == RunStatus::Infeasible);
    CHECK(run_pa_sa(trial, sc).status == RunStatus::Infeasible);
}

TEST_CASE("ratios from tabulated power values") {
    SolverReport ea, fa, sa;
    ea.power_consumption = 137.5282286;
    fa.power_consumption = 75.81445431;
    CHECK(power_consumption_ratio(fa, ea) == doctest::Approx(0.551).epsilon(1e-3));
    ea.power_consumption = 275.0564571;
    sa.power_consumption = 95.6776;
    CHECK(power_consumption_ratio(sa, ea) == doctest::Approx(0.348).epsilon(1e-3));
}

TEST_CASE("worker count does not change results") {
    auto sc = small_scenario(3, 4, 4);
    sc.trials = 4;
    const auto one = run_trials(sc, 1);
    const auto many = run_trials(sc, 3);
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].pa_sa.power_consumption == many[i].pa_sa.power_consumption);
        CHECK(one[i].pa_fa.power_consumption == many[i].pa_fa.power_consumption);
    }
    const auto s = summarize(one, sc.subarrays);
    CHECK(s.trials == 4);
    CHECK(s.active_ratio > 0.0);
    CHECK(s.active_ratio <= 1.0);
}
