// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "reference_oracle.hpp"
#include "xlswipt/channel.hpp"

using namespace xlswipt;
using xlswipt::test::small_scenario;

namespace {

// One ID user, one subarray, no EH user: the only binding row is the rate floor.
TrialInstance rate_only(const Scenario& sc, double rate) {
    TrialInstance t;
    t.geometry = build_array(1, sc.elements_x, sc.elements_y, sc.wavelength, sc.element_dimension, sc.element_pitch,
                             0.0);
    t.users = {test::user_at(0.1, 0.05, 0.6)};
    t.tables = compute_gain_tables(t.geometry, t.users, sc.boresight_exponent, {sc.noise_power});
    t.thresholds = explicit_thresholds({rate}, {}, sc.eh);
    return t;
}

}  // namespace

TEST_CASE("single subarray enumeration has one candidate") {
    const auto sc = small_scenario(1, 4, 4);
    const auto trial = build_trial(sc, 0);
    const auto best = oracle::enumerate_sa(trial, sc);
    CHECK(best.candidates == 1);
    const auto fa = run_pa_fa(trial, sc);
    REQUIRE(best.feasible);
    CHECK(best.best_pc == doctest::Approx(fa.power_consumption).epsilon(1e-12));
}

TEST_CASE("enumeration csv lists every candidate") {
    const auto sc = small_scenario(3, 4, 2);
    const auto trial = build_trial(sc, 0);
    std::ostringstream os;
    const auto best = oracle::enumerate_sa(trial, sc, &os);
    CHECK(best.candidates == 7);
    std::size_t lines = 0;
    for (char c : os.str()) {
        lines += c == '\n';
    }
    CHECK(lines == 8);
}

TEST_CASE("mirror-symmetric pair of subarrays scores equally") {
    auto sc = small_scenario(2, 4, 4, 1, 0);
    TrialInstance t;
    t.geometry = build_array(2, 4, 4, sc.wavelength, sc.element_dimension, sc.element_pitch, 0.0);
    t.users = {test::user_at(0.0, 0.0, 0.8)};
    t.tables = compute_gain_tables(t.geometry, t.users, sc.boresight_exponent, {sc.noise_power});
    t.thresholds = explicit_thresholds({6.0}, {}, sc.eh);
    std::ostringstream os;
    oracle::enumerate_sa(t, sc, &os);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::vector<double> pcs;
    while (std::getline(is, row)) {
        pcs.push_back(std::stod(row.substr(row.rfind(',') + 1)));
    }
    REQUIRE(pcs.size() == 3);  // masks 10, 01, 11
    CHECK(std::abs(pcs[0] - pcs[1]) <= 1e-6);
}

TEST_CASE("grid optimum sits within one step of the closed form") {
    const auto sc = small_scenario(1, 4, 4, 1, 0);
    const double ps = sc.power.subarray_budget(16);
    // choose a rate whose minimum power is a sizeable part of the budget
    auto probe = rate_only(sc, 1.0);
    const double g2 = probe.tables.norm_sq(0, 0);
    const double rate = std::log2(1.0 + 0.37 * ps * g2 / sc.noise_power);
    const auto t = rate_only(sc, rate);
    const double exact = (std::pow(2.0, rate) - 1.0) * sc.noise_power / g2;
    const auto coarse = oracle::grid_pa(t, sc, {true}, 200);
    REQUIRE(coarse.feasible);
    CHECK(coarse.best_ptx >= exact * (1 - 1e-12));
    CHECK(coarse.best_ptx <= exact + ps / 200);
    const auto fine = oracle::grid_pa(t, sc, {true}, 400);
    CHECK(fine.best_pc <= coarse.best_pc);
}

TEST_CASE("unreachable floors are oracle-infeasible") {
    const auto sc = small_scenario(1, 4, 4, 1, 0);
    const auto t = rate_only(sc, 60.0);
    CHECK_FALSE(oracle::grid_pa(t, sc, {true}, 50).feasible);
    CHECK_FALSE(oracle::enumerate_sa(t, sc).feasible);
}
