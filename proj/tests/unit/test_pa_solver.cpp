// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "xlswipt/channel.hpp"
#include "xlswipt/errors.hpp"
#include "xlswipt/pa_solver.hpp"

using namespace xlswipt;
using xlswipt::test::user_at;

namespace {

bool in_cone(double r, const std::vector<double>& s, double tol) {
    double n = 0;
    for (double v : s) {
        n += v * v;
    }
    return std::sqrt(n) <= r + tol;
}

double dist(double a0, const std::vector<double>& a, double b0, const std::vector<double>& b) {
    double d = (a0 - b0) * (a0 - b0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(d);
}

struct Toy {
    ArrayGeometry geom;
    GainTables tables;
};

Toy toy(std::vector<User> users, std::size_t L, std::size_t S = 1) {
    Toy t;
    t.geom = build_array(S, 2, 2, 0.1, 0.025, 0.05, 0.0);
    t.tables = compute_gain_tables(t.geom, users, 2.0, std::vector<double>(L, 1e-11));
    return t;
}

const PowerModelParams kPower;

}  // namespace

TEST_CASE("cone projection examples") {
    auto p = soc_project(1.0, std::vector<double>{0.5, 0.0});
    CHECK(p.head == doctest::Approx(1.0));
    CHECK(p.tail[0] == doctest::Approx(0.5));
    p = soc_project(-2.0, std::vector<double>{1.0, 0.0});
    CHECK(p.head == 0.0);
    CHECK(p.tail[0] == 0.0);
    p = soc_project(0.0, std::vector<double>{2.0, 0.0});
    CHECK(p.head == doctest::Approx(1.0));
    CHECK(p.tail[0] == doctest::Approx(1.0));
    CHECK(p.tail[1] == doctest::Approx(0.0));
}

TEST_CASE("cone projection properties on random samples") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 2.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t dim = 1 + i % 5;
        const double q0 = n(rng);
        std::vector<double> q(dim);
        for (auto& v : q) {
            v = n(rng);
        }
        const auto p = soc_project(q0, q);
        REQUIRE(in_cone(p.head, p.tail, 1e-12));
        const auto pp = soc_project(p.head, p.tail);
        CHECK(std::abs(pp.head - p.head) <= 1e-12);
        for (std::size_t k = 0; k < dim; ++k) {
            CHECK(std::abs(pp.tail[k] - p.tail[k]) <= 1e-12);
        }
        // no sampled cone point is closer
        const double best = dist(q0, q, p.head, p.tail);
        for (int j = 0; j < 20; ++j) {
            std::vector<double> c(dim);
            double cn = 0;
            for (auto& v : c) {
                v = n(rng);
                cn += v * v;
            }
            const double c0 = std::sqrt(cn) + 2.0 * u(rng);
            CHECK(best <= dist(q0, q, c0, c) + 1e-9);
        }
    }
}

TEST_CASE("residuals at the threshold point and at zero") {
    const auto t = toy({user_at(-0.2, 0.1, 0.6), user_at(0.25, 0, 0.7), user_at(0, 0, 0.2, Role::EH)}, 2, 2);
    const auto th = compute_thresholds(t.tables, t.geom, kPower, EHModelParams{});
    const ConstraintSystem sys(t.tables, th, {1.0, 1.0}, kPower, 4);
    const double ps = kPower.subarray_budget(4);
    const auto r = sys.residuals(PowerAllocation::equal(2, 2, 1, ps));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(r[i]) <= 1e-9 * std::max(1e-11, std::abs(r[i]) + th.energy_input_floor[0]));
    }
    const auto z = sys.residuals(PowerAllocation::zeros(2, 2, 1));
    CHECK(z[2] == doctest::Approx(th.energy_input_floor[0]).epsilon(1e-12));
    for (std::size_t i = 3; i < sys.rows(); ++i) {
        CHECK(z[i] < 0.0);
    }
}

TEST_CASE("cone rows agree with the metric floors") {
    const auto t = toy({user_at(-0.2, 0.1, 0.6), user_at(0.25, 0, 0.7), user_at(0, 0, 0.2, Role::EH)}, 2, 2);
    const auto th = compute_thresholds(t.tables, t.geom, kPower, EHModelParams{});
    const std::vector<double> a{1.0, 0.7};
    const ConstraintSystem sys(t.tables, th, a, kPower, 4);
    const double ps = kPower.subarray_budget(4);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t rate_hits = 0, energy_hits = 0;
    for (int i = 0; i < 1000; ++i) {
        // per-beam draws up to the full budget, so both sides of each floor occur
        auto pa = PowerAllocation::zeros(2, 2, 1);
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t k = 0; k < 3; ++k) {
                pa.beam(s, k) = ps * unit(rng);
            }
        }
        const auto r = sys.residuals(pa);
        for (std::size_t l = 0; l < 2; ++l) {
            const RateTerms rt = rate_terms(l, pa, a, t.tables);
            const double xi = xi_constant(th.rate_floor[l]);
            // second-order cone form: ||sqrt(Psi^nc)|| <= Xi sqrt(Psi^c)
            const bool cone = std::sqrt(rt.noncoherent) <= xi * std::sqrt(rt.coherent);
            const bool floor = downlink_rate(l, pa, a, t.tables) >= th.rate_floor[l];
            const bool row = r[l] <= 0.0;
            const double margin = std::abs(downlink_rate(l, pa, a, t.tables) - th.rate_floor[l]);
            if (margin > 1e-9) {
                CHECK(cone == floor);
                CHECK(row == floor);
            }
            rate_hits += floor;
        }
        const double energy = input_energy(0, pa, a, t.tables);
        const double lam = std::sqrt(th.energy_input_floor[0]);
        const bool floor = eh_forward(energy, EHModelParams{}) >= th.energy_floor[0];
        if (std::abs(energy - th.energy_input_floor[0]) > 1e-9 * th.energy_input_floor[0]) {
            CHECK((std::sqrt(energy) >= lam) == floor);
            CHECK((r[2] <= 0.0) == floor);
        }
        energy_hits += floor;
    }
    // both outcomes were exercised
    CHECK(rate_hits > 50);
    CHECK(rate_hits < 1950);
    CHECK(energy_hits > 20);
    CHECK(energy_hits < 980);
}

TEST_CASE("rate-only toy matches the closed form") {
    const auto t = toy({user_at(0.1, 0.05, 0.5)}, 1);
    const auto th = explicit_thresholds({2.0}, {}, EHModelParams{});
    const auto sol = solve_pa(std::vector<double>{1.0}, t.tables, th, kPower, 4, AdmmConfig{});
    CHECK(sol.status == SolveStatus::Converged);
    const double expected = 3.0 * 1e-11 / t.tables.norm_sq(0, 0);
    CHECK(sol.allocation.id(0, 0) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("energy-only toy matches the closed form") {
    const auto t = toy({user_at(0.02, 0.01, 0.2, Role::EH)}, 0);
    const EHModelParams eh;
    const auto th = explicit_thresholds({}, {1e-3}, eh);
    const auto sol = solve_pa(std::vector<double>{1.0}, t.tables, th, kPower, 4, AdmmConfig{});
    CHECK(sol.status == SolveStatus::Converged);
    const double expected = eh_inverse(1e-3, eh) / t.tables.direct(0, 0, 0);
    REQUIRE(expected < kPower.subarray_budget(4));
    CHECK(sol.allocation.eh(0, 0) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("a converged state is a fixed point") {
    const auto t = toy({user_at(0.1, 0.05, 0.5), user_at(0.02, 0.01, 0.2, Role::EH)}, 1);
    const auto th = explicit_thresholds({2.0}, {1e-3}, EHModelParams{});
    const ConstraintSystem sys(t.tables, th, {1.0}, kPower, 4);
    AdmmConfig cfg;
    AdmmState st = initial_state(sys, cfg);
    for (int i = 0; i < 3000; ++i) {
        st = admm_iterate(std::move(st), sys, cfg);
    }
    const double before = st.objective_trace.back();
    st = admm_iterate(std::move(st), sys, cfg);
    CHECK(std::abs(st.objective_trace.back() - before) < 1e-12);
    CHECK(st.violation_trace.back() < 1e-6);
}

TEST_CASE("full activation with equal-allocation floors") {
    const auto t = toy({user_at(-0.2, 0.1, 0.6), user_at(0.25, 0, 0.7), user_at(0, 0, 0.2, Role::EH)}, 2, 2);
    const auto th = compute_thresholds(t.tables, t.geom, kPower, EHModelParams{});
    const std::vector<double> a{1.0, 1.0};
    const auto sol = solve_pa(a, t.tables, th, kPower, 4, AdmmConfig{});
    CHECK(sol.status == SolveStatus::Converged);
    CHECK(transmit_power(sol.allocation, a) <= 2 * kPower.subarray_budget(4) * (1 + 1e-9));
    CHECK(sol.max_violation <= 1e-6);
}

TEST_CASE("saturated energy floor is rejected before iterating") {
    const auto t = toy({user_at(0.1, 0.05, 0.5), user_at(0.02, 0.01, 0.2, Role::EH)}, 1);
    const auto th = explicit_thresholds({1.0}, {0.024}, EHModelParams{});
    CHECK_THROWS_AS(solve_pa(std::vector<double>{1.0}, t.tables, th, kPower, 4, AdmmConfig{}), InfeasibleThreshold);
    CHECK_THROWS_AS(solve_pa(std::vector<double>{0.0}, t.tables, th, kPower, 4, AdmmConfig{}), InvalidInput);
}

TEST_CASE("two-beam instance against a 200 by 200 grid") {
    const auto t = toy({user_at(0.15, 0.05, 0.45), user_at(0.02, 0.01, 0.25, Role::EH)}, 1);
    const auto th = compute_thresholds(t.tables, t.geom, kPower, EHModelParams{});
    const std::vector<double> a{1.0};
    const auto sol = solve_pa(a, t.tables, th, kPower, 4, AdmmConfig{});
    REQUIRE(sol.status == SolveStatus::Converged);
    const double ps = kPower.subarray_budget(4);
    const double step = ps / 200;
    double best = INFINITY;
    auto pa = PowerAllocation::zeros(1, 1, 1);
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; i + j <= 200; ++j) {
            pa.id(0, 0) = i * step;
            pa.eh(0, 0) = j * step;
            if (downlink_rate(0, pa, a, t.tables) >= th.rate_floor[0] &&
                input_energy(0, pa, a, t.tables) >= th.energy_input_floor[0]) {
                best = std::min(best, (i + j) * step);
            }
        }
    }
    REQUIRE(std::isfinite(best));
    const double ptx = transmit_power(sol.allocation, a);
    CHECK(ptx <= best * 1.02);
    CHECK(ptx >= best * 0.98 - step);
}
