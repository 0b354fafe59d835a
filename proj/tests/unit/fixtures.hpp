// SPDX-License-Identifier: Apache-2.0
//
// Small instances shared by the unit tests.

#ifndef XLSWIPT_TEST_FIXTURES_HPP
#define XLSWIPT_TEST_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "xlswipt/orchestrator.hpp"

namespace xlswipt::test {

inline Scenario small_scenario(std::size_t S, std::size_t nx, std::size_t ny, std::size_t L = 2,
                               std::size_t M = 1, std::uint64_t seed = 11) {
    Scenario sc;
    sc.subarrays = S;
    sc.elements_x = nx;
    sc.elements_y = ny;
    sc.id_users = L;
    sc.eh_users = M;
    sc.seed = seed;
    return sc;
}

inline User user_at(double x, double y, double z, Role role = Role::ID) {
    User u;
    u.position = {x, y, z};
    u.role = role;
    return u;
}

// Random allocation inside the per-subarray budget.
inline PowerAllocation random_allocation(std::mt19937_64& rng, std::size_t S, std::size_t L, std::size_t M,
                                         double ps) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PowerAllocation pa = PowerAllocation::zeros(S, L, M);
    for (std::size_t s = 0; s < S; ++s) {
        double sum = 0.0;
        std::vector<double> w(L + M);
        for (auto& x : w) {
            x = u(rng);
            sum += x;
        }
        const double scale = ps * u(rng) / sum;
        for (std::size_t k = 0; k < L + M; ++k) {
            pa.beam(s, k) = w[k] * scale;
        }
    }
    return pa;
}

}  // namespace xlswipt::test

#endif  // XLSWIPT_TEST_FIXTURES_HPP
