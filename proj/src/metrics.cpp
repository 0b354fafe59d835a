// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "xlswipt/errors.hpp"

namespace xlswipt {

PowerAllocation PowerAllocation::zeros(std::size_t S, std::size_t L, std::size_t M) {
    PowerAllocation pa;
    pa.subarrays = S;
    pa.id_users = L;
    pa.eh_users = M;
    pa.id_power.assign(S * L, 0.0);
    pa.eh_power.assign(S * M, 0.0);
    return pa;
}

PowerAllocation PowerAllocation::equal(std::size_t S, std::size_t L, std::size_t M,
                                       double per_subarray_budget) {
    PowerAllocation pa = zeros(S, L, M);
    const double share = per_subarray_budget / static_cast<double>(L + M);
    std::fill(pa.id_power.begin(), pa.id_power.end(), share);
    std::fill(pa.eh_power.begin(), pa.eh_power.end(), share);
    return pa;
}

double PowerAllocation::id_total(std::size_t s) const {
    double acc = 0.0;
    for (std::size_t l = 0; l < id_users; ++l) {
        acc += id(s, l);
    }
    return acc;
}

double PowerAllocation::eh_total(std::size_t s) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < eh_users; ++m) {
        acc += eh(s, m);
    }
    return acc;
}

double PowerAllocation::total() const {
    return std::accumulate(id_power.begin(), id_power.end(), 0.0) +
           std::accumulate(eh_power.begin(), eh_power.end(), 0.0);
}

ActivationState ActivationState::full(std::size_t S) {
    ActivationState a;
    a.binary.assign(S, true);
    a.scaled.assign(S, 1.0);
    return a;
}

std::size_t ActivationState::active_count() const {
    return static_cast<std::size_t>(std::count(binary.begin(), binary.end(), true));
}

std::vector<double> ActivationState::binary_weights() const {
    std::vector<double> w(binary.size());
    for (std::size_t s = 0; s < w.size(); ++s) {
        w[s] = binary[s] ? 1.0 : 0.0;
    }
    return w;
}

double EHModelParams::phi() const { return 1.0 / (1.0 + std::exp(a * b)); }

RateTerms rate_terms(std::size_t l, const PowerAllocation& pa, std::span<const double> activation,
                     const GainTables& tables) {
    const std::size_t K = tables.users();
    RateTerms r;
    double interference = 0.0;
    for (std::size_t s = 0; s < tables.subarrays; ++s) {
        const double a = activation[s];
        if (a == 0.0) {
            continue;
        }
        r.coherent += a * pa.id(s, l) * tables.direct(s, l, l);
        for (std::size_t j = 0; j < K; ++j) {
            if (j != l) {
                interference += a * pa.beam(s, j) * tables.direct(s, l, j);
            }
        }
    }
    r.noncoherent = interference + tables.noise_power[l];
    return r;
}

double downlink_rate(std::size_t l, const PowerAllocation& pa, std::span<const double> activation,
                     const GainTables& tables) {
    const RateTerms r = rate_terms(l, pa, activation, tables);
    return std::log2(1.0 + r.coherent / r.noncoherent);
}

double input_energy(std::size_t m, const PowerAllocation& pa, std::span<const double> activation,
                    const GainTables& tables) {
    const std::size_t S = tables.subarrays;
    const std::size_t K = tables.users();
    cdouble acc{};
    double magnitude = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t s = 0; s < S; ++s) {
            const double as = activation[s];
            const double ps = pa.beam(s, j);
            if (as == 0.0 || ps == 0.0) {
                continue;
            }
            for (std::size_t sp = 0; sp < S; ++sp) {
                const double asp = activation[sp];
                const double psp = pa.beam(sp, j);
                if (asp == 0.0 || psp == 0.0) {
                    continue;
                }
                const cdouble term = as * asp * std::sqrt(ps * psp) * tables.cross(s, sp, m, j);
                acc += term;
                magnitude += std::abs(term);
            }
        }
    }
    if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, magnitude)) {
        throw InternalConsistency("input energy of EH user " + std::to_string(m) +
                                  " has imaginary residue " + std::to_string(acc.imag()));
    }
    return std::max(0.0, acc.real());
}

double eh_forward(double x, const EHModelParams& p) {
    const double phi = p.phi();
    // Same expression as phi() so that x = 0 maps to exactly zero.
    const double sigmoid = 1.0 / (1.0 + std::exp(-p.a * (x - p.b)));
    return p.zeta_max * (sigmoid - phi) / (1.0 - phi);
}

double eh_inverse(double y, const EHModelParams& p) {
    if (y < 0.0) {
        throw InvalidInput("harvested power must be non-negative");
    }
    if (!(y < p.zeta_max)) {
        throw InfeasibleThreshold("harvested-power floor " + std::to_string(y) +
                                  " W is not below the saturation level " + std::to_string(p.zeta_max) +
                                  " W");
    }
    if (y == 0.0) {
        return 0.0;
    }
    const double phi = p.phi();
    const double yp = (1.0 - phi) * y + p.zeta_max * phi;
    return p.b + std::log(yp / (p.zeta_max - yp)) / p.a;
}

double power_consumption(const PowerAllocation& pa, std::span<const double> activation,
                         const PowerModelParams& params, std::size_t elements_per_subarray) {
    const double fixed = 2.0 * params.synthesizer_power +
                         static_cast<double>(elements_per_subarray) * params.circuit_power;
    double acc = 0.0;
    for (std::size_t s = 0; s < pa.subarrays; ++s) {
        if (activation[s] == 0.0) {
            continue;
        }
        acc += activation[s] * (pa.subarray_total(s) / params.amplifier_efficiency + fixed);
    }
    return acc;
}

double transmit_power(const PowerAllocation& pa, std::span<const double> activation) {
    double acc = 0.0;
    for (std::size_t s = 0; s < pa.subarrays; ++s) {
        if (activation[s] != 0.0) {
            acc += pa.subarray_total(s);
        }
    }
    return acc;
}

QoSThresholds compute_thresholds(const GainTables& tables, const ArrayGeometry& geom,
                                 const PowerModelParams& power, const EHModelParams& eh) {
    const std::size_t S = tables.subarrays;
    const std::size_t L = tables.id_users;
    const std::size_t M = tables.eh_users;
    const PowerAllocation pa =
        PowerAllocation::equal(S, L, M, power.subarray_budget(geom.elements_per_subarray()));
    const std::vector<double> ones(S, 1.0);

    QoSThresholds th;
    th.rate_floor.resize(L);
    th.energy_floor.resize(M);
    th.energy_input_floor.resize(M);
    for (std::size_t l = 0; l < L; ++l) {
        th.rate_floor[l] = downlink_rate(l, pa, ones, tables);
    }
    for (std::size_t m = 0; m < M; ++m) {
        // The input-domain floor is the EA input itself: eh_inverse(eh_forward(x)) = x,
        // and deep in saturation eh_forward(x) rounds to zeta_max.
        const double input = input_energy(m, pa, ones, tables);
        th.energy_input_floor[m] = input;
        th.energy_floor[m] = eh_forward(input, eh);
    }
    return th;
}

QoSThresholds explicit_thresholds(std::vector<double> rate_floor, std::vector<double> energy_floor,
                                  const EHModelParams& eh) {
    QoSThresholds th;
    th.rate_floor = std::move(rate_floor);
    th.energy_floor = std::move(energy_floor);
    th.energy_input_floor.resize(th.energy_floor.size());
    for (std::size_t m = 0; m < th.energy_floor.size(); ++m) {
        // Floors at or above saturation are kept as +inf; solve_pa rejects them.
        th.energy_input_floor[m] = th.energy_floor[m] < eh.zeta_max ? eh_inverse(th.energy_floor[m], eh)
                                                                     : std::numeric_limits<double>::infinity();
    }
    return th;
}

double xi_constant(double rate_threshold) {
    if (rate_threshold < 0.0) {
        throw InvalidInput("rate threshold must be non-negative");
    }
    if (rate_threshold == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / std::sqrt(std::exp2(rate_threshold) - 1.0);
}

double lambda_constant(double energy_threshold, const EHModelParams& params) {
    return std::sqrt(eh_inverse(energy_threshold, params));
}

void check_allocation(const PowerAllocation& pa, double per_subarray_budget, double total_budget) {
    for (double v : pa.id_power) {
        if (!(v >= 0.0)) {
            throw InvalidInput("negative or non-finite ID power");
        }
    }
    for (double v : pa.eh_power) {
        if (!(v >= 0.0)) {
            throw InvalidInput("negative or non-finite EH power");
        }
    }
    for (std::size_t s = 0; s < pa.subarrays; ++s) {
        if (pa.subarray_total(s) > per_subarray_budget + 1e-9) {
            throw InvalidInput("subarray " + std::to_string(s) + " exceeds its power budget");
        }
    }
    if (pa.total() > total_budget + 1e-9) {
        throw InvalidInput("allocation exceeds the total power budget");
    }
}

}  // namespace xlswipt
