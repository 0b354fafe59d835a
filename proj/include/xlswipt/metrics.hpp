// SPDX-License-Identifier: Apache-2.0
//
// Scalar performance quantities of the SWIPT downlink: rates, RF input
// energy, the logistic harvester model, power consumption and the QoS floors
// that the optimizer has to preserve.

#ifndef XLSWIPT_METRICS_HPP
#define XLSWIPT_METRICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "xlswipt/channel.hpp"
#include "xlswipt/geometry.hpp"

namespace xlswipt {

/// Per-beam transmit powers, Omega^ID (S x L) and Omega^EH (S x M), in watts.
struct PowerAllocation {
    std::size_t subarrays = 0;
    std::size_t id_users = 0;
    std::size_t eh_users = 0;
    std::vector<double> id_power;  // [S][L]
    std::vector<double> eh_power;  // [S][M]

    static PowerAllocation zeros(std::size_t S, std::size_t L, std::size_t M);
    /// Omega = per_subarray_budget / K on every beam.
    static PowerAllocation equal(std::size_t S, std::size_t L, std::size_t M, double per_subarray_budget);

    std::size_t users() const { return id_users + eh_users; }

    double& id(std::size_t s, std::size_t l) { return id_power[s * id_users + l]; }
    double id(std::size_t s, std::size_t l) const { return id_power[s * id_users + l]; }
    double& eh(std::size_t s, std::size_t m) { return eh_power[s * eh_users + m]; }
    double eh(std::size_t s, std::size_t m) const { return eh_power[s * eh_users + m]; }

    // Unified beam index: k < L is ID user k, otherwise EH user k - L.
    double beam(std::size_t s, std::size_t k) const { return k < id_users ? id(s, k) : eh(s, k - id_users); }
    double& beam(std::size_t s, std::size_t k) { return k < id_users ? id(s, k) : eh(s, k - id_users); }

    double id_total(std::size_t s) const;
    double eh_total(std::size_t s) const;
    double subarray_total(std::size_t s) const { return id_total(s) + eh_total(s); }
    double total() const;
};

/// Binary on/off state a and the continuous estimates a~ fed to the PA routine.
struct ActivationState {
    std::vector<bool> binary;
    std::vector<double> scaled;

    static ActivationState full(std::size_t S);
    std::size_t active_count() const;
    std::vector<double> binary_weights() const;
};

struct PowerModelParams {
    double amplifier_efficiency = 0.35;  // varsigma
    double synthesizer_power = 0.05;     // P_syn, watts
    double circuit_power = 0.0482;       // P_ct per RF chain, watts
    double element_power = 0.03;         // P_et per element, watts

    double subarray_budget(std::size_t elements_per_subarray) const {
        return static_cast<double>(elements_per_subarray) * element_power;
    }
    double total_budget(std::size_t subarrays, std::size_t elements_per_subarray) const {
        return static_cast<double>(subarrays) * subarray_budget(elements_per_subarray);
    }
};

struct EHModelParams {
    double zeta_max = 0.024;  // watts
    double a = 1500.0;        // 1/watts
    double b = 0.0022;        // watts

    /// 1 / (1 + e^{ab}); shifts the logistic curve through the origin.
    double phi() const;
};

struct QoSThresholds {
    std::vector<double> rate_floor;          // [L], bits/s/Hz
    std::vector<double> energy_floor;        // [M], harvested DC watts
    std::vector<double> energy_input_floor;  // [M], RF input watts equivalent of energy_floor
};

struct RateTerms {
    double coherent = 0.0;     // Psi^c
    double noncoherent = 0.0;  // Psi^nc, interference plus noise
};

// Every function below that takes an `activation` span treats entry s as the
// multiplier a_s of subarray s. Pass binary weights for reported metrics and
// scaled weights inside the PA routine.

RateTerms rate_terms(std::size_t l, const PowerAllocation& pa, std::span<const double> activation,
                     const GainTables& tables);

/// log2(1 + Psi^c / Psi^nc) in bits/s/Hz.
double downlink_rate(std::size_t l, const PowerAllocation& pa, std::span<const double> activation,
                     const GainTables& tables);

/// RF power reaching EH user m from every ID and EH beam, coherently combined
/// across subarrays. Noise is not counted. Evaluated through the cross table;
/// throws InternalConsistency if the imaginary residue of the double sum is
/// not negligible.
double input_energy(std::size_t m, const PowerAllocation& pa, std::span<const double> activation,
                    const GainTables& tables);

/// Harvested DC power for RF input `x` (normalised logistic model).
double eh_forward(double x, const EHModelParams& params);

/// Exact inverse of eh_forward. Throws InfeasibleThreshold for y >= zeta_max
/// and InvalidInput for negative y.
double eh_inverse(double y, const EHModelParams& params);

/// Sum over active subarrays of amplifier, synthesizer and RF-chain power.
double power_consumption(const PowerAllocation& pa, std::span<const double> activation,
                         const PowerModelParams& params, std::size_t elements_per_subarray);

double transmit_power(const PowerAllocation& pa, std::span<const double> activation);

/// Floors achieved by equal allocation (P_s/K per beam) with every subarray on.
QoSThresholds compute_thresholds(const GainTables& tables, const ArrayGeometry& geom,
                                 const PowerModelParams& power, const EHModelParams& eh);

/// Floors from explicit targets; the input-domain floor goes through eh_inverse
/// and is +infinity for targets at or above zeta_max.
QoSThresholds explicit_thresholds(std::vector<double> rate_floor, std::vector<double> energy_floor,
                                  const EHModelParams& eh);

/// (2^R - 1)^{-1/2}; +infinity for R = 0, meaning the rate row is unconstrained.
double xi_constant(double rate_threshold);

/// sqrt(eh_inverse(I_th)), an amplitude in sqrt(watts).
double lambda_constant(double energy_threshold, const EHModelParams& params);

/// Throws InvalidInput unless all entries are >= 0 and every subarray stays
/// within its budget.
void check_allocation(const PowerAllocation& pa, double per_subarray_budget, double total_budget);

}  // namespace xlswipt

#endif  // XLSWIPT_METRICS_HPP
