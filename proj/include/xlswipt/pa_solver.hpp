// SPDX-License-Identifier: Apache-2.0
//
// Power-allocation routine: minimum-power allocation for a fixed (scaled)
// subarray activation, solved with Douglas-Rachford splitting ADMM over the
// conic constraint system
//
//   rate_l   : Psi^nc_l - Xi_l^2 Psi^c_l        <= 0
//   energy_m : Lambda_m^2 - I_m                 <= 0
//   total    : sum_s a_s sum_k Omega_{s,k} - P_t <= 0
//   budget_s : sum_k Omega_{s,k} - P_s           <= 0
//
// Internally the iterate is held as beam amplitudes v = sqrt(Omega), which
// makes every row a smooth quadratic in v and the per-subarray budget the
// second-order cone ||v_s|| <= sqrt(P_s).

#ifndef XLSWIPT_PA_SOLVER_HPP
#define XLSWIPT_PA_SOLVER_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xlswipt/channel.hpp"
#include "xlswipt/errors.hpp"
#include "xlswipt/metrics.hpp"

namespace xlswipt {

struct ConePoint {
    double head = 0.0;
    std::vector<double> tail;
};

/// Euclidean projection of (q0, q1) onto {(r, s) : ||s||_2 <= r}.
ConePoint soc_project(double q0, std::span<const double> q1);

struct AdmmConfig {
    double penalty = 1.0;                 // tau
    double relaxation = 0.5;              // alpha; 1/2 gives the plain ADMM cycle
    double tolerance = 1e-7;              // epsilon on |P_C^(u) - P_C^(u-1)|, watts
    std::size_t max_iterations = 5000;
    std::size_t inner_steps = 25;         // projected-gradient steps per x-update
    double feasibility_tolerance = 1e-6;  // scaled violation required before stopping
    double infeasibility_threshold = 1e-4;
    std::size_t stall_iterations = 500;   // 0 disables the early infeasibility exit
    bool adaptive_penalty = false;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

const char* to_string(SolveStatus status);

/// The residual system of one PA subproblem for fixed activation weights.
class ConstraintSystem {
public:
    ConstraintSystem(const GainTables& tables, const QoSThresholds& thresholds,
                     std::vector<double> activation, const PowerModelParams& power,
                     std::size_t elements_per_subarray);

    std::size_t rows() const { return rows_; }
    std::size_t variables() const { return subarrays_ * users_; }
    std::size_t subarrays() const { return subarrays_; }
    std::size_t users() const { return users_; }
    std::span<const double> activation() const { return activation_; }
    double subarray_budget() const { return subarray_budget_; }
    double total_budget() const { return total_budget_; }

    /// Residuals in physical units, ordered [rate (L), energy (M), total (1), budget (S)].
    std::vector<double> residuals(const PowerAllocation& x) const;

    /// Residuals divided by the per-row scale used inside the solver.
    Eigen::VectorXd scaled_residuals(const Eigen::VectorXd& amplitudes) const;

    /// Jacobian of scaled_residuals with respect to the amplitudes.
    Eigen::MatrixXd scaled_jacobian(const Eigen::VectorXd& amplitudes) const;

    /// P_C evaluated with the activation weights, watts.
    double objective(const Eigen::VectorXd& amplitudes) const;
    /// Objective divided by P_t / varsigma, and its gradient.
    double scaled_objective(const Eigen::VectorXd& amplitudes) const;
    Eigen::VectorXd scaled_objective_gradient(const Eigen::VectorXd& amplitudes) const;

    /// Projection onto {v >= 0, ||v_s|| <= sqrt(P_s), v_s = 0 when a_s = 0}.
    void project(Eigen::VectorXd& amplitudes) const;

    /// Largest positive entry of scaled_residuals over the constrained rows.
    double max_violation(const Eigen::VectorXd& amplitudes) const;

    /// True when a convex relaxation in the power domain (exact rate rows and
    /// budgets, coupling phases dropped from the energy rows) has no feasible
    /// point, which proves the subproblem infeasible. Solved by cutting planes.
    bool relaxation_infeasible() const;

    Eigen::VectorXd amplitudes_of(const PowerAllocation& x) const;
    PowerAllocation allocation_of(const Eigen::VectorXd& amplitudes) const;

private:
    const GainTables& tables_;
    std::vector<double> activation_;
    std::size_t subarrays_;
    std::size_t id_users_;
    std::size_t eh_users_;
    std::size_t users_;
    std::size_t rows_;
    double efficiency_;
    double fixed_power_;
    double subarray_budget_;
    double total_budget_;
    std::vector<double> xi_sq_;         // [L], Xi^2; 0 marks an unconstrained rate row
    std::vector<bool> rate_active_;     // [L]
    std::vector<double> lambda_sq_;     // [M], RF input floor
    std::vector<double> row_scale_;     // [rows]
};

/// Physical residual vector for allocation `x` under `activation`.
std::vector<double> assemble_residuals(const PowerAllocation& x, std::span<const double> activation,
                                       const GainTables& tables, const QoSThresholds& thresholds,
                                       const PowerModelParams& power, std::size_t elements_per_subarray);

struct AdmmState {
    PowerAllocation x;
    Eigen::VectorXd amplitudes;  // sqrt of x, solver variable
    Eigen::VectorXd relaxed;     // x_A
    Eigen::VectorXd slack;       // y, in the non-negative orthant
    Eigen::VectorXd dual;        // z, scaled
    double penalty = 1.0;
    std::size_t iteration = 0;
    std::vector<double> objective_trace;  // P_C after each iteration, watts
    std::vector<double> violation_trace;  // max scaled violation after each iteration
    double initial_penalty_term = 0.0;
};

class Divergence : public Error {
public:
    Divergence(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Starting state: `start` (or equal P_s/K on active subarrays), slack at the
/// projection of the negated residual, zero dual.
AdmmState initial_state(const ConstraintSystem& system, const AdmmConfig& config,
                        const std::optional<PowerAllocation>& start = std::nullopt);

/// One (x, x_A, y, z) cycle. Throws Divergence if the penalty term exceeds
/// 1e6 times its starting value.
AdmmState admm_iterate(AdmmState state, const ConstraintSystem& system, const AdmmConfig& config);

struct PaSolution {
    PowerAllocation allocation;
    std::vector<double> objective_trace;
    std::vector<double> violation_trace;
    SolveStatus status = SolveStatus::MaxIterations;
    std::size_t iterations = 0;
    double max_violation = 0.0;
    bool screened = false;  // rejected by relaxation_infeasible before iterating
};

/// Runs admm_iterate until |P_C^(u) - P_C^(u-1)| <= epsilon with every row
/// satisfied to feasibility_tolerance, or until max_iterations. Subproblems
/// that fail the relaxation screen return Infeasible with no iterations.
///
/// Throws InvalidInput if no subarray has a positive weight and
/// InfeasibleThreshold if an energy floor is not attainable below saturation.
PaSolution solve_pa(std::span<const double> activation, const GainTables& tables,
                    const QoSThresholds& thresholds, const PowerModelParams& power,
                    std::size_t elements_per_subarray, const AdmmConfig& config,
                    const std::optional<PowerAllocation>& start = std::nullopt);

}  // namespace xlswipt

#endif  // XLSWIPT_PA_SOLVER_HPP
