// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/pa_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace xlswipt {

ConePoint soc_project(double q0, std::span<const double> q1) {
    double norm = 0.0;
    for (double v : q1) {
        norm += v * v;
    }
    norm = std::sqrt(norm);

    ConePoint p;
    if (norm <= q0) {
        p.head = q0;
        p.tail.assign(q1.begin(), q1.end());
        return p;
    }
    if (norm <= -q0) {
        p.head = 0.0;
        p.tail.assign(q1.size(), 0.0);
        return p;
    }
    const double half = 0.5 * (q0 + norm);
    p.head = half;
    p.tail.resize(q1.size());
    for (std::size_t i = 0; i < q1.size(); ++i) {
        p.tail[i] = half * q1[i] / norm;
    }
    return p;
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged:
            return "converged";
        case SolveStatus::MaxIterations:
            return "max_iterations";
        case SolveStatus::Infeasible:
            return "infeasible";
    }
    return "unknown";
}

ConstraintSystem::ConstraintSystem(const GainTables& tables, const QoSThresholds& thresholds,
                                   std::vector<double> activation, const PowerModelParams& power,
                                   std::size_t elements_per_subarray)
    : tables_(tables),
      activation_(std::move(activation)),
      subarrays_(tables.subarrays),
      id_users_(tables.id_users),
      eh_users_(tables.eh_users),
      users_(tables.users()),
      rows_(tables.users() + 1 + tables.subarrays),
      efficiency_(power.amplifier_efficiency),
      fixed_power_(2.0 * power.synthesizer_power +
                   static_cast<double>(elements_per_subarray) * power.circuit_power),
      subarray_budget_(power.subarray_budget(elements_per_subarray)),
      total_budget_(power.total_budget(tables.subarrays, elements_per_subarray)) {
    if (activation_.size() != subarrays_) {
        throw InvalidInput("activation length differs from the subarray count");
    }
    if (thresholds.rate_floor.size() != id_users_ || thresholds.energy_input_floor.size() != eh_users_) {
        throw InvalidInput("threshold vectors do not match the user counts");
    }
    for (double a : activation_) {
        if (!(a >= 0.0) || a > 1.0) {
            throw InvalidInput("activation weights must lie in [0, 1]");
        }
    }

    xi_sq_.assign(id_users_, 0.0);
    rate_active_.assign(id_users_, false);
    for (std::size_t l = 0; l < id_users_; ++l) {
        const double r = thresholds.rate_floor[l];
        if (r > 0.0) {
            xi_sq_[l] = 1.0 / std::expm1(r * std::log(2.0));
            rate_active_[l] = std::isfinite(xi_sq_[l]);
        }
    }
    lambda_sq_ = thresholds.energy_input_floor;

    // Row scales come from an equal split of P_s over the active subarrays,
    // so that every scaled row is O(1) near a reasonable allocation.
    row_scale_.assign(rows_, 1.0);
    const PowerAllocation ref = PowerAllocation::equal(subarrays_, id_users_, eh_users_, subarray_budget_);
    for (std::size_t l = 0; l < id_users_; ++l) {
        const RateTerms t = rate_terms(l, ref, activation_, tables_);
        row_scale_[l] = std::max({t.noncoherent, xi_sq_[l] * t.coherent, std::numeric_limits<double>::min()});
    }
    for (std::size_t m = 0; m < eh_users_; ++m) {
        row_scale_[id_users_ + m] = lambda_sq_[m] > 0.0 ? lambda_sq_[m] : 1.0;
    }
    row_scale_[users_] = total_budget_;
    for (std::size_t s = 0; s < subarrays_; ++s) {
        row_scale_[users_ + 1 + s] = subarray_budget_;
    }
}

std::vector<double> ConstraintSystem::residuals(const PowerAllocation& x) const {
    std::vector<double> r(rows_, 0.0);
    for (std::size_t l = 0; l < id_users_; ++l) {
        const RateTerms t = rate_terms(l, x, activation_, tables_);
        r[l] = rate_active_[l] ? t.noncoherent - xi_sq_[l] * t.coherent : -t.noncoherent;
    }
    for (std::size_t m = 0; m < eh_users_; ++m) {
        r[id_users_ + m] = lambda_sq_[m] - input_energy(m, x, activation_, tables_);
    }
    double total = 0.0;
    for (std::size_t s = 0; s < subarrays_; ++s) {
        total += activation_[s] * x.subarray_total(s);
        r[users_ + 1 + s] = x.subarray_total(s) - subarray_budget_;
    }
    r[users_] = total - total_budget_;
    return r;
}

Eigen::VectorXd ConstraintSystem::scaled_residuals(const Eigen::VectorXd& v) const {
    const std::size_t K = users_;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_));

    for (std::size_t l = 0; l < id_users_; ++l) {
        if (!rate_active_[l]) {
            r[l] = -1.0;
            continue;
        }
        double acc = tables_.noise_power[l];
        for (std::size_t s = 0; s < subarrays_; ++s) {
            const double w = activation_[s];
            if (w == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < K; ++j) {
                const double p = v[s * K + j] * v[s * K + j];
                const double coef = j == l ? -xi_sq_[l] * tables_.direct(s, l, l) : tables_.direct(s, l, j);
                acc += w * coef * p;
            }
        }
        r[l] = acc / row_scale_[l];
    }

    for (std::size_t m = 0; m < eh_users_; ++m) {
        const std::size_t row = id_users_ + m;
        if (!(lambda_sq_[m] > 0.0)) {
            r[row] = -1.0;
            continue;
        }
        double energy = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            cdouble t{};
            for (std::size_t s = 0; s < subarrays_; ++s) {
                t += activation_[s] * v[s * K + j] * tables_.coupling(s, id_users_ + m, j);
            }
            energy += std::norm(t);
        }
        r[row] = (lambda_sq_[m] - energy) / row_scale_[row];
    }

    double total = 0.0;
    for (std::size_t s = 0; s < subarrays_; ++s) {
        double sub = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            sub += v[s * K + j] * v[s * K + j];
        }
        total += activation_[s] * sub;
        r[users_ + 1 + s] = (sub - subarray_budget_) / subarray_budget_;
    }
    r[users_] = (total - total_budget_) / total_budget_;
    return r;
}

Eigen::MatrixXd ConstraintSystem::scaled_jacobian(const Eigen::VectorXd& v) const {
    const std::size_t K = users_;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), v.size());

    for (std::size_t l = 0; l < id_users_; ++l) {
        if (!rate_active_[l]) {
            continue;
        }
        for (std::size_t s = 0; s < subarrays_; ++s) {
            const double w = activation_[s];
            if (w == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < K; ++j) {
                const double coef = j == l ? -xi_sq_[l] * tables_.direct(s, l, l) : tables_.direct(s, l, j);
                J(l, s * K + j) = 2.0 * w * coef * v[s * K + j] / row_scale_[l];
            }
        }
    }

    for (std::size_t m = 0; m < eh_users_; ++m) {
        const std::size_t row = id_users_ + m;
        if (!(lambda_sq_[m] > 0.0)) {
            continue;
        }
        for (std::size_t j = 0; j < K; ++j) {
            cdouble t{};
            for (std::size_t s = 0; s < subarrays_; ++s) {
                t += activation_[s] * v[s * K + j] * tables_.coupling(s, id_users_ + m, j);
            }
            for (std::size_t s = 0; s < subarrays_; ++s) {
                const cdouble c = tables_.coupling(s, id_users_ + m, j);
                J(row, s * K + j) = -2.0 * activation_[s] * (std::conj(t) * c).real() / row_scale_[row];
            }
        }
    }

    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t j = 0; j < K; ++j) {
            J(users_, s * K + j) = 2.0 * activation_[s] * v[s * K + j] / total_budget_;
            J(users_ + 1 + s, s * K + j) = 2.0 * v[s * K + j] / subarray_budget_;
        }
    }
    return J;
}

double ConstraintSystem::objective(const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < subarrays_; ++s) {
        if (activation_[s] == 0.0) {
            continue;
        }
        double sub = 0.0;
        for (std::size_t j = 0; j < users_; ++j) {
            sub += v[s * users_ + j] * v[s * users_ + j];
        }
        acc += activation_[s] * (sub / efficiency_ + fixed_power_);
    }
    return acc;
}

double ConstraintSystem::scaled_objective(const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t j = 0; j < users_; ++j) {
            acc += activation_[s] * v[s * users_ + j] * v[s * users_ + j];
        }
    }
    return acc / total_budget_;
}

Eigen::VectorXd ConstraintSystem::scaled_objective_gradient(const Eigen::VectorXd& v) const {
    Eigen::VectorXd g(v.size());
    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t j = 0; j < users_; ++j) {
            g[s * users_ + j] = 2.0 * activation_[s] * v[s * users_ + j] / total_budget_;
        }
    }
    return g;
}

void ConstraintSystem::project(Eigen::VectorXd& v) const {
    const double radius = std::sqrt(subarray_budget_);
    for (std::size_t s = 0; s < subarrays_; ++s) {
        auto block = v.segment(static_cast<Eigen::Index>(s * users_), static_cast<Eigen::Index>(users_));
        if (activation_[s] == 0.0) {
            block.setZero();
            continue;
        }
        block = block.cwiseMax(0.0);
        const double n = block.norm();
        if (n > radius) {
            block *= radius / n;
        }
    }
}

double ConstraintSystem::max_violation(const Eigen::VectorXd& v) const {
    return std::max(0.0, scaled_residuals(v).maxCoeff());
}

namespace {

// Phase-one simplex with Bland's rule on {p >= 0 : A p <= b}. Returns a
// feasible vertex, or nothing when the minimal artificial sum exceeds `tol`.
std::optional<Eigen::VectorXd> lp_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    Eigen::Index artificials = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        artificials += b[i] < 0.0 ? 1 : 0;
    }
    if (artificials == 0) {
        return Eigen::VectorXd::Zero(n);
    }
    const Eigen::Index cols = n + m + artificials;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, cols + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    Eigen::Index next_art = n + m;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        T.row(i).head(n) = sign * A.row(i);
        T(i, n + i) = sign;
        T(i, cols) = sign * b[i];
        if (b[i] < 0.0) {
            T(i, next_art) = 1.0;
            basis[static_cast<std::size_t>(i)] = next_art++;
        } else {
            basis[static_cast<std::size_t>(i)] = n + i;
        }
    }
    auto is_art = [&](Eigen::Index j) { return j >= n + m; };

    for (int pivots = 0; pivots < 10000; ++pivots) {
        // Reduced costs of the phase-one objective sum(artificials).
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < cols && enter < 0; ++j) {
            if (is_art(j)) {
                continue;
            }
            double d = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (is_art(basis[static_cast<std::size_t>(i)])) {
                    d -= T(i, j);
                }
            }
            if (d < -1e-12) {
                enter = j;
            }
        }
        if (enter < 0) {
            break;
        }
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (T(i, enter) > 1e-12) {
                const double ratio = T(i, cols) / T(i, enter);
                if (ratio < best - 1e-15 ||
                    (ratio <= best + 1e-15 && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            break;
        }
        T.row(leave) /= T(leave, enter);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i != leave && T(i, enter) != 0.0) {
                T.row(i) -= T(i, enter) * T.row(leave);
            }
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }
    double infeasibility = 0.0;
    Eigen::VectorXd point = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j = basis[static_cast<std::size_t>(i)];
        if (is_art(j)) {
            infeasibility += T(i, cols);
        } else if (j < n) {
            point[j] = std::max(0.0, T(i, cols));
        }
    }
    if (infeasibility > tol) {
        return std::nullopt;
    }
    return point;
}

}  // namespace

bool ConstraintSystem::relaxation_infeasible() const {
    const std::size_t K = users_;
    const Eigen::Index n = static_cast<Eigen::Index>(variables());

    // In the power domain p = Omega the rate rows are linear. Dropping the
    // coupling phases, the energy of EH user m is at most
    //   F_m(p) = sum_j (sum_s w_s |c_{s,m,j}| sqrt(p_{s,j}))^2,
    // which is concave and 1-homogeneous, so every tangent plane
    // grad F_m(p0) . p >= Lambda_m^2 is a valid cut.
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(id_users_ + 1 + subarrays_), n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(base.rows());
    for (std::size_t l = 0; l < id_users_; ++l) {
        if (!rate_active_[l]) {
            rhs[l] = 1.0;
            continue;
        }
        for (std::size_t s = 0; s < subarrays_; ++s) {
            for (std::size_t j = 0; j < K; ++j) {
                const double coef = j == l ? -xi_sq_[l] * tables_.direct(s, l, l) : tables_.direct(s, l, j);
                base(l, s * K + j) = activation_[s] * coef / row_scale_[l];
            }
        }
        rhs[l] = -tables_.noise_power[l] / row_scale_[l];
    }
    const Eigen::Index total_row = static_cast<Eigen::Index>(id_users_);
    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t j = 0; j < K; ++j) {
            base(total_row, s * K + j) = activation_[s] / total_budget_;
            // Inactive subarrays carry no power.
            base(total_row + 1 + s, s * K + j) = activation_[s] > 0.0 ? 1.0 / subarray_budget_ : 1.0;
        }
        rhs[total_row + 1 + s] = activation_[s] > 0.0 ? 1.0 : 0.0;
    }
    rhs[total_row] = 1.0;

    std::vector<std::size_t> needy;
    for (std::size_t m = 0; m < eh_users_; ++m) {
        if (lambda_sq_[m] > 0.0) {
            needy.push_back(m);
        }
    }
    auto magnitude = [&](std::size_t s, std::size_t m, std::size_t j) {
        return activation_[s] * std::abs(tables_.coupling(s, id_users_ + m, j));
    };
    auto energy_bound = [&](std::size_t m, const Eigen::VectorXd& p) {
        double f = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            double g = 0.0;
            for (std::size_t s = 0; s < subarrays_; ++s) {
                g += magnitude(s, m, j) * std::sqrt(p[s * K + j]);
            }
            f += g * g;
        }
        return f;
    };
    auto tangent = [&](std::size_t m, const Eigen::VectorXd& p0) {
        Eigen::RowVectorXd cut = Eigen::RowVectorXd::Zero(n);
        for (std::size_t j = 0; j < K; ++j) {
            double g = 0.0;
            for (std::size_t s = 0; s < subarrays_; ++s) {
                g += magnitude(s, m, j) * std::sqrt(p0[s * K + j]);
            }
            for (std::size_t s = 0; s < subarrays_; ++s) {
                cut[s * K + j] = g * magnitude(s, m, j) / std::sqrt(p0[s * K + j]);
            }
        }
        return cut;
    };

    std::vector<Eigen::RowVectorXd> cuts;
    std::vector<std::size_t> cut_user;
    const double floor = 1e-6 * subarray_budget_;
    Eigen::VectorXd p0 = Eigen::VectorXd::Constant(n, subarray_budget_ / static_cast<double>(K));
    for (std::size_t m : needy) {
        cuts.push_back(tangent(m, p0));
        cut_user.push_back(m);
    }
    for (int round = 0; round < 25; ++round) {
        Eigen::MatrixXd A(base.rows() + static_cast<Eigen::Index>(cuts.size()), n);
        Eigen::VectorXd b(A.rows());
        A.topRows(base.rows()) = base;
        b.head(base.rows()) = rhs;
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            const double lam = lambda_sq_[cut_user[c]];
            A.row(base.rows() + static_cast<Eigen::Index>(c)) = -cuts[c] / lam;
            b[base.rows() + static_cast<Eigen::Index>(c)] = -1.0;
        }
        const auto point = lp_point(A, b, 1e-7);
        if (!point) {
            return true;
        }
        bool added = false;
        for (std::size_t m : needy) {
            if (energy_bound(m, *point) < lambda_sq_[m] * (1.0 - 1e-6)) {
                cuts.push_back(tangent(m, point->cwiseMax(floor)));
                cut_user.push_back(m);
                added = true;
            }
        }
        if (!added) {
            return false;
        }
    }
    return false;
}

Eigen::VectorXd ConstraintSystem::amplitudes_of(const PowerAllocation& x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(variables()));
    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t k = 0; k < users_; ++k) {
            v[s * users_ + k] = std::sqrt(std::max(0.0, x.beam(s, k)));
        }
    }
    return v;
}

PowerAllocation ConstraintSystem::allocation_of(const Eigen::VectorXd& v) const {
    PowerAllocation x = PowerAllocation::zeros(subarrays_, id_users_, eh_users_);
    for (std::size_t s = 0; s < subarrays_; ++s) {
        for (std::size_t k = 0; k < users_; ++k) {
            x.beam(s, k) = v[s * users_ + k] * v[s * users_ + k];
        }
    }
    return x;
}

std::vector<double> assemble_residuals(const PowerAllocation& x, std::span<const double> activation,
                                       const GainTables& tables, const QoSThresholds& thresholds,
                                       const PowerModelParams& power, std::size_t elements_per_subarray) {
    const ConstraintSystem system(tables, thresholds, std::vector<double>(activation.begin(), activation.end()),
                                  power, elements_per_subarray);
    return system.residuals(x);
}

namespace {

Eigen::VectorXd project_slack(const Eigen::VectorXd& q) {
    // Every row is a scalar cone block, so the SOC projection reduces to a clamp.
    Eigen::VectorXd y(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        y[i] = soc_project(q[i], {}).head;
    }
    return y;
}

double penalty_term(const AdmmState& st) { return (st.relaxed + st.slack).squaredNorm() + st.dual.squaredNorm(); }

}  // namespace

AdmmState initial_state(const ConstraintSystem& system, const AdmmConfig& config,
                        const std::optional<PowerAllocation>& start) {
    AdmmState st;
    if (start) {
        st.amplitudes = system.amplitudes_of(*start);
    } else {
        const double share = system.subarray_budget() / static_cast<double>(system.users());
        st.amplitudes = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(system.variables()), std::sqrt(share));
    }
    system.project(st.amplitudes);
    st.x = system.allocation_of(st.amplitudes);
    st.relaxed = system.scaled_residuals(st.amplitudes);
    st.slack = project_slack(-st.relaxed);
    st.dual = Eigen::VectorXd::Zero(st.relaxed.size());
    st.penalty = config.penalty;
    st.initial_penalty_term = std::max(1.0, penalty_term(st));
    return st;
}

AdmmState admm_iterate(AdmmState st, const ConstraintSystem& system, const AdmmConfig& config) {
    const double tau = st.penalty;

    // x-update: projected gradient with backtracking on the augmented
    // Lagrangian f(v) + tau/2 ||rho(v) + y + z||^2. The first trial step
    // comes from the Gauss-Newton curvature at the current iterate.
    const Eigen::VectorXd shift = st.slack + st.dual;
    auto merit = [&](const Eigen::VectorXd& v) {
        return system.scaled_objective(v) + 0.5 * tau * (system.scaled_residuals(v) + shift).squaredNorm();
    };

    Eigen::VectorXd v = st.amplitudes;
    Eigen::MatrixXd J = system.scaled_jacobian(v);
    double max_weight = 0.0;
    for (double a : system.activation()) {
        max_weight = std::max(max_weight, a);
    }
    const Eigen::MatrixXd gram = J * J.transpose();
    const double gram_max = gram.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                              .eigenvalues()
                                              .maxCoeff()
                                        : 0.0;
    const double lipschitz = 2.0 * max_weight / system.total_budget() + tau * std::max(0.0, gram_max);
    double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

    double value = merit(v);
    for (std::size_t i = 0; i < config.inner_steps; ++i) {
        if (i > 0) {
            J = system.scaled_jacobian(v);
        }
        const Eigen::VectorXd grad =
            system.scaled_objective_gradient(v) + tau * J.transpose() * (system.scaled_residuals(v) + shift);
        Eigen::VectorXd next;
        double next_value = 0.0;
        bool moved = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            next = v - step * grad;
            system.project(next);
            const Eigen::VectorXd d = next - v;
            next_value = merit(next);
            if (next_value <= value + grad.dot(d) + 0.5 / step * d.squaredNorm()) {
                moved = d.squaredNorm() > 0.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            break;
        }
        const double shift_norm = (next - v).norm();
        v = std::move(next);
        value = next_value;
        step *= 1.5;
        if (shift_norm <= 1e-13 * std::max(1.0, v.norm())) {
            break;
        }
    }
    st.amplitudes = std::move(v);
    st.x = system.allocation_of(st.amplitudes);

    // Relaxation, slack projection and dual ascent.
    const Eigen::VectorXd residual = system.scaled_residuals(st.amplitudes);
    const double a2 = 2.0 * config.relaxation;
    st.relaxed = a2 * residual - (1.0 - a2) * st.slack;
    const Eigen::VectorXd old_slack = st.slack;
    st.slack = project_slack(-st.relaxed - st.dual);
    st.dual += st.relaxed + st.slack;

    if (config.adaptive_penalty) {
        const double primal = (st.relaxed + st.slack).norm();
        const double dual = tau * (J.transpose() * (st.slack - old_slack)).norm();
        if (primal > 10.0 * dual) {
            st.penalty = tau * 2.0;
            st.dual *= 0.5;
        } else if (dual > 10.0 * primal) {
            st.penalty = tau * 0.5;
            st.dual *= 2.0;
        }
    }

    ++st.iteration;
    st.objective_trace.push_back(system.objective(st.amplitudes));
    st.violation_trace.push_back(std::max(0.0, residual.maxCoeff()));

    if (penalty_term(st) > 1e6 * st.initial_penalty_term || !std::isfinite(penalty_term(st))) {
        throw Divergence("ADMM penalty term diverged after " + std::to_string(st.iteration) + " iterations",
                         st.objective_trace);
    }
    return st;
}

PaSolution solve_pa(std::span<const double> activation, const GainTables& tables,
                    const QoSThresholds& thresholds, const PowerModelParams& power,
                    std::size_t elements_per_subarray, const AdmmConfig& config,
                    const std::optional<PowerAllocation>& start) {
    bool any = false;
    for (double a : activation) {
        any = any || a > 0.0;
    }
    if (!any) {
        throw InvalidInput("power allocation needs at least one active subarray");
    }
    for (std::size_t m = 0; m < thresholds.energy_input_floor.size(); ++m) {
        if (!std::isfinite(thresholds.energy_input_floor[m])) {
            throw InfeasibleThreshold("energy floor of EH user " + std::to_string(m) +
                                      " lies at or above the harvester saturation level");
        }
    }

    const ConstraintSystem system(tables, thresholds, std::vector<double>(activation.begin(), activation.end()),
                                  power, elements_per_subarray);
    PaSolution out;
    if (system.relaxation_infeasible()) {
        out.allocation = start ? *start : PowerAllocation::zeros(tables.subarrays, tables.id_users, tables.eh_users);
        out.status = SolveStatus::Infeasible;
        out.screened = true;
        out.max_violation = std::numeric_limits<double>::infinity();
        return out;
    }
    AdmmState st = initial_state(system, config, start);
    double previous = system.objective(st.amplitudes);

    out.status = SolveStatus::MaxIterations;
    double best_violation = std::numeric_limits<double>::infinity();
    std::size_t best_at = 0;
    while (st.iteration < config.max_iterations) {
        st = admm_iterate(std::move(st), system, config);
        const double violation = st.violation_trace.back();
        if (violation < 0.99 * best_violation) {
            best_violation = violation;
            best_at = st.iteration;
        }
        // A violation that stays well above the threshold without improving
        // marks an infeasible subproblem; stop early instead of idling.
        if (config.stall_iterations > 0 && st.iteration - best_at >= config.stall_iterations &&
            best_violation > config.infeasibility_threshold) {
            break;
        }
        const double current = st.objective_trace.back();
        const bool settled = std::abs(current - previous) <= config.tolerance;
        previous = current;
        if (settled && st.violation_trace.back() <= config.feasibility_tolerance) {
            out.status = SolveStatus::Converged;
            break;
        }
    }
    out.max_violation = system.max_violation(st.amplitudes);
    if (out.status != SolveStatus::Converged && out.max_violation > config.infeasibility_threshold) {
        out.status = SolveStatus::Infeasible;
    }
    out.allocation = std::move(st.x);
    out.objective_trace = std::move(st.objective_trace);
    out.violation_trace = std::move(st.violation_trace);
    out.iterations = st.iteration;
    return out;
}

}  // namespace xlswipt
