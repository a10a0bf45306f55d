#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvarcut/lp/problem.hpp"
#include "cvarcut/types.hpp"

namespace cvarcut::lp {

struct SimplexOptions {
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-9;
    long max_iterations = 0; // 0: derive from problem size
    int refactor_interval = 128;
};

// Bounded-variable two-phase primal simplex with an explicit basis inverse
// and product-form updates.
//
// The problem is brought to equality form by one slack per row (<= rows get
// a [0, inf) slack, >= rows a (-inf, 0] slack, = rows a fixed slack).
// Phase 1 starts from the all-slack basis; rows whose slack value falls
// outside its bounds get an artificial variable whose absolute value phase 1
// drives to zero. Afterwards artificials are pinned to [0, 0] and phase 2
// runs with the true objective. Entering variables are picked by the Dantzig
// rule with a Bland fallback after a run of degenerate pivots, so the solver
// terminates on the degenerate vertices that tail scenarios routinely
// produce. Deterministic by construction.
class SimplexSolver {
public:
    explicit SimplexSolver(const LpProblem& problem, SimplexOptions options = {})
        : problem_(problem), opts_(options) {
        build();
    }

    LpSolution solve() {
        LpSolution result;
        result.backend = "simplex";

        if (m_ == 0) {
            solve_without_rows(result);
            return result;
        }

        // Phase 1: drive artificial infeasibility to zero.
        if (has_artificials_) {
            set_phase1_costs();
            const Status st = run_simplex(/*phase1=*/true);
            if (st == Status::IterationLimit) {
                result.status = Status::IterationLimit;
                result.iterations = iterations_;
                return result;
            }
            double infeasibility = 0.0;
            for (Index j = n_total_ - num_artificials_; j < n_total_; ++j) {
                infeasibility += std::abs(value_[j]);
            }
            if (infeasibility > opts_.feasibility_tolerance * feas_scale_) {
                result.status = Status::Infeasible;
                result.iterations = iterations_;
                return result;
            }
            // Artificials can stay basic at zero; pin them so phase 2 cannot
            // move them off it.
            for (Index j = n_total_ - num_artificials_; j < n_total_; ++j) {
                lower_[j] = 0.0;
                upper_[j] = 0.0;
                if (state_[j] != State::Basic) {
                    state_[j] = State::AtLower;
                    value_[j] = 0.0;
                }
            }
        }

        set_phase2_costs();
        const Status st = run_simplex(/*phase1=*/false);
        result.status = st;
        result.iterations = iterations_;
        if (st != Status::Optimal) return result;

        refactorize();
        compute_duals();
        result.x = value_.head(n_);
        result.objective_value = problem_.objective().dot(result.x);
        result.duals = duals_;
        result.reduced_costs = Vec(n_);
        for (Index j = 0; j < n_; ++j) {
            result.reduced_costs[j] = problem_.objective()[j] - column_dot(j, duals_);
        }
        return result;
    }

private:
    enum class State : unsigned char { Basic, AtLower, AtUpper, FreeNonbasic };

    struct Column {
        std::vector<std::pair<Index, double>> entries;
    };

    void build() {
        n_ = problem_.num_vars();
        m_ = problem_.num_rows();
        n_total_ = n_ + m_; // artificials appended later

        cols_.resize(static_cast<std::size_t>(n_total_));
        for (Index i = 0; i < m_; ++i) {
            for (const auto& [j, a] : problem_.row(i).coeffs) {
                cols_[static_cast<std::size_t>(j)].entries.emplace_back(i, a);
            }
            cols_[static_cast<std::size_t>(n_ + i)].entries.emplace_back(i, 1.0);
        }

        lower_ = Vec(n_total_);
        upper_ = Vec(n_total_);
        lower_.head(n_) = problem_.lower();
        upper_.head(n_) = problem_.upper();
        rhs_ = Vec(m_);
        feas_scale_ = 1.0;
        for (Index i = 0; i < m_; ++i) {
            const auto& row = problem_.row(i);
            rhs_[i] = row.rhs;
            feas_scale_ = std::max(feas_scale_, std::abs(row.rhs));
            switch (row.sense) {
                case Sense::LessEqual:
                    lower_[n_ + i] = 0.0;
                    upper_[n_ + i] = kInfinity;
                    break;
                case Sense::GreaterEqual:
                    lower_[n_ + i] = -kInfinity;
                    upper_[n_ + i] = 0.0;
                    break;
                case Sense::Equal:
                    lower_[n_ + i] = 0.0;
                    upper_[n_ + i] = 0.0;
                    break;
            }
        }

        if (m_ == 0) return;

        // Nonbasic start for structural variables: nearest finite bound.
        state_.assign(static_cast<std::size_t>(n_total_), State::AtLower);
        value_ = Vec::Zero(n_total_);
        for (Index j = 0; j < n_; ++j) {
            if (lower_[j] > -kInfinity) {
                state_[static_cast<std::size_t>(j)] = State::AtLower;
                value_[j] = lower_[j];
            } else if (upper_[j] < kInfinity) {
                state_[static_cast<std::size_t>(j)] = State::AtUpper;
                value_[j] = upper_[j];
            } else {
                state_[static_cast<std::size_t>(j)] = State::FreeNonbasic;
                value_[j] = 0.0;
            }
        }

        // Row activities at the nonbasic point decide which slacks can open
        // the basis and which rows need an artificial.
        Vec activity = Vec::Zero(m_);
        for (Index j = 0; j < n_; ++j) {
            if (value_[j] == 0.0) continue;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)].entries) {
                activity[i] += a * value_[j];
            }
        }

        basis_.resize(static_cast<std::size_t>(m_));
        std::vector<double> artificial_values;
        for (Index i = 0; i < m_; ++i) {
            const Index sj = n_ + i;
            const double s = rhs_[i] - activity[i];
            if (s >= lower_[sj] && s <= upper_[sj]) {
                basis_[static_cast<std::size_t>(i)] = sj;
                state_[static_cast<std::size_t>(sj)] = State::Basic;
                value_[sj] = s;
            } else {
                const double clamped = std::clamp(s, lower_[sj], upper_[sj]);
                state_[static_cast<std::size_t>(sj)] =
                    (clamped == lower_[sj]) ? State::AtLower : State::AtUpper;
                value_[sj] = clamped;
                artificial_values.push_back(s - clamped);
                basis_[static_cast<std::size_t>(i)] = n_total_ + static_cast<Index>(artificial_values.size()) - 1;
                artificial_rows_.push_back(i);
            }
        }

        num_artificials_ = static_cast<Index>(artificial_values.size());
        has_artificials_ = num_artificials_ > 0;
        if (has_artificials_) {
            const Index old_total = n_total_;
            n_total_ += num_artificials_;
            cols_.resize(static_cast<std::size_t>(n_total_));
            lower_.conservativeResize(n_total_);
            upper_.conservativeResize(n_total_);
            value_.conservativeResize(n_total_);
            state_.resize(static_cast<std::size_t>(n_total_), State::Basic);
            for (Index k = 0; k < num_artificials_; ++k) {
                const Index j = old_total + k;
                const Index i = artificial_rows_[static_cast<std::size_t>(k)];
                cols_[static_cast<std::size_t>(j)].entries.emplace_back(i, 1.0);
                const double v = artificial_values[static_cast<std::size_t>(k)];
                value_[j] = v;
                if (v >= 0.0) {
                    lower_[j] = 0.0;
                    upper_[j] = kInfinity;
                } else {
                    lower_[j] = -kInfinity;
                    upper_[j] = 0.0;
                }
                state_[static_cast<std::size_t>(j)] = State::Basic;
            }
        }

        cost_ = Vec::Zero(n_total_);
        binv_ = Eigen::MatrixXd::Identity(m_, m_);
        iterations_ = 0;
        if (opts_.max_iterations <= 0) {
            opts_.max_iterations = 2000 + 200 * static_cast<long>(m_ + n_);
        }
    }

    void set_phase1_costs() {
        cost_.setZero();
        for (Index k = 0; k < num_artificials_; ++k) {
            const Index j = n_ + m_ + k;
            // maximize -sum |artificial|
            cost_[j] = (upper_[j] == kInfinity) ? -1.0 : 1.0;
        }
        cost_scale_ = 1.0;
    }

    void set_phase2_costs() {
        cost_.setZero();
        cost_.head(n_) = problem_.objective();
        cost_scale_ = 1.0 + problem_.objective().cwiseAbs().maxCoeff();
    }

    double column_dot(Index j, const Vec& y) const {
        double v = 0.0;
        for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)].entries) v += a * y[i];
        return v;
    }

    void compute_duals() {
        Vec cb(m_);
        for (Index i = 0; i < m_; ++i) cb[i] = cost_[basis_[static_cast<std::size_t>(i)]];
        duals_ = binv_.transpose() * cb;
    }

    void refactorize() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (Index i = 0; i < m_; ++i) {
            const Index j = basis_[static_cast<std::size_t>(i)];
            for (const auto& [r, a] : cols_[static_cast<std::size_t>(j)].entries) B(r, i) = a;
        }
        binv_ = B.partialPivLu().inverse();
        recompute_basic_values();
    }

    void recompute_basic_values() {
        Vec rhs = rhs_;
        for (Index j = 0; j < n_total_; ++j) {
            if (state_[static_cast<std::size_t>(j)] == State::Basic || value_[j] == 0.0) continue;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)].entries) {
                rhs[i] -= a * value_[j];
            }
        }
        const Vec xb = binv_ * rhs;
        for (Index i = 0; i < m_; ++i) value_[basis_[static_cast<std::size_t>(i)]] = xb[i];
    }

    // One simplex run with the current costs. Returns Optimal, Unbounded or
    // IterationLimit; phase-1 feasibility is judged by the caller.
    Status run_simplex(bool phase1) {
        compute_duals();
        long since_refactor = 0;
        long degenerate_run = 0;

        while (true) {
            if (iterations_ >= opts_.max_iterations) return Status::IterationLimit;

            const bool bland = degenerate_run > 64;
            const double dtol = opts_.optimality_tolerance * cost_scale_;

            // Entering variable.
            Index entering = -1;
            double best = dtol;
            int direction = 0;
            for (Index j = 0; j < n_total_; ++j) {
                const State st = state_[static_cast<std::size_t>(j)];
                if (st == State::Basic || lower_[j] == upper_[j]) continue;
                const double d = cost_[j] - column_dot(j, duals_);
                int dir = 0;
                double score = 0.0;
                if (st == State::AtLower && d > dtol) {
                    dir = +1;
                    score = d;
                } else if (st == State::AtUpper && d < -dtol) {
                    dir = -1;
                    score = -d;
                } else if (st == State::FreeNonbasic && std::abs(d) > dtol) {
                    dir = d > 0.0 ? +1 : -1;
                    score = std::abs(d);
                }
                if (dir != 0) {
                    if (bland) {
                        entering = j;
                        direction = dir;
                        break;
                    }
                    if (score > best) {
                        best = score;
                        entering = j;
                        direction = dir;
                    }
                }
            }
            if (entering < 0) return Status::Optimal;

            // FTRAN: basic response to the entering column.
            Vec w = Vec::Zero(m_);
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(entering)].entries) {
                w += a * binv_.col(i);
            }

            // Ratio test: basic variable k moves by -direction*w_k per unit
            // step of the entering variable.
            const double piv_tol = 1e-9;
            double best_step = kInfinity;
            Index leaving_pos = -1;
            double leaving_pivot = 0.0;
            if (upper_[entering] < kInfinity && lower_[entering] > -kInfinity) {
                best_step = upper_[entering] - lower_[entering];
            }
            for (Index i = 0; i < m_; ++i) {
                const double delta = -direction * w[i];
                if (std::abs(delta) <= piv_tol) continue;
                const Index bj = basis_[static_cast<std::size_t>(i)];
                double limit;
                if (delta > 0.0) {
                    if (upper_[bj] == kInfinity) continue;
                    limit = (upper_[bj] - value_[bj]) / delta;
                } else {
                    if (lower_[bj] == -kInfinity) continue;
                    limit = (value_[bj] - lower_[bj]) / (-delta);
                }
                limit = std::max(limit, 0.0);
                // Prefer larger pivots among near-tied ratios.
                if (limit < best_step - 1e-10 ||
                    (limit < best_step + 1e-10 && std::abs(w[i]) > std::abs(leaving_pivot))) {
                    best_step = limit;
                    leaving_pos = i;
                    leaving_pivot = w[i];
                }
            }

            if (best_step == kInfinity) {
                return phase1 ? Status::IterationLimit : Status::Unbounded;
            }

            ++iterations_;
            degenerate_run = (best_step <= 1e-11) ? degenerate_run + 1 : 0;

            const double theta = best_step;
            // Move basics and the entering variable.
            for (Index i = 0; i < m_; ++i) {
                const Index bj = basis_[static_cast<std::size_t>(i)];
                value_[bj] -= theta * direction * w[i];
            }
            value_[entering] += direction * theta;

            if (leaving_pos < 0) {
                // Bound-to-bound flip, basis unchanged.
                state_[static_cast<std::size_t>(entering)] =
                    (direction > 0) ? State::AtUpper : State::AtLower;
                value_[entering] = (direction > 0) ? upper_[entering] : lower_[entering];
                continue;
            }

            const Index leaving = basis_[static_cast<std::size_t>(leaving_pos)];
            const double delta_leaving = -direction * w[leaving_pos];
            state_[static_cast<std::size_t>(leaving)] =
                (delta_leaving > 0.0) ? State::AtUpper : State::AtLower;
            value_[leaving] = (delta_leaving > 0.0) ? upper_[leaving] : lower_[leaving];

            basis_[static_cast<std::size_t>(leaving_pos)] = entering;
            state_[static_cast<std::size_t>(entering)] = State::Basic;

            // Product-form inverse update.
            const double pivot = w[leaving_pos];
            binv_.row(leaving_pos) /= pivot;
            for (Index i = 0; i < m_; ++i) {
                if (i == leaving_pos) continue;
                if (w[i] != 0.0) binv_.row(i) -= w[i] * binv_.row(leaving_pos);
            }

            if (++since_refactor >= opts_.refactor_interval) {
                refactorize();
                since_refactor = 0;
            }
            compute_duals();
        }
    }

    // No rows: every variable sits at the bound its cost prefers.
    void solve_without_rows(LpSolution& result) const {
        const Vec& c = problem_.objective();
        Vec x(n_);
        for (Index j = 0; j < n_; ++j) {
            if (c[j] > 0.0) {
                if (upper_[j] == kInfinity) {
                    result.status = Status::Unbounded;
                    return;
                }
                x[j] = upper_[j];
            } else if (c[j] < 0.0) {
                if (lower_[j] == -kInfinity) {
                    result.status = Status::Unbounded;
                    return;
                }
                x[j] = lower_[j];
            } else {
                x[j] = (lower_[j] > -kInfinity) ? lower_[j]
                                                : (upper_[j] < kInfinity ? upper_[j] : 0.0);
            }
        }
        result.status = Status::Optimal;
        result.x = x;
        result.objective_value = c.dot(x);
        result.duals = Vec(0);
        result.reduced_costs = c;
    }

    const LpProblem& problem_;
    SimplexOptions opts_;

    Index n_ = 0;       // structural variables
    Index m_ = 0;       // rows
    Index n_total_ = 0; // structurals + slacks (+ artificials)
    Index num_artificials_ = 0;
    bool has_artificials_ = false;

    std::vector<Column> cols_;
    Vec lower_, upper_, rhs_, cost_, value_;
    std::vector<State> state_;
    std::vector<Index> basis_;
    std::vector<Index> artificial_rows_;
    Eigen::MatrixXd binv_;
    Vec duals_;
    double cost_scale_ = 1.0;
    double feas_scale_ = 1.0;
    long iterations_ = 0;
};

inline LpSolution solve_simplex(const LpProblem& problem, SimplexOptions options = {}) {
    return SimplexSolver(problem, options).solve();
}

} // namespace cvarcut::lp
