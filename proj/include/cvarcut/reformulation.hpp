#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvarcut/cutting_plane.hpp"
#include "cvarcut/lp/solve.hpp"
#include "cvarcut/risk.hpp"
#include "cvarcut/scenario.hpp"

namespace cvarcut {

// Where the position box lives in the built LP. Variable bounds are the
// performance layout; explicit rows reproduce the paper's constraint
// accounting literally so the Table-1 counts can be audited on the actual
// problem object. Both layouts solve to the same objective.
enum class BoxLayout { VariableBounds, ExplicitRows };

// The dummy-variable LP: maximize p'x over the box, with one (zeta, z)
// block per CVaR term and a single blended risk row
//   sum_k w_k (zeta_k + (1/m_k) sum_j z_kj) <= R,
//   z_kj >= -(Yx)_j - zeta_k,  z_kj >= 0.
class ReformulatedLp {
public:
    ReformulatedLp(lp::LpProblem problem, Index n, Index J, std::vector<CvarTerm> terms,
                   double target_risk, BoxLayout layout)
        : problem_(std::move(problem)), n_(n), J_(J), terms_(std::move(terms)),
          target_risk_(target_risk), layout_(layout) {}

    const lp::LpProblem& problem() const { return problem_; }
    lp::LpProblem& problem() { return problem_; }
    Index instruments() const { return n_; }
    Index scenarios() const { return J_; }
    const std::vector<CvarTerm>& terms() const { return terms_; }
    double target_risk() const { return target_risk_; }
    BoxLayout layout() const { return layout_; }

    // Column layout: x first, then one [zeta_k, z_k1..z_kJ] block per term.
    Index zeta_column(std::size_t term) const {
        return n_ + static_cast<Index>(term) * (J_ + 1);
    }
    Index z_column(std::size_t term, Index j) const { return zeta_column(term) + 1 + j; }

    // Paper accounting (box bounds counted as rows): n + sum_k (J + 1)
    // variables and 2n + sum_k 2J + 1 rows; n + J + 1 and 2J + 2n + 1 for a
    // single term.
    Index variable_count() const {
        return n_ + static_cast<Index>(terms_.size()) * (J_ + 1);
    }
    Index row_count() const {
        return 2 * n_ + static_cast<Index>(terms_.size()) * 2 * J_ + 1;
    }

    // The LP's own risk expression at a solution, for cross-checks against
    // the sort-based evaluator.
    double risk_expression(const Vec& lp_solution) const {
        double value = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const double m = static_cast<double>(J_ / terms_[k].return_period);
            double zsum = 0.0;
            for (Index j = 0; j < J_; ++j) zsum += lp_solution[z_column(k, j)];
            value += terms_[k].weight * (lp_solution[zeta_column(k)] + zsum / m);
        }
        return value;
    }

private:
    lp::LpProblem problem_;
    Index n_;
    Index J_;
    std::vector<CvarTerm> terms_;
    double target_risk_;
    BoxLayout layout_;
};

inline ReformulatedLp build_reformulation(const ScenarioMatrix& Y, const ProfitVector& p,
                                          const PositionBounds& bounds,
                                          const std::vector<CvarTerm>& terms, double target_risk,
                                          BoxLayout layout = BoxLayout::VariableBounds) {
    const Index n = Y.instruments();
    const Index J = Y.scenarios();
    if (p.p.size() != n || bounds.size() != n) {
        throw std::invalid_argument("build_reformulation: dimension mismatch");
    }
    if (terms.empty()) {
        throw std::invalid_argument("build_reformulation: need at least one CVaR term");
    }
    for (const auto& t : terms) {
        if (t.return_period < 1 || J % t.return_period != 0) {
            throw std::invalid_argument("build_reformulation: return period " +
                                        std::to_string(t.return_period) +
                                        " must divide scenario count " + std::to_string(J));
        }
        if (!(t.weight > 0.0)) {
            throw std::invalid_argument("build_reformulation: term weights must be positive");
        }
    }

    const Index num_terms = static_cast<Index>(terms.size());
    const Index total_vars = n + num_terms * (J + 1);
    lp::LpProblem problem(total_vars);

    Vec objective = Vec::Zero(total_vars);
    objective.head(n) = p.p;
    problem.set_objective(std::move(objective));

    auto zeta_col = [&](Index k) { return n + k * (J + 1); };
    auto z_col = [&](Index k, Index j) { return zeta_col(k) + 1 + j; };

    if (layout == BoxLayout::VariableBounds) {
        for (Index i = 0; i < n; ++i) problem.set_bounds(i, bounds.lower[i], bounds.upper[i]);
        for (Index k = 0; k < num_terms; ++k) {
            for (Index j = 0; j < J; ++j) problem.set_bounds(z_col(k, j), 0.0, lp::kInfinity);
        }
    } else {
        for (Index i = 0; i < n; ++i) {
            std::vector<std::pair<Index, double>> row{{i, 1.0}};
            problem.add_row_sparse(row, lp::Sense::LessEqual, bounds.upper[i]);
        }
        for (Index i = 0; i < n; ++i) {
            std::vector<std::pair<Index, double>> row{{i, 1.0}};
            problem.add_row_sparse(row, lp::Sense::GreaterEqual, bounds.lower[i]);
        }
    }

    // z_kj + (Yx)_j + zeta_k >= 0, one row per scenario per term.
    for (Index k = 0; k < num_terms; ++k) {
        for (Index j = 0; j < J; ++j) {
            std::vector<std::pair<Index, double>> row;
            row.reserve(static_cast<std::size_t>(n) + 2);
            for (Index i = 0; i < n; ++i) {
                const double a = Y.values()(j, i);
                if (a != 0.0) row.emplace_back(i, a);
            }
            row.emplace_back(zeta_col(k), 1.0);
            row.emplace_back(z_col(k, j), 1.0);
            problem.add_row_sparse(std::move(row), lp::Sense::GreaterEqual, 0.0);
        }
    }
    if (layout == BoxLayout::ExplicitRows) {
        for (Index k = 0; k < num_terms; ++k) {
            for (Index j = 0; j < J; ++j) {
                std::vector<std::pair<Index, double>> row{{z_col(k, j), 1.0}};
                problem.add_row_sparse(std::move(row), lp::Sense::GreaterEqual, 0.0);
            }
        }
    }

    std::vector<std::pair<Index, double>> blend_row;
    for (Index k = 0; k < num_terms; ++k) {
        const double m = static_cast<double>(J / terms[static_cast<std::size_t>(k)].return_period);
        const double w = terms[static_cast<std::size_t>(k)].weight;
        blend_row.emplace_back(zeta_col(k), w);
        for (Index j = 0; j < J; ++j) blend_row.emplace_back(z_col(k, j), w / m);
    }
    problem.add_row_sparse(std::move(blend_row), lp::Sense::LessEqual, target_risk);

    return ReformulatedLp(std::move(problem), n, J, terms, target_risk, layout);
}

// Solve the built LP and report in the shared result shape: x* from the LP,
// the achieved risk recomputed independently by sorting (never read off the
// zeta/z block), profit p'x*.
inline OptimizationResult optimize_reformulated(const ReformulatedLp& refo,
                                                const ScenarioMatrix& Y, const ProfitVector& p,
                                                const lp::SolverOptions& solver_options = {}) {
    OptimizationResult result;
    result.method = "reformulation";
    const lp::LpSolution sol = lp::solve(refo.problem(), solver_options);
    result.lp_solves = 1;
    result.iterations = 1;
    switch (sol.status) {
        case lp::Status::Optimal: result.termination = Termination::Converged; break;
        case lp::Status::Infeasible: result.termination = Termination::InfeasibleTarget; break;
        default: result.termination = Termination::IterationLimit; break;
    }
    if (sol.status != lp::Status::Optimal) {
        result.final_solution = sol;
        return result;
    }

    result.x_star = sol.x.head(refo.instruments());
    result.profit = p.p.dot(result.x_star);
    const RiskVector r = risk_vector_from_terms(refo.terms(), refo.scenarios());
    result.achieved_risk = evaluate_risk(r, outcome_vector(Y, result.x_star));
    result.trace.push_back({0, result.profit, result.achieved_risk,
                            result.achieved_risk - refo.target_risk()});
    result.final_problem = refo.problem();
    result.final_solution = sol;
    return result;
}

} // namespace cvarcut
