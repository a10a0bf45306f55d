#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvarcut/lp/solve.hpp"
#include "cvarcut/risk.hpp"
#include "cvarcut/scenario.hpp"
#include "cvarcut/types.hpp"

namespace cvarcut {

// Componentwise box constraint on the position vector.
struct PositionBounds {
    Vec lower;
    Vec upper;

    PositionBounds(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.size() < 1) {
            throw std::invalid_argument("PositionBounds: lower/upper length mismatch");
        }
        if (!lower.allFinite() || !upper.allFinite()) {
            throw std::invalid_argument("PositionBounds: bounds must be finite");
        }
        for (Index i = 0; i < lower.size(); ++i) {
            if (lower[i] > upper[i]) {
                throw std::invalid_argument("PositionBounds: lower > upper at instrument " +
                                            std::to_string(i + 1));
            }
        }
    }

    static PositionBounds uniform(Index n, double lo, double hi) {
        return PositionBounds(Vec::Constant(n, lo), Vec::Constant(n, hi));
    }

    Index size() const { return lower.size(); }
};

// One aggregated tail constraint r' P_pi Y x <= R.
struct Cut {
    Vec coefficients;
    double rhs = 0.0;
    std::vector<Index> tail_set; // sorted scenario indices carrying nonzero weight
    long iteration_born = 0;
};

struct SolveConfig {
    double delta = 1e-6;          // relative risk tolerance
    long max_iterations = 0;      // cut rounds; 0 derives 10n + 1000
    bool verify = false;          // run the dual verification after convergence
    double tolerance_floor = 1e-12; // termination scale floor for targets near zero
    bool collect_trace = true;

    void validate() const {
        if (!(delta > 0.0)) throw std::invalid_argument("SolveConfig: delta must be positive");
        if (max_iterations < 0) {
            throw std::invalid_argument("SolveConfig: max_iterations must be nonnegative");
        }
    }
};

enum class Termination { Converged, IterationLimit, InfeasibleTarget };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::IterationLimit: return "iteration-limit";
        case Termination::InfeasibleTarget: return "infeasible-target";
    }
    return "unknown";
}

struct TraceEntry {
    long iteration = 0; // cut rounds completed before this solve
    double objective = 0.0;
    double achieved_risk = 0.0;
    double violation = 0.0; // achieved risk minus target
};

struct CuttingPlaneVerification {
    lp::VerificationReport lp_report;
    double risk_recheck_error = 0.0;   // |fresh sort-based risk - stored achieved risk|
    double termination_margin = 0.0;   // threshold - (achieved - target); >= 0 when converged
    bool verified = false;
};

struct OptimizationResult {
    Vec x_star;
    double achieved_risk = 0.0;
    double profit = 0.0;
    // Cut-generation rounds, reported with a floor of one so a run whose
    // relaxation is already feasible counts as a single iteration.
    long iterations = 0;
    long lp_solves = 0;
    std::vector<Cut> cuts;
    std::vector<TraceEntry> trace;
    std::optional<CuttingPlaneVerification> verification;
    Termination termination = Termination::IterationLimit;
    std::string method = "cutting-plane";

    // Final relaxation state, kept so the optional Step-6 style dual
    // verification can be (re)run against the exact LP that terminated.
    lp::LpProblem final_problem{1};
    lp::LpSolution final_solution;

    // Paper accounting: position box as 2n rows plus one row per cut.
    Index constraint_rows() const {
        return 2 * x_star.size() + static_cast<Index>(cuts.size());
    }
    Index variable_count() const { return x_star.size(); }
};

inline double termination_threshold(double target_risk, const SolveConfig& config) {
    return config.delta * std::max(std::abs(target_risk), config.tolerance_floor);
}

// Dual verification of a converged run: residual report of the final LP at
// the stored solution, a from-scratch re-sort of the achieved risk, and the
// termination inequality.
inline CuttingPlaneVerification verify(const ScenarioMatrix& Y, const RiskVector& r,
                                       double target_risk, const SolveConfig& config,
                                       const OptimizationResult& result) {
    if (result.termination != Termination::Converged) {
        throw std::invalid_argument("verify: result did not converge");
    }
    CuttingPlaneVerification v;
    lp::LpSolution claimed = result.final_solution;
    claimed.x = result.x_star; // never trust stored flags over the stored point
    v.lp_report = lp::duality_report(result.final_problem, claimed);

    const double fresh = evaluate_risk(r, outcome_vector(Y, result.x_star));
    v.risk_recheck_error = std::abs(fresh - result.achieved_risk);
    const double threshold = termination_threshold(target_risk, config);
    v.termination_margin = threshold - (fresh - target_risk);

    const double risk_scale = 1.0 + std::abs(result.achieved_risk);
    v.verified = v.lp_report.verified && v.risk_recheck_error <= 1e-9 * risk_scale &&
                 v.termination_margin >= -1e-9 * risk_scale;
    return v;
}

// The cutting-plane algorithm: start from the position box alone, then
// alternate LP solves with one violated tail cut per round until the
// achieved risk is within tolerance of the target.
//
// Termination is one-sided, achieved - target <= delta * max(|target|,
// floor): a relaxation can legitimately finish far below the target when the
// risk constraint is slack, and that outcome is optimal.
inline OptimizationResult optimize(const ScenarioMatrix& Y, const ProfitVector& p,
                                   const PositionBounds& bounds, const RiskVector& r,
                                   double target_risk, const SolveConfig& config = {}) {
    config.validate();
    const Index n = Y.instruments();
    const Index J = Y.scenarios();
    if (p.p.size() != n || bounds.size() != n) {
        throw std::invalid_argument("optimize: profit/bounds dimensions do not match scenarios");
    }
    if (r.size() != J) {
        throw std::invalid_argument("optimize: risk vector length does not match scenario count");
    }
    const long max_rounds = (config.max_iterations > 0)
                                ? config.max_iterations
                                : 10 * static_cast<long>(n) + 1000;
    const double threshold = termination_threshold(target_risk, config);

    lp::LpProblem problem(n);
    problem.set_objective(p.p);
    for (Index i = 0; i < n; ++i) problem.set_bounds(i, bounds.lower[i], bounds.upper[i]);

    OptimizationResult result;
    result.final_problem = problem;

    // A cut is determined by which scenarios land on each distinct weight
    // level of r, not by the tail set alone: a blended r can assign the same
    // scenarios to different levels across rounds and produce a genuinely
    // new cut. Duplicate detection keys on that partition.
    std::vector<Index> level_breaks; // k where a new weight level starts
    for (Index k = 0; k < r.tail_size(); ++k) {
        if (k == 0 || r.weights()[k] != r.weights()[k - 1]) level_breaks.push_back(k);
    }
    level_breaks.push_back(r.tail_size());
    const auto partition_key = [&](const TailOrdering& ordering) {
        std::vector<Index> key;
        key.reserve(static_cast<std::size_t>(r.tail_size()) + level_breaks.size());
        for (std::size_t g = 0; g + 1 < level_breaks.size(); ++g) {
            std::vector<Index> group(ordering.perm().begin() + level_breaks[g],
                                     ordering.perm().begin() + level_breaks[g + 1]);
            std::sort(group.begin(), group.end());
            key.push_back(-1); // group separator
            key.insert(key.end(), group.begin(), group.end());
        }
        return key;
    };
    std::set<std::vector<Index>> seen_partitions;
    lp::LpSolution sol;

    while (true) {
        sol = lp::solve(problem);
        ++result.lp_solves;
        if (sol.status == lp::Status::Infeasible) {
            result.termination = Termination::InfeasibleTarget;
            break;
        }
        if (sol.status != lp::Status::Optimal) {
            throw std::runtime_error(std::string("optimize: LP backend returned ") +
                                     lp::to_string(sol.status));
        }
        if (result.lp_solves == 1) {
            // The box relaxation has a closed-form solution; a mismatch
            // means the backend is broken, not the instance.
            for (Index i = 0; i < n; ++i) {
                const double expect = (p.p[i] > 0.0)   ? bounds.upper[i]
                                      : (p.p[i] < 0.0) ? bounds.lower[i]
                                                       : sol.x[i];
                if (std::abs(sol.x[i] - expect) > 1e-7 * (1.0 + std::abs(expect))) {
                    throw std::logic_error("optimize: box relaxation solution failed self-check");
                }
            }
        }

        const Vec outcomes = outcome_vector(Y, sol.x);
        const double achieved = evaluate_risk(r, outcomes);
        const double violation = achieved - target_risk;
        if (config.collect_trace) {
            result.trace.push_back({static_cast<long>(result.cuts.size()), sol.objective_value,
                                    achieved, violation});
        }
        result.x_star = sol.x;
        result.achieved_risk = achieved;
        result.profit = sol.objective_value;

        if (violation <= threshold) {
            result.termination = Termination::Converged;
            break;
        }
        if (static_cast<long>(result.cuts.size()) >= max_rounds) {
            result.termination = Termination::IterationLimit;
            break;
        }

        const TailOrdering ordering = tail_ordering(outcomes);
        if (!seen_partitions.insert(partition_key(ordering)).second) {
            // Exact cuts cannot revisit a weight-level partition while still
            // violating the target; cycling here means the tolerances are
            // inconsistent. Abort loudly rather than loop.
            throw std::logic_error(
                "optimize: cut partition repeated at round " + std::to_string(result.cuts.size()) +
                " (achieved risk " + std::to_string(achieved) + ", target " +
                std::to_string(target_risk) + ")");
        }
        std::vector<Index> tail(ordering.perm().begin(),
                                ordering.perm().begin() + r.tail_size());
        std::sort(tail.begin(), tail.end());

        Cut cut;
        cut.coefficients = cut_coefficients(r, ordering, Y);
        cut.rhs = target_risk;
        cut.tail_set = std::move(tail);
        cut.iteration_born = static_cast<long>(result.cuts.size());
        problem.add_row(cut.coefficients, lp::Sense::LessEqual, target_risk);
        result.cuts.push_back(std::move(cut));
    }

    result.iterations = std::max<long>(1, static_cast<long>(result.cuts.size()));
    result.final_problem = std::move(problem);
    result.final_solution = sol;
    if (config.verify && result.termination == Termination::Converged) {
        result.verification = verify(Y, r, target_risk, config, result);
    }
    return result;
}

} // namespace cvarcut
