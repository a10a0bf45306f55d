#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvarcut/cutting_plane.hpp"
#include "cvarcut/reformulation.hpp"

namespace cvarcut {

enum class Method { CuttingPlane, Reformulation };

inline const char* to_string(Method m) {
    return m == Method::CuttingPlane ? "cutting-plane" : "reformulation";
}

// d = min over the position box of mu_r(Yx), solved exactly as an LP:
// minimize the blended CVaR expression subject to the z-rows and the box,
// with no profit objective. Always feasible, so the left endpoint of the
// frontier domain is well defined.
inline double min_achievable_risk(const ScenarioMatrix& Y, const PositionBounds& bounds,
                                  const std::vector<CvarTerm>& terms,
                                  const lp::SolverOptions& solver_options = {}) {
    const Index n = Y.instruments();
    const Index J = Y.scenarios();
    if (bounds.size() != n) {
        throw std::invalid_argument("min_achievable_risk: bounds dimension mismatch");
    }
    for (const auto& t : terms) {
        if (t.return_period < 1 || J % t.return_period != 0) {
            throw std::invalid_argument("min_achievable_risk: return period must divide J");
        }
    }
    const Index num_terms = static_cast<Index>(terms.size());
    lp::LpProblem problem(n + num_terms * (J + 1));
    for (Index i = 0; i < n; ++i) problem.set_bounds(i, bounds.lower[i], bounds.upper[i]);

    auto zeta_col = [&](Index k) { return n + k * (J + 1); };
    auto z_col = [&](Index k, Index j) { return zeta_col(k) + 1 + j; };

    Vec objective = Vec::Zero(problem.num_vars());
    for (Index k = 0; k < num_terms; ++k) {
        const double m = static_cast<double>(J / terms[static_cast<std::size_t>(k)].return_period);
        const double w = terms[static_cast<std::size_t>(k)].weight;
        objective[zeta_col(k)] = -w;
        for (Index j = 0; j < J; ++j) {
            problem.set_bounds(z_col(k, j), 0.0, lp::kInfinity);
            objective[z_col(k, j)] = -w / m;
        }
    }
    problem.set_objective(std::move(objective));

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

    const auto sol = lp::solve(problem, solver_options);
    if (sol.status != lp::Status::Optimal) {
        throw std::runtime_error(std::string("min_achievable_risk: LP backend returned ") +
                                 lp::to_string(sol.status));
    }
    return -sol.objective_value;
}

struct FrontierPoint {
    double target_risk = 0.0;
    double profit = 0.0;
    double achieved_risk = 0.0;
    long iterations = 0;
    Method method = Method::CuttingPlane;
    std::string status = "ok"; // ok | infeasible | iteration-limit
};

// Exact frontier value f(R) by the reformulation.
inline double frontier_value(const ScenarioMatrix& Y, const ProfitVector& p,
                             const PositionBounds& bounds, const std::vector<CvarTerm>& terms,
                             double target_risk) {
    const auto res =
        optimize_reformulated(build_reformulation(Y, p, bounds, terms, target_risk), Y, p);
    if (res.termination != Termination::Converged) {
        throw std::runtime_error(std::string("frontier_value: solve ended with ") +
                                 to_string(res.termination));
    }
    return res.profit;
}

// Evenly spaced frontier segment between R_lo and R_hi, each point solved
// cold. Targets below the achievable minimum are flagged, not fatal: a user
// sweeping blindly still gets a usable report.
inline std::vector<FrontierPoint> sweep(const ScenarioMatrix& Y, const ProfitVector& p,
                                        const PositionBounds& bounds,
                                        const std::vector<CvarTerm>& terms, double r_lo,
                                        double r_hi, Index steps, Method method,
                                        const SolveConfig& config = {}) {
    if (steps < 2) throw std::invalid_argument("sweep: need at least two steps");
    if (!(r_lo <= r_hi)) throw std::invalid_argument("sweep: r_lo must not exceed r_hi");
    const RiskVector r = risk_vector_from_terms(terms, Y.scenarios());
    const double d = min_achievable_risk(Y, bounds, terms);
    const double d_tol = 1e-9 * (1.0 + std::abs(d));

    std::vector<FrontierPoint> points;
    points.reserve(static_cast<std::size_t>(steps));
    for (Index s = 0; s < steps; ++s) {
        const double target =
            r_lo + (r_hi - r_lo) * static_cast<double>(s) / static_cast<double>(steps - 1);
        FrontierPoint pt;
        pt.target_risk = target;
        pt.method = method;
        if (target < d - d_tol) {
            pt.status = "infeasible";
            points.push_back(pt);
            continue;
        }
        OptimizationResult res;
        if (method == Method::CuttingPlane) {
            res = optimize(Y, p, bounds, r, target, config);
        } else {
            res = optimize_reformulated(build_reformulation(Y, p, bounds, terms, target), Y, p);
        }
        switch (res.termination) {
            case Termination::Converged:
                pt.status = "ok";
                pt.profit = res.profit;
                pt.achieved_risk = res.achieved_risk;
                pt.iterations = res.iterations;
                break;
            case Termination::InfeasibleTarget: pt.status = "infeasible"; break;
            case Termination::IterationLimit: pt.status = "iteration-limit"; break;
        }
        points.push_back(pt);
    }
    return points;
}

inline void write_frontier_csv(const std::vector<FrontierPoint>& points,
                               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_frontier_csv: cannot open '" + path.string() + "'");
    }
    out << "target_risk,profit,achieved_risk,iterations,method,status\n";
    char buf[32];
    auto fmt = [&buf](double v) -> std::string {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    for (const auto& pt : points) {
        out << fmt(pt.target_risk) << ',' << fmt(pt.profit) << ',' << fmt(pt.achieved_risk) << ','
            << pt.iterations << ',' << to_string(pt.method) << ',' << pt.status << "\n";
    }
    if (!out) {
        throw std::runtime_error("write_frontier_csv: write to '" + path.string() + "' failed");
    }
}

} // namespace cvarcut
