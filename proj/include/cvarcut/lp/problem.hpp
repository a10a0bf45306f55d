#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvarcut/types.hpp"

namespace cvarcut::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

inline const char* to_string(Sense s) {
    switch (s) {
        case Sense::LessEqual: return "<=";
        case Sense::GreaterEqual: return ">=";
        case Sense::Equal: return "=";
    }
    return "?";
}

// One linear row, coefficients kept sparse: cutting-plane rows are short
// n-vectors, while reformulation audit rows at large J would not survive
// dense storage.
struct LpRow {
    std::vector<std::pair<Index, double>> coeffs; // strictly increasing indices
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

// A dense-variable LP in maximize form: maximize c'x subject to rows and
// per-variable bounds (+-infinity allowed). Plain value type; copies are
// independent.
class LpProblem {
public:
    explicit LpProblem(Index num_vars)
        : c_(Vec::Zero(num_vars)),
          lower_(Vec::Constant(num_vars, -kInfinity)),
          upper_(Vec::Constant(num_vars, kInfinity)) {
        if (num_vars < 1) {
            throw std::invalid_argument("LpProblem: need at least one variable");
        }
    }

    Index num_vars() const { return c_.size(); }
    Index num_rows() const { return static_cast<Index>(rows_.size()); }

    void set_objective(Vec c) {
        if (c.size() != num_vars()) {
            throw std::invalid_argument("LpProblem: objective length mismatch");
        }
        c_ = std::move(c);
    }
    const Vec& objective() const { return c_; }

    void set_bounds(Index j, double lo, double hi) {
        check_var(j);
        if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
            throw std::invalid_argument("LpProblem: invalid bounds for variable " +
                                        std::to_string(j));
        }
        lower_[j] = lo;
        upper_[j] = hi;
    }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

    Index add_row(const Vec& coefficients, Sense sense, double rhs) {
        if (coefficients.size() != num_vars()) {
            throw std::invalid_argument("LpProblem: row length " +
                                        std::to_string(coefficients.size()) + " does not match " +
                                        std::to_string(num_vars()) + " variables");
        }
        LpRow row;
        row.sense = sense;
        row.rhs = rhs;
        for (Index j = 0; j < coefficients.size(); ++j) {
            if (coefficients[j] != 0.0) row.coeffs.emplace_back(j, coefficients[j]);
        }
        rows_.push_back(std::move(row));
        return num_rows() - 1;
    }

    Index add_row_sparse(std::vector<std::pair<Index, double>> coeffs, Sense sense, double rhs) {
        Index prev = -1;
        for (const auto& [j, v] : coeffs) {
            check_var(j);
            if (j <= prev) {
                throw std::invalid_argument("LpProblem: sparse row indices must be strictly increasing");
            }
            prev = j;
            (void)v;
        }
        rows_.push_back(LpRow{std::move(coeffs), sense, rhs});
        return num_rows() - 1;
    }

    const LpRow& row(Index i) const { return rows_[static_cast<std::size_t>(i)]; }
    const std::vector<LpRow>& rows() const { return rows_; }

    double row_value(Index i, const Vec& x) const {
        double v = 0.0;
        for (const auto& [j, a] : row(i).coeffs) v += a * x[j];
        return v;
    }

private:
    void check_var(Index j) const {
        if (j < 0 || j >= num_vars()) {
            throw std::invalid_argument("LpProblem: variable index " + std::to_string(j) +
                                        " out of range");
        }
    }

    Vec c_;
    Vec lower_;
    Vec upper_;
    std::vector<LpRow> rows_;
};

struct LpSolution {
    Status status = Status::IterationLimit;
    Vec x;                       // structural variable values
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    Vec duals;                   // one multiplier per row, valid when Optimal
    Vec reduced_costs;           // c - A'y per structural variable, valid when Optimal
    long iterations = 0;
    std::string backend;
};

// Residual summary of a claimed optimal pair (x, y). All quantities are
// recomputed from the problem data, nothing in the solution is trusted, so a
// tampered solution shows up as a nonzero residual.
struct VerificationReport {
    double primal_infeasibility = 0.0;  // max row/bound violation, scaled by 1+|rhs|
    double dual_infeasibility = 0.0;    // max sign-condition violation of y and c-A'y
    double duality_gap = 0.0;           // |primal objective - dual objective|
    double complementarity = 0.0;       // max pairwise slack*multiplier product, scaled
    double feasibility_tolerance = 1e-9;
    double gap_tolerance = 1e-7;
    bool verified = false;
};

inline VerificationReport duality_report(const LpProblem& problem, const LpSolution& solution,
                                         double feasibility_tolerance = 1e-9,
                                         double gap_tolerance = 1e-7) {
    if (solution.status != Status::Optimal) {
        throw std::invalid_argument("duality_report: solution status is not Optimal");
    }
    if (solution.x.size() != problem.num_vars() || solution.duals.size() != problem.num_rows()) {
        throw std::invalid_argument("duality_report: solution does not match problem dimensions");
    }
    const Vec& x = solution.x;
    const Vec& y = solution.duals;
    const Vec& c = problem.objective();
    const Vec& lo = problem.lower();
    const Vec& up = problem.upper();

    VerificationReport rep;
    rep.feasibility_tolerance = feasibility_tolerance;
    rep.gap_tolerance = gap_tolerance;

    const double primal_obj = c.dot(x);
    const double obj_scale = 1.0 + std::abs(primal_obj);

    // Primal feasibility and row complementarity.
    double dual_obj = 0.0;
    for (Index i = 0; i < problem.num_rows(); ++i) {
        const LpRow& row = problem.row(i);
        const double v = problem.row_value(i, x);
        const double scale = 1.0 + std::abs(row.rhs);
        double viol = 0.0;
        double slack = 0.0;
        switch (row.sense) {
            case Sense::LessEqual:
                viol = std::max(0.0, v - row.rhs);
                slack = row.rhs - v;
                rep.dual_infeasibility = std::max(rep.dual_infeasibility, std::max(0.0, -y[i]));
                break;
            case Sense::GreaterEqual:
                viol = std::max(0.0, row.rhs - v);
                slack = v - row.rhs;
                rep.dual_infeasibility = std::max(rep.dual_infeasibility, std::max(0.0, y[i]));
                break;
            case Sense::Equal:
                viol = std::abs(v - row.rhs);
                slack = 0.0;
                break;
        }
        rep.primal_infeasibility = std::max(rep.primal_infeasibility, viol / scale);
        rep.complementarity = std::max(rep.complementarity, std::abs(y[i] * slack) / obj_scale);
        dual_obj += y[i] * row.rhs;
    }

    // Reduced costs in one pass over the rows.
    Vec d_all = c;
    for (Index i = 0; i < problem.num_rows(); ++i) {
        for (const auto& [k, a] : problem.row(i).coeffs) d_all[k] -= a * y[i];
    }
    const double cost_scale = 1.0 + c.cwiseAbs().maxCoeff();

    // Bound feasibility, reduced-cost signs and bound complementarity.
    for (Index j = 0; j < problem.num_vars(); ++j) {
        const double d = d_all[j];
        const double scale = 1.0 + std::max(std::abs(lo[j]) == kInfinity ? 0.0 : std::abs(lo[j]),
                                            std::abs(up[j]) == kInfinity ? 0.0 : std::abs(up[j]));
        rep.primal_infeasibility =
            std::max(rep.primal_infeasibility, std::max(0.0, lo[j] - x[j]) / scale);
        rep.primal_infeasibility =
            std::max(rep.primal_infeasibility, std::max(0.0, x[j] - up[j]) / scale);

        // For a maximize problem the reduced cost is charged to the bound it
        // pushes against: d > 0 to the upper bound, d < 0 to the lower.
        if (d > 0.0) {
            if (up[j] == kInfinity) {
                rep.dual_infeasibility = std::max(rep.dual_infeasibility, d);
            } else {
                dual_obj += d * up[j];
                rep.complementarity =
                    std::max(rep.complementarity, std::abs(d * (up[j] - x[j])) / obj_scale);
            }
        } else if (d < 0.0) {
            if (lo[j] == -kInfinity) {
                rep.dual_infeasibility = std::max(rep.dual_infeasibility, -d);
            } else {
                dual_obj += d * lo[j];
                rep.complementarity =
                    std::max(rep.complementarity, std::abs(d * (x[j] - lo[j])) / obj_scale);
            }
        }
    }

    rep.dual_infeasibility /= cost_scale;
    rep.duality_gap = std::abs(primal_obj - dual_obj);
    rep.verified = rep.primal_infeasibility <= 10.0 * feasibility_tolerance &&
                   rep.dual_infeasibility <= 10.0 * feasibility_tolerance &&
                   rep.duality_gap <= gap_tolerance * obj_scale &&
                   rep.complementarity <= 10.0 * gap_tolerance;
    return rep;
}

// Debug dump, one item per line with 17-significant-digit decimal values:
//   maximize / <j> <c_j>            objective terms
//   row <sense> <rhs> / <j> <a_j>   one block per row
//   bound <j> <lo> <hi>             "-inf"/"inf" for absent bounds
// Intended for cross-checks against external solvers.
inline void dump(const LpProblem& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("lp::dump: cannot open '" + path.string() + "'");
    }
    char buf[64];
    auto fmt = [&buf](double v) -> std::string {
        if (v == kInfinity) return "inf";
        if (v == -kInfinity) return "-inf";
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    };
    out << "maximize\n";
    for (Index j = 0; j < problem.num_vars(); ++j) {
        if (problem.objective()[j] != 0.0) {
            out << "  " << j << " " << fmt(problem.objective()[j]) << "\n";
        }
    }
    for (Index i = 0; i < problem.num_rows(); ++i) {
        const auto& row = problem.row(i);
        out << "row " << to_string(row.sense) << " " << fmt(row.rhs) << "\n";
        for (const auto& [j, a] : row.coeffs) {
            out << "  " << j << " " << fmt(a) << "\n";
        }
    }
    for (Index j = 0; j < problem.num_vars(); ++j) {
        out << "bound " << j << " " << fmt(problem.lower()[j]) << " " << fmt(problem.upper()[j])
            << "\n";
    }
}

} // namespace cvarcut::lp
