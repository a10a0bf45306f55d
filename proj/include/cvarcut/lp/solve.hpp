#pragma once

#include "cvarcut/lp/interior_point.hpp"
#include "cvarcut/lp/problem.hpp"
#include "cvarcut/lp/simplex.hpp"

namespace cvarcut::lp {

enum class Backend { Auto, Simplex, InteriorPoint };

struct SolverOptions {
    Backend backend = Backend::Auto;
    // Auto picks the simplex up to this many rows. Above it the explicit
    // basis inverse stops paying for itself and the interior-point solver
    // takes over.
    Index simplex_row_limit = 600;
    double feasibility_tolerance = 1e-9;
    long max_iterations = 0;
};

inline LpSolution solve(const LpProblem& problem, const SolverOptions& options = {}) {
    Backend backend = options.backend;
    if (backend == Backend::Auto) {
        backend = (problem.num_rows() <= options.simplex_row_limit) ? Backend::Simplex
                                                                    : Backend::InteriorPoint;
    }
    if (backend == Backend::Simplex) {
        SimplexOptions so;
        so.feasibility_tolerance = options.feasibility_tolerance;
        so.optimality_tolerance = options.feasibility_tolerance;
        if (options.max_iterations > 0) so.max_iterations = options.max_iterations;
        return solve_simplex(problem, so);
    }
    InteriorPointOptions io;
    if (options.max_iterations > 0) io.max_iterations = static_cast<int>(options.max_iterations);
    return solve_interior_point(problem, io);
}

} // namespace cvarcut::lp
