#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "cvarcut/cutting_plane.hpp"
#include "cvarcut/risk.hpp"
#include "cvarcut/scenario.hpp"

namespace cvarcut::testing {

inline ScenarioMatrix random_scenarios(std::mt19937_64& gen, Index J, Index n, double lo = -10.0,
                                       double hi = 10.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    RowMatrix m(J, n);
    for (Index j = 0; j < J; ++j)
        for (Index i = 0; i < n; ++i) m(j, i) = u(gen);
    std::vector<std::string> names;
    for (Index i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    return ScenarioMatrix(std::move(m), names);
}

inline Vec box_optimum(const ProfitVector& p, const PositionBounds& b) {
    Vec x(p.p.size());
    for (Index i = 0; i < p.p.size(); ++i) x[i] = p.p[i] >= 0.0 ? b.upper[i] : b.lower[i];
    return x;
}

// A target that is feasible (witnessed by a sampled box point) yet strictly
// below the risk of the unconstrained profit optimum, so the risk row binds.
inline double binding_target(const ScenarioMatrix& Y, const ProfitVector& p,
                             const PositionBounds& b, const RiskVector& r,
                             std::uint64_t seed = 12345) {
    const double risk_at_opt = evaluate_risk(r, outcome_vector(Y, box_optimum(p, b)));
    double low = evaluate_risk(r, outcome_vector(Y, 0.5 * (b.lower + b.upper)));
    low = std::min(low, evaluate_risk(r, outcome_vector(Y, b.lower)));
    low = std::min(low, evaluate_risk(r, outcome_vector(Y, b.upper)));
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 16; ++rep) {
        Vec x(b.size());
        for (Index i = 0; i < b.size(); ++i) {
            x[i] = b.lower[i] + u01(gen) * (b.upper[i] - b.lower[i]);
        }
        low = std::min(low, evaluate_risk(r, outcome_vector(Y, x)));
    }
    if (low < risk_at_opt - 1e-9) return 0.5 * (low + risk_at_opt);
    return risk_at_opt; // degenerate instance, fall back to a non-binding cap
}

} // namespace cvarcut::testing
