#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvarcut/scenario.hpp"
#include "cvarcut/types.hpp"

namespace cvarcut {

// Non-positive weight vector r defining the risk metric
//
//   mu_r(y) = max over permutations pi of r' P_pi y,
//
// realized by pairing r with y sorted nondecreasing. The constructor requires
// r nondecreasing (most negative weights first); with both sequences sorted
// compatibly the sorted pairing attains the permutation maximum, so the
// evaluator never has to search.
class RiskVector {
public:
    RiskVector(Vec weights, std::string description)
        : r_(std::move(weights)), description_(std::move(description)) {
        if (r_.size() < 1 || !r_.allFinite()) {
            throw std::invalid_argument("RiskVector: weights must be finite and non-empty");
        }
        for (Index j = 0; j < r_.size(); ++j) {
            if (r_[j] > 0.0) {
                throw std::invalid_argument("RiskVector: component " + std::to_string(j + 1) +
                                            " is positive");
            }
            if (j > 0 && r_[j] < r_[j - 1]) {
                throw std::invalid_argument("RiskVector: components must be nondecreasing");
            }
        }
        tail_size_ = 0;
        while (tail_size_ < r_.size() && r_[tail_size_] < 0.0) ++tail_size_;
    }

    const Vec& weights() const { return r_; }
    const std::string& description() const { return description_; }
    Index size() const { return r_.size(); }
    // Number of leading nonzero weights; everything after is exactly zero.
    Index tail_size() const { return tail_size_; }

private:
    Vec r_;
    std::string description_;
    Index tail_size_;
};

// CVaR risk vector at return period rho: the first J/rho components are
// -rho/J, the rest zero. Components sum to -1.
inline RiskVector make_cvar_vector(Index scenarios, Index return_period) {
    if (scenarios < 1 || return_period < 1) {
        throw std::invalid_argument("make_cvar_vector: J and rho must be at least 1");
    }
    if (scenarios % return_period != 0) {
        throw std::invalid_argument("make_cvar_vector: return period must divide scenario count (J=" +
                                    std::to_string(scenarios) + ", rho=" +
                                    std::to_string(return_period) + ")");
    }
    const Index tail = scenarios / return_period;
    Vec r = Vec::Zero(scenarios);
    r.head(tail).setConstant(-static_cast<double>(return_period) / static_cast<double>(scenarios));
    return RiskVector(std::move(r), "CVaR rp=" + std::to_string(return_period));
}

// Componentwise weighted sum of risk vectors. Nonnegative weights on
// nondecreasing non-positive vectors preserve both properties.
inline RiskVector blend(const std::vector<double>& weights, const std::vector<RiskVector>& vectors) {
    if (weights.empty() || weights.size() != vectors.size()) {
        throw std::invalid_argument("blend: need one weight per risk vector");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("blend: weights must be nonnegative");
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("blend: at least one weight must be positive");
    }
    const Index J = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != J) {
            throw std::invalid_argument("blend: risk vectors must share one scenario count");
        }
    }
    Vec r = Vec::Zero(J);
    std::string desc;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        r += weights[k] * vectors[k].weights();
        if (k > 0) desc += " + ";
        desc += std::to_string(weights[k]) + "*(" + vectors[k].description() + ")";
    }
    return RiskVector(std::move(r), std::move(desc));
}

// Permutation sorting a vector nondecreasing; ties keep original index order
// so cuts are deterministic across runs and platforms.
class TailOrdering {
public:
    explicit TailOrdering(const Vec& y) : perm_(static_cast<std::size_t>(y.size())) {
        if (!y.allFinite()) {
            throw std::invalid_argument("TailOrdering: entries must be finite");
        }
        std::iota(perm_.begin(), perm_.end(), Index{0});
        std::stable_sort(perm_.begin(), perm_.end(),
                         [&y](Index a, Index b) { return y[a] < y[b]; });
    }

    // perm()[k] is the index of the k-th smallest source entry.
    const std::vector<Index>& perm() const { return perm_; }
    Index size() const { return static_cast<Index>(perm_.size()); }

private:
    std::vector<Index> perm_;
};

inline TailOrdering tail_ordering(const Vec& y) { return TailOrdering(y); }

// mu_r(y) = r' y' with y' the sorted outcome vector; equals the Eq. (1)
// permutation maximum for any nondecreasing non-positive r.
inline double evaluate_risk(const RiskVector& r, const Vec& y) {
    if (y.size() != r.size()) {
        throw std::invalid_argument("evaluate_risk: outcome vector has length " +
                                    std::to_string(y.size()) + ", expected " +
                                    std::to_string(r.size()));
    }
    // Only the tail weights are nonzero; a full sort of the tail candidates
    // suffices. nth_element splits out the tail, then the tail is sorted.
    const Index m = r.tail_size();
    if (m == 0) return 0.0;
    std::vector<double> values(y.data(), y.data() + y.size());
    if (m < y.size()) {
        std::nth_element(values.begin(), values.begin() + (m - 1), values.end());
    }
    std::sort(values.begin(), values.begin() + m);
    double risk = 0.0;
    for (Index k = 0; k < m; ++k) {
        risk += r.weights()[k] * values[static_cast<std::size_t>(k)];
    }
    return risk;
}

// Aggregated cut coefficients c with c_i = sum_k r_k * Y[perm(k), i]: the
// row of the permutation constraint r' P_pi Y x <= R for the given tail
// ordering, collapsed to n numbers. c' x equals mu_r(Yx) at the position
// that produced the ordering and under-estimates it everywhere else.
inline Vec cut_coefficients(const RiskVector& r, const TailOrdering& ordering,
                            const ScenarioMatrix& Y) {
    if (r.size() != Y.scenarios() || ordering.size() != Y.scenarios()) {
        throw std::invalid_argument("cut_coefficients: risk vector, ordering and scenario count disagree");
    }
    Vec c = Vec::Zero(Y.instruments());
    for (Index k = 0; k < r.tail_size(); ++k) {
        c += r.weights()[k] * Y.values().row(ordering.perm()[static_cast<std::size_t>(k)]).transpose();
    }
    return c;
}

// One CVaR term of a blended risk metric.
struct CvarTerm {
    Index return_period = 0;
    double weight = 0.0;
};

// Risk specification string for CLI/config: comma-separated
// return_period:weight pairs, e.g. "100:0.5,1000:0.5".
inline std::vector<CvarTerm> parse_cvar_terms(const std::string& spec) {
    std::vector<CvarTerm> terms;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t end = spec.find(',', start);
        if (end == std::string::npos) end = spec.size();
        const std::string item = spec.substr(start, end - start);
        const std::size_t colon = item.find(':');
        if (item.empty() || colon == std::string::npos) {
            throw std::invalid_argument("risk spec '" + spec +
                                        "': expected comma-separated return_period:weight pairs");
        }
        try {
            terms.push_back({static_cast<Index>(std::stoll(item.substr(0, colon))),
                             std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw std::invalid_argument("risk spec '" + spec + "': cannot parse '" + item + "'");
        }
        if (end == spec.size()) break;
        start = end + 1;
    }
    return terms;
}

inline RiskVector risk_vector_from_terms(const std::vector<CvarTerm>& terms, Index scenarios) {
    std::vector<double> weights;
    std::vector<RiskVector> parts;
    for (const auto& t : terms) {
        weights.push_back(t.weight);
        parts.push_back(make_cvar_vector(scenarios, t.return_period));
    }
    return blend(weights, parts);
}

inline RiskVector parse_risk_spec(const std::string& spec, Index scenarios) {
    return risk_vector_from_terms(parse_cvar_terms(spec), scenarios);
}

} // namespace cvarcut
