#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cvarcut/lp/problem.hpp"
#include "cvarcut/types.hpp"

namespace cvarcut::lp {

struct InteriorPointOptions {
    double primal_tolerance = 1e-10; // on ||b - Av|| / (1 + ||b||)
    double dual_tolerance = 1e-9;    // on ||c - A'y - zl + zu|| / (1 + ||c||)
    double gap_tolerance = 1e-9;     // on complementarity / (1 + |obj|)
    int max_iterations = 150;
    int verbosity = 0; // > 0: per-iteration progress on stderr
};

// Mehrotra predictor-corrector interior-point method for the same problem
// contract as the simplex backend.
//
// Built for the reformulated CVaR LPs, whose normal matrix A*Theta*A' is a
// sparse (near-diagonal) part plus a handful of dense columns: the position
// columns touch every scenario row. Dense columns are split out and handled
// by a Woodbury correction around a sparse LDLT of the remainder; without
// the split the normal matrix fills in completely and J=10^5-scale
// instances stop fitting in memory. Small problems assemble the normal
// matrix densely instead.
//
// Free variables (the zeta auxiliaries) carry no barrier term. They are
// solved natively through a small Schur complement on top of the normal
// solve; folding them into the barrier (synthetic box or a +/- split) makes
// the normal matrix singular exactly in the endgame. Fixed variables are
// substituted out. The solver never reports Infeasible: on stalls the
// status is IterationLimit, and callers that need an exact infeasibility
// certificate use the simplex backend.
class InteriorPointSolver {
public:
    explicit InteriorPointSolver(const LpProblem& problem, InteriorPointOptions options = {})
        : problem_(problem), opts_(options) {
        build();
    }

    LpSolution solve() {
        LpSolution result;
        result.backend = "interior-point";
        if (m_ == 0) {
            // Pure bound problem; no normal matrix to form.
            result.status = Status::IterationLimit;
            return result;
        }

        initialize_iterates();

        // The endgame can break down numerically after the iterate is
        // already excellent; keep the best point seen and accept it on exit
        // if it clears the acceptance gates. The gates are per-residual:
        // primal feasibility is a hard promise of the result, the gap bounds
        // the suboptimality, while dual-residual noise merely degrades the
        // reported multipliers and may sit a little higher.
        constexpr double kAcceptPrimal = 1e-8;
        constexpr double kAcceptDual = 1e-5;
        constexpr double kAcceptGap = 1e-7;
        double best_score = kInfinity;
        Vec best_v, best_y;
        int stalled = 0;

        int iter = 0;
        for (; iter < opts_.max_iterations; ++iter) {
            compute_residuals();
            const double obj = cost_.dot(v_);
            const double rel_p = rp_.cwiseAbs().maxCoeff() / (1.0 + b_norm_);
            const double rel_d = rd_.cwiseAbs().maxCoeff() / (1.0 + c_norm_);
            const double compl_total = complementarity();
            const double rel_g = compl_total / (1.0 + std::abs(obj));
            const double score =
                std::max({rel_p / kAcceptPrimal, rel_d / kAcceptDual, rel_g / kAcceptGap});
            if (opts_.verbosity > 0) {
                std::fprintf(stderr, "ipm %3d: obj %.10e rp %.2e rd %.2e gap %.2e\n", iter, -obj,
                             rel_p, rel_d, rel_g);
            }
            if (score < best_score && v_.allFinite()) {
                best_score = score;
                best_v = v_;
                best_y = y_;
                stalled = 0;
            } else if (++stalled >= 8) {
                break; // diverging from the best point; stop burning iterations
            }
            if (rel_p <= opts_.primal_tolerance && rel_d <= opts_.dual_tolerance &&
                rel_g <= opts_.gap_tolerance) {
                extract(result);
                result.iterations = iter;
                return result;
            }
            if (!v_.allFinite() || v_.cwiseAbs().maxCoeff() > 1e13 * (1.0 + data_scale_)) {
                break;
            }

            const double mu = compl_total / static_cast<double>(num_sides_);
            prepare_scaling();
            factorize_normal_matrix();

            // Affine (predictor) direction.
            Vec rcl = Vec::Zero(nv_), rcu = Vec::Zero(nv_);
            for (Index j = 0; j < nv_; ++j) {
                if (has_lo_[j]) rcl[j] = -gl_[j] * zl_[j];
                if (has_up_[j]) rcu[j] = -gu_[j] * zu_[j];
            }
            Vec dv_a, dy_a, dzl_a, dzu_a;
            solve_newton(rcl, rcu, dv_a, dy_a, dzl_a, dzu_a);
            const auto [apa, ada] = max_steps(dv_a, dzl_a, dzu_a);

            // Centering parameter from the affine complementarity.
            double compl_aff = 0.0;
            for (Index j = 0; j < nv_; ++j) {
                if (has_lo_[j]) compl_aff += (gl_[j] + apa * dv_a[j]) * (zl_[j] + ada * dzl_a[j]);
                if (has_up_[j]) compl_aff += (gu_[j] - apa * dv_a[j]) * (zu_[j] + ada * dzu_a[j]);
            }
            const double mu_aff = compl_aff / static_cast<double>(num_sides_);
            double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3);
            if (!std::isfinite(sigma)) sigma = 0.5;
            sigma = std::clamp(sigma, 1e-8, 0.9999);

            // Corrector direction with Mehrotra's second-order term.
            for (Index j = 0; j < nv_; ++j) {
                if (has_lo_[j]) rcl[j] = sigma * mu - gl_[j] * zl_[j] - dv_a[j] * dzl_a[j];
                if (has_up_[j]) rcu[j] = sigma * mu - gu_[j] * zu_[j] + dv_a[j] * dzu_a[j];
            }
            Vec dv, dy, dzl, dzu;
            solve_newton(rcl, rcu, dv, dy, dzl, dzu);
            auto [ap, ad] = max_steps(dv, dzl, dzu);
            ap = std::min(1.0, 0.9995 * ap);
            ad = std::min(1.0, 0.9995 * ad);
            if (ap < 1e-12 && ad < 1e-12) break; // stalled

            v_ += ap * dv;
            y_ += ad * dy;
            zl_ += ad * dzl;
            zu_ += ad * dzu;
            refresh_gaps();
        }

        // No in-loop accept: fall back to the best iterate if it clears the
        // acceptance gates.
        if (best_score <= 1.0) {
            v_ = best_v;
            y_ = best_y;
            extract(result);
            result.iterations = iter;
            return result;
        }
        result.status = Status::IterationLimit;
        result.iterations = iter;
        return result;
    }

private:
    struct VarMap {
        enum class Kind { Plain, Fixed } kind = Kind::Plain;
        Index idx = -1;
        double fixed_value = 0.0;
    };

    void build() {
        const Index n = problem_.num_vars();
        m_ = problem_.num_rows();
        var_map_.resize(static_cast<std::size_t>(n));

        std::vector<double> lo, up;
        std::vector<char> hasl, hasu;
        auto push_var = [&](double l, double u) -> Index {
            lo.push_back(l);
            up.push_back(u);
            hasl.push_back(l > -kInfinity);
            hasu.push_back(u < kInfinity);
            return static_cast<Index>(lo.size()) - 1;
        };

        b_ = Vec(m_);
        for (Index i = 0; i < m_; ++i) b_[i] = problem_.row(i).rhs;

        for (Index j = 0; j < n; ++j) {
            const double l = problem_.lower()[j];
            const double u = problem_.upper()[j];
            auto& vm = var_map_[static_cast<std::size_t>(j)];
            if (l == u) {
                vm.kind = VarMap::Kind::Fixed;
                vm.fixed_value = l;
            } else {
                vm.kind = VarMap::Kind::Plain;
                vm.idx = push_var(l, u);
            }
        }
        const Index n_struct_internal = static_cast<Index>(lo.size());

        // Slack per row. Equality rows get an inert placeholder (no column,
        // no bounds) so slack indices stay aligned without feeding a
        // zero-width interval into the barrier.
        slack_base_ = n_struct_internal;
        for (Index i = 0; i < m_; ++i) {
            switch (problem_.row(i).sense) {
                case Sense::LessEqual: push_var(0.0, kInfinity); break;
                case Sense::GreaterEqual: push_var(-kInfinity, 0.0); break;
                case Sense::Equal: push_var(-kInfinity, kInfinity); break;
            }
        }
        nv_ = static_cast<Index>(lo.size());
        lo_ = Eigen::Map<Vec>(lo.data(), nv_);
        up_ = Eigen::Map<Vec>(up.data(), nv_);
        has_lo_ = hasl;
        has_up_ = hasu;

        cols_.resize(static_cast<std::size_t>(nv_));
        for (Index i = 0; i < m_; ++i) {
            for (const auto& [j, a] : problem_.row(i).coeffs) {
                const auto& vm = var_map_[static_cast<std::size_t>(j)];
                if (vm.kind == VarMap::Kind::Fixed) {
                    b_[i] -= a * vm.fixed_value;
                } else {
                    cols_[static_cast<std::size_t>(vm.idx)].emplace_back(i, a);
                }
            }
            const Index sj = slack_base_ + i;
            if (problem_.row(i).sense != Sense::Equal) {
                cols_[static_cast<std::size_t>(sj)].emplace_back(i, 1.0);
            }
        }

        // Internal minimize costs.
        cost_ = Vec::Zero(nv_);
        for (Index j = 0; j < n; ++j) {
            const auto& vm = var_map_[static_cast<std::size_t>(j)];
            if (vm.kind == VarMap::Kind::Plain) cost_[vm.idx] = -problem_.objective()[j];
        }

        // Barrier-free variables: no finite side and a nonzero column. The
        // inert equality placeholders (empty columns) stay out of both the
        // barrier and the free block.
        free_cols_.clear();
        is_free_.assign(static_cast<std::size_t>(nv_), 0);
        for (Index j = 0; j < nv_; ++j) {
            if (!has_lo_[j] && !has_up_[j] && !cols_[static_cast<std::size_t>(j)].empty()) {
                free_cols_.push_back(j);
                is_free_[static_cast<std::size_t>(j)] = 1;
            }
        }

        b_norm_ = (m_ > 0) ? b_.cwiseAbs().maxCoeff() : 0.0;
        c_norm_ = cost_.cwiseAbs().maxCoeff();
        double bound_scale = 0.0;
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) bound_scale = std::max(bound_scale, std::abs(lo_[j]));
            if (has_up_[j]) bound_scale = std::max(bound_scale, std::abs(up_[j]));
        }
        data_scale_ = std::max({1.0, b_norm_, c_norm_, bound_scale});

        // Dense-column split for the Woodbury path (barriered columns only).
        use_dense_normal_ = m_ <= 512;
        const Index dense_threshold = std::max<Index>(32, m_ / 8);
        dense_cols_.clear();
        is_dense_col_.assign(static_cast<std::size_t>(nv_), 0);
        if (!use_dense_normal_) {
            for (Index j = 0; j < nv_; ++j) {
                if (is_free_[static_cast<std::size_t>(j)]) continue;
                if (static_cast<Index>(cols_[static_cast<std::size_t>(j)].size()) > dense_threshold) {
                    dense_cols_.push_back(j);
                    is_dense_col_[static_cast<std::size_t>(j)] = 1;
                }
            }
            if (static_cast<Index>(dense_cols_.size()) > std::max<Index>(2048, m_ / 2)) {
                use_dense_normal_ = true;
                dense_cols_.clear();
                std::fill(is_dense_col_.begin(), is_dense_col_.end(), 0);
            }
        }
        if (!use_dense_normal_) {
            sparse_pattern_ready_ = false;
            U_ = Eigen::MatrixXd::Zero(m_, static_cast<Index>(dense_cols_.size()));
            for (Index k = 0; k < static_cast<Index>(dense_cols_.size()); ++k) {
                for (const auto& [i, a] : cols_[static_cast<std::size_t>(dense_cols_[k])]) {
                    U_(i, k) = a;
                }
            }
        }
        F_ = Eigen::MatrixXd::Zero(m_, static_cast<Index>(free_cols_.size()));
        for (Index k = 0; k < static_cast<Index>(free_cols_.size()); ++k) {
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(free_cols_[k])]) {
                F_(i, k) = a;
            }
        }
    }

    void initialize_iterates() {
        // Two-pass start: place boxed variables mid-box, probe the row
        // residuals, then open every one-sided variable by the residual
        // magnitude. Starting slacks far below the scale of A*v stalls the
        // method in a long infeasibility plateau.
        v_ = Vec::Zero(nv_);
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j] && has_up_[j]) {
                v_[j] = 0.5 * (lo_[j] + up_[j]);
                if (up_[j] - lo_[j] < 1e-12) v_[j] = lo_[j];
            } else if (has_lo_[j]) {
                v_[j] = lo_[j];
            } else if (has_up_[j]) {
                v_[j] = up_[j];
            }
        }
        Vec probe = b_;
        for (Index j = 0; j < nv_; ++j) {
            if (v_[j] == 0.0) continue;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) probe[i] -= a * v_[j];
        }
        start_shift_ = 1.0 + ((m_ > 0) ? probe.cwiseAbs().maxCoeff() : 0.0);
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j] && has_up_[j]) continue;
            if (has_lo_[j]) {
                v_[j] = lo_[j] + start_shift_;
            } else if (has_up_[j]) {
                v_[j] = up_[j] - start_shift_;
            }
        }
        y_ = Vec::Zero(m_);
        const double z0 = 1.0 + 0.1 * c_norm_;
        zl_ = Vec::Zero(nv_);
        zu_ = Vec::Zero(nv_);
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) zl_[j] = z0;
            if (has_up_[j]) zu_[j] = z0;
        }
        refresh_gaps();
        num_sides_ = 0;
        for (Index j = 0; j < nv_; ++j) {
            num_sides_ += (has_lo_[j] ? 1 : 0) + (has_up_[j] ? 1 : 0);
        }
    }

    void refresh_gaps() {
        gl_ = Vec::Zero(nv_);
        gu_ = Vec::Zero(nv_);
        const double floor = 1e-13 * (1.0 + data_scale_);
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) gl_[j] = std::max(v_[j] - lo_[j], floor);
            if (has_up_[j]) gu_[j] = std::max(up_[j] - v_[j], floor);
        }
    }

    void compute_residuals() {
        rp_ = b_;
        for (Index j = 0; j < nv_; ++j) {
            if (v_[j] == 0.0) continue;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) rp_[i] -= a * v_[j];
        }
        rd_ = cost_;
        for (Index j = 0; j < nv_; ++j) {
            double aty = 0.0;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) aty += a * y_[i];
            rd_[j] -= aty;
            if (has_lo_[j]) rd_[j] -= zl_[j];
            if (has_up_[j]) rd_[j] += zu_[j];
        }
    }

    double complementarity() const {
        double total = 0.0;
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) total += gl_[j] * zl_[j];
            if (has_up_[j]) total += gu_[j] * zu_[j];
        }
        return total;
    }

    void prepare_scaling() {
        theta_ = Vec::Zero(nv_);
        for (Index j = 0; j < nv_; ++j) {
            if (is_free_[static_cast<std::size_t>(j)]) continue;
            double inv = 0.0;
            if (has_lo_[j]) inv += zl_[j] / gl_[j];
            if (has_up_[j]) inv += zu_[j] / gu_[j];
            theta_[j] = (inv > 0.0) ? 1.0 / inv : 0.0; // inert placeholders stay at zero
        }
    }

    void factorize_normal_matrix() {
        if (use_dense_normal_) {
            // Small problems: factor the augmented system [[M, F], [F', 0]]
            // whole. The Schur route used on the large path loses precision
            // here whenever a nearly singular M meets the free block.
            const Index kf = static_cast<Index>(free_cols_.size());
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m_ + kf, m_ + kf);
            for (Index j = 0; j < nv_; ++j) {
                if (is_free_[static_cast<std::size_t>(j)]) continue;
                const auto& col = cols_[static_cast<std::size_t>(j)];
                for (const auto& [i1, a1] : col) {
                    for (const auto& [i2, a2] : col) {
                        K(i1, i2) += theta_[j] * a1 * a2;
                    }
                }
            }
            const double reg = 1e-13 * (1.0 + K.diagonal().maxCoeff());
            for (Index i = 0; i < m_; ++i) K(i, i) += reg;
            K.topRightCorner(m_, kf) = F_;
            K.bottomLeftCorner(kf, m_) = F_.transpose();
            for (Index k = 0; k < kf; ++k) K(m_ + k, m_ + k) = -reg;
            dense_kkt_lu_.compute(K);
            return;
        }
        {
            std::vector<Eigen::Triplet<double>> trips;
            for (Index j = 0; j < nv_; ++j) {
                if (is_free_[static_cast<std::size_t>(j)] ||
                    is_dense_col_[static_cast<std::size_t>(j)]) {
                    continue;
                }
                const auto& col = cols_[static_cast<std::size_t>(j)];
                for (const auto& [i1, a1] : col) {
                    for (const auto& [i2, a2] : col) {
                        trips.emplace_back(static_cast<int>(i1), static_cast<int>(i2),
                                           theta_[j] * a1 * a2);
                    }
                }
            }
            double max_theta = 1.0;
            for (Index j = 0; j < nv_; ++j) max_theta = std::max(max_theta, theta_[j]);
            reg_ = 1e-14 * max_theta;
            for (Index i = 0; i < m_; ++i) {
                trips.emplace_back(static_cast<int>(i), static_cast<int>(i), reg_);
            }
            Eigen::SparseMatrix<double> S(m_, m_);
            S.setFromTriplets(trips.begin(), trips.end());
            if (!sparse_pattern_ready_) {
                sparse_ldlt_.analyzePattern(S);
                sparse_pattern_ready_ = true;
            }
            sparse_ldlt_.factorize(S);

            const Index k = static_cast<Index>(dense_cols_.size());
            if (k > 0) {
                sinv_U_ = sparse_ldlt_.solve(U_);
                Eigen::MatrixXd G = U_.transpose() * sinv_U_;
                for (Index kk = 0; kk < k; ++kk) {
                    G(kk, kk) += 1.0 / theta_[dense_cols_[static_cast<std::size_t>(kk)]];
                }
                woodbury_ldlt_.compute(G);
            }
        }

        // Free-variable Schur block on top of the normal solve (sparse
        // path; the dense path folds F into the full KKT factor).
        const Index kf = static_cast<Index>(free_cols_.size());
        if (kf > 0) {
            minv_F_ = Eigen::MatrixXd(m_, kf);
            for (Index k = 0; k < kf; ++k) minv_F_.col(k) = solve_normal(F_.col(k));
            free_schur_ldlt_.compute(F_.transpose() * minv_F_);
        }
    }

    // One solve with M = A_B Theta A_B' (sparse path only).
    Vec solve_normal(const Vec& r) const {
        Vec t = sparse_ldlt_.solve(r);
        if (!dense_cols_.empty()) {
            const Vec correction = woodbury_ldlt_.solve(U_.transpose() * t);
            t -= sinv_U_ * correction;
        }
        return t;
    }

    // Apply the exact (unregularized) M, for iterative refinement.
    Vec apply_normal(const Vec& p) const {
        Vec result = Vec::Zero(m_);
        for (Index j = 0; j < nv_; ++j) {
            if (is_free_[static_cast<std::size_t>(j)]) continue;
            const auto& col = cols_[static_cast<std::size_t>(j)];
            double ap = 0.0;
            for (const auto& [i, a] : col) ap += a * p[i];
            if (ap == 0.0) continue;
            const double w = theta_[j] * ap;
            for (const auto& [i, a] : col) result[i] += a * w;
        }
        return result;
    }

    Vec solve_normal_refined(const Vec& r) const {
        Vec t = solve_normal(r);
        for (int pass = 0; pass < 2; ++pass) {
            const Vec res = r - apply_normal(t);
            if (res.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + r.cwiseAbs().maxCoeff())) break;
            t += solve_normal(res);
        }
        return t;
    }

    // Newton system with the free block:
    //   M dy + F dv_F = rbar,  F' dy = rd_F,
    // solved whole on the small dense path and by Schur complement on the
    // large sparse path.
    void solve_newton(const Vec& rcl, const Vec& rcu, Vec& dv, Vec& dy, Vec& dzl, Vec& dzu) {
        Vec rhat(nv_);
        for (Index j = 0; j < nv_; ++j) {
            double r = rd_[j];
            if (has_lo_[j]) r -= rcl[j] / gl_[j];
            if (has_up_[j]) r += rcu[j] / gu_[j];
            rhat[j] = r;
        }
        Vec rbar = rp_;
        for (Index j = 0; j < nv_; ++j) {
            if (is_free_[static_cast<std::size_t>(j)]) continue;
            const double w = theta_[j] * rhat[j];
            if (w == 0.0) continue;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) rbar[i] += a * w;
        }

        const Index kf = static_cast<Index>(free_cols_.size());
        Vec rd_free(kf);
        for (Index k = 0; k < kf; ++k) {
            rd_free[k] = rd_[free_cols_[static_cast<std::size_t>(k)]];
        }
        Vec dv_free(kf);
        if (use_dense_normal_) {
            Vec rhs(m_ + kf);
            rhs.head(m_) = rbar;
            rhs.tail(kf) = rd_free;
            const Vec full = dense_kkt_lu_.solve(rhs);
            dy = full.head(m_);
            dv_free = full.tail(kf);
        } else if (kf > 0) {
            const Vec minv_rbar = solve_normal_refined(rbar);
            dv_free = free_schur_ldlt_.solve(F_.transpose() * minv_rbar - rd_free);
            dy = solve_normal_refined(rbar - F_ * dv_free);
        } else {
            dy = solve_normal_refined(rbar);
        }

        dv = Vec::Zero(nv_);
        for (Index j = 0; j < nv_; ++j) {
            if (is_free_[static_cast<std::size_t>(j)]) continue;
            double aty = 0.0;
            for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) aty += a * dy[i];
            dv[j] = theta_[j] * (aty - rhat[j]);
        }
        for (Index k = 0; k < kf; ++k) {
            dv[free_cols_[static_cast<std::size_t>(k)]] = dv_free[k];
        }
        dzl = Vec::Zero(nv_);
        dzu = Vec::Zero(nv_);
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) dzl[j] = (rcl[j] - zl_[j] * dv[j]) / gl_[j];
            if (has_up_[j]) dzu[j] = (rcu[j] + zu_[j] * dv[j]) / gu_[j];
        }
    }

    std::pair<double, double> max_steps(const Vec& dv, const Vec& dzl, const Vec& dzu) const {
        double ap = 1.0, ad = 1.0;
        for (Index j = 0; j < nv_; ++j) {
            if (has_lo_[j]) {
                if (dv[j] < 0.0) ap = std::min(ap, -gl_[j] / dv[j]);
                if (dzl[j] < 0.0) ad = std::min(ad, -zl_[j] / dzl[j]);
            }
            if (has_up_[j]) {
                if (dv[j] > 0.0) ap = std::min(ap, gu_[j] / dv[j]);
                if (dzu[j] < 0.0) ad = std::min(ad, -zu_[j] / dzu[j]);
            }
        }
        return {ap, ad};
    }

    void extract(LpSolution& result) const {
        const Index n = problem_.num_vars();
        result.status = Status::Optimal;
        result.x = Vec(n);
        for (Index j = 0; j < n; ++j) {
            const auto& vm = var_map_[static_cast<std::size_t>(j)];
            result.x[j] = (vm.kind == VarMap::Kind::Fixed) ? vm.fixed_value : v_[vm.idx];
        }
        result.objective_value = problem_.objective().dot(result.x);
        result.duals = -y_; // internal minimize -> reported maximize
        result.reduced_costs = problem_.objective();
        for (Index i = 0; i < m_; ++i) {
            for (const auto& [j, a] : problem_.row(i).coeffs) {
                result.reduced_costs[j] -= a * result.duals[i];
            }
        }
    }

    const LpProblem& problem_;
    InteriorPointOptions opts_;

    Index m_ = 0;
    Index nv_ = 0;
    Index slack_base_ = 0;
    std::vector<VarMap> var_map_;
    std::vector<std::vector<std::pair<Index, double>>> cols_;
    std::vector<char> has_lo_, has_up_;
    std::vector<char> is_dense_col_, is_free_;
    std::vector<Index> dense_cols_, free_cols_;
    Vec lo_, up_, cost_, b_;
    double b_norm_ = 0.0, c_norm_ = 0.0, data_scale_ = 1.0, start_shift_ = 1.0;
    Index num_sides_ = 0;

    Vec v_, y_, zl_, zu_, gl_, gu_, theta_, rp_, rd_;
    bool use_dense_normal_ = false;
    bool sparse_pattern_ready_ = false;
    double reg_ = 0.0;
    Eigen::MatrixXd U_, F_;
    Eigen::MatrixXd sinv_U_, minv_F_;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_kkt_lu_;
    Eigen::LDLT<Eigen::MatrixXd> woodbury_ldlt_, free_schur_ldlt_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_ldlt_;
};

inline LpSolution solve_interior_point(const LpProblem& problem,
                                       InteriorPointOptions options = {}) {
    return InteriorPointSolver(problem, options).solve();
}

} // namespace cvarcut::lp
