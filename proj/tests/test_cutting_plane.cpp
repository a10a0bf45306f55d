#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvarcut/cutting_plane.hpp"
#include "cvarcut/reformulation.hpp"

#include "helpers.hpp"

using namespace cvarcut;

using cvarcut::testing::binding_target;
using cvarcut::testing::random_scenarios;

TEST(CuttingPlane, FixedPositionsConvergeImmediately) {
    std::mt19937_64 gen(1);
    const auto Y = random_scenarios(gen, 30, 4);
    const auto p = column_means(Y);
    const PositionBounds fixed(Vec::Ones(4), Vec::Ones(4));
    const auto r = make_cvar_vector(30, 5);
    const double risk_at_one = evaluate_risk(r, outcome_vector(Y, Vec::Ones(4)));

    const auto res = optimize(Y, p, fixed, r, risk_at_one + 1.0);
    EXPECT_EQ(res.termination, Termination::Converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_TRUE(res.cuts.empty());
    EXPECT_TRUE(res.x_star.isApprox(Vec::Ones(4), 1e-9));
    EXPECT_NEAR(res.profit, p.p.sum(), 1e-9 * (1.0 + std::abs(p.p.sum())));
}

TEST(CuttingPlane, InactiveRiskConstraintIsBoxOptimum) {
    std::mt19937_64 gen(2);
    const auto Y = random_scenarios(gen, 40, 5);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(5, 0.5, 1.5);
    const auto r = make_cvar_vector(40, 8);

    Vec box_opt(5);
    for (Index i = 0; i < 5; ++i) box_opt[i] = p.p[i] >= 0.0 ? 1.5 : 0.5;
    const double big_target = evaluate_risk(r, outcome_vector(Y, box_opt)) + 1.0;

    const auto res = optimize(Y, p, bounds, r, big_target);
    EXPECT_EQ(res.termination, Termination::Converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_TRUE(res.cuts.empty());
    EXPECT_NEAR(res.profit, p.p.dot(box_opt), 1e-9 * (1.0 + std::abs(res.profit)));
}

TEST(CuttingPlane, MatchesReformulationOnRandomInstances) {
    std::mt19937_64 gen(42);
    const auto Y = random_scenarios(gen, 100, 5);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(5, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{10, 1.0}};
    const auto r = risk_vector_from_terms(terms, 100);
    const double target = binding_target(Y, p, bounds, r);

    SolveConfig config;
    const auto cp = optimize(Y, p, bounds, r, target, config);
    ASSERT_EQ(cp.termination, Termination::Converged);
    EXPECT_LE(cp.achieved_risk, target * (1.0 + config.delta) + config.tolerance_floor);

    const auto refo = build_reformulation(Y, p, bounds, terms, target);
    const auto ra = optimize_reformulated(refo, Y, p);
    ASSERT_EQ(ra.termination, Termination::Converged);
    EXPECT_NEAR(cp.profit, ra.profit, 1e-6 * (1.0 + std::abs(ra.profit)));
}

TEST(CuttingPlane, ObjectiveTraceIsNonincreasing) {
    std::mt19937_64 gen(9);
    const auto Y = random_scenarios(gen, 80, 6);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(6, 0.5, 1.5);
    const auto r = make_cvar_vector(80, 10);
    const auto res = optimize(Y, p, bounds, r, binding_target(Y, p, bounds, r));
    ASSERT_EQ(res.termination, Termination::Converged);
    ASSERT_GE(res.trace.size(), 2u);
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
        EXPECT_LE(res.trace[k].objective,
                  res.trace[k - 1].objective + 1e-9 * (1.0 + std::abs(res.trace[k].objective)));
    }
}

TEST(CuttingPlane, EachCutWasViolatedAndTailSetsAreDistinct) {
    std::mt19937_64 gen(10);
    const auto Y = random_scenarios(gen, 60, 4);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const auto r = make_cvar_vector(60, 6);
    const double target = binding_target(Y, p, bounds, r);
    SolveConfig config;
    const auto res = optimize(Y, p, bounds, r, target, config);
    ASSERT_EQ(res.termination, Termination::Converged);
    ASSERT_FALSE(res.cuts.empty());

    const double threshold = config.delta * std::max(std::abs(target), config.tolerance_floor);
    for (std::size_t k = 0; k < res.cuts.size(); ++k) {
        // Trace row k is the iterate that produced cut k.
        EXPECT_GT(res.trace[k].violation, threshold) << "cut " << k;
        for (std::size_t l = k + 1; l < res.cuts.size(); ++l) {
            EXPECT_NE(res.cuts[k].tail_set, res.cuts[l].tail_set);
        }
        // The final iterate satisfies every stored cut.
        EXPECT_LE(res.cuts[k].coefficients.dot(res.x_star), res.cuts[k].rhs + 1e-7);
    }
}

TEST(CuttingPlane, StoredCutsUnderestimateRisk) {
    std::mt19937_64 gen(11);
    const auto Y = random_scenarios(gen, 50, 4);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const auto r = blend({0.5, 0.5}, {make_cvar_vector(50, 5), make_cvar_vector(50, 10)});
    const auto res = optimize(Y, p, bounds, r, binding_target(Y, p, bounds, r));
    ASSERT_FALSE(res.cuts.empty());

    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int rep = 0; rep < 100; ++rep) {
        Vec x(4);
        for (Index i = 0; i < 4; ++i) x[i] = u(gen);
        const double risk = evaluate_risk(r, outcome_vector(Y, x));
        for (const auto& cut : res.cuts) {
            EXPECT_LE(cut.coefficients.dot(x), risk + 1e-9);
        }
    }
}

TEST(CuttingPlane, InfeasibleTargetReported) {
    std::mt19937_64 gen(12);
    const auto Y = random_scenarios(gen, 40, 3);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(3, 0.5, 1.5);
    const auto r = make_cvar_vector(40, 8);
    // No position in the box can push the worst-case mean this low.
    Vec worst_case(3);
    for (Index i = 0; i < 3; ++i) worst_case[i] = 1.5;
    const double unreachable = -10.0 * (1.0 + Y.values().cwiseAbs().maxCoeff() * 4.5);
    const auto res = optimize(Y, p, bounds, r, unreachable);
    EXPECT_EQ(res.termination, Termination::InfeasibleTarget);
}

TEST(CuttingPlane, IterationCapReportsLimit) {
    std::mt19937_64 gen(13);
    const auto Y = random_scenarios(gen, 100, 6);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(6, 0.5, 1.5);
    const auto r = make_cvar_vector(100, 10);
    SolveConfig config;
    config.max_iterations = 1;
    config.delta = 1e-12; // force extra rounds
    const auto res = optimize(Y, p, bounds, r, binding_target(Y, p, bounds, r), config);
    if (res.termination == Termination::IterationLimit) {
        EXPECT_EQ(res.cuts.size(), 1u);
        EXPECT_FALSE(res.trace.empty());
    } else {
        EXPECT_EQ(res.termination, Termination::Converged);
    }
}

TEST(CuttingPlane, VerifyAcceptsConvergedAndRejectsTampered) {
    std::mt19937_64 gen(14);
    const auto Y = random_scenarios(gen, 60, 5);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(5, 0.5, 1.5);
    const auto r = make_cvar_vector(60, 10);
    const double target = binding_target(Y, p, bounds, r);
    SolveConfig config;
    config.verify = true;
    auto res = optimize(Y, p, bounds, r, target, config);
    ASSERT_EQ(res.termination, Termination::Converged);
    ASSERT_TRUE(res.verification.has_value());
    EXPECT_TRUE(res.verification->verified);
    EXPECT_TRUE(res.verification->lp_report.verified);

    res.x_star[0] += 0.05;
    const auto tampered = verify(Y, r, target, config, res);
    EXPECT_FALSE(tampered.verified);

    res.termination = Termination::IterationLimit;
    EXPECT_THROW(verify(Y, r, target, config, res), std::invalid_argument);
}

TEST(CuttingPlane, BoxOnlyConvergenceVerifiesWithZeroGap) {
    std::mt19937_64 gen(15);
    const auto Y = random_scenarios(gen, 30, 3);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(3, 0.5, 1.5);
    const auto r = make_cvar_vector(30, 6);
    Vec box_opt(3);
    for (Index i = 0; i < 3; ++i) box_opt[i] = p.p[i] >= 0.0 ? 1.5 : 0.5;
    SolveConfig config;
    config.verify = true;
    const auto res =
        optimize(Y, p, bounds, r, evaluate_risk(r, outcome_vector(Y, box_opt)) + 1.0, config);
    ASSERT_EQ(res.termination, Termination::Converged);
    EXPECT_TRUE(res.cuts.empty());
    ASSERT_TRUE(res.verification.has_value());
    EXPECT_TRUE(res.verification->verified);
    EXPECT_NEAR(res.verification->lp_report.duality_gap, 0.0, 1e-9);
}

TEST(CuttingPlane, RejectsDimensionMismatches) {
    std::mt19937_64 gen(16);
    const auto Y = random_scenarios(gen, 20, 3);
    const auto p = column_means(Y);
    const auto r = make_cvar_vector(20, 4);
    EXPECT_THROW(optimize(Y, ProfitVector(Vec::Ones(2)), PositionBounds::uniform(3, 0, 1), r, 0.0),
                 std::invalid_argument);
    EXPECT_THROW(optimize(Y, p, PositionBounds::uniform(4, 0, 1), r, 0.0), std::invalid_argument);
    EXPECT_THROW(optimize(Y, p, PositionBounds::uniform(3, 0, 1), make_cvar_vector(10, 2), 0.0),
                 std::invalid_argument);
}
