#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cvarcut/frontier.hpp"

#include "helpers.hpp"

using namespace cvarcut;
using cvarcut::testing::box_optimum;
using cvarcut::testing::random_scenarios;

TEST(MinAchievableRisk, SingletonBoxIsRiskAtThatPoint) {
    std::mt19937_64 gen(21);
    const auto Y = random_scenarios(gen, 30, 4);
    const std::vector<CvarTerm> terms{{6, 1.0}};
    const auto r = risk_vector_from_terms(terms, 30);
    const PositionBounds fixed(Vec::Ones(4), Vec::Ones(4));
    const double d = min_achievable_risk(Y, fixed, terms);
    EXPECT_NEAR(d, evaluate_risk(r, outcome_vector(Y, Vec::Ones(4))), 1e-8);
}

TEST(MinAchievableRisk, IdentityMatrixTinyCase) {
    // Y = I2, r = (-1, 0), box [0,1]^2: mu(x) = -min(x1, x2), minimized at
    // x = (1,1) where it equals -1. (The least-risk position is the one with
    // the largest worst-case outcome, not the zero position.)
    RowMatrix eye = RowMatrix::Identity(2, 2);
    ScenarioMatrix Y(std::move(eye), {"a", "b"});
    const std::vector<CvarTerm> terms{{2, 1.0}}; // tail of one scenario out of two
    const auto bounds = PositionBounds::uniform(2, 0.0, 1.0);
    const double d = min_achievable_risk(Y, bounds, terms);
    EXPECT_NEAR(d, -1.0, 1e-9);
}

TEST(MinAchievableRisk, LowerBoundsSampledBoxPoints) {
    std::mt19937_64 gen(22);
    const auto Y = random_scenarios(gen, 50, 4);
    const std::vector<CvarTerm> terms{{10, 0.5}, {25, 0.5}};
    const auto r = risk_vector_from_terms(terms, 50);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const double d = min_achievable_risk(Y, bounds, terms);

    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int rep = 0; rep < 1000; ++rep) {
        Vec x(4);
        for (Index i = 0; i < 4; ++i) x[i] = u(gen);
        EXPECT_GE(evaluate_risk(r, outcome_vector(Y, x)), d - 1e-8);
    }
}

TEST(Sweep, SaturatedFrontierEndsAtBoxOptimum) {
    std::mt19937_64 gen(23);
    const auto Y = random_scenarios(gen, 60, 5);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(5, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{10, 1.0}};
    const auto r = risk_vector_from_terms(terms, 60);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));
    const double d = min_achievable_risk(Y, bounds, terms);

    // Wide enough that the last two targets both exceed saturation.
    const double r_hi = saturation + 0.5 * (saturation - d) + 1.0;
    const auto points = sweep(Y, p, bounds, terms, d, r_hi, 6, Method::CuttingPlane);
    ASSERT_EQ(points.size(), 6u);
    EXPECT_EQ(points.back().status, "ok");
    EXPECT_NEAR(points.back().profit, p.p.dot(box_optimum(p, bounds)),
                1e-7 * (1.0 + std::abs(points.back().profit)));
    // Flat tail: both last targets exceed saturation.
    EXPECT_NEAR(points[5].profit, points[4].profit, 1e-6 * (1.0 + std::abs(points[5].profit)));
}

TEST(Sweep, ProfitsNondecreasingAndMidpointConcave) {
    std::mt19937_64 gen(24);
    const auto Y = random_scenarios(gen, 80, 4);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{16, 1.0}};
    const auto r = risk_vector_from_terms(terms, 80);
    const double d = min_achievable_risk(Y, bounds, terms);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));

    for (Method method : {Method::CuttingPlane, Method::Reformulation}) {
        const auto points = sweep(Y, p, bounds, terms, d, saturation, 9, method);
        ASSERT_EQ(points.size(), 9u);
        for (const auto& pt : points) ASSERT_EQ(pt.status, "ok");
        for (std::size_t k = 1; k < points.size(); ++k) {
            EXPECT_GE(points[k].profit,
                      points[k - 1].profit - 1e-7 * (1.0 + std::abs(points[k].profit)));
        }
        for (std::size_t k = 1; k + 1 < points.size(); ++k) {
            const double mid = 0.5 * (points[k - 1].profit + points[k + 1].profit);
            EXPECT_GE(points[k].profit, mid - 1e-6 * (1.0 + std::abs(points[k].profit)));
        }
    }
}

TEST(Sweep, MethodsAgreePointwise) {
    std::mt19937_64 gen(25);
    const auto Y = random_scenarios(gen, 60, 4);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{12, 1.0}};
    const auto r = risk_vector_from_terms(terms, 60);
    const double d = min_achievable_risk(Y, bounds, terms);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));

    const auto via_b = sweep(Y, p, bounds, terms, d, saturation, 5, Method::CuttingPlane);
    const auto via_a = sweep(Y, p, bounds, terms, d, saturation, 5, Method::Reformulation);
    for (std::size_t k = 0; k < via_b.size(); ++k) {
        ASSERT_EQ(via_b[k].status, "ok");
        ASSERT_EQ(via_a[k].status, "ok");
        EXPECT_NEAR(via_b[k].profit, via_a[k].profit,
                    1e-6 * (1.0 + std::abs(via_a[k].profit)));
    }
}

TEST(Sweep, SandwichAtEachPoint) {
    // Method B's profit lies between f(target) and f(achieved), f by method A.
    std::mt19937_64 gen(26);
    const auto Y = random_scenarios(gen, 40, 3);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(3, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{8, 1.0}};
    const auto r = risk_vector_from_terms(terms, 40);
    const double d = min_achievable_risk(Y, bounds, terms);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));

    const auto points = sweep(Y, p, bounds, terms, d, saturation, 5, Method::CuttingPlane);
    for (const auto& pt : points) {
        ASSERT_EQ(pt.status, "ok");
        const double f_target = frontier_value(Y, p, bounds, terms, pt.target_risk);
        const double f_achieved = frontier_value(Y, p, bounds, terms, pt.achieved_risk);
        const double tol = 1e-6 * (1.0 + std::abs(pt.profit));
        EXPECT_GE(pt.profit, f_target - tol);
        EXPECT_LE(pt.profit, f_achieved + tol);
    }
}

TEST(Sweep, InfeasibleTargetsAreFlaggedNotFatal) {
    std::mt19937_64 gen(27);
    const auto Y = random_scenarios(gen, 40, 3);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(3, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{8, 1.0}};
    const auto r = risk_vector_from_terms(terms, 40);
    const double d = min_achievable_risk(Y, bounds, terms);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));

    const auto points = sweep(Y, p, bounds, terms, d - 2.0 * (1.0 + std::abs(d)), saturation, 5,
                              Method::CuttingPlane);
    ASSERT_EQ(points.size(), 5u);
    EXPECT_EQ(points.front().status, "infeasible");
    EXPECT_EQ(points.back().status, "ok");
}

TEST(Sweep, NoJumpAtMinimumRisk) {
    std::mt19937_64 gen(28);
    const auto Y = random_scenarios(gen, 60, 4);
    const auto p = column_means(Y);
    const auto bounds = PositionBounds::uniform(4, 0.5, 1.5);
    const std::vector<CvarTerm> terms{{12, 1.0}};
    const auto r = risk_vector_from_terms(terms, 60);
    const double d = min_achievable_risk(Y, bounds, terms);
    const double saturation = evaluate_risk(r, outcome_vector(Y, box_optimum(p, bounds)));
    const double span = saturation - d;
    ASSERT_GT(span, 0.0);

    const double f_d = frontier_value(Y, p, bounds, terms, d);
    const double delta_small = frontier_value(Y, p, bounds, terms, d + 1e-4 * span) - f_d;
    const double delta_big = frontier_value(Y, p, bounds, terms, d + 1e-3 * span) - f_d;
    const double tol = 1e-6 * (1.0 + std::abs(f_d));
    EXPECT_GE(delta_small, -tol);
    EXPECT_GE(delta_big, delta_small - tol);
    // Continuity at d: the small-step increment shrinks with the step.
    EXPECT_LE(delta_small, 0.5 * delta_big + tol);
}

TEST(FrontierCsv, WritesAllColumns) {
    std::vector<FrontierPoint> points(2);
    points[0] = {1.5, 10.0, 1.4, 3, Method::CuttingPlane, "ok"};
    points[1] = {0.5, 0.0, 0.0, 0, Method::CuttingPlane, "infeasible"};
    const auto path = std::filesystem::temp_directory_path() / "cvarcut_frontier_test.csv";
    write_frontier_csv(points, path);
    std::ifstream in(path);
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    EXPECT_EQ(header, "target_risk,profit,achieved_risk,iterations,method,status");
    EXPECT_NE(row1.find("cutting-plane,ok"), std::string::npos);
    EXPECT_NE(row2.find("infeasible"), std::string::npos);
    std::filesystem::remove(path);
}
