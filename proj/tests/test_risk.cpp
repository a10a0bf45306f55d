#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "cvarcut/risk.hpp"

using namespace cvarcut;

namespace {

// Independent oracle: the Eq.-style maximum of r' P_pi y over every
// permutation, by enumeration. Only usable for small J.
double brute_force_risk(const Vec& r, const Vec& y) {
    std::vector<Index> perm(static_cast<std::size_t>(y.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = -std::numeric_limits<double>::infinity();
    do {
        double v = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            v += r[static_cast<Index>(k)] * y[perm[k]];
        }
        best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Random non-positive nondecreasing weight vector.
Vec random_risk_weights(std::mt19937_64& gen, Index J) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec r(J);
    for (Index j = 0; j < J; ++j) r[j] = -u(gen);
    std::sort(r.data(), r.data() + J);
    return r;
}

ScenarioMatrix random_scenarios(std::mt19937_64& gen, Index J, Index n, double lo = -10.0,
                                double hi = 10.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    RowMatrix m(J, n);
    for (Index j = 0; j < J; ++j)
        for (Index i = 0; i < n; ++i) m(j, i) = u(gen);
    std::vector<std::string> names;
    for (Index i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    return ScenarioMatrix(std::move(m), names);
}

} // namespace

TEST(MakeCvarVector, PaperDefinition) {
    const auto r = make_cvar_vector(4, 2);
    EXPECT_DOUBLE_EQ(r.weights()[0], -0.5);
    EXPECT_DOUBLE_EQ(r.weights()[1], -0.5);
    EXPECT_DOUBLE_EQ(r.weights()[2], 0.0);
    EXPECT_DOUBLE_EQ(r.weights()[3], 0.0);
    EXPECT_EQ(r.tail_size(), 2);

    const auto worst = make_cvar_vector(4, 4);
    EXPECT_DOUBLE_EQ(worst.weights()[0], -1.0);
    EXPECT_DOUBLE_EQ(worst.weights()[1], 0.0);
}

TEST(MakeCvarVector, SumsToMinusOne) {
    for (Index J : {4, 100, 10000}) {
        for (Index rho : {1, 2, 4, 100}) {
            if (J % rho != 0) continue;
            const auto r = make_cvar_vector(J, rho);
            EXPECT_NEAR(r.weights().sum(), -1.0, 1e-12) << "J=" << J << " rho=" << rho;
        }
    }
}

TEST(MakeCvarVector, RejectsNonDivisibleReturnPeriod) {
    try {
        make_cvar_vector(4, 3);
        FAIL() << "expected divisibility error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("divide"), std::string::npos);
    }
}

TEST(RiskVector, RejectsPositiveOrUnsortedWeights) {
    Vec pos(2);
    pos << -1.0, 0.5;
    EXPECT_THROW(RiskVector(pos, "bad"), std::invalid_argument);
    Vec unsorted(3);
    unsorted << 0.0, -1.0, 0.0;
    EXPECT_THROW(RiskVector(unsorted, "bad"), std::invalid_argument);
}

TEST(Blend, AppendixBlendValues) {
    // 0.5*CVaR(1e4,100) + 0.5*CVaR(1e4,1000): first 10 entries -0.055,
    // entries 11..100 -0.005, rest zero.
    const auto r = blend({0.5, 0.5}, {make_cvar_vector(10000, 100), make_cvar_vector(10000, 1000)});
    for (Index j = 0; j < 10; ++j) EXPECT_NEAR(r.weights()[j], -0.055, 1e-15);
    for (Index j = 10; j < 100; ++j) EXPECT_NEAR(r.weights()[j], -0.005, 1e-15);
    for (Index j = 100; j < 200; ++j) EXPECT_DOUBLE_EQ(r.weights()[j], 0.0);
    EXPECT_EQ(r.tail_size(), 100);
    EXPECT_NEAR(r.weights().sum(), -1.0, 1e-12);
}

TEST(Blend, IdentityAndErrors) {
    const auto v = make_cvar_vector(6, 2);
    const auto same = blend({1.0}, {v});
    EXPECT_TRUE(same.weights() == v.weights());
    EXPECT_THROW(blend({0.5, 0.5}, {make_cvar_vector(4, 2), make_cvar_vector(6, 2)}),
                 std::invalid_argument);
    EXPECT_THROW(blend({0.0}, {v}), std::invalid_argument);
    EXPECT_THROW(blend({}, {}), std::invalid_argument);
}

TEST(TailOrdering, SortsAndIsStable) {
    Vec y(4);
    y << 3, -1, 2, 0;
    const auto ord = tail_ordering(y);
    ASSERT_EQ(ord.size(), 4);
    EXPECT_EQ(ord.perm()[0], 1);
    EXPECT_EQ(ord.perm()[1], 3);
    EXPECT_EQ(ord.perm()[2], 2);
    EXPECT_EQ(ord.perm()[3], 0);

    const auto tie = tail_ordering(Vec::Constant(5, 7.0));
    for (Index k = 0; k < 5; ++k) EXPECT_EQ(tie.perm()[static_cast<std::size_t>(k)], k);
}

TEST(TailOrdering, AppliedOrderingIsNondecreasing) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    Vec y(1000);
    for (Index j = 0; j < y.size(); ++j) y[j] = u(gen);
    const auto ord = tail_ordering(y);
    for (Index k = 1; k < y.size(); ++k) {
        EXPECT_LE(y[ord.perm()[static_cast<std::size_t>(k - 1)]],
                  y[ord.perm()[static_cast<std::size_t>(k)]]);
    }
}

TEST(EvaluateRisk, SpecExamples) {
    Vec r22(4);
    r22 << -0.5, -0.5, 0.0, 0.0;
    Vec y(4);
    y << 3, -1, 2, 0;
    const RiskVector r(r22, "cvar");
    EXPECT_NEAR(evaluate_risk(r, y), 0.5, 1e-15);
    EXPECT_NEAR(brute_force_risk(r22, y), 0.5, 1e-15);

    Vec rw(2);
    rw << -1.0, 0.0;
    Vec y2(2);
    y2 << 5, -3;
    EXPECT_DOUBLE_EQ(evaluate_risk(RiskVector(rw, "worst"), y2), 3.0);

    EXPECT_DOUBLE_EQ(evaluate_risk(RiskVector(Vec::Zero(3), "zero"), Vec::Ones(3) * 9.0), 0.0);
    EXPECT_THROW(evaluate_risk(r, Vec::Zero(5)), std::invalid_argument);
}

TEST(EvaluateRisk, MatchesPermutationMaximumExactly) {
    // Sorted evaluation equals the brute-force Eq. (1) maximum for all J <= 6.
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (Index J = 1; J <= 6; ++J) {
        for (int rep = 0; rep < 40; ++rep) {
            Vec r = random_risk_weights(gen, J);
            Vec y(J);
            for (Index j = 0; j < J; ++j) y[j] = u(gen);
            const double fast = evaluate_risk(RiskVector(r, "rand"), y);
            const double slow = brute_force_risk(r, y);
            EXPECT_DOUBLE_EQ(fast, slow) << "J=" << J << " rep=" << rep;
        }
    }
}

TEST(EvaluateRisk, PositivelyHomogeneous) {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> scale(0.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Index J = 30;
        const RiskVector r(random_risk_weights(gen, J), "rand");
        Vec y(J);
        for (Index j = 0; j < J; ++j) y[j] = u(gen);
        const double a = scale(gen);
        const double lhs = evaluate_risk(r, a * y);
        const double rhs = a * evaluate_risk(r, y);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST(EvaluateRisk, ConvexInOutcomes) {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> t01(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Index J = 25;
        const RiskVector r(random_risk_weights(gen, J), "rand");
        Vec y(J), z(J);
        for (Index j = 0; j < J; ++j) {
            y[j] = u(gen);
            z[j] = u(gen);
        }
        const double t = t01(gen);
        const double mix = evaluate_risk(r, t * y + (1.0 - t) * z);
        const double bound = t * evaluate_risk(r, y) + (1.0 - t) * evaluate_risk(r, z);
        EXPECT_LE(mix, bound + 1e-9);
    }
}

TEST(CutCoefficients, IdentityMatrixRecoversRiskVector) {
    const Index J = 5;
    RowMatrix eye = RowMatrix::Identity(J, J);
    std::vector<std::string> names;
    for (Index i = 0; i < J; ++i) names.push_back("n" + std::to_string(i));
    ScenarioMatrix Y(std::move(eye), names);
    Vec rw(J);
    rw << -0.4, -0.3, -0.2, -0.1, 0.0;
    const RiskVector r(rw, "rand");
    // Identity permutation comes from an already-sorted outcome vector.
    Vec sorted(J);
    sorted << 1, 2, 3, 4, 5;
    const auto ord = tail_ordering(sorted);
    const Vec c = cut_coefficients(r, ord, Y);
    EXPECT_TRUE(c.isApprox(rw));
}

TEST(CutCoefficients, SingleWeightExtractsNegatedRow) {
    std::mt19937_64 gen(8);
    auto Y = random_scenarios(gen, 6, 4);
    Vec rw = Vec::Zero(6);
    rw[0] = -1.0;
    Vec y(6);
    y << 5, 4, 6, -2, 7, 8; // scenario 3 is smallest, so it leads the ordering
    const auto ord = tail_ordering(y);
    ASSERT_EQ(ord.perm()[0], 3);
    const Vec c = cut_coefficients(RiskVector(rw, "worst"), ord, Y);
    EXPECT_TRUE(c.isApprox(-Y.values().row(3).transpose()));
}

TEST(CutCoefficients, SelfConsistentWithRiskAtGeneratingPosition) {
    std::mt19937_64 gen(123);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    const auto Y = random_scenarios(gen, 50, 5);
    const auto r = make_cvar_vector(50, 10);
    for (int rep = 0; rep < 20; ++rep) {
        Vec x(5);
        for (int i = 0; i < 5; ++i) x[i] = u(gen);
        const Vec y = outcome_vector(Y, x);
        const auto ord = tail_ordering(y);
        const Vec c = cut_coefficients(r, ord, Y);
        EXPECT_NEAR(c.dot(x), evaluate_risk(r, y), 1e-9);
    }
}

TEST(CutCoefficients, UnderEstimatesRiskEverywhere) {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    const auto Y = random_scenarios(gen, 40, 4);
    const auto r = blend({0.5, 0.5}, {make_cvar_vector(40, 4), make_cvar_vector(40, 8)});
    Vec x0(4);
    x0 << 1.0, 0.5, -0.2, 1.5;
    const auto ord = tail_ordering(outcome_vector(Y, x0));
    const Vec c = cut_coefficients(r, ord, Y);
    for (int rep = 0; rep < 100; ++rep) {
        Vec x(4);
        for (int i = 0; i < 4; ++i) x[i] = u(gen);
        EXPECT_LE(c.dot(x), evaluate_risk(r, outcome_vector(Y, x)) + 1e-9);
    }
}

TEST(ParseRiskSpec, ParsesPairsAndRejectsGarbage) {
    const auto single = parse_risk_spec("100:1", 1000);
    EXPECT_EQ(single.tail_size(), 10);
    EXPECT_NEAR(single.weights()[0], -0.1, 1e-15);

    const auto blend = parse_risk_spec("100:0.5,1000:0.5", 10000);
    EXPECT_NEAR(blend.weights()[0], -0.055, 1e-15);
    EXPECT_NEAR(blend.weights()[99], -0.005, 1e-15);

    EXPECT_THROW(parse_risk_spec("", 100), std::invalid_argument);
    EXPECT_THROW(parse_risk_spec("100", 100), std::invalid_argument);
    EXPECT_THROW(parse_risk_spec("abc:1", 100), std::invalid_argument);
    EXPECT_THROW(parse_risk_spec("3:1", 100), std::invalid_argument); // not a divisor
}
