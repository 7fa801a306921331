#include "aigiqa/error.hpp"
#include "aigiqa/metrics.hpp"
#include "error_code.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace aigiqa;

TEST(Plcc, HandComputedValue) {
    const std::vector<double> p{1, 2, 3};
    const std::vector<double> y{1, 2, 4};
    // cross deviations sum to 3; squared deviations are 2 and 14/3
    EXPECT_NEAR(plcc(p, y), 3.0 / std::sqrt(2.0 * 14.0 / 3.0), 1e-12);
    EXPECT_NEAR(plcc(p, y), 0.98198, 1e-5);
}

TEST(Plcc, IdentityAndNegation) {
    const std::vector<double> y{0.3, 1.7, 2.2, 4.9, 3.1};
    std::vector<double> neg;
    for (double v : y) neg.push_back(-v);
    EXPECT_NEAR(plcc(y, y), 1.0, 1e-15);
    EXPECT_NEAR(plcc(neg, y), -1.0, 1e-15);
}

TEST(Plcc, ConstantSeriesIsDegenerate) {
    EXPECT_EQ(code_of([] { plcc(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}); }), ErrorCode::DegenerateSeries);
    EXPECT_EQ(code_of([] { plcc(std::vector<double>{1}, std::vector<double>{1}); }), ErrorCode::DegenerateSeries);
}

TEST(Plcc, LengthMismatchAndNaN) {
    EXPECT_EQ(code_of([] { plcc(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}); }), ErrorCode::ShapeMismatch);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(code_of([&] { srcc(std::vector<double>{1, nan, 3}, std::vector<double>{1, 2, 3}); }),
              ErrorCode::NonFiniteScore);
}

TEST(Srcc, FourElementExample) {
    EXPECT_NEAR(srcc(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-12);
}

TEST(Srcc, ReversedAndMonotone) {
    const std::vector<double> y{5, 1, 4, 2, 3};
    std::vector<double> cubed;
    std::vector<double> rev;
    for (double v : y) {
        cubed.push_back(v * v * v + 1.0);
        rev.push_back(-v);
    }
    EXPECT_DOUBLE_EQ(srcc(cubed, y), 1.0);
    EXPECT_DOUBLE_EQ(srcc(rev, y), -1.0);
}

TEST(Srcc, AverageRanksForTies) {
    const auto r = average_ranks(std::vector<double>{10, 20, 20, 5});
    EXPECT_EQ(r, (std::vector<double>{2, 3.5, 3.5, 1}));
    EXPECT_EQ(code_of([] { srcc(std::vector<double>{3, 3, 3}, std::vector<double>{1, 2, 3}); }),
              ErrorCode::DegenerateSeries);
}

TEST(Krcc, FourElementExample) {
    EXPECT_NEAR(krcc(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 2.0 / 3.0, 1e-12);
}

TEST(Krcc, IdenticalAndReversed) {
    const std::vector<double> y{0.1, 0.4, 0.2, 0.9, 0.5};
    std::vector<double> rev;
    for (double v : y) rev.push_back(1.0 - v);
    EXPECT_DOUBLE_EQ(krcc(y, y), 1.0);
    EXPECT_DOUBLE_EQ(krcc(rev, y), -1.0);
}

TEST(Krcc, TauBWithTies) {
    const std::vector<double> p{1, 1, 2, 3, 3, 4};
    const std::vector<double> y{1, 2, 2, 3, 4, 4};
    EXPECT_NEAR(krcc(p, y), oracle::kendall_tau_b(p, y), 1e-12);
}

TEST(Metrics, MatchBruteForceOracles) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        // Small integer alphabet forces frequent ties.
        std::uniform_int_distribution<int> pick(0, 4);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> p(n);
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            p[i] = trial % 2 ? pick(rng) : noise(rng);
            y[i] = pick(rng);
        }
        if (oracle::constant(p) || oracle::constant(y)) {
            EXPECT_THROW(srcc(p, y), Error);
            continue;
        }
        EXPECT_NEAR(plcc(p, y), oracle::pearson(p, y), 1e-9);
        EXPECT_NEAR(srcc(p, y), oracle::spearman(p, y), 1e-9);
        EXPECT_NEAR(krcc(p, y), oracle::kendall_tau_b(p, y), 1e-9);
        ++checked;
    }
    EXPECT_GE(checked, 200);
}

TEST(Metrics, LargeSeriesAgreeWithOracle) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, 40);
    std::vector<double> p(500);
    std::vector<double> y(500);
    for (int i = 0; i < 500; ++i) {
        p[i] = pick(rng);
        y[i] = 0.5 * p[i] + pick(rng);
    }
    EXPECT_NEAR(krcc(p, y), oracle::kendall_tau_b(p, y), 1e-9);
    EXPECT_NEAR(srcc(p, y), oracle::spearman(p, y), 1e-9);
}

TEST(Metrics, InvariantUnderMonotoneAndAffineMaps) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(40);
        std::vector<double> y(40);
        for (int i = 0; i < 40; ++i) {
            p[i] = g(rng);
            y[i] = p[i] + g(rng);
        }
        std::vector<double> p_exp;
        std::vector<double> y_atan;
        std::vector<double> p_aff;
        std::vector<double> p_neg;
        for (int i = 0; i < 40; ++i) {
            p_exp.push_back(std::exp(p[i]));
            y_atan.push_back(std::atan(y[i]) * 3.0 - 1.0);
            p_aff.push_back(2.5 * p[i] + 7.0);
            p_neg.push_back(-2.5 * p[i] + 7.0);
        }
        EXPECT_NEAR(srcc(p_exp, y), srcc(p, y), 1e-12);
        EXPECT_NEAR(srcc(p, y_atan), srcc(p, y), 1e-12);
        EXPECT_NEAR(krcc(p_exp, y_atan), krcc(p, y), 1e-12);
        EXPECT_NEAR(plcc(p_aff, y), plcc(p, y), 1e-12);
        EXPECT_NEAR(plcc(p_neg, y), -plcc(p, y), 1e-12);
    }
}

TEST(Metrics, OutputsInUnitInterval) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(30);
        std::vector<double> y(30);
        for (int i = 0; i < 30; ++i) {
            p[i] = u(rng);
            y[i] = trial % 3 == 0 ? p[i] : u(rng);
        }
        for (double v : {plcc(p, y), srcc(p, y), krcc(p, y)}) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Metrics, PairedScoresOverloads) {
    PairedScores ps{{1, 2, 3, 4}, {1, 3, 2, 4}};
    EXPECT_NEAR(srcc(ps), 0.8, 1e-12);
    EXPECT_NEAR(krcc(ps), 2.0 / 3.0, 1e-12);
    PairedScores bad{{1, 2}, {1}};
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Logistic, FitRecoversMonotoneMapping) {
    std::vector<double> p;
    std::vector<double> y;
    const Logistic4 truth{5.0, 1.0, 0.5, 0.8};
    for (int i = 0; i < 60; ++i) {
        const double x = -1.0 + i * (3.0 / 59.0);
        p.push_back(x);
        y.push_back(truth(x));
    }
    EXPECT_GT(plcc_logistic(p, y), 0.9999);
    EXPECT_LT(plcc(p, y), plcc_logistic(p, y));
    const auto c = correlations(p, y, true);
    EXPECT_NEAR(c.srcc, 1.0, 1e-12);
}
