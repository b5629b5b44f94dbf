// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "nbtree/bounds.hpp"
#include "nbtree/correlation.hpp"
#include "nbtree/sweep.hpp"
#include "oracles/tree_oracle.hpp"

using namespace nbtree;

namespace {

std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t i, double rho) {
    // Box-Muller on counter bits; b = rho a + sqrt(1 - rho^2) noise.
    const double u1 = 1.0 - bits_to_unit(counter_bits(seed, 1, i));
    const double u2 = bits_to_unit(counter_bits(seed, 2, i));
    const double u3 = 1.0 - bits_to_unit(counter_bits(seed, 3, i));
    const double u4 = bits_to_unit(counter_bits(seed, 4, i));
    const double a = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
    const double n = std::sqrt(-2 * std::log(u3)) * std::cos(2 * M_PI * u4);
    return {a, rho * a + std::sqrt(1 - rho * rho) * n};
}

std::vector<double> random_table(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = 2.0 * bits_to_unit(counter_bits(seed, stream, i)) - 1.0;
    }
    return f;
}

} // namespace

TEST(MonteCarlo, PerfectCorrelation) {
    const auto est = monte_carlo_corr(
        [](std::uint64_t s, std::uint64_t i) {
            const double z = bits_to_unit(counter_bits(s, 0, i));
            return std::pair<double, double>{z, z};
        },
        10000, 1);
    EXPECT_GE(est.estimate, 0.999);
    EXPECT_EQ(est.samples, 10000u);
}

TEST(MonteCarlo, IndependentPairs) {
    int outside = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto est = monte_carlo_corr([](std::uint64_t s, std::uint64_t i) { return gaussian_pair(s, i, 0.0); },
                                          5000, seed);
        outside += std::abs(est.estimate) > 3 * est.std_error;
    }
    EXPECT_LE(outside, 1);
}

TEST(MonteCarlo, FisherInterval) {
    const std::uint64_t n = 20000;
    const auto est =
        monte_carlo_corr([](std::uint64_t s, std::uint64_t i) { return gaussian_pair(s, i, 0.6); }, n, 4);
    const double r = est.estimate;
    EXPECT_NEAR(r, 0.6, 0.02);
    const double scale = 1.0 / std::sqrt(n - 3.0);
    EXPECT_DOUBLE_EQ(est.std_error, (1 - r * r) * scale);
    EXPECT_NEAR(est.ci_low, std::tanh(std::atanh(r) - 1.959963984540054 * scale), 1e-15);
    EXPECT_NEAR(est.ci_high, std::tanh(std::atanh(r) + 1.959963984540054 * scale), 1e-15);
    EXPECT_LT(est.ci_low, r);
    EXPECT_GT(est.ci_high, r);
}

TEST(MonteCarlo, CoverageOfKnownCorrelation) {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto est =
            monte_carlo_corr([](std::uint64_t s, std::uint64_t i) { return gaussian_pair(s, i, 0.3); }, 4000, seed);
        covered += est.ci_low <= 0.3 && 0.3 <= est.ci_high;
    }
    EXPECT_GE(covered, 17);
}

TEST(MonteCarlo, DegenerateAndPreconditions) {
    const auto est = monte_carlo_corr(
        [](std::uint64_t s, std::uint64_t i) {
            return std::pair<double, double>{bits_to_unit(counter_bits(s, 0, i)), 1.0};
        },
        1000, 0);
    EXPECT_TRUE(est.degenerate);
    EXPECT_EQ(est.estimate, 0.0);
    EXPECT_THROW(monte_carlo_corr([](std::uint64_t, std::uint64_t) { return std::pair<double, double>{0, 0}; }, 99, 0),
                 InvalidArgument);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
    auto run = [] {
        return monte_carlo_corr([](std::uint64_t s, std::uint64_t i) { return gaussian_pair(s, i, 0.2); }, 50000, 9);
    };
    set_thread_count(1);
    const auto a = run();
    set_thread_count(8);
    const auto b = run();
    set_thread_count(0);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MonteCarlo, LinearRuleAgreesWithExactValue) {
    const double lam = 1.0 / std::sqrt(2.0);
    const auto family = make_vertex_family("linear", 3, 6, lam);
    const auto exact = linear_rule_covariance_exact(3, LinearRule::geometric(lam, 6).profile, 3);
    const auto est = mc_vertex_corr(3, 3, family, 20000, 7);
    EXPECT_LE(std::abs(est.estimate - exact.correlation), 3 * est.std_error)
        << est.estimate << " vs " << exact.correlation;
}

TEST(ExactCorr, SelfAndDisjoint) {
    const TreeBall ball(3, 6);
    const auto rule = BlockRule::sum(1);
    const auto domain = LabelDomain::discrete(2);
    auto id = [](std::span<const double> x) { return x[0]; };
    const auto self = exact_corr_discrete(ball, rule, domain, {4}, id, {4}, id);
    EXPECT_NEAR(self.correlation, 1.0, 1e-15);

    const VertexId u = ball.sphere(2).front();
    const VertexId v = ball.sphere(2).back();
    ASSERT_EQ(ball.distance(u, v), 4);
    const auto far = exact_corr_discrete(ball, rule, domain, {u}, id, {v}, id);
    EXPECT_EQ(far.correlation, 0.0);
    EXPECT_EQ(far.covariance, 0.0);
}

TEST(ExactCorr, SumRuleAtDistanceThree) {
    const TreeBall ball(3, 5);
    const VertexId u = ball.sphere(2).front();
    const VertexId v = ball.sphere(1).back();
    ASSERT_EQ(ball.distance(u, v), 3);
    auto id = [](std::span<const double> x) { return x[0]; };
    const auto r = exact_corr_discrete(ball, BlockRule::sum(1), LabelDomain::rademacher(), {u}, id, {v}, id);
    const auto lin = linear_rule_covariance_exact(3, {1.0, 1.0}, 3);
    EXPECT_NEAR(r.correlation, lin.correlation, 1e-12);
    EXPECT_LE(r.correlation, bounds::vertex_corr_bound(3, 3));
}

TEST(ExactCorr, LinearRuleOracleAgreement) {
    // Rademacher labels are centered with unit variance, so the enumeration
    // and the coefficient convolution must agree.
    for (int d = 3; d <= 4; ++d) {
        for (int r = 1; r <= 2; ++r) {
            if (d == 4 && r == 2) {
                continue;
            }
            const LinearRule rule{{1.0, 0.7, r == 2 ? -0.4 : 0.0}};
            const LinearRule trimmed{std::vector<double>(rule.profile.begin(), rule.profile.begin() + r + 1)};
            for (int k = 0; k <= 2 * r + 1; ++k) {
                const auto geo = make_pair_geometry(d, k, r);
                auto id = [](std::span<const double> x) { return x[0]; };
                const auto got = exact_corr_discrete(*geo.ball, BlockRule::linear(trimmed), LabelDomain::rademacher(),
                                                     {geo.front()}, id, {geo.back()}, id);
                const auto want = linear_rule_covariance_exact(d, trimmed.profile, k);
                EXPECT_NEAR(got.correlation, want.correlation, 1e-12) << d << " " << r << " " << k;
                EXPECT_NEAR(got.covariance, want.covariance, 1e-12);
                EXPECT_NEAR(got.variance1, want.variance, 1e-12);
            }
        }
    }
}

TEST(ExactCorr, ThresholdRuleMatchesDirectEnumeration) {
    // Brute force: enumerate the 6 labels of the two closed neighbourhoods of
    // an edge {u, v} and evaluate the threshold directly on the oracle graph.
    const TreeBall ball(3, 4);
    const auto g = oracle::build_ball(3, 4);
    const VertexId u = 1;
    const VertexId v = 4;
    const double level = 1.5;
    std::vector<std::uint32_t> support{u, v};
    for (auto w : g.adj[u]) {
        if (w != v) {
            support.push_back(w);
        }
    }
    for (auto w : g.adj[v]) {
        if (w != u) {
            support.push_back(w);
        }
    }
    ASSERT_EQ(support.size(), 6u);
    std::vector<std::pair<double, double>> values;
    oracle::for_each_word(support.size(), 2, [&](const std::vector<std::uint32_t>& w) {
        std::vector<double> lab(g.size(), 0.0);
        for (std::size_t i = 0; i < support.size(); ++i) {
            lab[support[i]] = w[i];
        }
        auto x = [&](std::uint32_t c) {
            double s = lab[c];
            for (auto n : g.adj[c]) {
                s += lab[n];
            }
            return s > level ? 1.0 : 0.0;
        };
        values.emplace_back(x(u), x(v));
    });
    const double want = oracle::correlation(values);
    auto id = [](std::span<const double> x) { return x[0]; };
    const auto got =
        exact_corr_discrete(ball, BlockRule::threshold(1, level), LabelDomain::discrete(2), {u}, id, {v}, id);
    EXPECT_NEAR(got.correlation, want, 1e-12);
    EXPECT_EQ(got.configurations, 64u);
}

TEST(ExactCorr, RegionFunctions) {
    const auto family = make_vertex_family("sum", 3, 1);
    for (int k = 1; k <= 3; ++k) {
        const auto r = exact_region_corr(3, k, family);
        EXPECT_LE(std::abs(r.correlation), bounds::hull_corr_bound(3, k));
        EXPECT_GT(r.variance1, 0.0);
    }
    EXPECT_EQ(exact_region_corr(3, 4, family).correlation, 0.0);
}

TEST(ExactCorr, CapIsEnforced) {
    const TreeBall ball(3, 8);
    auto id = [](std::span<const double> x) { return x[0]; };
    const VertexId u = ball.sphere(1).front();
    const VertexId v = ball.sphere(1).back();
    EXPECT_THROW(exact_corr_discrete(ball, BlockRule::sum(3), LabelDomain::discrete(2), {u}, id, {v}, id),
                 CapExceeded);
    EXPECT_THROW(exact_corr_discrete(ball, BlockRule::sum(1), LabelDomain::uniform(), {u}, id, {v}, id),
                 InvalidArgument);
}

TEST(ExactCorr, DegenerateVarianceGivesZero) {
    const TreeBall ball(3, 4);
    auto id = [](std::span<const double> x) { return x[0]; };
    auto zero = [](std::span<const double>) { return 0.0; };
    const auto r = exact_corr_discrete(ball, BlockRule::sum(1), LabelDomain::discrete(2), {1}, id, {4}, zero);
    EXPECT_EQ(r.correlation, 0.0);
    EXPECT_EQ(r.variance2, 0.0);
}

TEST(Polarization, IdenticalFunctions) {
    const auto joint = make_exchangeable(4, 1);
    const auto f = random_table(4, 2, 0);
    const auto r = polarization_check(joint, f, f);
    EXPECT_LE(r.residual, 1e-15);
    EXPECT_LE(r.swap_residual, 1e-15);
}

TEST(Polarization, RandomInstances) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + i % 5;
        const auto joint = make_exchangeable(n, 17, i);
        const auto r = polarization_check(joint, random_table(n, 18, 2 * i), random_table(n, 18, 2 * i + 1));
        worst = std::max({worst, r.residual, r.swap_residual});
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Polarization, IndependentCoordinates) {
    const std::vector<double> q{0.1, 0.2, 0.3, 0.4};
    std::vector<double> p(16);
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t y = 0; y < 4; ++y) {
            p[x * 4 + y] = q[x] * q[y];
        }
    }
    const auto joint = ExchangeableJoint::from_table(4, p);
    const auto f1 = random_table(4, 5, 0);
    const auto f2 = random_table(4, 5, 1);
    EXPECT_NEAR(static_cast<double>(joint_covariance(joint, f1, f2)), 0.0, 1e-15);
    EXPECT_LE(polarization_check(joint, f1, f2).residual, 1e-15);
}

TEST(Polarization, RejectsNonExchangeable) {
    EXPECT_THROW(ExchangeableJoint::from_table(2, {0.1, 0.2, 0.3, 0.4}), InvalidArgument);
    EXPECT_THROW(ExchangeableJoint::from_table(2, {0.5, 0.5, 0.5, 0.5}), InvalidArgument);
}

TEST(TwoFunctionReduction, TrivialAlpha) {
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto joint = make_exchangeable(5, 3, i);
        EXPECT_TRUE(two_function_reduction_check(joint, random_table(5, 4, 2 * i), random_table(5, 4, 2 * i + 1), 1.0));
    }
}

TEST(TwoFunctionReduction, SameFunction) {
    const auto joint = make_exchangeable(4, 6);
    const auto f = random_table(4, 7, 0);
    const double alpha = std::abs(joint_self_correlation(joint, f));
    EXPECT_TRUE(two_function_reduction_check(joint, f, f, alpha));
}

TEST(TwoFunctionReduction, ExhaustiveScan) {
    const auto joint = make_exchangeable(3, 8);
    std::vector<std::vector<double>> tables;
    oracle::for_each_word(3, 3, [&](const std::vector<std::uint32_t>& w) {
        tables.push_back({w[0] - 1.0, w[1] - 1.0, w[2] - 1.0});
    });
    ASSERT_EQ(tables.size(), 27u);
    double alpha = 0.0;
    for (const auto& f : tables) {
        alpha = std::max(alpha, std::abs(joint_self_correlation(joint, f)));
    }
    EXPECT_GT(alpha, 0.0);
    EXPECT_LT(alpha, 1.0);
    for (const auto& f1 : tables) {
        for (const auto& f2 : tables) {
            ASSERT_TRUE(two_function_reduction_check(joint, f1, f2, alpha));
        }
    }
}

TEST(EdgeHomogeneity, SubtreeSum) {
    const TreeBall ball(3, 5);
    const auto r = edge_homogeneity_check(ball, EdgeRule::subtree_sum(1), 2, LabelDomain::discrete(2));
    EXPECT_LE(r.max_deviation, 1e-12);
    EXPECT_GT(r.pair_count, 0u);
    EXPECT_EQ(r.cone_count, 4u);
    EXPECT_EQ(r.expected_cone_count, 4u);
    EXPECT_LE(r.cone_residual, 1e-12);
}

TEST(EdgeHomogeneity, SameEdge) {
    const TreeBall ball(3, 4);
    const auto r = edge_homogeneity_check(ball, EdgeRule::subtree_sum(1), 0, LabelDomain::discrete(2));
    EXPECT_EQ(r.max_deviation, 0.0);
}

TEST(VerifyBound, Examples) {
    const auto a = verify_bound(0.5, 2.0);
    EXPECT_TRUE(a.pass);
    EXPECT_DOUBLE_EQ(a.margin, 1.5);
    EXPECT_FALSE(verify_bound(0.7072, 0.7071, 0.0).pass);
    EXPECT_TRUE(verify_bound(0.30, 0.2963, 0.01).pass);
    EXPECT_TRUE(verify_bound(-0.5, 0.5).pass);
    EXPECT_THROW(verify_bound(0.1, -1.0), InvalidArgument);
}
