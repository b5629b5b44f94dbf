// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// The acceptance suite: each criterion is a function of the seed returning a
// verdict plus a JSON document of the numbers it checked. Documents carry no
// timings or thread counts, so a report is reproducible byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nbtree/bounds.hpp"
#include "nbtree/correlation.hpp"
#include "nbtree/json_io.hpp"
#include "nbtree/nb_operator.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/rules.hpp"
#include "nbtree/sweep.hpp"
#include "nbtree/tree_ball.hpp"
#include "nbtree/universal.hpp"

namespace nbtree::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    Json details;
};

struct Criterion {
    int id;
    std::string name;
    /// Wall-clock budget; checked by the acceptance runner, not stored in the report.
    double budget_seconds;
    std::function<CriterionResult(std::uint64_t seed)> run;
};

namespace detail {

inline bool close_rel(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::abs(want);
}

} // namespace detail

// 1 --------------------------------------------------------------------------

inline CriterionResult bound_formulas(std::uint64_t) {
    constexpr double kTol = 1e-12;
    struct Case {
        const char* name;
        double got;
        double want;
    };
    const Case cases[] = {
        {"vertex_corr_bound(3,2)", bounds::vertex_corr_bound(3, 2), 5.0 / 6.0},
        {"hull_corr_bound(4,6)", bounds::hull_corr_bound(4, 6), 2.0 / 3.0},
        {"edge_corr_bound(4,7)", bounds::edge_corr_bound(4, 7), 8.0 / 27.0},
        {"bnorm_bound(3,3)", bounds::bnorm_bound(3, 3), 16.0},
    };
    CriterionResult out{1, "bound formulas", true, Json::array()};
    for (const auto& c : cases) {
        const bool ok = detail::close_rel(c.got, c.want, kTol);
        out.pass = out.pass && ok;
        out.details.push_back({{"case", c.name}, {"value", c.got}, {"expected", c.want}, {"pass", ok}});
    }
    return out;
}

// 2 --------------------------------------------------------------------------

inline CriterionResult norm_growth(std::uint64_t) {
    constexpr int kRadius = 8;
    constexpr int kMaxPower = 6;
    constexpr double kWindow = 0.15;
    CriterionResult out{2, "operator norm vs bound", true, Json::array()};
    for (int d : {3, 4}) {
        const TreeBall ball(d, kRadius);
        const NbOperator op(ball);
        std::vector<double> estimate(kMaxPower + 1, 0.0);
        Json rows = Json::array();
        for (int k = 1; k <= kMaxPower; ++k) {
            const auto r = operator_norm_pow(op, k);
            estimate[static_cast<std::size_t>(k)] = r.estimate;
            const bool ok = r.converged && r.estimate <= r.bound;
            out.pass = out.pass && ok;
            rows.push_back(to_json(r));
        }
        const double slope = 0.5 * std::log(static_cast<double>(d - 1));
        Json steps = Json::array();
        for (int k = 4; k <= kMaxPower; ++k) {
            const double inc = std::log(estimate[static_cast<std::size_t>(k)] / estimate[static_cast<std::size_t>(k - 1)]);
            const bool ok = std::abs(inc - slope) <= kWindow;
            out.pass = out.pass && ok;
            steps.push_back({{"from", k - 1}, {"to", k}, {"log_increment", inc}, {"pass", ok}});
        }
        out.details.push_back({{"d", d}, {"target_slope", slope}, {"norms", rows}, {"increments", steps}});
    }
    return out;
}

// 3 --------------------------------------------------------------------------

inline CriterionResult certificate(std::uint64_t) {
    constexpr double kClosedFormTol = 1e-12;
    CriterionResult out{3, "weight-sum certificate", true, Json::array()};
    for (int d : {3, 4, 5}) {
        for (int k = 1; k <= 5; ++k) {
            const TreeBall ball(d, std::max(2 * k, k + 2));
            const auto r = certify_claims(ball, k, CertifyScope::orbit_representatives);
            const double s = bounds::sqrt_degree_pow(d, 1);
            const double away = std::pow(s, k);
            const double deep = away + k * (d - 2) * std::pow(s, k - 1);
            const auto& a = r.s_inv[static_cast<int>(EdgeClass::away)];
            const auto& t = r.s_inv[static_cast<int>(EdgeClass::toward_deep)];
            const bool away_ok = a.count > 0 && detail::close_rel(static_cast<double>(a.min), away, kClosedFormTol) &&
                                 detail::close_rel(static_cast<double>(a.max), away, kClosedFormTol);
            const bool deep_ok = t.count > 0 && detail::close_rel(static_cast<double>(t.min), deep, kClosedFormTol) &&
                                 detail::close_rel(static_cast<double>(t.max), deep, kClosedFormTol);
            const bool ok = r.strictly_below && away_ok && deep_ok;
            out.pass = out.pass && ok;
            Json row = to_json(r);
            row["away_closed_form"] = away;
            row["toward_deep_closed_form"] = deep;
            row["pass"] = ok;
            out.details.push_back(row);
        }
    }
    return out;
}

// 4 --------------------------------------------------------------------------

inline CriterionResult walk_counts(std::uint64_t seed) {
    constexpr int kEdges = 100;
    constexpr int kRadius = 7;
    CriterionResult out{4, "walk counts", true, Json::array()};
    for (int d : {3, 4}) {
        const TreeBall ball(d, kRadius);
        const NbOperator op(ball);
        for (int k = 1; k <= 5; ++k) {
            // Interior: every head along a k-step walk stays off the boundary.
            std::vector<EdgeId> eligible;
            for (EdgeId e = 0; e < ball.edge_count(); ++e) {
                if (ball.depth(ball.head(e)) + k <= kRadius) {
                    eligible.push_back(e);
                }
            }
            std::uint64_t want = 1;
            for (int i = 0; i < k; ++i) {
                want *= static_cast<std::uint64_t>(d - 1);
            }
            int matches = 0;
            for (int i = 0; i < kEdges; ++i) {
                const auto pick = bits_to_index(counter_bits(seed, 0x3a1c, static_cast<std::uint64_t>(d * 100 + k * 1000 + i)),
                                                eligible.size());
                matches += walk_count(op, eligible[pick], k) == want ? 1 : 0;
            }
            const bool ok = matches == kEdges;
            out.pass = out.pass && ok;
            out.details.push_back({{"d", d}, {"k", k}, {"expected", want}, {"matches", matches}, {"edges", kEdges}});
        }
    }
    return out;
}

// 5 --------------------------------------------------------------------------

inline CriterionResult oracle_agreement(std::uint64_t seed) {
    constexpr int kInstances = 50;
    constexpr double kTol = 1e-12;
    constexpr std::uint64_t kSamples = 100'000;
    constexpr int kSeeds = 20;
    constexpr int kMinCovered = 17;
    CriterionResult out{5, "oracle agreement", true, Json::object()};

    double worst = 0.0;
    Json instances = Json::array();
    for (int i = 0; i < kInstances; ++i) {
        const int r = 1 + i % 2;
        const int k = (i / 2) % 5;
        std::vector<double> profile(static_cast<std::size_t>(r) + 1);
        for (std::size_t j = 0; j < profile.size(); ++j) {
            profile[j] = 2.0 * bits_to_unit(counter_bits(seed, 0x0a11, static_cast<std::uint64_t>(i * 8) + j)) - 1.0;
        }
        const VertexFamily family{BlockRule::linear(LinearRule{profile}), LabelDomain::rademacher()};
        const auto exact = exact_vertex_corr(3, k, family);
        const auto formula = linear_rule_covariance_exact(3, profile, k);
        const double diff = std::max(std::abs(exact.correlation - formula.correlation),
                                     std::abs(exact.covariance - formula.covariance));
        worst = std::max(worst, diff);
        instances.push_back({{"radius", r}, {"k", k}, {"enumerated", exact.correlation}, {"formula", formula.correlation}});
    }
    const bool exact_ok = worst <= kTol;

    const int k = 2;
    const double lambda = 1.0 / std::sqrt(2.0);
    const auto family = make_vertex_family("linear", 3, 2, lambda);
    const double target = linear_rule_covariance_exact(3, LinearRule::geometric(lambda, 2).profile, k).correlation;
    int covered = 0;
    Json runs = Json::array();
    for (int s = 0; s < kSeeds; ++s) {
        const auto est = mc_vertex_corr(3, k, family, kSamples, seed + static_cast<std::uint64_t>(s));
        const bool in = est.ci_low <= target && target <= est.ci_high;
        covered += in ? 1 : 0;
        runs.push_back({{"seed", est.seed}, {"estimate", est.estimate}, {"ci_low", est.ci_low}, {"ci_high", est.ci_high}});
    }
    const bool mc_ok = covered >= kMinCovered;
    out.pass = exact_ok && mc_ok;
    out.details = {{"exact", {{"instances", kInstances}, {"max_abs_difference", worst}, {"pass", exact_ok}, {"rows", instances}}},
                   {"monte_carlo",
                    {{"k", k}, {"lambda", lambda}, {"exact", target}, {"covered", covered}, {"seeds", kSeeds},
                     {"pass", mc_ok}, {"runs", runs}}}};
    return out;
}

// 6 --------------------------------------------------------------------------

inline CriterionResult bound_compliance(std::uint64_t seed) {
    SweepOptions options;
    options.seed = seed;
    const auto rows = bound_sweep(options);
    CriterionResult out{6, "bound compliance sweep", true, Json::object()};
    std::uint64_t fails = 0;
    std::uint64_t exact_rows = 0;
    double tightest = 1e300;
    Json failures = Json::array();
    for (const auto& r : rows) {
        exact_rows += r.mode.rfind("exact", 0) == 0 ? 1 : 0;
        tightest = std::min(tightest, r.margin);
        if (!r.pass) {
            ++fails;
            failures.push_back(to_json(r));
        }
    }
    out.pass = fails == 0 && !rows.empty();
    out.details = {{"rows", rows.size()},
                   {"exact_rows", exact_rows},
                   {"monte_carlo_rows", rows.size() - exact_rows},
                   {"fail", fails},
                   {"smallest_margin", tightest},
                   {"failures", failures}};
    return out;
}

// 7 --------------------------------------------------------------------------

/// Least-squares slope of log corr(k) over k = 2..8 for the profile
/// a_i = (d-1)^(-i/2), radius 8, d = 3, compared with -log(d-1)/2.
inline CriterionResult sharpness_order(std::uint64_t) {
    constexpr int d = 3;
    constexpr int kRadius = 8;
    constexpr double kRelTol = 0.05;
    const auto profile = LinearRule::geometric(1.0 / std::sqrt(static_cast<double>(d - 1)), kRadius).profile;
    const double target = -0.5 * std::log(static_cast<double>(d - 1));
    std::vector<double> ks, logs;
    Json rows = Json::array();
    for (int k = 2; k <= 8; ++k) {
        const auto c = linear_rule_covariance_exact(d, profile, k);
        ks.push_back(k);
        logs.push_back(std::log(c.correlation));
        rows.push_back({{"k", k}, {"corr", c.correlation}, {"bound", bounds::vertex_corr_bound(d, k)}});
    }
    Json steps = Json::array();
    for (std::size_t i = 1; i < logs.size(); ++i) {
        steps.push_back({{"to", ks[i]}, {"log_step", logs[i] - logs[i - 1]}, {"ratio", (logs[i] - logs[i - 1]) / target}});
    }
    const double n = static_cast<double>(ks.size());
    double sk = 0, sl = 0, skk = 0, skl = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sk += ks[i];
        sl += logs[i];
        skk += ks[i] * ks[i];
        skl += ks[i] * logs[i];
    }
    const double slope = (n * skl - sk * sl) / (n * skk - sk * sk);
    const bool ok = std::abs(slope / target - 1.0) <= kRelTol;
    CriterionResult out{7, "sharpness order", ok, Json::object()};
    out.details = {{"target_slope", target}, {"fitted_slope", slope}, {"ratio", slope / target},
                   {"corr", rows},           {"steps", steps}};
    return out;
}

// 8 --------------------------------------------------------------------------

/// Orbit averaging on the depth-1 subtrees behind the ends of a path of
/// length k (d = 3, bits). X1, X2 are the raw labels; the joint law is
/// invariant under independent automorphisms of the two subtrees and under
/// swapping them.
inline CriterionResult orbit_average(std::uint64_t seed) {
    constexpr double kTol = 1e-12;
    constexpr int kRules = 5;
    const LabelDomain bits = LabelDomain::discrete(2);
    CriterionResult out{8, "orbit averaging", true, Json::array()};
    for (int k : {1, 2}) {
        const auto geo = make_pair_geometry(3, k, 2);
        const auto& ball = *geo.ball;
        const EdgeId e1 = ball.edge_between(geo.path[0], geo.path[1]);
        const EdgeId e2 = ball.edge_between(geo.path[geo.path.size() - 1], geo.path[geo.path.size() - 2]);
        for (int i = 0; i < kRules; ++i) {
            const auto f = EdgeRule::random_table(3, 1, bits, seed + 0x0b17 + static_cast<std::uint64_t>(i));
            const auto fbar = symmetrize_edge_rule(f, 3);
            auto moments = [&](const EdgeRule& rule) {
                const EdgeSite s1(rule, ball, e1);
                const EdgeSite s2(rule, ball, e2);
                auto value = [](const EdgeSite& site) {
                    return [&site](const std::vector<double>& z) {
                        std::vector<double> values, scratch;
                        return site([&z](VertexId v) { return z[v]; }, values, scratch);
                    };
                };
                return exact_pair_moments(ball.vertex_count(), bits, s1.support(), value(s1), s2.support(), value(s2));
            };
            const auto m = moments(f);
            const auto mb = moments(fbar);
            const double mean_gap = static_cast<double>(std::max(std::abs(mb.mean_a - m.mean_a), std::abs(mb.mean_b - m.mean_b)));
            const double second_excess = static_cast<double>(std::max(mb.second_a - m.second_a, mb.second_b - m.second_b));
            const double cross_gap = static_cast<double>(std::abs(mb.cross - m.cross));
            const bool ok = !f.symmetric() && mean_gap <= kTol && second_excess <= kTol && cross_gap <= kTol;
            out.pass = out.pass && ok;
            out.details.push_back({{"k", k},
                                   {"rule", i},
                                   {"mean", static_cast<double>(m.mean_a)},
                                   {"mean_gap", mean_gap},
                                   {"second", static_cast<double>(m.second_a)},
                                   {"second_symmetrized", static_cast<double>(mb.second_a)},
                                   {"cross", static_cast<double>(m.cross)},
                                   {"cross_gap", cross_gap},
                                   {"pass", ok}});
        }
    }
    return out;
}

// 9 --------------------------------------------------------------------------

inline CriterionResult polarization(std::uint64_t seed) {
    constexpr int kInstances = 1000;
    constexpr double kTol = 1e-12;
    double worst = 0.0;
    double worst_swap = 0.0;
    for (int i = 0; i < kInstances; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i % 5);
        const auto joint = make_exchangeable(n, seed + 0x9011, static_cast<std::uint64_t>(i));
        std::vector<double> f1(n), f2(n);
        for (std::size_t x = 0; x < n; ++x) {
            f1[x] = 2.0 * bits_to_unit(counter_bits(seed + 0x9012, static_cast<std::uint64_t>(i), x)) - 1.0;
            f2[x] = 2.0 * bits_to_unit(counter_bits(seed + 0x9013, static_cast<std::uint64_t>(i), x)) - 1.0;
        }
        const auto r = polarization_check(joint, f1, f2);
        worst = std::max(worst, r.residual);
        worst_swap = std::max(worst_swap, r.swap_residual);
    }

    // Exhaustive scan of {-1, 0, 1}-valued tables on a 3-point joint.
    const auto joint = make_exchangeable(3, seed + 0x9014);
    std::vector<std::vector<double>> tables;
    for (int code = 0; code < 27; ++code) {
        tables.push_back({static_cast<double>(code % 3 - 1), static_cast<double>(code / 3 % 3 - 1),
                          static_cast<double>(code / 9 - 1)});
    }
    double alpha = 0.0;
    for (const auto& f : tables) {
        alpha = std::max(alpha, std::abs(joint_self_correlation(joint, f)));
    }
    int holds = 0;
    for (const auto& f1 : tables) {
        for (const auto& f2 : tables) {
            holds += two_function_reduction_check(joint, f1, f2, alpha) ? 1 : 0;
        }
    }
    const int pairs = static_cast<int>(tables.size() * tables.size());
    const bool ok = worst <= kTol && worst_swap <= kTol && holds == pairs;
    CriterionResult out{9, "polarization identity", ok, Json::object()};
    out.details = {{"instances", kInstances}, {"max_residual", worst},  {"max_swap_residual", worst_swap},
                   {"scan_alpha", alpha},     {"scan_pairs", pairs},    {"scan_holds", holds}};
    return out;
}

// 10 -------------------------------------------------------------------------

inline CriterionResult edge_homogeneity(std::uint64_t) {
    constexpr double kTol = 1e-12;
    constexpr int d = 3;
    constexpr int k = 2;
    const TreeBall ball(d, 5);
    const NbOperator op(ball);
    const auto rule = EdgeRule::subtree_sum(1);
    const auto r = edge_homogeneity_check(ball, rule, k, LabelDomain::discrete(2));
    // Forward pair count from a source edge whose k-cone is interior.
    const EdgeId source = ball.edge_between(ball.root(), 1);
    const auto forward = walk_count(op, source, k);
    const std::uint64_t want = static_cast<std::uint64_t>((d - 1) * (d - 1));
    const bool ok = r.max_deviation <= kTol && r.cone_residual <= kTol && r.cone_count == want && forward == want;
    CriterionResult out{10, "edge homogeneity", ok, Json::object()};
    out.details = {{"pairs", r.pair_count},          {"common_value", r.common_value},
                   {"max_deviation", r.max_deviation}, {"cone_count", r.cone_count},
                   {"forward_count", forward},         {"expected_count", want},
                   {"cone_residual", r.cone_residual}};
    return out;
}

// 11 -------------------------------------------------------------------------

inline CriterionResult universal_factor(std::uint64_t seed) {
    struct Case {
        int d;
        int depth;
        int radius;
        std::uint64_t trials;
    };
    const Case cases[] = {{3, 3, 6, 500}, {4, 2, 5, 200}};
    CriterionResult out{11, "universal factor roundtrip", true, Json::array()};
    for (const auto& c : cases) {
        const TreeBall ball(c.d, c.radius);
        const auto r = roundtrip_check(ball, c.depth, c.trials, seed);
        const bool ok = r.successes == c.trials && r.collisions == 0 && r.sphere_checks == c.trials;
        out.pass = out.pass && ok;
        Json row = to_json(r);
        row["d"] = c.d;
        row["depth"] = c.depth;
        row["sphere_checks"] = r.sphere_checks;
        out.details.push_back(row);
    }
    return out;
}

// ----------------------------------------------------------------------------

inline const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "bound formulas", 1.0, bound_formulas},
        {2, "operator norm vs bound", 60.0, norm_growth},
        {3, "weight-sum certificate", 120.0, certificate},
        {4, "walk counts", 60.0, walk_counts},
        {5, "oracle agreement", 300.0, oracle_agreement},
        {6, "bound compliance sweep", 300.0, bound_compliance},
        {7, "sharpness order", 10.0, sharpness_order},
        {8, "orbit averaging", 60.0, orbit_average},
        {9, "polarization identity", 60.0, polarization},
        {10, "edge homogeneity", 60.0, edge_homogeneity},
        {11, "universal factor roundtrip", 60.0, universal_factor},
    };
    return all;
}

inline constexpr int kDeterminismId = 12;
inline constexpr const char* kDeterminismName = "determinism across thread counts";

/// Called after each criterion with its result and wall time.
using Progress = std::function<void(const CriterionResult&, double seconds)>;

/// Runs criteria 1-11 at the current thread count.
inline std::vector<CriterionResult> run_criteria(std::uint64_t seed, const Progress& progress = {}) {
    std::vector<CriterionResult> results;
    for (const auto& c : criteria()) {
        const auto t0 = std::chrono::steady_clock::now();
        results.push_back(c.run(seed));
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) {
            progress(results.back(), dt);
        }
    }
    return results;
}

inline Json results_json(const std::vector<CriterionResult>& results) {
    Json arr = Json::array();
    for (const auto& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
    }
    return arr;
}

/// Criterion 12: reruns 1-11 pinned to one and to eight threads and requires
/// the serialized results to match the reference run exactly.
inline CriterionResult determinism(std::uint64_t seed, const std::vector<CriterionResult>& reference) {
    const std::string want = results_json(reference).dump();
    const std::size_t saved = thread_count();
    CriterionResult out{kDeterminismId, kDeterminismName, true, Json::object()};
    Json runs = Json::array();
    for (std::size_t threads : {std::size_t{1}, std::size_t{8}}) {
        bool same = true;
        if (threads != saved) {
            set_thread_count(threads);
            same = results_json(run_criteria(seed)).dump() == want;
        }
        out.pass = out.pass && same;
        runs.push_back({{"threads", threads}, {"identical", same}});
    }
    set_thread_count(saved);
    out.details = {{"runs", runs}};
    return out;
}

/// Full report document: criteria 1-12 plus an overall verdict.
inline Json run_report(std::uint64_t seed, const Progress& progress = {}) {
    auto results = run_criteria(seed, progress);
    const auto t0 = std::chrono::steady_clock::now();
    results.push_back(determinism(seed, results));
    if (progress) {
        progress(results.back(), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
    }
    return {{"seed", seed}, {"pass", all}, {"criteria", results_json(results)}};
}

} // namespace nbtree::acceptance
