// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbtree/bounds.hpp"
#include "nbtree/correlation.hpp"
#include "nbtree/error.hpp"
#include "nbtree/labels.hpp"
#include "nbtree/rules.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

/// Named block-factor family with the label domain it is sampled over.
struct VertexFamily {
    BlockRule rule;
    LabelDomain domain;
};

/// Builds a block rule from CLI-style parameters. `linear` uses the
/// geometric profile lambda^i and centered (Rademacher) labels; the other
/// families read {0, 1} labels.
inline VertexFamily make_vertex_family(const std::string& name, int d, int radius = 1, double lambda = 0.0,
                                       std::optional<double> level = std::nullopt) {
    const LabelDomain bits = LabelDomain::discrete(2);
    if (name == "pointwise") {
        return {BlockRule::pointwise(), bits};
    }
    if (name == "sum") {
        return {BlockRule::sum(radius), bits};
    }
    if (name == "threshold") {
        const double count = static_cast<double>(ball_vertex_count(d, radius));
        return {BlockRule::threshold(radius, level.value_or(count / 2.0)), bits};
    }
    if (name == "majority") {
        return {BlockRule::majority(), bits};
    }
    if (name == "xor-pair") {
        return {BlockRule::xor_pair(), bits};
    }
    if (name == "linear") {
        const double lam = lambda > 0.0 ? lambda : 1.0 / std::sqrt(static_cast<double>(d - 1));
        return {BlockRule::linear(LinearRule::geometric(lam, radius)), LabelDomain::rademacher()};
    }
    throw InvalidArgument("unknown rule family '" + name + "'");
}

/// Edge rule reading the values of a block factor on the subtree behind e.
struct EdgeFamily {
    std::string name;
    EdgeRule rule;
    VertexFamily factor;
};

inline EdgeFamily make_edge_family(const std::string& name, int d, int depth = 1) {
    if (name == "tail-value") {
        return {name, EdgeRule::tail_value(), make_vertex_family("sum", d, 1)};
    }
    if (name == "subtree-sum") {
        return {name, EdgeRule::subtree_sum(depth), make_vertex_family("pointwise", d)};
    }
    if (name == "subtree-threshold") {
        // X is the radius-1 sum (mean (d+1)/2); threshold at the mean of the subtree sum.
        const double positions = static_cast<double>(RootedLayout::subtree(d, depth).size());
        return {name, EdgeRule::subtree_threshold(depth, positions * (d + 1) / 2.0), make_vertex_family("sum", d, 1)};
    }
    throw InvalidArgument("unknown edge rule family '" + name + "'");
}

/// Orientation of the two edges at the ends of a path x_0 .. x_{k+1}.
enum class EdgeOrientation { forward, apart, facing };

inline const char* to_string(EdgeOrientation o) {
    switch (o) {
    case EdgeOrientation::forward:
        return "forward";
    case EdgeOrientation::apart:
        return "apart";
    case EdgeOrientation::facing:
        return "facing";
    }
    return "?";
}

/// A ball with a path of the requested length through the root: x_0 sits at
/// depth ceil(len/2) below the first root child, x_len at depth floor(len/2)
/// below the second. The ball extends `margin` beyond the deeper endpoint.
struct PairGeometry {
    std::shared_ptr<const TreeBall> ball;
    std::vector<VertexId> path;

    VertexId front() const { return path.front(); }
    VertexId back() const { return path.back(); }
};

inline PairGeometry make_pair_geometry(int d, int length, int margin) {
    detail::require(length >= 0, "path length must be non-negative");
    const int a = (length + 1) / 2;
    const int b = length / 2;
    auto ball = std::make_shared<const TreeBall>(d, a + margin);
    auto descend = [&](int child, int steps) {
        VertexId x = ball->root();
        for (int s = 0; s < steps; ++s) {
            x = *ball->children(x).begin() + static_cast<VertexId>(s == 0 ? child : 0);
        }
        return x;
    };
    const VertexId x0 = descend(0, a);
    const VertexId x1 = descend(1, b);
    return {ball, ball->path(x0, x1)};
}

namespace detail {

inline auto counter_source(LabelDomain domain, std::uint64_t seed, std::uint64_t index) {
    return CounterLabels{domain, seed, index};
}

/// Up to two neighbors of x off the path (not equal to `avoid`).
inline std::vector<VertexId> star(const TreeBall& ball, VertexId x, VertexId avoid) {
    std::vector<VertexId> out{x};
    ball.for_each_neighbor(x, [&](VertexId w) {
        if (w != avoid && out.size() < 3) {
            out.push_back(w);
        }
    });
    return out;
}

} // namespace detail

// -- vertex pairs ------------------------------------------------------------

inline CorrEstimate mc_vertex_corr(int d, int k, const VertexFamily& family, std::uint64_t samples,
                                   std::uint64_t seed) {
    const auto geo = make_pair_geometry(d, k, family.rule.radius());
    const BlockSite s1(family.rule, *geo.ball, geo.front());
    const BlockSite s2(family.rule, *geo.ball, geo.back());
    return monte_carlo_corr(
        [&](std::uint64_t sd, std::uint64_t i) {
            const auto z = detail::counter_source(family.domain, sd, i);
            std::vector<double> scratch;
            return std::pair<double, double>{s1(z, scratch), s2(z, scratch)};
        },
        samples, seed);
}

inline ExactCorrResult exact_vertex_corr(int d, int k, const VertexFamily& family) {
    const auto geo = make_pair_geometry(d, k, family.rule.radius());
    auto id = [](std::span<const double> x) { return x[0]; };
    return exact_corr_discrete(*geo.ball, family.rule, family.domain, {geo.front()}, id, {geo.back()}, id);
}

// -- region pairs ------------------------------------------------------------
//
// V1 = x_0 plus two off-path neighbors, V2 = x_k plus two off-path neighbors,
// so both hulls are stars and their distance is k. h1 sums X over V1, h2 takes
// the maximum over V2.

inline double region_sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v;
    }
    return acc;
}

inline double region_max(std::span<const double> x) { return *std::max_element(x.begin(), x.end()); }

struct RegionPair {
    PairGeometry geometry;
    std::vector<VertexId> v1;
    std::vector<VertexId> v2;
};

inline RegionPair make_region_pair(int d, int k, int rule_radius) {
    detail::require(k >= 1, "region pairs need hull distance at least 1");
    auto geo = make_pair_geometry(d, k, rule_radius + 1);
    const auto& ball = *geo.ball;
    auto v1 = detail::star(ball, geo.front(), geo.path[1]);
    auto v2 = detail::star(ball, geo.back(), geo.path[geo.path.size() - 2]);
    return {std::move(geo), std::move(v1), std::move(v2)};
}

inline CorrEstimate mc_region_corr(int d, int k, const VertexFamily& family, std::uint64_t samples,
                                   std::uint64_t seed) {
    const auto pair = make_region_pair(d, k, family.rule.radius());
    std::vector<BlockSite> s1, s2;
    for (VertexId v : pair.v1) {
        s1.emplace_back(family.rule, *pair.geometry.ball, v);
    }
    for (VertexId v : pair.v2) {
        s2.emplace_back(family.rule, *pair.geometry.ball, v);
    }
    return monte_carlo_corr(
        [&](std::uint64_t sd, std::uint64_t i) {
            const auto z = detail::counter_source(family.domain, sd, i);
            std::vector<double> scratch;
            std::vector<double> x1, x2;
            for (const auto& s : s1) {
                x1.push_back(s(z, scratch));
            }
            for (const auto& s : s2) {
                x2.push_back(s(z, scratch));
            }
            return std::pair<double, double>{region_sum(x1), region_max(x2)};
        },
        samples, seed);
}

inline ExactCorrResult exact_region_corr(int d, int k, const VertexFamily& family) {
    const auto pair = make_region_pair(d, k, family.rule.radius());
    return exact_corr_discrete(*pair.geometry.ball, family.rule, family.domain, pair.v1, region_sum, pair.v2,
                               region_max);
}

// -- edge pairs --------------------------------------------------------------

struct EdgePair {
    PairGeometry geometry;
    EdgeId e1;
    EdgeId e2;
};

/// Two directed edges at edge distance k: the first and last edge of a path
/// with k + 1 edges, oriented as requested.
inline EdgePair make_edge_pair(int d, int k, int subtree_depth, int factor_radius, EdgeOrientation orientation) {
    detail::require(k >= 1, "edge pairs need edge distance at least 1");
    auto geo = make_pair_geometry(d, k + 1, subtree_depth + factor_radius + 1);
    const auto& ball = *geo.ball;
    const auto& p = geo.path;
    const std::size_t last = p.size() - 1;
    EdgeId e1 = ball.edge_between(p[0], p[1]);
    EdgeId e2 = ball.edge_between(p[last - 1], p[last]);
    if (orientation == EdgeOrientation::apart) {
        e1 = TreeBall::reverse(e1);
    } else if (orientation == EdgeOrientation::facing) {
        e2 = TreeBall::reverse(e2);
    }
    return {std::move(geo), e1, e2};
}

inline CorrEstimate mc_edge_corr(int d, int k, const EdgeFamily& family, EdgeOrientation orientation,
                                 std::uint64_t samples, std::uint64_t seed) {
    const auto pair = make_edge_pair(d, k, family.rule.depth(), family.factor.rule.radius(), orientation);
    const EdgeSite s1(family.rule, *pair.geometry.ball, pair.e1, &family.factor.rule);
    const EdgeSite s2(family.rule, *pair.geometry.ball, pair.e2, &family.factor.rule);
    return monte_carlo_corr(
        [&](std::uint64_t sd, std::uint64_t i) {
            const auto z = detail::counter_source(family.factor.domain, sd, i);
            std::vector<double> values, scratch;
            const double a = s1(z, values, scratch);
            const double b = s2(z, values, scratch);
            return std::pair<double, double>{a, b};
        },
        samples, seed);
}

inline ExactCorrResult exact_edge_corr(int d, int k, const EdgeFamily& family, EdgeOrientation orientation) {
    const auto pair = make_edge_pair(d, k, family.rule.depth(), family.factor.rule.radius(), orientation);
    const auto& ball = *pair.geometry.ball;
    const EdgeSite s1(family.rule, ball, pair.e1, &family.factor.rule);
    const EdgeSite s2(family.rule, ball, pair.e2, &family.factor.rule);
    auto value = [](const EdgeSite& site) {
        return [&site](const std::vector<double>& z) {
            std::vector<double> values, scratch;
            return site([&z](VertexId v) { return z[v]; }, values, scratch);
        };
    };
    return to_corr_result(exact_pair_moments(ball.vertex_count(), family.factor.domain, s1.support(), value(s1),
                                             s2.support(), value(s2)));
}

// -- sweep -------------------------------------------------------------------

struct SweepRow {
    int d = 0;
    int k = 0;
    std::string rule;
    /// "<exact|mc>-<vertex|region|edge>".
    std::string mode;
    double value = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool pass = false;
    double margin = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct SweepOptions {
    std::vector<int> degrees{3, 4};
    int k_min = 1;
    int k_max = 8;
    std::uint64_t samples = 20000;
    std::uint64_t seed = 0;
    bool exact = true;
    bool monte_carlo = true;
};

inline const std::vector<std::string>& sweep_vertex_families() {
    static const std::vector<std::string> names{"pointwise", "sum", "threshold", "majority", "linear"};
    return names;
}

inline const std::vector<std::string>& sweep_edge_families() {
    static const std::vector<std::string> names{"tail-value", "subtree-sum", "subtree-threshold"};
    return names;
}

namespace detail {

inline VertexFamily sweep_family(const std::string& name, int d) {
    return make_vertex_family(name, d, name == "linear" ? 2 : (name == "pointwise" ? 0 : 1));
}

inline SweepRow exact_row(int d, int k, std::string rule, std::string mode, const ExactCorrResult& r, double bound) {
    const auto verdict = verify_bound(r.correlation, bound);
    return {d, k, std::move(rule), std::move(mode), r.correlation, 0.0, bound, verdict.pass, verdict.margin,
            r.configurations, 0};
}

inline SweepRow mc_row(int d, int k, std::string rule, std::string mode, const CorrEstimate& r, double bound) {
    const auto verdict = verify_bound(r.estimate, bound, r.std_error);
    return {d, k, std::move(rule), std::move(mode), r.estimate, r.std_error, bound, verdict.pass, verdict.margin,
            r.samples, r.seed};
}

} // namespace detail

/// Compares exact and sampled correlations of the built-in families with the
/// vertex, hull and edge bounds. Exact rows are produced only where the
/// enumeration fits under kMaxEnumeration.
inline std::vector<SweepRow> bound_sweep(const SweepOptions& options) {
    std::vector<SweepRow> rows;
    const EdgeOrientation orientations[] = {EdgeOrientation::forward, EdgeOrientation::apart, EdgeOrientation::facing};
    for (int d : options.degrees) {
        for (int k = options.k_min; k <= options.k_max; ++k) {
            const double vb = bounds::vertex_corr_bound(d, k);
            const double hb = bounds::hull_corr_bound(d, k);
            const double eb = bounds::edge_corr_bound(d, k);
            for (const auto& name : sweep_vertex_families()) {
                const auto family = detail::sweep_family(name, d);
                if (options.exact) {
                    try {
                        rows.push_back(detail::exact_row(d, k, name, "exact-vertex", exact_vertex_corr(d, k, family), vb));
                    } catch (const CapExceeded&) {
                    }
                    try {
                        rows.push_back(detail::exact_row(d, k, name, "exact-region", exact_region_corr(d, k, family), hb));
                    } catch (const CapExceeded&) {
                    }
                }
                if (options.monte_carlo) {
                    rows.push_back(detail::mc_row(d, k, name, "mc-vertex",
                                                  mc_vertex_corr(d, k, family, options.samples, options.seed), vb));
                    rows.push_back(detail::mc_row(d, k, name, "mc-region",
                                                  mc_region_corr(d, k, family, options.samples, options.seed), hb));
                }
            }
            for (const auto& name : sweep_edge_families()) {
                const auto family = make_edge_family(name, d);
                for (auto o : orientations) {
                    const std::string label = name + "/" + to_string(o);
                    if (options.exact) {
                        try {
                            rows.push_back(detail::exact_row(d, k, label, "exact-edge", exact_edge_corr(d, k, family, o), eb));
                        } catch (const CapExceeded&) {
                        }
                    }
                    if (options.monte_carlo) {
                        rows.push_back(detail::mc_row(d, k, label, "mc-edge",
                                                      mc_edge_corr(d, k, family, o, options.samples, options.seed), eb));
                    }
                }
            }
        }
    }
    return rows;
}

} // namespace nbtree
