// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "nbtree/error.hpp"
#include "nbtree/labels.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/rooted_layout.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

/// Order-free encoding of the labelled depth-D ball around a vertex.
///
/// levels[0] holds the center label. levels[j] lists the labels at distance j
/// grouped by parent: parents are taken in the order of levels[j-1], and each
/// parent's children appear sorted. spheres[j] is levels[j] sorted.
struct VertexCode {
    VertexId center = kNoVertex;
    int depth = 0;
    std::vector<std::vector<double>> levels;
    std::vector<std::vector<double>> spheres;

    double own_label() const { return levels.front().front(); }

    /// Compares the payload only; the center id is bookkeeping.
    friend bool operator==(const VertexCode& a, const VertexCode& b) {
        return a.depth == b.depth && a.levels == b.levels;
    }
};

/// Encodes the depth-D ball around v. Labels inside the ball must be pairwise
/// distinct; a repeat throws LabelCollision.
template <class Labels>
VertexCode encode_vertex(const TreeBall& ball, const Labels& labels, VertexId v, int depth) {
    detail::require(depth >= 0, "code depth must be non-negative");
    const auto layout = RootedLayout::vertex_ball(ball.degree(), depth);
    const auto ids = gather_vertex_ball(ball, v, depth);

    std::vector<double> value(ids.size());
    for (std::size_t p = 0; p < ids.size(); ++p) {
        value[p] = labels(ids[p]);
    }
    std::vector<double> sorted = value;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw LabelCollision("repeated label in the depth-" + std::to_string(depth) + " ball around vertex " +
                             std::to_string(v));
    }

    VertexCode code;
    code.center = v;
    code.depth = depth;
    code.levels.push_back({value[0]});
    std::vector<std::uint32_t> order{0};
    for (int j = 1; j <= depth; ++j) {
        std::vector<std::uint32_t> next;
        std::vector<double> level;
        for (std::uint32_t parent : order) {
            std::vector<std::uint32_t> kids(layout.child_count(parent));
            for (std::uint32_t c = 0; c < kids.size(); ++c) {
                kids[c] = layout.first_child(parent) + c;
            }
            std::sort(kids.begin(), kids.end(), [&](std::uint32_t a, std::uint32_t b) { return value[a] < value[b]; });
            for (std::uint32_t c : kids) {
                next.push_back(c);
                level.push_back(value[c]);
            }
        }
        code.levels.push_back(std::move(level));
        order = std::move(next);
    }
    code.spheres = code.levels;
    for (auto& s : code.spheres) {
        std::sort(s.begin(), s.end());
    }
    return code;
}

inline VertexCode encode_vertex(const LabelConfig& config, VertexId v, int depth) {
    return encode_vertex(config.ball(), config, v, depth);
}

/// Labels of the n-1 interior vertices of the u-v path, dist(u, v) = n, in
/// order from u: position j is the unique label shared by the radius-j sphere
/// of u and the radius-(n-j) sphere of v.
inline std::vector<double> reconstruct_path(const VertexCode& code_u, const VertexCode& code_v, int n) {
    detail::require(n >= 1, "path length must be at least 1");
    detail::require(n - 1 <= code_u.depth && n - 1 <= code_v.depth,
                    "path length " + std::to_string(n) + " is beyond the code horizon");
    std::vector<double> path;
    path.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 1; j < n; ++j) {
        const auto& a = code_u.spheres[static_cast<std::size_t>(j)];
        const auto& b = code_v.spheres[static_cast<std::size_t>(n - j)];
        std::vector<double> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        if (common.size() != 1) {
            throw Error("path position " + std::to_string(j) + " has " + std::to_string(common.size()) +
                        " candidate labels");
        }
        path.push_back(common.front());
    }
    return path;
}

/// Structural check, independent of labels: for 0 < j < n = dist(u, v) exactly
/// one vertex of the ball is at distance j from u and n - j from v.
inline bool sphere_uniqueness(const TreeBall& ball, VertexId u, VertexId v) {
    const int n = ball.distance(u, v);
    std::vector<int> hits(static_cast<std::size_t>(std::max(n, 1)), 0);
    for (VertexId w = 0; w < ball.vertex_count(); ++w) {
        const int j = ball.distance(u, w);
        if (j > 0 && j < n && ball.distance(w, v) == n - j) {
            ++hits[static_cast<std::size_t>(j)];
        }
    }
    for (int j = 1; j < n; ++j) {
        if (hits[static_cast<std::size_t>(j)] != 1) {
            return false;
        }
    }
    return true;
}

struct RoundtripResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t collisions = 0;
    /// Trials whose pair passed sphere_uniqueness.
    std::uint64_t sphere_checks = 0;
};

namespace detail {

enum class TrialOutcome : std::uint8_t { failure, success, collision };

struct TrialResult {
    TrialOutcome outcome = TrialOutcome::failure;
    bool sphere_ok = false;
};

/// Random pair (u, v) with dist = n, both at depth <= limit, drawn from the
/// counter stream (seed, stream). Dead-end walks are redrawn.
inline std::pair<VertexId, VertexId> random_pair(const TreeBall& ball, int limit, int n, std::uint64_t seed,
                                                 std::uint64_t stream) {
    const auto eligible = ball_vertex_count(ball.degree(), limit);
    std::uint64_t draw = 0;
    for (;;) {
        VertexId u = static_cast<VertexId>(bits_to_index(counter_bits(seed, stream, draw++), eligible));
        VertexId prev = kNoVertex;
        VertexId cur = u;
        bool stuck = false;
        for (int step = 0; step < n && !stuck; ++step) {
            std::vector<VertexId> options;
            ball.for_each_neighbor(cur, [&](VertexId w) {
                if (w != prev && ball.depth(w) <= limit) {
                    options.push_back(w);
                }
            });
            if (options.empty()) {
                stuck = true;
                break;
            }
            const auto pick = bits_to_index(counter_bits(seed, stream, draw++), options.size());
            prev = cur;
            cur = options[pick];
        }
        if (!stuck) {
            return {u, cur};
        }
    }
}

} // namespace detail

/// Encodes random pairs at distance 1..D+1 and checks that reconstruction
/// recovers the true path labels. Trial t uses its own counter streams, so
/// the result is independent of the thread count.
inline RoundtripResult roundtrip_check(const TreeBall& ball, int depth, std::uint64_t trials, std::uint64_t seed) {
    detail::require(depth >= 0, "code depth must be non-negative");
    const int need = depth + (depth + 2) / 2 + 1;
    detail::require(ball.radius() >= need, "roundtrip at depth " + std::to_string(depth) + " needs radius >= " +
                                               std::to_string(need) + ", got " + std::to_string(ball.radius()));
    const int limit = ball.radius() - depth;
    std::vector<detail::TrialResult> results(trials);
    parallel_for(trials, [&](std::size_t t) {
        const std::uint64_t pick_stream = 2 * static_cast<std::uint64_t>(t);
        const int n = 1 + static_cast<int>(bits_to_index(counter_bits(seed, pick_stream, ~0ull), depth + 1));
        const auto [u, v] = detail::random_pair(ball, limit, n, seed, pick_stream);
        const CounterLabels labels{LabelDomain::uniform(), seed, pick_stream + 1};
        auto& out = results[t];
        out.sphere_ok = sphere_uniqueness(ball, u, v);
        try {
            const auto code_u = encode_vertex(ball, labels, u, depth);
            const auto code_v = encode_vertex(ball, labels, v, depth);
            const auto got = reconstruct_path(code_u, code_v, n);
            const auto truth = ball.path(u, v);
            std::vector<double> want;
            for (std::size_t i = 1; i + 1 < truth.size(); ++i) {
                want.push_back(labels(truth[i]));
            }
            out.outcome = got == want ? detail::TrialOutcome::success : detail::TrialOutcome::failure;
        } catch (const LabelCollision&) {
            out.outcome = detail::TrialOutcome::collision;
        } catch (const Error&) {
            out.outcome = detail::TrialOutcome::failure;
        }
    });
    RoundtripResult summary;
    summary.trials = trials;
    for (const auto& r : results) {
        summary.successes += r.outcome == detail::TrialOutcome::success ? 1 : 0;
        summary.collisions += r.outcome == detail::TrialOutcome::collision ? 1 : 0;
        summary.sphere_checks += r.sphere_ok ? 1 : 0;
    }
    return summary;
}

} // namespace nbtree
