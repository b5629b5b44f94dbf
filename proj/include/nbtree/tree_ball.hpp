// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ranges>
#include <string>
#include <vector>

#include "nbtree/error.hpp"

namespace nbtree {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Upper limit on the number of directed edges a TreeBall may hold.
inline constexpr std::uint64_t kMaxDirectedEdges = 50'000'000;

/// A directed edge together with its height (depth of its deeper endpoint).
struct DirectedEdge {
    EdgeId id;
    VertexId tail;
    VertexId head;
    int height;

    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Number of vertices at distance exactly i from a vertex of T_d.
inline std::uint64_t sphere_size(int degree, int i) {
    if (i == 0) {
        return 1;
    }
    std::uint64_t size = static_cast<std::uint64_t>(degree);
    for (int j = 1; j < i; ++j) {
        size *= static_cast<std::uint64_t>(degree - 1);
    }
    return size;
}

/// Vertex count of the radius-R ball of T_d, or 0 when it would exceed the
/// directed-edge cap.
inline std::uint64_t ball_vertex_count(int degree, int radius) {
    std::uint64_t total = 1;
    std::uint64_t level = 1;
    for (int i = 1; i <= radius; ++i) {
        level *= static_cast<std::uint64_t>(i == 1 ? degree : degree - 1);
        total += level;
        if (2 * (total - 1) > kMaxDirectedEdges) {
            return 0;
        }
    }
    return total;
}

/// Finite truncation of the d-regular tree: all vertices within distance R
/// of a root.
///
/// Vertices are numbered breadth-first from the root (id 0), so every sphere
/// and every child list is a contiguous id range. The undirected edge between
/// child c and its parent has index c-1; its directed versions are
/// 2(c-1) (parent to child, pointing away from the root) and 2(c-1)+1
/// (child to parent). Boundary vertices (depth R) keep degree 1.
class TreeBall {
  public:
    TreeBall(int degree, int radius) : degree_(degree), radius_(radius) {
        detail::require(degree >= 3, "degree must be at least 3, got " + std::to_string(degree));
        detail::require(radius >= 0, "radius must be non-negative, got " + std::to_string(radius));
        const std::uint64_t n = ball_vertex_count(degree, radius);
        if (n == 0) {
            throw CapExceeded("ball of degree " + std::to_string(degree) + " and radius " + std::to_string(radius) +
                              " exceeds the cap of " + std::to_string(kMaxDirectedEdges) + " directed edges");
        }
        parent_.resize(n);
        depth_.resize(n);
        first_child_.resize(n);
        level_start_.resize(static_cast<std::size_t>(radius) + 2);

        parent_[0] = kNoVertex;
        depth_[0] = 0;
        level_start_[0] = 0;
        VertexId next = 1;
        for (int level = 0; level <= radius; ++level) {
            const VertexId begin = level_start_[level];
            const VertexId end = level == 0 ? 1 : next;
            level_start_[level + 1] = end;
            for (VertexId v = begin; v < end; ++v) {
                first_child_[v] = next;
                if (level == radius) {
                    continue;
                }
                const int kids = level == 0 ? degree : degree - 1;
                for (int c = 0; c < kids; ++c) {
                    parent_[next] = v;
                    depth_[next] = level + 1;
                    ++next;
                }
            }
        }
    }

    int degree() const { return degree_; }
    int radius() const { return radius_; }
    std::size_t vertex_count() const { return parent_.size(); }
    std::size_t edge_count() const { return 2 * (parent_.size() - 1); }
    VertexId root() const { return 0; }

    VertexId parent(VertexId v) const { return parent_[v]; }
    int depth(VertexId v) const { return depth_[v]; }
    bool is_boundary(VertexId v) const { return depth_[v] == radius_; }

    std::uint32_t child_count(VertexId v) const {
        if (depth_[v] == radius_) {
            return 0;
        }
        return v == 0 ? static_cast<std::uint32_t>(degree_) : static_cast<std::uint32_t>(degree_ - 1);
    }
    auto children(VertexId v) const {
        return std::views::iota(first_child_[v], first_child_[v] + child_count(v));
    }

    /// Degree of v inside the ball (d for interior vertices, 1 on the boundary).
    int ball_degree(VertexId v) const {
        return static_cast<int>(child_count(v)) + (v == 0 ? 0 : 1);
    }

    /// Vertices at depth exactly i, as a contiguous id range.
    auto sphere(int i) const { return std::views::iota(level_start_[i], level_start_[i + 1]); }

    /// Calls fn(w) for each neighbor w of v in ascending id order.
    template <class Fn>
    void for_each_neighbor(VertexId v, Fn&& fn) const {
        if (v != 0) {
            fn(parent_[v]);
        }
        for (VertexId c : children(v)) {
            fn(c);
        }
    }

    std::vector<VertexId> neighbors(VertexId v) const {
        std::vector<VertexId> out;
        out.reserve(static_cast<std::size_t>(degree_));
        for_each_neighbor(v, [&](VertexId w) { out.push_back(w); });
        return out;
    }

    // -- directed edges -----------------------------------------------------

    static constexpr EdgeId reverse(EdgeId e) { return e ^ 1u; }
    static constexpr bool points_away(EdgeId e) { return (e & 1u) == 0; }
    /// The deeper endpoint of e.
    static constexpr VertexId lower_vertex(EdgeId e) { return (e >> 1) + 1; }

    VertexId tail(EdgeId e) const { return points_away(e) ? parent_[lower_vertex(e)] : lower_vertex(e); }
    VertexId head(EdgeId e) const { return points_away(e) ? lower_vertex(e) : parent_[lower_vertex(e)]; }
    int height(EdgeId e) const { return depth_[lower_vertex(e)]; }

    DirectedEdge edge(EdgeId e) const {
        check_edge(e);
        return {e, tail(e), head(e), height(e)};
    }

    /// Id of the directed edge (u, v); u and v must be adjacent.
    EdgeId edge_between(VertexId u, VertexId v) const {
        check_vertex(u);
        check_vertex(v);
        if (v != 0 && parent_[v] == u) {
            return 2 * (v - 1);
        }
        if (u != 0 && parent_[u] == v) {
            return 2 * (u - 1) + 1;
        }
        throw InvalidArgument("vertices " + std::to_string(u) + " and " + std::to_string(v) + " are not adjacent");
    }

    /// Calls fn(e') for every successor e' of e (e -> e'), ascending by head id.
    template <class Fn>
    void for_each_successor(EdgeId e, Fn&& fn) const {
        const VertexId from = tail(e);
        const VertexId at = head(e);
        for_each_neighbor(at, [&](VertexId w) {
            if (w != from) {
                fn(edge_between_unchecked(at, w));
            }
        });
    }

    /// Calls fn(e') for every predecessor e' of e (e' -> e).
    template <class Fn>
    void for_each_predecessor(EdgeId e, Fn&& fn) const {
        const VertexId at = tail(e);
        const VertexId to = head(e);
        for_each_neighbor(at, [&](VertexId w) {
            if (w != to) {
                fn(edge_between_unchecked(w, at));
            }
        });
    }

    // -- geometry -----------------------------------------------------------

    VertexId lowest_common_ancestor(VertexId u, VertexId v) const {
        while (depth_[u] > depth_[v]) {
            u = parent_[u];
        }
        while (depth_[v] > depth_[u]) {
            v = parent_[v];
        }
        while (u != v) {
            u = parent_[u];
            v = parent_[v];
        }
        return u;
    }

    int distance(VertexId u, VertexId v) const {
        check_vertex(u);
        check_vertex(v);
        const VertexId w = lowest_common_ancestor(u, v);
        return depth_[u] + depth_[v] - 2 * depth_[w];
    }

    /// Vertices of the unique u-v path, from u to v.
    std::vector<VertexId> path(VertexId u, VertexId v) const {
        check_vertex(u);
        check_vertex(v);
        const VertexId w = lowest_common_ancestor(u, v);
        std::vector<VertexId> up;
        for (VertexId x = u; x != w; x = parent_[x]) {
            up.push_back(x);
        }
        up.push_back(w);
        std::vector<VertexId> down;
        for (VertexId x = v; x != w; x = parent_[x]) {
            down.push_back(x);
        }
        up.insert(up.end(), down.rbegin(), down.rend());
        return up;
    }

    void check_vertex(VertexId v) const {
        if (v >= parent_.size()) {
            throw InvalidArgument("vertex id " + std::to_string(v) + " out of range (n = " +
                                  std::to_string(parent_.size()) + ")");
        }
    }
    void check_edge(EdgeId e) const {
        if (e >= edge_count()) {
            throw InvalidArgument("edge id " + std::to_string(e) + " out of range (m = " +
                                  std::to_string(edge_count()) + ")");
        }
    }

  private:
    EdgeId edge_between_unchecked(VertexId u, VertexId v) const {
        return (v != 0 && parent_[v] == u) ? 2 * (v - 1) : 2 * (u - 1) + 1;
    }

    int degree_;
    int radius_;
    std::vector<VertexId> parent_;
    std::vector<int> depth_;
    std::vector<VertexId> first_child_;
    std::vector<VertexId> level_start_;
};

inline TreeBall build_ball(int degree, int radius) { return TreeBall(degree, radius); }

inline int vertex_distance(const TreeBall& ball, VertexId u, VertexId v) { return ball.distance(u, v); }

/// Distance of directed edges: 0 for the same undirected edge, otherwise
/// 1 + the minimum distance between their endpoints.
inline int edge_distance(const TreeBall& ball, EdgeId e1, EdgeId e2) {
    ball.check_edge(e1);
    ball.check_edge(e2);
    if ((e1 >> 1) == (e2 >> 1)) {
        return 0;
    }
    const VertexId a[2] = {ball.tail(e1), ball.head(e1)};
    const VertexId b[2] = {ball.tail(e2), ball.head(e2)};
    int best = std::numeric_limits<int>::max();
    for (VertexId x : a) {
        for (VertexId y : b) {
            best = std::min(best, ball.distance(x, y));
        }
    }
    return 1 + best;
}

/// Smallest connected vertex set containing every vertex of V, sorted by id.
inline std::vector<VertexId> convex_hull(const TreeBall& ball, const std::vector<VertexId>& vertices) {
    detail::require(!vertices.empty(), "convex hull of an empty vertex set");
    for (VertexId v : vertices) {
        ball.check_vertex(v);
    }
    VertexId top = vertices.front();
    for (VertexId v : vertices) {
        top = ball.lowest_common_ancestor(top, v);
    }
    // Union of the paths from each vertex up to the common ancestor.
    std::vector<VertexId> hull;
    std::vector<bool> seen(ball.vertex_count(), false);
    seen[top] = true;
    hull.push_back(top);
    for (VertexId v : vertices) {
        for (VertexId x = v; !seen[x]; x = ball.parent(x)) {
            seen[x] = true;
            hull.push_back(x);
        }
    }
    std::sort(hull.begin(), hull.end());
    return hull;
}

struct HullDistance {
    int k;
    VertexId v1;
    VertexId v2;
};

/// Distance between the convex hulls of V1 and V2 and the closest pair of hull
/// vertices realizing it. Intersecting hulls give k = 0 with a shared vertex
/// as both witnesses.
inline HullDistance hull_distance(const TreeBall& ball, const std::vector<VertexId>& v1,
                                  const std::vector<VertexId>& v2) {
    detail::require(!v1.empty() && !v2.empty(), "hull distance needs non-empty vertex sets");
    const auto h1 = convex_hull(ball, v1);
    const auto h2 = convex_hull(ball, v2);
    std::vector<VertexId> common;
    std::set_intersection(h1.begin(), h1.end(), h2.begin(), h2.end(), std::back_inserter(common));
    if (!common.empty()) {
        return {0, common.front(), common.front()};
    }
    // Every path from hull 1 to hull 2 leaves hull 1 once and enters hull 2
    // once, through the unique bridge between them.
    const auto route = ball.path(h1.front(), h2.front());
    std::size_t last_in_1 = 0;
    for (std::size_t i = 0; i < route.size(); ++i) {
        if (std::binary_search(h1.begin(), h1.end(), route[i])) {
            last_in_1 = i;
        }
    }
    std::size_t first_in_2 = last_in_1 + 1;
    while (!std::binary_search(h2.begin(), h2.end(), route[first_in_2])) {
        ++first_in_2;
    }
    return {static_cast<int>(first_in_2 - last_in_1), route[last_in_1], route[first_in_2]};
}

inline std::vector<EdgeId> successors(const TreeBall& ball, EdgeId e) {
    ball.check_edge(e);
    std::vector<EdgeId> out;
    ball.for_each_successor(e, [&](EdgeId s) { out.push_back(s); });
    return out;
}

inline std::vector<EdgeId> predecessors(const TreeBall& ball, EdgeId e) {
    ball.check_edge(e);
    std::vector<EdgeId> out;
    ball.for_each_predecessor(e, [&](EdgeId p) { out.push_back(p); });
    return out;
}

} // namespace nbtree
