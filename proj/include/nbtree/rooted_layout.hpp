// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "nbtree/error.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

using Permutation = std::vector<std::uint32_t>;

/// Shape of a complete rooted tree truncated at a fixed depth, with positions
/// numbered breadth-first. The root has `root_branching` children and every
/// other non-leaf position has `branching` children.
///
/// The rooted r-ball of T_d is (d, d-1, r); the depth-D truncation of the
/// (d-1)-ary subtree behind a directed edge is (d-1, d-1, D).
class RootedLayout {
  public:
    RootedLayout(int root_branching, int branching, int depth)
        : root_branching_(root_branching), branching_(branching), depth_(depth) {
        detail::require(root_branching >= 1 && branching >= 1, "layout branching must be positive");
        detail::require(depth >= 0, "layout depth must be non-negative");
        parent_.push_back(0);
        level_.push_back(0);
        first_child_.push_back(0);
        std::uint32_t level_begin = 0;
        std::uint32_t level_end = 1;
        for (int lvl = 0; lvl < depth; ++lvl) {
            for (std::uint32_t x = level_begin; x < level_end; ++x) {
                first_child_[x] = static_cast<std::uint32_t>(parent_.size());
                const int kids = x == 0 ? root_branching : branching;
                for (int c = 0; c < kids; ++c) {
                    parent_.push_back(x);
                    level_.push_back(lvl + 1);
                    first_child_.push_back(0);
                }
            }
            level_begin = level_end;
            level_end = static_cast<std::uint32_t>(parent_.size());
        }
        for (std::uint32_t x = level_begin; x < level_end; ++x) {
            first_child_[x] = static_cast<std::uint32_t>(parent_.size());
        }
    }

    static RootedLayout vertex_ball(int d, int r) { return {d, d - 1, r}; }
    static RootedLayout subtree(int d, int depth) { return {d - 1, d - 1, depth}; }

    std::size_t size() const { return parent_.size(); }
    int depth() const { return depth_; }
    int root_branching() const { return root_branching_; }
    int branching() const { return branching_; }
    int level(std::uint32_t pos) const { return level_[pos]; }
    std::uint32_t parent(std::uint32_t pos) const { return parent_[pos]; }
    std::uint32_t first_child(std::uint32_t pos) const { return first_child_[pos]; }
    std::uint32_t child_count(std::uint32_t pos) const {
        if (level_[pos] == depth_) {
            return 0;
        }
        return static_cast<std::uint32_t>(pos == 0 ? root_branching_ : branching_);
    }

    /// Order of the automorphism group (product of b! over non-leaf positions),
    /// saturating at UINT64_MAX.
    std::uint64_t automorphism_count() const {
        std::uint64_t total = 1;
        for (std::uint32_t x = 0; x < size(); ++x) {
            for (std::uint32_t i = 2; i <= child_count(x); ++i) {
                if (total > UINT64_MAX / i) {
                    return UINT64_MAX;
                }
                total *= i;
            }
        }
        return total;
    }

    /// Every automorphism, as a position map g; the relabeled configuration is
    /// local[g[pos]].
    std::vector<Permutation> automorphisms(std::uint64_t cap = 1'000'000) const {
        const std::uint64_t count = automorphism_count();
        if (count > cap) {
            throw CapExceeded("layout has " + std::to_string(count) + " automorphisms, cap is " +
                              std::to_string(cap));
        }
        std::vector<std::uint32_t> internal;
        for (std::uint32_t x = 0; x < size(); ++x) {
            if (child_count(x) > 1) {
                internal.push_back(x);
            }
        }
        std::vector<std::vector<Permutation>> choices;
        for (std::uint32_t x : internal) {
            Permutation p(child_count(x));
            std::iota(p.begin(), p.end(), 0u);
            std::vector<Permutation> all;
            do {
                all.push_back(p);
            } while (std::next_permutation(p.begin(), p.end()));
            choices.push_back(std::move(all));
        }
        std::vector<Permutation> result;
        result.reserve(count);
        std::vector<std::size_t> odometer(internal.size(), 0);
        std::vector<const Permutation*> sigma(size(), nullptr);
        while (true) {
            for (std::size_t i = 0; i < internal.size(); ++i) {
                sigma[internal[i]] = &choices[i][odometer[i]];
            }
            result.push_back(compose_map(sigma));
            std::size_t i = 0;
            while (i < odometer.size() && ++odometer[i] == choices[i].size()) {
                odometer[i++] = 0;
            }
            if (i == odometer.size()) {
                break;
            }
        }
        return result;
    }

    /// A uniformly random automorphism drawn from the counter stream (seed, index).
    Permutation random_automorphism(std::uint64_t seed, std::uint64_t index) const {
        std::vector<Permutation> storage(size());
        std::vector<const Permutation*> sigma(size(), nullptr);
        std::uint64_t draw = 0;
        for (std::uint32_t x = 0; x < size(); ++x) {
            const std::uint32_t b = child_count(x);
            if (b < 2) {
                continue;
            }
            Permutation p(b);
            std::iota(p.begin(), p.end(), 0u);
            for (std::uint32_t i = b - 1; i > 0; --i) {
                const std::uint32_t j = bits_to_index(counter_bits(seed, index, draw++), i + 1);
                std::swap(p[i], p[j]);
            }
            storage[x] = std::move(p);
            sigma[x] = &storage[x];
        }
        return compose_map(sigma);
    }

    friend bool operator==(const RootedLayout& a, const RootedLayout& b) {
        return a.root_branching_ == b.root_branching_ && a.branching_ == b.branching_ && a.depth_ == b.depth_;
    }

  private:
    Permutation compose_map(const std::vector<const Permutation*>& sigma) const {
        Permutation g(size());
        g[0] = 0;
        for (std::uint32_t x = 0; x < size(); ++x) {
            const std::uint32_t b = child_count(x);
            for (std::uint32_t i = 0; i < b; ++i) {
                const std::uint32_t slot = sigma[x] ? (*sigma[x])[i] : i;
                g[first_child_[x] + i] = first_child_[g[x]] + slot;
            }
        }
        return g;
    }

    int root_branching_;
    int branching_;
    int depth_;
    std::vector<std::uint32_t> parent_;
    std::vector<int> level_;
    std::vector<std::uint32_t> first_child_;
};

namespace detail {

/// Breadth-first walk from `root`, never stepping to `excluded` from the root,
/// children in ascending id order. Every non-leaf position must find exactly
/// the number of children the layout asks for.
inline std::vector<VertexId> gather(const TreeBall& ball, VertexId root, VertexId excluded,
                                    const RootedLayout& layout, const char* what) {
    std::vector<VertexId> ids(layout.size());
    std::vector<VertexId> from(layout.size());
    ids[0] = root;
    from[0] = excluded;
    for (std::uint32_t x = 0; x < layout.size(); ++x) {
        const std::uint32_t want = layout.child_count(x);
        if (want == 0) {
            continue;
        }
        std::uint32_t got = 0;
        const VertexId v = ids[x];
        ball.for_each_neighbor(v, [&](VertexId w) {
            if (w == from[x]) {
                return;
            }
            if (got < want) {
                ids[layout.first_child(x) + got] = w;
                from[layout.first_child(x) + got] = v;
            }
            ++got;
        });
        if (got != want) {
            throw InvalidArgument(std::string(what) + " around vertex " + std::to_string(root) +
                                  " leaves the tree ball (radius " + std::to_string(ball.radius()) + ")");
        }
    }
    return ids;
}

} // namespace detail

/// Vertex ids of the rooted r-ball around v, in layout order.
inline std::vector<VertexId> gather_vertex_ball(const TreeBall& ball, VertexId v, int r) {
    ball.check_vertex(v);
    return detail::gather(ball, v, kNoVertex, RootedLayout::vertex_ball(ball.degree(), r), "radius-r ball");
}

/// Vertex ids of the depth-D truncation of the subtree behind e = (u, w)
/// (vertices closer to u than to w), rooted at u, in layout order.
inline std::vector<VertexId> gather_subtree(const TreeBall& ball, EdgeId e, int depth) {
    ball.check_edge(e);
    return detail::gather(ball, ball.tail(e), ball.head(e), RootedLayout::subtree(ball.degree(), depth),
                          "subtree truncation");
}

} // namespace nbtree
