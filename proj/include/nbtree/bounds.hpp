// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nbtree/error.hpp"

namespace nbtree::bounds {

namespace detail {

inline void check(int d, int k, int k_min) {
    nbtree::detail::require(d >= 3, "degree must be at least 3, got " + std::to_string(d));
    nbtree::detail::require(k >= k_min, "distance must be at least " + std::to_string(k_min) + ", got " +
                                            std::to_string(k));
}

} // namespace detail

/// (sqrt(d-1))^j, evaluated as exp(j/2 * log(d-1)).
inline double sqrt_degree_pow(int d, int j) {
    return std::exp(0.5 * static_cast<double>(j) * std::log(static_cast<double>(d - 1)));
}

/// Correlation bound for two vertices at distance k:
/// (k + 1 - 2k/d) (d-1)^(-k/2).
inline double vertex_corr_bound(int d, int k) {
    detail::check(d, k, 0);
    return (k + 1.0 - 2.0 * k / d) * sqrt_degree_pow(d, -k);
}

/// Correlation bound for functions of two vertex sets whose convex hulls are
/// at distance k >= 1: k (d-1) (d-1)^(-k/2).
inline double hull_corr_bound(int d, int k) {
    detail::check(d, k, 1);
    return static_cast<double>(k) * (d - 1) * sqrt_degree_pow(d, -k);
}

/// Correlation bound for two directed edges at edge distance k:
/// (k+1) (d-1)^(-(k-1)/2).
inline double edge_corr_bound(int d, int k) {
    detail::check(d, k, 0);
    return (k + 1.0) * sqrt_degree_pow(d, 1 - k);
}

/// Norm bound for the k-th power of the non-backtracking operator of T_d:
/// (k+1) (d-1)^((k+1)/2).
inline double bnorm_bound(int d, int k) {
    detail::check(d, k, 1);
    return (k + 1.0) * sqrt_degree_pow(d, k + 1);
}

struct BoundRow {
    int d;
    int k;
    double vertex_bound;
    double hull_bound;
    double edge_bound;
    double bnorm_bound;
};

inline std::vector<BoundRow> bound_table(int d, int k_max) {
    detail::check(d, k_max, 1);
    std::vector<BoundRow> rows;
    rows.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        rows.push_back({d, k, vertex_corr_bound(d, k), hull_corr_bound(d, k), edge_corr_bound(d, k),
                        bnorm_bound(d, k)});
    }
    return rows;
}

} // namespace nbtree::bounds
