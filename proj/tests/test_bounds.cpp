// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "nbtree/bounds.hpp"

using namespace nbtree;
using namespace nbtree::bounds;

namespace {

void expect_rel(double got, double want, double tol = 1e-12) {
    EXPECT_NEAR(got, want, tol * std::abs(want)) << "got " << got << " want " << want;
}

} // namespace

TEST(Bounds, VertexValues) {
    expect_rel(vertex_corr_bound(3, 0), 1.0);
    expect_rel(vertex_corr_bound(3, 2), 5.0 / 6.0);
    expect_rel(vertex_corr_bound(4, 4), 1.0 / 3.0);
    expect_rel(vertex_corr_bound(3, 3), 2.0 / (2.0 * std::sqrt(2.0)));
}

TEST(Bounds, HullValues) {
    expect_rel(hull_corr_bound(3, 4), 2.0);
    expect_rel(hull_corr_bound(4, 6), 2.0 / 3.0);
    expect_rel(hull_corr_bound(3, 2), 2.0);
}

TEST(Bounds, EdgeValues) {
    expect_rel(edge_corr_bound(3, 1), 2.0);
    expect_rel(edge_corr_bound(3, 5), 1.5);
    expect_rel(edge_corr_bound(4, 7), 8.0 / 27.0);
    expect_rel(edge_corr_bound(3, 0), std::sqrt(2.0));
}

TEST(Bounds, NormValues) {
    expect_rel(bnorm_bound(3, 1), 4.0);
    expect_rel(bnorm_bound(3, 3), 16.0);
    expect_rel(bnorm_bound(4, 2), 9.0 * std::sqrt(3.0));
}

TEST(Bounds, DomainChecks) {
    EXPECT_THROW(vertex_corr_bound(2, 1), InvalidArgument);
    EXPECT_THROW(vertex_corr_bound(3, -1), InvalidArgument);
    EXPECT_THROW(hull_corr_bound(3, 0), InvalidArgument);
    EXPECT_THROW(bnorm_bound(3, 0), InvalidArgument);
    EXPECT_NO_THROW(edge_corr_bound(3, 0));
    EXPECT_THROW(bound_table(3, 0), InvalidArgument);
}

TEST(BoundTable, RowsMatchScalars) {
    const auto one = bound_table(3, 1);
    ASSERT_EQ(one.size(), 1u);
    expect_rel(one[0].vertex_bound, vertex_corr_bound(3, 1));
    expect_rel(one[0].hull_bound, std::sqrt(2.0));
    expect_rel(one[0].edge_bound, 2.0);
    expect_rel(one[0].bnorm_bound, 4.0);

    for (int d = 3; d <= 6; ++d) {
        const auto rows = bound_table(d, 12);
        ASSERT_EQ(rows.size(), 12u);
        for (const auto& r : rows) {
            EXPECT_EQ(r.d, d);
            EXPECT_EQ(r.vertex_bound, vertex_corr_bound(d, r.k));
            EXPECT_EQ(r.hull_bound, hull_corr_bound(d, r.k));
            EXPECT_EQ(r.edge_bound, edge_corr_bound(d, r.k));
            EXPECT_EQ(r.bnorm_bound, bnorm_bound(d, r.k));
            EXPECT_TRUE(std::isfinite(r.bnorm_bound));
            EXPECT_GT(r.vertex_bound, 0.0);
            EXPECT_LE(r.vertex_bound, r.hull_bound);
        }
    }
}

TEST(BoundTable, HullColumnCrossesOne) {
    const auto rows = bound_table(3, 9);
    EXPECT_GT(rows[6].hull_bound, 1.0);
    expect_rel(rows[7].hull_bound, 1.0);
    expect_rel(rows[8].hull_bound, 9.0 * 2.0 / std::pow(std::sqrt(2.0), 9));
    EXPECT_LT(rows[8].hull_bound, 1.0);
}

TEST(Bounds, EventuallyDecreasing) {
    for (int d = 3; d <= 8; ++d) {
        for (int k = 8; k < 60; ++k) {
            EXPECT_LT(vertex_corr_bound(d, k + 1), vertex_corr_bound(d, k));
            EXPECT_LT(hull_corr_bound(d, k + 1), hull_corr_bound(d, k));
            EXPECT_LT(edge_corr_bound(d, k + 1), edge_corr_bound(d, k));
        }
    }
}

TEST(Bounds, PolynomialPrefactors) {
    for (int d = 3; d <= 7; ++d) {
        const double q = d - 1.0;
        for (int k = 1; k <= 20; ++k) {
            const double decay = std::pow(q, -0.5 * k);
            expect_rel(vertex_corr_bound(d, k) / decay, k + 1.0 - 2.0 * k / d, 1e-12);
            expect_rel(hull_corr_bound(d, k) / decay, k * q, 1e-12);
            expect_rel(edge_corr_bound(d, k) / decay, (k + 1.0) * std::sqrt(q), 1e-12);
            expect_rel(bnorm_bound(d, k) / std::pow(q, 0.5 * k), (k + 1.0) * std::sqrt(q), 1e-12);
        }
    }
}

TEST(Bounds, DecreasingInDegree) {
    for (int k = 3; k <= 20; ++k) {
        for (int d = 3; d < 10; ++d) {
            EXPECT_LT(vertex_corr_bound(d + 1, k), vertex_corr_bound(d, k)) << d << " " << k;
            EXPECT_LT(hull_corr_bound(d + 1, k), hull_corr_bound(d, k));
            EXPECT_LT(edge_corr_bound(d + 1, k), edge_corr_bound(d, k));
            // The operator norm bound grows with d.
            EXPECT_GT(bnorm_bound(d + 1, k), bnorm_bound(d, k));
        }
    }
}

TEST(Bounds, NormChainGivesEdgeBound) {
    for (int d = 3; d <= 10; ++d) {
        for (int k = 2; k <= 30; ++k) {
            const double chain = bnorm_bound(d, k - 1) / std::pow(d - 1.0, k - 1);
            expect_rel(chain, edge_corr_bound(d, k - 1), 1e-14);
        }
    }
}

TEST(Bounds, Reproducible) {
    const auto a = bound_table(5, 30);
    const auto b = bound_table(5, 30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].vertex_bound, b[i].vertex_bound);
        EXPECT_EQ(a[i].bnorm_bound, b[i].bnorm_bound);
    }
}
