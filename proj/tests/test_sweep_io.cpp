// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nbtree/json_io.hpp"
#include "nbtree/sweep.hpp"

using namespace nbtree;

TEST(PairGeometry, PathLengthsAndRoot) {
    for (int d = 3; d <= 5; ++d) {
        for (int len = 0; len <= 7; ++len) {
            const auto geo = make_pair_geometry(d, len, 2);
            ASSERT_EQ(geo.path.size(), static_cast<std::size_t>(len + 1));
            EXPECT_EQ(geo.ball->distance(geo.front(), geo.back()), len);
            EXPECT_EQ(geo.ball->radius(), (len + 1) / 2 + 2);
            EXPECT_EQ(geo.ball->depth(geo.front()), (len + 1) / 2);
            EXPECT_EQ(geo.ball->depth(geo.back()), len / 2);
            if (len >= 2) {
                EXPECT_NE(std::find(geo.path.begin(), geo.path.end(), geo.ball->root()), geo.path.end());
            }
        }
    }
}

TEST(PairGeometry, RegionHullDistance) {
    for (int k = 1; k <= 6; ++k) {
        const auto pair = make_region_pair(3, k, 1);
        EXPECT_EQ(pair.v1.size(), 3u);
        EXPECT_EQ(pair.v2.size(), 3u);
        EXPECT_EQ(hull_distance(*pair.geometry.ball, pair.v1, pair.v2).k, k);
    }
}

TEST(PairGeometry, EdgeOrientations) {
    for (int k = 1; k <= 6; ++k) {
        const auto fwd = make_edge_pair(3, k, 1, 0, EdgeOrientation::forward);
        const auto& ball = *fwd.geometry.ball;
        const auto& p = fwd.geometry.path;
        EXPECT_EQ(edge_distance(ball, fwd.e1, fwd.e2), k);
        EXPECT_EQ(ball.tail(fwd.e1), p.front());
        EXPECT_EQ(ball.head(fwd.e2), p.back());

        const auto apart = make_edge_pair(3, k, 1, 0, EdgeOrientation::apart);
        EXPECT_EQ(apart.geometry.ball->head(apart.e1), apart.geometry.path.front());
        EXPECT_EQ(apart.geometry.ball->head(apart.e2), apart.geometry.path.back());

        const auto facing = make_edge_pair(3, k, 1, 0, EdgeOrientation::facing);
        EXPECT_EQ(facing.geometry.ball->tail(facing.e1), facing.geometry.path.front());
        EXPECT_EQ(facing.geometry.ball->tail(facing.e2), facing.geometry.path.back());
        EXPECT_EQ(edge_distance(*facing.geometry.ball, facing.e1, facing.e2), k);
    }
    EXPECT_THROW(make_edge_pair(3, 0, 1, 0, EdgeOrientation::forward), InvalidArgument);
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5), "-2.5");
    EXPECT_EQ(format_double(1e-20), "9.9999999999999995e-21");
    for (double x : {std::sqrt(2.0), 1.0 / 3.0, 6.02214076e23, -1.602e-19}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(Format, BoundCsvAndJson) {
    const auto rows = bounds::bound_table(3, 2);
    EXPECT_EQ(std::string(kBoundsCsvHeader), "d,k,vertex_bound,hull_bound,edge_bound,bnorm_bound");
    EXPECT_EQ(to_csv(rows[0]), "3,1,0.94280904158206358,1.4142135623730951,2,4");
    const auto j = to_json(rows[1]);
    EXPECT_EQ(j["d"], 3);
    EXPECT_EQ(j["k"], 2);
    EXPECT_EQ(j.begin().key(), "d");
    EXPECT_DOUBLE_EQ(j["hull_bound"].get<double>(), 2.0);
}

TEST(Format, SweepRowCsvAndJson) {
    const SweepRow row{4, 3, "sum", "mc-vertex", 0.25, 0.01, 0.5, true, 0.25, 1000, 7};
    EXPECT_EQ(to_csv(row), "4,3,sum,mc-vertex,0.25,0.01,0.5,PASS,1000,7");
    EXPECT_EQ(std::count(kSweepCsvHeader, kSweepCsvHeader + std::string(kSweepCsvHeader).size(), ','), 9);
    const auto j = to_json(row);
    EXPECT_EQ(j["verdict"], "PASS");
    EXPECT_EQ(j["n_samples"], 1000);
    EXPECT_EQ(j["stderr"], 0.01);
}

TEST(BoundSweep, SmallSweepPasses) {
    SweepOptions opt;
    opt.degrees = {3};
    opt.k_min = 2;
    opt.k_max = 3;
    opt.samples = 2000;
    opt.seed = 5;
    const auto rows = bound_sweep(opt);
    ASSERT_FALSE(rows.empty());
    std::set<std::string> modes;
    for (const auto& r : rows) {
        modes.insert(r.mode);
        EXPECT_TRUE(r.pass) << r.rule << " " << r.mode << " k=" << r.k << " value " << r.value << " bound " << r.bound;
        EXPECT_EQ(r.d, 3);
        EXPECT_TRUE(std::isfinite(r.value));
    }
    for (const char* m : {"exact-vertex", "exact-region", "exact-edge", "mc-vertex", "mc-region", "mc-edge"}) {
        EXPECT_TRUE(modes.count(m)) << m;
    }
    const auto again = bound_sweep(opt);
    ASSERT_EQ(again.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(to_csv(again[i]), to_csv(rows[i]));
    }
}
