// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nbtree/labels.hpp"
#include "nbtree/philox.hpp"

using namespace nbtree;

TEST(Philox, KnownAnswers) {
    // Published known-answer vectors for Philox4x32-10.
    using P = Philox4x32;
    EXPECT_EQ(P::generate({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, CounterBitsLayout) {
    const auto out = Philox4x32::generate({5, 0, 9, 0}, {3, 0});
    EXPECT_EQ(counter_bits(3, 9, 5), (std::uint64_t{out[1]} << 32) | out[0]);
    EXPECT_NE(counter_bits(3, 9, 5), counter_bits(3, 9, 6));
    EXPECT_NE(counter_bits(3, 9, 5), counter_bits(3, 10, 5));
    EXPECT_NE(counter_bits(3, 9, 5), counter_bits(4, 9, 5));
}

TEST(Philox, UnitAndIndexMaps) {
    EXPECT_EQ(bits_to_unit(0), 0.0);
    EXPECT_LT(bits_to_unit(~0ull), 1.0);
    EXPECT_EQ(bits_to_unit(1ull << 63), 0.5);
    EXPECT_EQ(bits_to_index(0, 7), 0u);
    EXPECT_EQ(bits_to_index(~0ull, 7), 6u);
    EXPECT_EQ(bits_to_index(1ull << 63, 10), 5u);
    // Agrees with the 128-bit product on a spread of inputs.
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const std::uint64_t bits = counter_bits(1, 2, i);
        const std::uint32_t n = static_cast<std::uint32_t>(1 + (i * 2654435761u) % 100000);
        const auto want = static_cast<std::uint32_t>((static_cast<long double>(bits) * n) / 18446744073709551616.0L);
        const auto got = bits_to_index(bits, n);
        EXPECT_LE(got, n - 1);
        EXPECT_LE(static_cast<std::int64_t>(got) - static_cast<std::int64_t>(want), 1);
        EXPECT_GE(static_cast<std::int64_t>(got) - static_cast<std::int64_t>(want), -1);
    }
}

TEST(LabelDomain, ParseAndNames) {
    for (const char* name : {"uniform", "discrete", "rademacher", "centered-uniform"}) {
        EXPECT_EQ(LabelDomain::parse(name, 3).name(), name);
    }
    EXPECT_THROW(LabelDomain::parse("gaussian"), InvalidArgument);
    EXPECT_THROW(LabelDomain::discrete(1), InvalidArgument);
    EXPECT_EQ(LabelDomain::discrete(5).symbol_count(), 5u);
    EXPECT_TRUE(LabelDomain::rademacher().is_centered());
    EXPECT_FALSE(LabelDomain::discrete(2).is_centered());
    EXPECT_EQ(LabelDomain::rademacher().symbol_value(0), -1.0);
    EXPECT_EQ(LabelDomain::rademacher().symbol_index(1.0), 1u);
}

TEST(SampleIid, Deterministic) {
    const TreeBall ball(3, 6);
    for (auto domain : {LabelDomain::uniform(), LabelDomain::discrete(3), LabelDomain::centered_uniform()}) {
        const auto a = sample_iid(ball, domain, 42);
        const auto b = sample_iid(ball, domain, 42);
        EXPECT_EQ(a.values(), b.values());
        EXPECT_NE(a.values(), sample_iid(ball, domain, 43).values());
        EXPECT_NE(a.values(), sample_iid(ball, domain, 42, 1).values());
    }
}

TEST(SampleIid, RademacherValues) {
    const TreeBall ball(4, 5);
    const auto c = sample_iid(ball, LabelDomain::rademacher(), 1);
    int plus = 0;
    for (double x : c.values()) {
        ASSERT_TRUE(x == 1.0 || x == -1.0);
        plus += x > 0;
    }
    EXPECT_GT(plus, 0);
    EXPECT_LT(plus, static_cast<int>(c.size()));
}

TEST(SampleIid, BinaryFrequencies) {
    // 196606 vertices; the window is about 2.6 standard deviations wide.
    const TreeBall ball(3, 16);
    ASSERT_GE(ball.vertex_count(), 100000u);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = sample_iid(ball, LabelDomain::discrete(2), seed);
        std::size_t zeros = 0;
        for (double x : c.values()) {
            zeros += x == 0.0;
        }
        const double freq = static_cast<double>(zeros) / static_cast<double>(c.size());
        EXPECT_GE(freq, 0.497) << "seed " << seed;
        EXPECT_LE(freq, 0.503) << "seed " << seed;
    }
}

TEST(SampleIid, CenteredUniformMoments) {
    const TreeBall ball(3, 14);
    const auto c = sample_iid(ball, LabelDomain::centered_uniform(), 9);
    double m1 = 0.0, m2 = 0.0;
    for (double x : c.values()) {
        m1 += x;
        m2 += x * x;
    }
    const double n = static_cast<double>(c.size());
    EXPECT_NEAR(m1 / n, 0.0, 0.02);
    EXPECT_NEAR(m2 / n, 1.0, 0.02);
}

TEST(LabelConfig, RejectsOutOfDomain) {
    const TreeBall ball(3, 2);
    LabelConfig c(ball, LabelDomain::discrete(3));
    EXPECT_NO_THROW(c.set(0, 2.0));
    EXPECT_THROW(c.set(0, 3.0), InvalidArgument);
    EXPECT_THROW(c.set(0, 0.5), InvalidArgument);
    EXPECT_THROW(c.set(99, 0.0), InvalidArgument);
}

TEST(LabelConfig, BinaryRoundTrip) {
    const TreeBall ball(4, 3);
    for (auto domain : {LabelDomain::uniform(), LabelDomain::discrete(7), LabelDomain::rademacher()}) {
        const auto c = sample_iid(ball, domain, 5);
        std::stringstream buf;
        write_config(buf, c);
        EXPECT_EQ(buf.str().size(), 16 + 8 * ball.vertex_count());
        EXPECT_EQ(buf.str().substr(0, 4), "NBTC");
        const auto back = read_config(buf, ball);
        EXPECT_EQ(back.values(), c.values());
        EXPECT_EQ(back.domain(), c.domain());
    }
}

TEST(LabelConfig, ReadRejectsMismatch) {
    const TreeBall ball(3, 3);
    std::stringstream buf;
    write_config(buf, sample_iid(ball, LabelDomain::uniform(), 1));
    const TreeBall other(3, 4);
    EXPECT_THROW(read_config(buf, other), InvalidArgument);

    std::stringstream junk("XXXX0000000000000000");
    EXPECT_THROW(read_config(junk, ball), InvalidArgument);

    std::stringstream cut;
    write_config(cut, sample_iid(ball, LabelDomain::uniform(), 1));
    std::string s = cut.str();
    s.resize(s.size() - 8);
    std::stringstream truncated(s);
    EXPECT_THROW(read_config(truncated, ball), InvalidArgument);
}
