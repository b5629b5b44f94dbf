// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "nbtree/error.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

enum class DomainKind : std::uint16_t {
    uniform01 = 0,
    discrete = 1,
    rademacher = 2,
    /// Uniform on [-sqrt(3), sqrt(3)]: centered, unit variance.
    centered_uniform = 3,
};

/// Distribution of the i.i.d. vertex labels.
struct LabelDomain {
    DomainKind kind = DomainKind::uniform01;
    std::uint32_t alphabet = 0;

    static LabelDomain uniform() { return {DomainKind::uniform01, 0}; }
    static LabelDomain discrete(std::uint32_t m) {
        detail::require(m >= 2 && m <= 65535, "alphabet size must be in [2, 65535], got " + std::to_string(m));
        return {DomainKind::discrete, m};
    }
    static LabelDomain rademacher() { return {DomainKind::rademacher, 2}; }
    static LabelDomain centered_uniform() { return {DomainKind::centered_uniform, 0}; }

    static LabelDomain parse(const std::string& name, std::uint32_t alphabet = 2) {
        if (name == "uniform") {
            return uniform();
        }
        if (name == "discrete") {
            return discrete(alphabet);
        }
        if (name == "rademacher") {
            return rademacher();
        }
        if (name == "centered-uniform") {
            return centered_uniform();
        }
        throw InvalidArgument("unknown label domain '" + name + "'");
    }

    std::string name() const {
        switch (kind) {
        case DomainKind::uniform01:
            return "uniform";
        case DomainKind::discrete:
            return "discrete";
        case DomainKind::rademacher:
            return "rademacher";
        case DomainKind::centered_uniform:
            return "centered-uniform";
        }
        return "unknown";
    }

    bool is_discrete() const { return kind == DomainKind::discrete || kind == DomainKind::rademacher; }
    /// Mean zero and unit variance.
    bool is_centered() const { return kind == DomainKind::rademacher || kind == DomainKind::centered_uniform; }

    std::uint32_t symbol_count() const { return is_discrete() ? alphabet : 0; }

    /// Label value of symbol s of a discrete domain.
    double symbol_value(std::uint32_t s) const {
        if (kind == DomainKind::rademacher) {
            return s == 0 ? -1.0 : 1.0;
        }
        return static_cast<double>(s);
    }

    /// Inverse of symbol_value.
    std::uint32_t symbol_index(double x) const {
        if (kind == DomainKind::rademacher) {
            return x > 0 ? 1u : 0u;
        }
        return static_cast<std::uint32_t>(x);
    }

    double from_bits(std::uint64_t bits) const {
        switch (kind) {
        case DomainKind::uniform01:
            return bits_to_unit(bits);
        case DomainKind::discrete:
            return static_cast<double>(bits_to_index(bits, alphabet));
        case DomainKind::rademacher:
            return (bits >> 63) != 0 ? 1.0 : -1.0;
        case DomainKind::centered_uniform:
            return std::sqrt(3.0) * (2.0 * bits_to_unit(bits) - 1.0);
        }
        return 0.0;
    }

    bool contains(double x) const {
        switch (kind) {
        case DomainKind::uniform01:
            return x >= 0.0 && x < 1.0;
        case DomainKind::discrete:
            return x >= 0.0 && x < alphabet && x == std::floor(x);
        case DomainKind::rademacher:
            return x == -1.0 || x == 1.0;
        case DomainKind::centered_uniform:
            return std::abs(x) <= std::sqrt(3.0);
        }
        return false;
    }

    friend bool operator==(const LabelDomain&, const LabelDomain&) = default;
};

/// Lazily generated i.i.d. labels: the label of vertex v is a pure function
/// of (seed, stream, v).
struct CounterLabels {
    LabelDomain domain;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    double operator()(VertexId v) const { return domain.from_bits(counter_bits(seed, stream, v)); }
};

/// One label per vertex of a TreeBall.
class LabelConfig {
  public:
    LabelConfig(const TreeBall& ball, LabelDomain domain)
        : ball_(&ball), domain_(domain), labels_(ball.vertex_count(), domain.is_discrete() ? domain.symbol_value(0) : 0.0) {}

    const TreeBall& ball() const { return *ball_; }
    const LabelDomain& domain() const { return domain_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<double>& values() const { return labels_; }

    double operator()(VertexId v) const { return labels_[v]; }

    void set(VertexId v, double x) {
        ball_->check_vertex(v);
        if (!domain_.contains(x)) {
            throw InvalidArgument("label " + std::to_string(x) + " outside the " + domain_.name() + " domain");
        }
        labels_[v] = x;
    }

  private:
    const TreeBall* ball_;
    LabelDomain domain_;
    std::vector<double> labels_;
};

inline LabelConfig sample_iid(const TreeBall& ball, LabelDomain domain, std::uint64_t seed, std::uint64_t stream = 0) {
    LabelConfig config(ball, domain);
    const CounterLabels source{domain, seed, stream};
    for (VertexId v = 0; v < ball.vertex_count(); ++v) {
        config.set(v, source(v));
    }
    return config;
}

// -- binary replay format ---------------------------------------------------
//
// 16-byte little-endian header: magic "NBTC", u32 degree, u32 radius,
// u16 domain kind, u16 alphabet size; followed by one f64 per vertex in
// breadth-first id order.

inline constexpr std::array<char, 4> kConfigMagic{'N', 'B', 'T', 'C'};

namespace detail {

template <class T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const unsigned char* bytes) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(static_cast<T>(bytes[i]) << (8 * i));
    }
    return value;
}

} // namespace detail

inline void write_config(std::ostream& out, const LabelConfig& config) {
    out.write(kConfigMagic.data(), 4);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config.ball().degree()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config.ball().radius()));
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(config.domain().kind));
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(config.domain().alphabet));
    for (double x : config.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        detail::put_le<std::uint64_t>(out, bits);
    }
    if (!out) {
        throw Error("failed to write label configuration");
    }
}

/// Reads a configuration written by write_config; the stored degree and
/// radius must match the ball.
inline LabelConfig read_config(std::istream& in, const TreeBall& ball) {
    unsigned char header[16];
    if (!in.read(reinterpret_cast<char*>(header), sizeof header)) {
        throw InvalidArgument("truncated label configuration header");
    }
    if (std::memcmp(header, kConfigMagic.data(), 4) != 0) {
        throw InvalidArgument("bad magic in label configuration");
    }
    const auto d = detail::get_le<std::uint32_t>(header + 4);
    const auto r = detail::get_le<std::uint32_t>(header + 8);
    const auto kind = detail::get_le<std::uint16_t>(header + 12);
    const auto alphabet = detail::get_le<std::uint16_t>(header + 14);
    if (static_cast<int>(d) != ball.degree() || static_cast<int>(r) != ball.radius()) {
        throw InvalidArgument("configuration is for d=" + std::to_string(d) + ", R=" + std::to_string(r) +
                              " but the ball has d=" + std::to_string(ball.degree()) +
                              ", R=" + std::to_string(ball.radius()));
    }
    if (kind > static_cast<std::uint16_t>(DomainKind::centered_uniform)) {
        throw InvalidArgument("unknown domain tag " + std::to_string(kind));
    }
    LabelDomain domain{static_cast<DomainKind>(kind), alphabet};
    if (domain.kind == DomainKind::discrete) {
        domain = LabelDomain::discrete(alphabet);
    }
    LabelConfig config(ball, domain);
    unsigned char word[8];
    for (VertexId v = 0; v < ball.vertex_count(); ++v) {
        if (!in.read(reinterpret_cast<char*>(word), sizeof word)) {
            throw InvalidArgument("truncated label configuration payload");
        }
        const auto bits = detail::get_le<std::uint64_t>(word);
        double x;
        std::memcpy(&x, &bits, sizeof x);
        config.set(v, x);
    }
    return config;
}

} // namespace nbtree
