// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbtree/bounds.hpp"
#include "nbtree/error.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

/// Non-backtracking operator of a TreeBall, (Bf)(e) = sum over e' -> e of f(e').
///
/// Stored as two compressed adjacency lists (predecessors for B, successors
/// for its transpose); the matrix itself is never formed.
class NbOperator {
  public:
    explicit NbOperator(const TreeBall& ball) : ball_(&ball) {
        const std::size_t m = ball.edge_count();
        pred_offset_.assign(m + 1, 0);
        succ_offset_.assign(m + 1, 0);
        for (EdgeId e = 0; e < m; ++e) {
            pred_offset_[e + 1] = pred_offset_[e] + static_cast<std::uint64_t>(ball.ball_degree(ball.tail(e)) - 1);
            succ_offset_[e + 1] = succ_offset_[e] + static_cast<std::uint64_t>(ball.ball_degree(ball.head(e)) - 1);
        }
        pred_.resize(pred_offset_[m]);
        succ_.resize(succ_offset_[m]);
        for (EdgeId e = 0; e < m; ++e) {
            std::uint64_t p = pred_offset_[e];
            ball.for_each_predecessor(e, [&](EdgeId x) { pred_[p++] = x; });
            std::uint64_t s = succ_offset_[e];
            ball.for_each_successor(e, [&](EdgeId x) { succ_[s++] = x; });
        }
    }

    const TreeBall& ball() const { return *ball_; }
    std::size_t size() const { return pred_offset_.size() - 1; }

    std::span<const EdgeId> predecessors(EdgeId e) const {
        return {pred_.data() + pred_offset_[e], pred_.data() + pred_offset_[e + 1]};
    }
    std::span<const EdgeId> successors(EdgeId e) const {
        return {succ_.data() + succ_offset_[e], succ_.data() + succ_offset_[e + 1]};
    }

    void apply(std::span<const double> f, std::span<double> out) const { gather(pred_offset_, pred_, f, out); }
    void apply_transpose(std::span<const double> f, std::span<double> out) const {
        gather(succ_offset_, succ_, f, out);
    }

    std::vector<double> apply(std::span<const double> f) const {
        std::vector<double> out(size());
        apply(f, out);
        return out;
    }
    std::vector<double> apply_transpose(std::span<const double> f) const {
        std::vector<double> out(size());
        apply_transpose(f, out);
        return out;
    }

  private:
    static constexpr std::size_t kBlock = 1 << 14;

    void gather(const std::vector<std::uint64_t>& offset, const std::vector<EdgeId>& index,
                std::span<const double> f, std::span<double> out) const {
        if (f.size() != size() || out.size() != size()) {
            throw InvalidArgument("vector length " + std::to_string(f.size()) + " does not match edge count " +
                                  std::to_string(size()));
        }
        const BlockPartition blocks{size(), kBlock};
        parallel_for(blocks.count(), [&](std::size_t b) {
            for (std::size_t e = blocks.begin(b); e < blocks.end(b); ++e) {
                double acc = 0.0;
                for (std::uint64_t i = offset[e]; i < offset[e + 1]; ++i) {
                    acc += f[index[i]];
                }
                out[e] = acc;
            }
        });
    }

    const TreeBall* ball_;
    std::vector<std::uint64_t> pred_offset_;
    std::vector<EdgeId> pred_;
    std::vector<std::uint64_t> succ_offset_;
    std::vector<EdgeId> succ_;
};

inline NbOperator build_operator(const TreeBall& ball) { return NbOperator(ball); }

/// Number of edges e with e0 ->_k e.
///
/// In a tree distinct non-backtracking walks end on distinct edges, so this
/// is also the number of walks of length k starting at e0.
inline std::uint64_t walk_count(const NbOperator& op, EdgeId e0, int k) {
    detail::require(k >= 0, "walk length must be non-negative");
    op.ball().check_edge(e0);
    std::vector<EdgeId> frontier{e0};
    std::vector<EdgeId> next;
    for (int step = 0; step < k; ++step) {
        next.clear();
        for (EdgeId e : frontier) {
            const auto s = op.successors(e);
            next.insert(next.end(), s.begin(), s.end());
        }
        frontier.swap(next);
    }
    return frontier.size();
}

struct NormOptions {
    double tolerance = 1e-10;
    int max_iterations = 10'000;
};

struct NormReport {
    int d;
    int radius;
    int k;
    double estimate;
    int iterations;
    double residual;
    double bound;
    bool converged;
};

namespace detail {

inline double ordered_dot(std::span<const double> a, std::span<const double> b) {
    const BlockPartition blocks{a.size(), 1 << 14};
    std::vector<double> partial(blocks.count(), 0.0);
    parallel_for(blocks.count(), [&](std::size_t blk) {
        CompensatedSum<double> acc;
        for (std::size_t i = blocks.begin(blk); i < blocks.end(blk); ++i) {
            acc.add(a[i] * b[i]);
        }
        partial[blk] = acc.value();
    });
    CompensatedSum<double> total;
    for (double p : partial) {
        total.add(p);
    }
    return total.value();
}

} // namespace detail

/// Estimates ||B^k|| by power iteration on v -> (B^T)^k B^k v from the
/// all-ones vector. Returns sqrt of the Rayleigh quotient once its relative
/// change drops to the tolerance.
inline NormReport operator_norm_pow(const NbOperator& op, int k, NormOptions options = {}) {
    detail::require(k >= 1, "power k must be at least 1");
    detail::require(options.tolerance > 0, "tolerance must be positive");
    detail::require(options.max_iterations >= 1, "max_iterations must be positive");
    const TreeBall& ball = op.ball();
    NormReport report{ball.degree(), ball.radius(), k, 0.0, 0, 0.0, bounds::bnorm_bound(ball.degree(), k), false};
    const std::size_t m = op.size();
    if (m == 0) {
        report.converged = true;
        return report;
    }

    std::vector<double> v(m, 1.0 / std::sqrt(static_cast<double>(m)));
    std::vector<double> a(m);
    std::vector<double> b(m);
    double quotient = -1.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        op.apply(v, a);
        for (int p = 1; p < k; ++p) {
            op.apply(a, b);
            a.swap(b);
        }
        // ||B^k v||^2 with ||v|| = 1.
        const double next = detail::ordered_dot(a, a);
        for (int p = 0; p < k; ++p) {
            op.apply_transpose(a, b);
            a.swap(b);
        }
        report.iterations = it;
        report.residual = quotient < 0 ? std::numeric_limits<double>::infinity()
                                       : (next == 0.0 ? 0.0 : std::abs(next - quotient) / next);
        quotient = next;
        if (report.residual <= options.tolerance) {
            report.converged = true;
            break;
        }
        const double norm = std::sqrt(detail::ordered_dot(a, a));
        if (norm == 0.0) {
            report.residual = 0.0;
            report.converged = true;
            break;
        }
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a[i] / norm;
        }
    }
    report.estimate = std::sqrt(std::max(quotient, 0.0));
    if (report.estimate > report.bound) {
        // B^k of the ball is entrywise dominated by B^k of the infinite tree.
        throw std::logic_error("norm estimate " + std::to_string(report.estimate) + " exceeds the bound " +
                               std::to_string(report.bound));
    }
    return report;
}

// -- weight-sum certificate -------------------------------------------------

/// Summary of a weight sum over one class of edges.
struct SumStats {
    std::uint64_t count = 0;
    long double min = std::numeric_limits<long double>::infinity();
    long double max = -std::numeric_limits<long double>::infinity();

    void add(long double value, std::uint64_t multiplicity = 1) {
        count += multiplicity;
        min = std::min(min, value);
        max = std::max(max, value);
    }
    void merge(const SumStats& other) {
        count += other.count;
        min = std::min(min, other.min);
        max = std::max(max, other.max);
    }
};

/// Edge classes used by the certificate breakdown.
enum class EdgeClass { away = 0, toward_deep = 1, toward_shallow = 2 };

inline const char* to_string(EdgeClass c) {
    switch (c) {
    case EdgeClass::away:
        return "away";
    case EdgeClass::toward_deep:
        return "toward_deep";
    case EdgeClass::toward_shallow:
        return "toward_shallow";
    }
    return "unknown";
}

/// Orientation class of e relative to the root; toward-root edges are split
/// by whether their height exceeds k.
inline EdgeClass classify_edge(const TreeBall& ball, EdgeId e, int k) {
    if (TreeBall::points_away(e)) {
        return EdgeClass::away;
    }
    return ball.height(e) > k ? EdgeClass::toward_deep : EdgeClass::toward_shallow;
}

struct CertificateReport {
    int d;
    int radius;
    int k;
    /// Max over edges e' with interior forward k-cone of sum_{e' ->_k e} 1/alpha(e, e').
    long double max_s_inv;
    /// Max over edges e with interior backward k-cone of sum_{e' ->_k e} alpha(e, e').
    long double max_s_fwd;
    long double bound;
    std::uint64_t interior_edge_count;
    std::uint64_t interior_edge_count_fwd;
    std::uint64_t excluded_edge_count;
    SumStats s_inv[3];
    SumStats s_fwd[3];
    bool strictly_below;
};

enum class CertifyScope {
    /// Enumerate the cones of every edge of the ball.
    all_edges,
    /// One edge per (height, orientation) class; each class is a single orbit
    /// of the root-fixing automorphisms of the ball, so the sums are shared.
    orbit_representatives,
};

inline constexpr long double kCertificateGuardBand = 1e-9L;

namespace detail {

/// Table of (sqrt(d-1))^j for j in [-k, k], indexed by j + k.
inline std::vector<long double> half_power_table(int d, int k) {
    std::vector<long double> table(static_cast<std::size_t>(2 * k + 1));
    const long double log_base = std::log(static_cast<long double>(d - 1));
    for (int j = -k; j <= k; ++j) {
        table[static_cast<std::size_t>(j + k)] = std::exp(0.5L * j * log_base);
    }
    return table;
}

struct ConeResult {
    bool interior = true;
    long double sum = 0;
};

/// Sum of table[h(e0) - h(e) + k] over e0 ->_k e.
inline ConeResult forward_cone(const TreeBall& ball, EdgeId e0, int k, const std::vector<long double>& table) {
    ConeResult result;
    CompensatedSum<long double> acc;
    const int h0 = ball.height(e0);
    auto visit = [&](auto&& self, EdgeId e, int step) -> void {
        if (step == k) {
            acc.add(table[static_cast<std::size_t>(h0 - ball.height(e) + k)]);
            return;
        }
        if (ball.is_boundary(ball.head(e))) {
            result.interior = false;
            return;
        }
        ball.for_each_successor(e, [&](EdgeId s) { self(self, s, step + 1); });
    };
    visit(visit, e0, 0);
    result.sum = acc.value();
    return result;
}

/// Sum of table[h(e0) - h(e') + k] over e' ->_k e0.
inline ConeResult backward_cone(const TreeBall& ball, EdgeId e0, int k, const std::vector<long double>& table) {
    ConeResult result;
    CompensatedSum<long double> acc;
    const int h0 = ball.height(e0);
    auto visit = [&](auto&& self, EdgeId e, int step) -> void {
        if (step == k) {
            acc.add(table[static_cast<std::size_t>(h0 - ball.height(e) + k)]);
            return;
        }
        if (ball.is_boundary(ball.tail(e))) {
            result.interior = false;
            return;
        }
        ball.for_each_predecessor(e, [&](EdgeId p) { self(self, p, step + 1); });
    };
    visit(visit, e0, 0);
    result.sum = acc.value();
    return result;
}

struct CertificatePartial {
    SumStats s_inv[3];
    SumStats s_fwd[3];
    std::uint64_t excluded = 0;

    void merge(const CertificatePartial& o) {
        for (int c = 0; c < 3; ++c) {
            s_inv[c].merge(o.s_inv[c]);
            s_fwd[c].merge(o.s_fwd[c]);
        }
        excluded += o.excluded;
    }
};

inline void certify_edge(const TreeBall& ball, EdgeId e, int k, std::uint64_t multiplicity,
                         const std::vector<long double>& table, CertificatePartial& out) {
    const auto cls = static_cast<int>(classify_edge(ball, e, k));
    // 1/alpha(e, e') = (sqrt(d-1))^(h(e') - h(e)); e' is the cone source here.
    const ConeResult inv = forward_cone(ball, e, k, table);
    // alpha(e, e') = (sqrt(d-1))^(h(e) - h(e')); e is the cone target here.
    const ConeResult fwd = backward_cone(ball, e, k, table);
    if (inv.interior) {
        out.s_inv[cls].add(inv.sum, multiplicity);
    }
    if (fwd.interior) {
        out.s_fwd[cls].add(fwd.sum, multiplicity);
    }
    if (!inv.interior || !fwd.interior) {
        out.excluded += multiplicity;
    }
}

} // namespace detail

/// Exact weight sums certifying ||B^k|| <= (k+1) sqrt(d-1)^(k+1).
///
/// With alpha(e, e') = (1/sqrt(d-1))^(h(e') - h(e)), computes the suprema of
/// sum 1/alpha over forward k-cones and of sum alpha over backward k-cones.
/// Edges whose cone touches the ball boundary are excluded and counted.
inline CertificateReport certify_claims(const TreeBall& ball, int k,
                                        CertifyScope scope = CertifyScope::all_edges) {
    detail::require(k >= 1, "power k must be at least 1");
    detail::require(ball.radius() >= k + 2, "certificate needs radius >= k + 2 (radius " +
                                                std::to_string(ball.radius()) + ", k " + std::to_string(k) + ")");
    const auto table = detail::half_power_table(ball.degree(), k);
    detail::CertificatePartial total;
    if (scope == CertifyScope::all_edges) {
        const BlockPartition blocks{ball.edge_count(), 1 << 12};
        std::vector<detail::CertificatePartial> partial(blocks.count());
        parallel_for(blocks.count(), [&](std::size_t b) {
            for (std::size_t e = blocks.begin(b); e < blocks.end(b); ++e) {
                detail::certify_edge(ball, static_cast<EdgeId>(e), k, 1, table, partial[b]);
            }
        });
        for (const auto& p : partial) {
            total.merge(p);
        }
    } else {
        for (int h = 1; h <= ball.radius(); ++h) {
            const VertexId c = *ball.sphere(h).begin();
            const std::uint64_t size = sphere_size(ball.degree(), h);
            detail::certify_edge(ball, 2 * (c - 1), k, size, table, total);
            detail::certify_edge(ball, 2 * (c - 1) + 1, k, size, table, total);
        }
    }

    CertificateReport report{};
    report.d = ball.degree();
    report.radius = ball.radius();
    report.k = k;
    report.bound = (k + 1.0L) * std::exp(0.5L * (k + 1) * std::log(static_cast<long double>(ball.degree() - 1)));
    report.max_s_inv = 0;
    report.max_s_fwd = 0;
    for (int c = 0; c < 3; ++c) {
        report.s_inv[c] = total.s_inv[c];
        report.s_fwd[c] = total.s_fwd[c];
        if (total.s_inv[c].count > 0) {
            report.max_s_inv = std::max(report.max_s_inv, total.s_inv[c].max);
        }
        if (total.s_fwd[c].count > 0) {
            report.max_s_fwd = std::max(report.max_s_fwd, total.s_fwd[c].max);
        }
        report.interior_edge_count += total.s_inv[c].count;
        report.interior_edge_count_fwd += total.s_fwd[c].count;
    }
    report.excluded_edge_count = total.excluded;
    const long double limit = report.bound * (1.0L - kCertificateGuardBand);
    report.strictly_below = report.interior_edge_count > 0 && report.interior_edge_count_fwd > 0 &&
                            report.max_s_inv <= limit && report.max_s_fwd <= limit;
    return report;
}

} // namespace nbtree
