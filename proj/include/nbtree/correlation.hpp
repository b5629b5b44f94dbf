// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nbtree/error.hpp"
#include "nbtree/labels.hpp"
#include "nbtree/nb_operator.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/rules.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

// -- Monte Carlo -------------------------------------------------------------

inline constexpr std::uint64_t kMonteCarloChunk = 4096;
inline constexpr double kZ95 = 1.959963984540054;

struct CorrEstimate {
    double estimate = 0.0;
    std::uint64_t samples = 0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    /// Either sample variance was zero; the estimate is then 0 by convention.
    bool degenerate = false;
};

namespace detail {

/// Running first and second moments of a pair stream (Welford form).
struct PairMoments {
    double n = 0;
    double mean_a = 0;
    double mean_b = 0;
    double m2_a = 0;
    double m2_b = 0;
    double c_ab = 0;

    void add(double a, double b) {
        n += 1;
        const double da = a - mean_a;
        mean_a += da / n;
        const double db = b - mean_b;
        mean_b += db / n;
        m2_a += da * (a - mean_a);
        m2_b += db * (b - mean_b);
        c_ab += da * (b - mean_b);
    }

    void merge(const PairMoments& o) {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double da = o.mean_a - mean_a;
        const double db = o.mean_b - mean_b;
        const double w = n * o.n / total;
        m2_a += o.m2_a + da * da * w;
        m2_b += o.m2_b + db * db * w;
        c_ab += o.c_ab + da * db * w;
        mean_a += da * o.n / total;
        mean_b += db * o.n / total;
        n = total;
    }
};

} // namespace detail

/// Pearson correlation of N pairs drawn as sampler(seed, index), with a
/// Fisher-z standard error and 95% interval.
///
/// Samples are grouped in fixed chunks of kMonteCarloChunk indices whose
/// moments are merged in chunk order, so the result does not depend on the
/// thread count.
template <class Sampler>
CorrEstimate monte_carlo_corr(const Sampler& sampler, std::uint64_t samples, std::uint64_t seed) {
    detail::require(samples >= 100, "Monte Carlo needs at least 100 samples, got " + std::to_string(samples));
    const BlockPartition chunks{samples, kMonteCarloChunk};
    std::vector<detail::PairMoments> partial(chunks.count());
    parallel_for(chunks.count(), [&](std::size_t c) {
        detail::PairMoments m;
        for (std::uint64_t i = chunks.begin(c); i < chunks.end(c); ++i) {
            const auto [a, b] = sampler(seed, i);
            m.add(a, b);
        }
        partial[c] = m;
    });
    detail::PairMoments total;
    for (const auto& m : partial) {
        total.merge(m);
    }

    CorrEstimate out;
    out.samples = samples;
    out.seed = seed;
    if (!(total.m2_a > 0.0) || !(total.m2_b > 0.0)) {
        out.degenerate = true;
        return out;
    }
    const double r = std::clamp(total.c_ab / std::sqrt(total.m2_a * total.m2_b), -1.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(samples) - 3.0);
    out.estimate = r;
    out.std_error = (1.0 - r * r) * scale;
    const double z = std::atanh(r);
    out.ci_low = std::min(r, std::tanh(z - kZ95 * scale));
    out.ci_high = std::max(r, std::tanh(z + kZ95 * scale));
    return out;
}

// -- exact enumeration -------------------------------------------------------

/// Upper limit on alphabet^support for one exact enumeration.
inline constexpr std::uint64_t kMaxEnumeration = 1u << 22;

/// Exact joint moments of two functions of i.i.d. discrete labels.
struct ExactMoments {
    long double mean_a = 0;
    long double mean_b = 0;
    long double second_a = 0;
    long double second_b = 0;
    long double cross = 0;
    std::uint64_t configurations = 0;

    long double covariance() const { return cross - mean_a * mean_b; }
    long double variance_a() const { return second_a - mean_a * mean_a; }
    long double variance_b() const { return second_b - mean_b * mean_b; }
};

struct ExactCorrResult {
    double covariance = 0.0;
    double variance1 = 0.0;
    double variance2 = 0.0;
    double correlation = 0.0;
    std::uint64_t configurations = 0;
};

namespace detail {

inline constexpr std::uint64_t kEnumerationChunk = 1u << 14;

inline std::uint64_t configuration_count(LabelDomain domain, std::size_t support) {
    require(domain.is_discrete(), "exact enumeration needs a discrete label domain");
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < support; ++i) {
        total *= domain.symbol_count();
        if (total > kMaxEnumeration) {
            throw CapExceeded("exact enumeration over " + std::to_string(support) + " vertices with alphabet " +
                              std::to_string(domain.symbol_count()) + " exceeds the cap of " +
                              std::to_string(kMaxEnumeration) + " configurations");
        }
    }
    return total;
}

/// Variances at or below this fraction of the second moment are rounding
/// residue of a constant and count as zero.
inline constexpr long double kDegenerateVariance = 1e-20L;

inline bool degenerate(long double variance, long double second) {
    return !(variance > kDegenerateVariance * second);
}

inline long double finish_correlation(long double cov, long double var_a, long double second_a, long double var_b,
                                      long double second_b) {
    if (degenerate(var_a, second_a) || degenerate(var_b, second_b)) {
        return 0;
    }
    return cov / std::sqrt(var_a * var_b);
}

} // namespace detail

/// Sums fn over every labeling of `support` (odometer order, first support
/// vertex fastest). fn receives a label vector indexed by vertex id; entries
/// outside the support are 0. Returns the uniform-weight moments of the pair
/// fn returns.
template <class Fn>
ExactMoments exact_moments(std::size_t vertex_count, const std::vector<VertexId>& support, LabelDomain domain,
                           const Fn& fn) {
    const std::uint64_t total = detail::configuration_count(domain, support.size());
    const std::uint32_t m = domain.symbol_count();
    const BlockPartition chunks{total, detail::kEnumerationChunk};
    struct Partial {
        CompensatedSum<long double> a, b, aa, bb, ab;
    };
    std::vector<Partial> partial(chunks.count());
    parallel_for(chunks.count(), [&](std::size_t c) {
        std::vector<double> labels(vertex_count, 0.0);
        std::vector<std::uint32_t> digit(support.size());
        std::uint64_t index = chunks.begin(c);
        for (std::size_t i = 0; i < support.size(); ++i) {
            digit[i] = static_cast<std::uint32_t>(index % m);
            index /= m;
            labels[support[i]] = domain.symbol_value(digit[i]);
        }
        Partial& out = partial[c];
        for (std::uint64_t x = chunks.begin(c); x < chunks.end(c); ++x) {
            const auto [a, b] = fn(static_cast<const std::vector<double>&>(labels));
            out.a.add(a);
            out.b.add(b);
            out.aa.add(static_cast<long double>(a) * a);
            out.bb.add(static_cast<long double>(b) * b);
            out.ab.add(static_cast<long double>(a) * b);
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (++digit[i] < m) {
                    labels[support[i]] = domain.symbol_value(digit[i]);
                    break;
                }
                digit[i] = 0;
                labels[support[i]] = domain.symbol_value(0);
            }
        }
    });
    Partial sum;
    for (const auto& p : partial) {
        sum.a.merge(p.a);
        sum.b.merge(p.b);
        sum.aa.merge(p.aa);
        sum.bb.merge(p.bb);
        sum.ab.merge(p.ab);
    }
    const long double n = static_cast<long double>(total);
    return {sum.a.value() / n, sum.b.value() / n, sum.aa.value() / n, sum.bb.value() / n, sum.ab.value() / n, total};
}

/// Exact moments of (fa, fb) where fa reads only support_a and fb only
/// support_b. Disjoint supports are enumerated separately and the cross
/// moment factorizes.
template <class FnA, class FnB>
ExactMoments exact_pair_moments(std::size_t vertex_count, LabelDomain domain, std::vector<VertexId> support_a,
                                const FnA& fa, std::vector<VertexId> support_b, const FnB& fb) {
    std::sort(support_a.begin(), support_a.end());
    support_a.erase(std::unique(support_a.begin(), support_a.end()), support_a.end());
    std::sort(support_b.begin(), support_b.end());
    support_b.erase(std::unique(support_b.begin(), support_b.end()), support_b.end());
    std::vector<VertexId> shared;
    std::set_intersection(support_a.begin(), support_a.end(), support_b.begin(), support_b.end(),
                          std::back_inserter(shared));
    if (shared.empty()) {
        const auto ma = exact_moments(vertex_count, support_a, domain, [&](const std::vector<double>& z) {
            return std::pair<double, double>{fa(z), 0.0};
        });
        const auto mb = exact_moments(vertex_count, support_b, domain, [&](const std::vector<double>& z) {
            return std::pair<double, double>{0.0, fb(z)};
        });
        ExactMoments out;
        out.mean_a = ma.mean_a;
        out.second_a = ma.second_a;
        out.mean_b = mb.mean_b;
        out.second_b = mb.second_b;
        out.cross = ma.mean_a * mb.mean_b;
        out.configurations = ma.configurations + mb.configurations;
        return out;
    }
    std::vector<VertexId> all;
    std::set_union(support_a.begin(), support_a.end(), support_b.begin(), support_b.end(), std::back_inserter(all));
    return exact_moments(vertex_count, all, domain, [&](const std::vector<double>& z) {
        return std::pair<double, double>{fa(z), fb(z)};
    });
}

inline ExactCorrResult to_corr_result(const ExactMoments& m) {
    ExactCorrResult out;
    out.covariance = static_cast<double>(m.covariance());
    out.variance1 = static_cast<double>(m.variance_a());
    out.variance2 = static_cast<double>(m.variance_b());
    out.correlation = static_cast<double>(detail::finish_correlation(m.covariance(), m.variance_a(), m.second_a, m.variance_b(), m.second_b));
    out.configurations = m.configurations;
    return out;
}

using RegionFunction = std::function<double(std::span<const double>)>;

/// Exact correlation of h1((X_v)_{v in V1}) and h2((X_v)_{v in V2}) where X
/// is the block factor of `rule` over i.i.d. labels from a discrete domain.
inline ExactCorrResult exact_corr_discrete(const TreeBall& ball, const BlockRule& rule, LabelDomain domain,
                                           const std::vector<VertexId>& v1, const RegionFunction& h1,
                                           const std::vector<VertexId>& v2, const RegionFunction& h2) {
    detail::require(!v1.empty() && !v2.empty(), "regions must be non-empty");
    detail::require(domain.is_discrete(), "exact correlation needs a discrete label domain");
    auto make_sites = [&](const std::vector<VertexId>& region) {
        std::vector<BlockSite> sites;
        sites.reserve(region.size());
        for (VertexId v : region) {
            sites.emplace_back(rule, ball, v);
        }
        return sites;
    };
    const auto sites1 = make_sites(v1);
    const auto sites2 = make_sites(v2);
    auto support = [](const std::vector<BlockSite>& sites) {
        std::vector<VertexId> out;
        for (const auto& s : sites) {
            out.insert(out.end(), s.support().begin(), s.support().end());
        }
        return out;
    };
    auto region_value = [](const std::vector<BlockSite>& sites, const RegionFunction& h) {
        return [&sites, &h](const std::vector<double>& z) {
            std::vector<double> x(sites.size());
            std::vector<double> scratch;
            auto labels = [&z](VertexId v) { return z[v]; };
            for (std::size_t i = 0; i < sites.size(); ++i) {
                x[i] = sites[i](labels, scratch);
            }
            return h(x);
        };
    };
    return to_corr_result(exact_pair_moments(ball.vertex_count(), domain, support(sites1), region_value(sites1, h1),
                                             support(sites2), region_value(sites2, h2)));
}

// -- exchangeable pairs and the polarization identity -----------------------

/// Finite joint law of (X1, X2) on {0..n-1}^2, stored row-major.
struct ExchangeableJoint {
    std::size_t n = 0;
    std::vector<double> p;

    double operator()(std::size_t x, std::size_t y) const { return p[x * n + y]; }

    /// Validates that p is a probability table symmetric under swap.
    static ExchangeableJoint from_table(std::size_t n, std::vector<double> p) {
        detail::require(n >= 1 && p.size() == n * n, "joint table must be n x n");
        CompensatedSum<double> mass;
        for (double x : p) {
            detail::require(x >= 0.0, "joint probabilities must be non-negative");
            mass.add(x);
        }
        detail::require(std::abs(mass.value() - 1.0) <= 1e-12, "joint probabilities must sum to 1");
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = 0; y < x; ++y) {
                if (p[x * n + y] != p[y * n + x]) {
                    throw InvalidArgument("joint law is not exchangeable");
                }
            }
        }
        return {n, std::move(p)};
    }
};

/// Random exchangeable joint: P'(x,y) = (P(x,y) + P(y,x)) / 2 for a random
/// table P, normalized.
inline ExchangeableJoint make_exchangeable(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    detail::require(n >= 1, "joint support must be non-empty");
    std::vector<double> raw(n * n);
    CompensatedSum<double> mass;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = bits_to_unit(counter_bits(seed, stream, i));
    }
    std::vector<double> p(n * n);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            p[x * n + y] = 0.5 * (raw[x * n + y] + raw[y * n + x]);
            mass.add(p[x * n + y]);
        }
    }
    const double total = mass.value();
    for (auto& x : p) {
        x /= total;
    }
    return ExchangeableJoint::from_table(n, std::move(p));
}

/// Centered moments of (g1(X1), g2(X2)) under the joint law (two passes,
/// compensated sums).
struct JointMoments {
    long double covariance;
    long double variance1;
    long double second1;
    long double variance2;
    long double second2;
};

inline JointMoments joint_moments(const ExchangeableJoint& joint, std::span<const double> g1,
                                  std::span<const double> g2) {
    detail::require(g1.size() == joint.n && g2.size() == joint.n, "function tables must match the joint support");
    CompensatedSum<long double> e1, e2;
    for (std::size_t x = 0; x < joint.n; ++x) {
        for (std::size_t y = 0; y < joint.n; ++y) {
            const long double w = joint(x, y);
            e1.add(w * g1[x]);
            e2.add(w * g2[y]);
        }
    }
    const long double m1 = e1.value();
    const long double m2 = e2.value();
    CompensatedSum<long double> c12, c11, c22, s11, s22;
    for (std::size_t x = 0; x < joint.n; ++x) {
        for (std::size_t y = 0; y < joint.n; ++y) {
            const long double w = joint(x, y);
            const long double a = g1[x] - m1;
            const long double b = g2[y] - m2;
            c12.add(w * a * b);
            c11.add(w * a * a);
            c22.add(w * b * b);
            s11.add(w * g1[x] * g1[x]);
            s22.add(w * g2[y] * g2[y]);
        }
    }
    return {c12.value(), c11.value(), s11.value(), c22.value(), s22.value()};
}

inline long double joint_covariance(const ExchangeableJoint& joint, std::span<const double> g1,
                                    std::span<const double> g2) {
    return joint_moments(joint, g1, g2).covariance;
}

struct PolarizationResult {
    /// |cov(f1(X1), f2(X2)) - (cov(s(X1), s(X2)) - cov(t(X1), t(X2))) / 4|,
    /// s = f1 + f2, t = f1 - f2.
    double residual;
    /// |cov(f1(X1), f2(X2)) - cov(f1(X2), f2(X1))|.
    double swap_residual;
};

inline PolarizationResult polarization_check(const ExchangeableJoint& joint, std::span<const double> f1,
                                             std::span<const double> f2) {
    detail::require(f1.size() == joint.n && f2.size() == joint.n, "function tables must match the joint support");
    std::vector<double> s(joint.n);
    std::vector<double> t(joint.n);
    for (std::size_t x = 0; x < joint.n; ++x) {
        s[x] = f1[x] + f2[x];
        t[x] = f1[x] - f2[x];
    }
    const long double direct = joint_covariance(joint, f1, f2);
    const long double swapped = joint_covariance(joint, f2, f1);
    const long double polar = (joint_covariance(joint, s, s) - joint_covariance(joint, t, t)) / 4;
    return {static_cast<double>(std::abs(direct - polar)), static_cast<double>(std::abs(direct - swapped))};
}

/// Correlation of f(X1) and f(X2); 0 when the variance vanishes.
inline double joint_self_correlation(const ExchangeableJoint& joint, std::span<const double> f) {
    const auto m = joint_moments(joint, f, f);
    return static_cast<double>(detail::finish_correlation(m.covariance, m.variance1, m.second1, m.variance2, m.second2));
}

/// Checks the two-function reduction on one instance: after normalizing
/// f1(X1), f2(X2) to unit variance, |corr(f1(X1), f2(X2))| is at most the
/// larger of |corr(g(X1), g(X2))| for g = f1 + f2, f1 - f2, and hence at most
/// alpha whenever both of those are. Degenerate variances return true.
inline bool two_function_reduction_check(const ExchangeableJoint& joint, std::span<const double> f1,
                                      std::span<const double> f2, double alpha) {
    constexpr long double kSlack = 1e-12L;
    const auto m = joint_moments(joint, f1, f2);
    if (detail::degenerate(m.variance1, m.second1) || detail::degenerate(m.variance2, m.second2)) {
        return true;
    }
    const long double v1 = m.variance1;
    const long double v2 = m.variance2;
    std::vector<double> g1(joint.n);
    std::vector<double> g2(joint.n);
    for (std::size_t x = 0; x < joint.n; ++x) {
        g1[x] = static_cast<double>(f1[x] / std::sqrt(v1));
        g2[x] = static_cast<double>(f2[x] / std::sqrt(v2));
    }
    std::vector<double> s(joint.n);
    std::vector<double> t(joint.n);
    for (std::size_t x = 0; x < joint.n; ++x) {
        s[x] = g1[x] + g2[x];
        t[x] = g1[x] - g2[x];
    }
    const long double corr12 = std::abs(joint_covariance(joint, g1, g2));
    const long double alpha_eff =
        std::max(std::abs(joint_self_correlation(joint, s)), std::abs(joint_self_correlation(joint, t)));
    const bool chain = corr12 <= alpha_eff + kSlack;
    const bool implication = alpha_eff > alpha || corr12 <= alpha + kSlack;
    return chain && implication;
}

// -- edge processes ----------------------------------------------------------

struct EdgeHomogeneity {
    /// max |E Y_e1 Y_e2 - common| over the interior pairs e1 ->_k e2.
    double max_deviation = 0.0;
    double common_value = 0.0;
    std::uint64_t pair_count = 0;
    /// Number of e1 with e1 ->_k e for the chosen target e, and (d-1)^k.
    std::uint64_t cone_count = 0;
    std::uint64_t expected_cone_count = 0;
    /// |sum over that cone of E Y_e1 Y_e - (d-1)^k * common|.
    double cone_residual = 0.0;
};

namespace detail {

/// Exact E Y_e1 Y_e2; throws InvalidArgument if a subtree leaves the ball.
inline long double edge_cross_moment(const TreeBall& ball, const EdgeRule& rule, LabelDomain domain, EdgeId e1,
                                     EdgeId e2, const BlockRule* vertex_factor) {
    const EdgeSite s1(rule, ball, e1, vertex_factor);
    const EdgeSite s2(rule, ball, e2, vertex_factor);
    auto value = [](const EdgeSite& site) {
        return [&site](const std::vector<double>& z) {
            std::vector<double> values;
            std::vector<double> scratch;
            return site([&z](VertexId v) { return z[v]; }, values, scratch);
        };
    };
    return exact_pair_moments(ball.vertex_count(), domain, s1.support(), value(s1), s2.support(), value(s2)).cross;
}

inline bool edge_site_fits(const TreeBall& ball, const EdgeRule& rule, EdgeId e, const BlockRule* vertex_factor) {
    try {
        (void)EdgeSite(rule, ball, e, vertex_factor);
        return true;
    } catch (const InvalidArgument&) {
        return false;
    }
}

/// Edges reachable from e0 by exactly k non-backtracking steps, with repetition
/// (on a tree every endpoint is reached by one walk).
inline std::vector<EdgeId> cone_edges(const TreeBall& ball, EdgeId e0, int k, bool forward) {
    std::vector<EdgeId> frontier{e0};
    for (int step = 0; step < k; ++step) {
        std::vector<EdgeId> next;
        for (EdgeId e : frontier) {
            if (forward) {
                ball.for_each_successor(e, [&](EdgeId f) { next.push_back(f); });
            } else {
                ball.for_each_predecessor(e, [&](EdgeId f) { next.push_back(f); });
            }
        }
        frontier = std::move(next);
    }
    return frontier;
}

} // namespace detail

/// Exact E Y_e1 Y_e2 for every pair e1 ->_k e2 in the ball whose truncated
/// subtrees (and factor neighborhoods) lie inside the ball. Also sums E Y_e1 Y_e over the full backward
/// k-cone of one deep target edge e.
inline EdgeHomogeneity edge_homogeneity_check(const TreeBall& ball, const EdgeRule& rule, int k, LabelDomain domain,
                                              const BlockRule* vertex_factor = nullptr) {
    detail::require(k >= 0, "k must be non-negative");
    detail::require(domain.is_discrete(), "edge homogeneity needs a discrete label domain");
    const int d = ball.degree();
    std::uint64_t full = 1;
    for (int i = 0; i < k; ++i) {
        full *= static_cast<std::uint64_t>(d - 1);
    }

    std::vector<std::pair<EdgeId, EdgeId>> pairs;
    for (EdgeId e1 = 0; e1 < ball.edge_count(); ++e1) {
        if (!detail::edge_site_fits(ball, rule, e1, vertex_factor)) {
            continue;
        }
        const auto cone = detail::cone_edges(ball, e1, k, true);
        for (EdgeId e2 : cone) {
            if (detail::edge_site_fits(ball, rule, e2, vertex_factor)) {
                pairs.emplace_back(e1, e2);
            }
        }
    }
    detail::require(!pairs.empty(), "no interior edge pairs at this k; enlarge the ball");

    std::vector<long double> moments(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        moments[i] = detail::edge_cross_moment(ball, rule, domain, pairs[i].first, pairs[i].second, vertex_factor);
    });

    EdgeHomogeneity out;
    out.pair_count = pairs.size();
    out.common_value = static_cast<double>(moments.front());
    long double worst = 0;
    for (long double m : moments) {
        worst = std::max(worst, std::abs(m - moments.front()));
    }
    out.max_deviation = static_cast<double>(worst);

    // Target: first away-from-root edge deep enough that its whole backward
    // k-cone consists of interior edges.
    out.expected_cone_count = full;
    for (EdgeId e = 0; e < ball.edge_count(); e += 2) {
        if (!detail::edge_site_fits(ball, rule, e, vertex_factor)) {
            continue;
        }
        const auto cone = detail::cone_edges(ball, e, k, false);
        if (cone.size() != full ||
            !std::all_of(cone.begin(), cone.end(),
                         [&](EdgeId f) { return detail::edge_site_fits(ball, rule, f, vertex_factor); })) {
            continue;
        }
        CompensatedSum<long double> sum;
        for (EdgeId f : cone) {
            sum.add(detail::edge_cross_moment(ball, rule, domain, f, e, vertex_factor));
        }
        out.cone_count = cone.size();
        out.cone_residual = static_cast<double>(std::abs(sum.value() - static_cast<long double>(full) * moments.front()));
        break;
    }
    return out;
}

// -- verdicts ----------------------------------------------------------------

struct Verdict {
    bool pass;
    /// bound + 3 * stderr - |value|; negative on failure.
    double margin;
};

/// PASS iff |value| <= bound + 3 * stderr. Exact values pass stderr = 0.
inline Verdict verify_bound(double value, double bound, double std_error = 0.0) {
    detail::require(bound >= 0.0, "bound must be non-negative");
    detail::require(std_error >= 0.0, "standard error must be non-negative");
    const double margin = bound + 3.0 * std_error - std::abs(value);
    return {margin >= 0.0, margin};
}

} // namespace nbtree
