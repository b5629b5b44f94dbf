// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nbtree/error.hpp"
#include "nbtree/labels.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/rooted_layout.hpp"
#include "nbtree/tree_ball.hpp"

namespace nbtree {

/// Maximum number of automorphisms an exact orbit average may enumerate.
inline constexpr std::uint64_t kMaxOrbitSize = 1'000'000;
/// Maximum number of entries in a table-driven rule.
inline constexpr std::uint64_t kMaxTableSize = 1u << 22;

namespace detail {

/// Shared machinery of vertex (block) rules and edge rules: a kernel reading
/// values laid out in a RootedLayout, plus a symmetry claim.
class LocalRule {
  public:
    using Kernel = std::function<double(std::span<const double>, const RootedLayout&)>;

    LocalRule(std::string name, int extent, bool symmetric, Kernel kernel,
              std::optional<RootedLayout> fixed_layout = std::nullopt)
        : name_(std::move(name)),
          extent_(extent),
          symmetric_(symmetric),
          kernel_(std::make_shared<const Kernel>(std::move(kernel))),
          fixed_layout_(std::move(fixed_layout)) {}

    const std::string& name() const { return name_; }
    int extent() const { return extent_; }
    bool symmetric() const { return symmetric_; }

    double evaluate(std::span<const double> local, const RootedLayout& layout) const {
        if (layout.depth() != extent_ || local.size() != layout.size()) {
            throw InvalidArgument("rule '" + name_ + "' evaluated on a layout of the wrong shape");
        }
        if (fixed_layout_ && !(*fixed_layout_ == layout)) {
            throw InvalidArgument("rule '" + name_ + "' is bound to a different degree");
        }
        return (*kernel_)(local, layout);
    }

    /// Average of the rule over every automorphism of the layout.
    LocalRule orbit_average(const RootedLayout& layout) const {
        if (layout.depth() != extent_) {
            throw InvalidArgument("orbit average layout depth does not match rule extent");
        }
        auto group = std::make_shared<const std::vector<Permutation>>(layout.automorphisms(kMaxOrbitSize));
        LocalRule base = *this;
        Kernel kernel = [base, group](std::span<const double> local, const RootedLayout& lay) {
            std::vector<double> moved(local.size());
            std::vector<double> terms;
            terms.reserve(group->size());
            for (const auto& g : *group) {
                for (std::size_t p = 0; p < local.size(); ++p) {
                    moved[p] = local[g[p]];
                }
                terms.push_back(base.evaluate(moved, lay));
            }
            // Permuting the input permutes the terms; summing them sorted makes
            // the result bit-identical across an orbit.
            std::sort(terms.begin(), terms.end());
            CompensatedSum<double> acc;
            for (double t : terms) {
                acc.add(t);
            }
            return acc.value() / static_cast<double>(group->size());
        };
        return LocalRule("symmetrized(" + name_ + ")", extent_, true, std::move(kernel), layout);
    }

  private:
    std::string name_;
    int extent_;
    bool symmetric_;
    std::shared_ptr<const Kernel> kernel_;
    std::optional<RootedLayout> fixed_layout_;
};

inline LocalRule::Kernel table_kernel(LabelDomain domain, std::vector<double> values) {
    return [domain, values = std::move(values)](std::span<const double> local, const RootedLayout&) {
        std::uint64_t index = 0;
        std::uint64_t scale = 1;
        for (double x : local) {
            const std::uint32_t s = domain.symbol_index(x);
            if (s >= domain.symbol_count()) {
                throw InvalidArgument("table rule input " + std::to_string(x) + " outside its alphabet");
            }
            index += s * scale;
            scale *= domain.symbol_count();
        }
        return values[index];
    };
}

inline std::uint64_t table_size(LabelDomain domain, std::size_t positions) {
    require(domain.is_discrete(), "table rules need a discrete alphabet");
    std::uint64_t size = 1;
    for (std::size_t i = 0; i < positions; ++i) {
        size *= domain.symbol_count();
        if (size > kMaxTableSize) {
            throw CapExceeded("table rule would need more than " + std::to_string(kMaxTableSize) + " entries");
        }
    }
    return size;
}

/// Sum that depends only on the multiset of inputs: symmetric rules then give
/// bit-identical values under any reordering of their inputs.
inline double order_free_sum(std::span<const double> values) {
    thread_local std::vector<double> buf;
    buf.assign(values.begin(), values.end());
    std::sort(buf.begin(), buf.end());
    double acc = 0.0;
    for (double x : buf) {
        acc += x;
    }
    return acc;
}

inline std::vector<double> random_values(std::uint64_t count, std::uint64_t seed) {
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        values[i] = bits_to_unit(counter_bits(seed, 0x7ab1e, i));
    }
    return values;
}

} // namespace detail

/// Coefficient profile a_0..a_r of X_v = sum_{dist(u,v) <= r} a_{dist(u,v)} Z_u.
struct LinearRule {
    std::vector<double> profile;

    int radius() const { return static_cast<int>(profile.size()) - 1; }

    /// a_i = lambda^i for i = 0..r.
    static LinearRule geometric(double lambda, int radius) {
        detail::require(radius >= 0, "linear rule radius must be non-negative");
        LinearRule rule;
        rule.profile.resize(static_cast<std::size_t>(radius) + 1);
        double a = 1.0;
        for (auto& x : rule.profile) {
            x = a;
            a *= lambda;
        }
        return rule;
    }
};

/// Rule of a block factor: the value at v depends only on the labels within
/// distance `radius` of v, presented in the canonical rooted-ball layout.
class BlockRule {
  public:
    const std::string& name() const { return core_.name(); }
    int radius() const { return core_.extent(); }
    bool symmetric() const { return core_.symmetric(); }

    double evaluate(std::span<const double> local, const RootedLayout& layout) const {
        return core_.evaluate(local, layout);
    }

    /// X_v = phi(Z_v) with phi the identity.
    static BlockRule pointwise() {
        return BlockRule({"pointwise", 0, true, [](std::span<const double> l, const RootedLayout&) { return l[0]; }});
    }

    static BlockRule sum(int radius) {
        detail::require(radius >= 0, "rule radius must be non-negative");
        return BlockRule({"sum", radius, true, [](std::span<const double> l, const RootedLayout&) {
                              return detail::order_free_sum(l);
                          }});
    }

    /// Symbol of v XOR symbol of its first neighbor in canonical order.
    /// Depends on the canonical order, so it is not a factor rule by itself.
    static BlockRule xor_pair() {
        return BlockRule({"xor-pair", 1, false, [](std::span<const double> l, const RootedLayout&) {
                              const auto a = static_cast<std::uint64_t>(l[0]);
                              const auto b = static_cast<std::uint64_t>(l[1]);
                              return static_cast<double>(a ^ b);
                          }});
    }

    /// 1 if the labels of the r-ball sum to more than `level`, else 0.
    static BlockRule threshold(int radius, double level) {
        detail::require(radius >= 0, "rule radius must be non-negative");
        return BlockRule({"threshold", radius, true, [level](std::span<const double> l, const RootedLayout&) {
                              const double acc = detail::order_free_sum(l);
                              return acc > level ? 1.0 : 0.0;
                          }});
    }

    /// Majority vote of the closed neighborhood; a label votes yes when it
    /// exceeds 1/2. Ties give 1/2.
    static BlockRule majority() {
        return BlockRule({"majority", 1, true, [](std::span<const double> l, const RootedLayout&) {
                              std::size_t yes = 0;
                              for (double x : l) {
                                  yes += x > 0.5 ? 1 : 0;
                              }
                              const std::size_t no = l.size() - yes;
                              return yes > no ? 1.0 : (yes < no ? 0.0 : 0.5);
                          }});
    }

    static BlockRule linear(const LinearRule& rule) {
        detail::require(rule.radius() >= 0, "linear rule needs a non-empty profile");
        return BlockRule({"linear", rule.radius(), true,
                          [profile = rule.profile](std::span<const double> l, const RootedLayout& layout) {
                              // Levels are contiguous position ranges.
                              double acc = 0.0;
                              std::uint32_t begin = 0;
                              while (begin < l.size()) {
                                  std::uint32_t end = begin;
                                  while (end < l.size() && layout.level(end) == layout.level(begin)) {
                                      ++end;
                                  }
                                  acc += profile[static_cast<std::size_t>(layout.level(begin))] *
                                         detail::order_free_sum(l.subspan(begin, end - begin));
                                  begin = end;
                              }
                              return acc;
                          }});
    }

    /// Generic rule given by its full value table over the alphabet of
    /// `domain`; entry index is sum_p symbol(p) * m^p over layout positions.
    static BlockRule table(int d, int radius, LabelDomain domain, std::vector<double> values) {
        const auto layout = RootedLayout::vertex_ball(d, radius);
        const std::uint64_t size = detail::table_size(domain, layout.size());
        detail::require(values.size() == size, "table rule needs " + std::to_string(size) + " values");
        return BlockRule({"table", radius, false, detail::table_kernel(domain, std::move(values)), layout});
    }

    static BlockRule random_table(int d, int radius, LabelDomain domain, std::uint64_t seed) {
        const auto layout = RootedLayout::vertex_ball(d, radius);
        return table(d, radius, domain, detail::random_values(detail::table_size(domain, layout.size()), seed));
    }

  private:
    friend BlockRule symmetrize_rule(const BlockRule&, int, LabelDomain);
    explicit BlockRule(detail::LocalRule core) : core_(std::move(core)) {}
    detail::LocalRule core_;
};

/// Orbit-averaged rule: the mean of f over every automorphism of the rooted
/// r-ball of T_d (all recursive child permutations). Exact; capped at
/// r <= 2, alphabet <= 3, d <= 4.
inline BlockRule symmetrize_rule(const BlockRule& rule, int d, LabelDomain domain) {
    detail::require(domain.is_discrete(), "symmetrization needs a discrete alphabet");
    if (rule.radius() > 2 || domain.symbol_count() > 3 || d > 4) {
        throw CapExceeded("exact orbit averaging is limited to radius <= 2, alphabet <= 3, degree <= 4");
    }
    detail::require(d >= 3, "degree must be at least 3");
    return BlockRule(rule.core_.orbit_average(RootedLayout::vertex_ball(d, rule.radius())));
}

/// Rule of an edge process: Y_e is computed from the values on the depth-D
/// truncation of the (d-1)-ary subtree behind e, rooted at the tail of e.
class EdgeRule {
  public:
    const std::string& name() const { return core_.name(); }
    int depth() const { return core_.extent(); }
    bool symmetric() const { return core_.symmetric(); }

    double evaluate(std::span<const double> local, const RootedLayout& layout) const {
        return core_.evaluate(local, layout);
    }

    /// Y_e = value at the tail of e.
    static EdgeRule tail_value() {
        return EdgeRule({"tail-value", 0, true, [](std::span<const double> l, const RootedLayout&) { return l[0]; }});
    }

    static EdgeRule subtree_sum(int depth) {
        detail::require(depth >= 0, "edge rule depth must be non-negative");
        return EdgeRule({"subtree-sum", depth, true, [](std::span<const double> l, const RootedLayout&) {
                             return detail::order_free_sum(l);
                         }});
    }

    /// 1 if the truncated subtree sums to more than `level`, else 0.
    static EdgeRule subtree_threshold(int depth, double level) {
        detail::require(depth >= 0, "edge rule depth must be non-negative");
        return EdgeRule({"subtree-threshold", depth, true, [level](std::span<const double> l, const RootedLayout&) {
                             const double acc = detail::order_free_sum(l);
                             return acc > level ? 1.0 : 0.0;
                         }});
    }

    /// Tail value times the value of its first child in canonical order.
    static EdgeRule root_times_first_child() {
        return EdgeRule({"root-times-first-child", 1, false,
                         [](std::span<const double> l, const RootedLayout&) { return l[0] * l[1]; }});
    }

    static EdgeRule table(int d, int depth, LabelDomain domain, std::vector<double> values) {
        const auto layout = RootedLayout::subtree(d, depth);
        const std::uint64_t size = detail::table_size(domain, layout.size());
        detail::require(values.size() == size, "table rule needs " + std::to_string(size) + " values");
        return EdgeRule({"table", depth, false, detail::table_kernel(domain, std::move(values)), layout});
    }

    static EdgeRule random_table(int d, int depth, LabelDomain domain, std::uint64_t seed) {
        const auto layout = RootedLayout::subtree(d, depth);
        return table(d, depth, domain, detail::random_values(detail::table_size(domain, layout.size()), seed));
    }

  private:
    friend EdgeRule symmetrize_edge_rule(const EdgeRule&, int);
    explicit EdgeRule(detail::LocalRule core) : core_(std::move(core)) {}
    detail::LocalRule core_;
};

/// Orbit average of an edge rule over the automorphisms of the truncated
/// (d-1)-ary subtree.
inline EdgeRule symmetrize_edge_rule(const EdgeRule& rule, int d) {
    detail::require(d >= 3, "degree must be at least 3");
    return EdgeRule(rule.core_.orbit_average(RootedLayout::subtree(d, rule.depth())));
}

/// Spot-checks the symmetry claim: evaluates on `trials` random inputs under
/// random automorphisms and compares with the canonical value.
template <class Rule>
bool spot_check_symmetry(const Rule& rule, const RootedLayout& layout, LabelDomain domain, int trials,
                         std::uint64_t seed) {
    std::vector<double> local(layout.size());
    std::vector<double> moved(layout.size());
    for (int t = 0; t < trials; ++t) {
        const CounterLabels source{domain, seed, static_cast<std::uint64_t>(t)};
        for (std::uint32_t p = 0; p < local.size(); ++p) {
            local[p] = source(p);
        }
        const auto g = layout.random_automorphism(seed ^ 0x5eed, static_cast<std::uint64_t>(t));
        for (std::size_t p = 0; p < local.size(); ++p) {
            moved[p] = local[g[p]];
        }
        if (rule.evaluate(local, layout) != rule.evaluate(moved, layout)) {
            return false;
        }
    }
    return true;
}

// -- evaluation at sites ----------------------------------------------------

/// A block rule bound to one vertex of a ball: the gather map is computed
/// once, so repeated evaluation only reads labels.
class BlockSite {
  public:
    BlockSite(const BlockRule& rule, const TreeBall& ball, VertexId v)
        : rule_(&rule), layout_(RootedLayout::vertex_ball(ball.degree(), rule.radius())),
          support_(gather_vertex_ball(ball, v, rule.radius())) {}

    const std::vector<VertexId>& support() const { return support_; }

    template <class Labels>
    double operator()(const Labels& labels, std::vector<double>& scratch) const {
        scratch.resize(support_.size());
        for (std::size_t p = 0; p < support_.size(); ++p) {
            scratch[p] = labels(support_[p]);
        }
        return rule_->evaluate(scratch, layout_);
    }

  private:
    const BlockRule* rule_;
    RootedLayout layout_;
    std::vector<VertexId> support_;
};

/// Evaluates a block rule at v. The r-ball around v must lie inside the ball.
template <class Labels>
double evaluate_block_rule(const BlockRule& rule, const TreeBall& ball, const Labels& labels, VertexId v) {
    std::vector<double> scratch;
    return BlockSite(rule, ball, v)(labels, scratch);
}

inline double evaluate_block_rule(const BlockRule& rule, const LabelConfig& config, VertexId v) {
    return evaluate_block_rule(rule, config.ball(), config, v);
}

inline double evaluate_linear_rule(const LinearRule& rule, const LabelConfig& config, VertexId v) {
    if (!config.domain().is_centered()) {
        throw InvalidArgument("linear rules need centered labels, got the " + config.domain().name() + " domain");
    }
    return evaluate_block_rule(BlockRule::linear(rule), config, v);
}

/// An edge rule bound to one directed edge. When `vertex_factor` is given the
/// rule reads the block-factor values X at the subtree positions; otherwise it
/// reads the labels directly.
class EdgeSite {
  public:
    EdgeSite(const EdgeRule& rule, const TreeBall& ball, EdgeId e, const BlockRule* vertex_factor = nullptr)
        : rule_(&rule), layout_(RootedLayout::subtree(ball.degree(), rule.depth())),
          positions_(gather_subtree(ball, e, rule.depth())) {
        if (vertex_factor != nullptr) {
            for (VertexId v : positions_) {
                factor_sites_.emplace_back(*vertex_factor, ball, v);
            }
        }
    }

    const std::vector<VertexId>& positions() const { return positions_; }

    /// Every vertex whose label can influence Y_e.
    std::vector<VertexId> support() const {
        std::vector<VertexId> out = positions_;
        for (const auto& site : factor_sites_) {
            out.insert(out.end(), site.support().begin(), site.support().end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Values fed to the rule, in canonical layout order.
    template <class Labels>
    void inputs(const Labels& labels, std::vector<double>& out, std::vector<double>& scratch) const {
        out.resize(positions_.size());
        for (std::size_t p = 0; p < positions_.size(); ++p) {
            out[p] = factor_sites_.empty() ? labels(positions_[p]) : factor_sites_[p](labels, scratch);
        }
    }

    template <class Labels>
    double operator()(const Labels& labels, std::vector<double>& values, std::vector<double>& scratch) const {
        inputs(labels, values, scratch);
        return rule_->evaluate(values, layout_);
    }

    const RootedLayout& layout() const { return layout_; }
    const EdgeRule& rule() const { return *rule_; }

  private:
    const EdgeRule* rule_;
    RootedLayout layout_;
    std::vector<VertexId> positions_;
    std::vector<BlockSite> factor_sites_;
};

/// Evaluation-time checks for edge_process_value.
struct EdgeValueCheck {
    /// Re-evaluate under `orders` random child orders and require identical
    /// values; only meaningful (and only allowed) for symmetric rules.
    bool assert_well_defined = false;
    int orders = 20;
    std::uint64_t seed = 0;
};

/// Y_e: the edge rule applied to the labels of the truncated subtree behind e.
template <class Labels>
double edge_process_value(const EdgeRule& rule, const TreeBall& ball, const Labels& labels, EdgeId e,
                          EdgeValueCheck check = {}) {
    const EdgeSite site(rule, ball, e);
    std::vector<double> values;
    std::vector<double> scratch;
    const double canonical = site(labels, values, scratch);
    if (check.assert_well_defined) {
        if (!rule.symmetric()) {
            throw InvalidArgument("well-definedness requested for the asymmetric edge rule '" + rule.name() + "'");
        }
        std::vector<double> moved(values.size());
        for (int t = 0; t < check.orders; ++t) {
            const auto g = site.layout().random_automorphism(check.seed, static_cast<std::uint64_t>(t));
            for (std::size_t p = 0; p < values.size(); ++p) {
                moved[p] = values[g[p]];
            }
            if (rule.evaluate(moved, site.layout()) != canonical) {
                throw std::logic_error("edge rule '" + rule.name() + "' depends on the child order");
            }
        }
    }
    return canonical;
}

inline double edge_process_value(const EdgeRule& rule, const LabelConfig& config, EdgeId e, EdgeValueCheck check = {}) {
    return edge_process_value(rule, config.ball(), config, e, check);
}

// -- exact covariance of linear rules ---------------------------------------

struct LinearCovariance {
    double covariance;
    double variance;
    double correlation;
};

/// Exact covariance structure of X = linear rule applied to centered,
/// unit-variance i.i.d. labels, for two vertices at distance k:
/// cov = sum_w a_{dist(w,u)} a_{dist(w,v)}, var = sum_i |S_i| a_i^2.
/// Computed by enumerating the vertices of a finite ball around u.
inline LinearCovariance linear_rule_covariance_exact(int d, const std::vector<double>& profile, int k) {
    detail::require(d >= 3, "degree must be at least 3");
    detail::require(k >= 0, "distance must be non-negative");
    detail::require(!profile.empty(), "profile must be non-empty");
    const int r = static_cast<int>(profile.size()) - 1;

    CompensatedSum<double> var;
    for (int i = 0; i <= r; ++i) {
        var.add(static_cast<double>(sphere_size(d, i)) * profile[i] * profile[i]);
    }
    CompensatedSum<double> cov;
    if (k <= 2 * r) {
        const TreeBall ball(d, std::max(r, k));
        const VertexId v = *ball.sphere(k).begin();
        for (int i = 0; i <= r; ++i) {
            for (VertexId w : ball.sphere(i)) {
                const int j = ball.distance(w, v);
                if (j <= r) {
                    cov.add(profile[i] * profile[static_cast<std::size_t>(j)]);
                }
            }
        }
    }
    const double variance = var.value();
    const double covariance = cov.value();
    return {covariance, variance, variance == 0.0 ? 0.0 : covariance / variance};
}

} // namespace nbtree
