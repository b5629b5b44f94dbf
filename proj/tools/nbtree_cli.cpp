// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

// nbtree: command-line front end. Exit codes: 0 all verdicts pass, 1 some
// verdict failed, 2 usage or precondition error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbtree/acceptance.hpp"
#include "nbtree/nbtree.hpp"

namespace {

using nbtree::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::string format = "json";
    std::string output;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Common& common, bool with_format = true) {
    if (with_format) {
        cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_option("--output", common.output, "Write output to this file instead of standard output");
    cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    cmd->add_option("--threads", common.threads, "Worker threads (default: NBTREE_THREADS or all cores)");
}

void emit(const Common& common, const std::string& text) {
    if (common.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(common.output, std::ios::binary);
    if (!out || !(out << text)) {
        throw nbtree::InvalidArgument("cannot write " + common.output);
    }
}

std::string scalar_csv(const Json& v) {
    if (v.is_number_float()) {
        return nbtree::format_double(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

/// CSV of a flat object (nested members are skipped): header line, value line.
std::string object_csv(const Json& obj) {
    std::string head, row;
    for (const auto& [key, value] : obj.items()) {
        if (value.is_structured()) {
            continue;
        }
        head += (head.empty() ? "" : ",") + key;
        row += (row.empty() ? "" : ",") + scalar_csv(value);
    }
    return head + "\n" + row + "\n";
}

std::string render(const Common& common, const Json& obj) {
    return common.format == "csv" ? object_csv(obj) : obj.dump(2) + "\n";
}

std::vector<nbtree::VertexId> parse_vertices(const std::string& text) {
    std::vector<nbtree::VertexId> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<nbtree::VertexId>(v));
        } catch (const std::exception&) {
            throw nbtree::InvalidArgument("bad vertex id '" + item + "'");
        }
    }
    nbtree::detail::require(!out.empty(), "vertex list must be non-empty");
    return out;
}

// Rule parameters shared by simulate-vertex and exact-corr.
struct RuleArgs {
    std::string rule = "sum";
    int radius = 1;
    double lambda = 0.0;
    std::optional<double> level;
    std::string pair = "vertex";
};

void add_rule_options(CLI::App* cmd, RuleArgs& args) {
    cmd->add_option("--rule", args.rule, "Rule family")
        ->check(CLI::IsMember({"pointwise", "sum", "threshold", "majority", "linear"}))
        ->capture_default_str();
    cmd->add_option("--radius", args.radius, "Rule radius (ignored by pointwise and majority)")->capture_default_str();
    cmd->add_option("--lambda", args.lambda, "Geometric ratio of the linear profile (default 1/sqrt(d-1))");
    cmd->add_option("--level", args.level, "Threshold level (default: half the ball size)");
    cmd->add_option("--pair", args.pair, "vertex: two vertices at distance k; region: two stars at hull distance k")
        ->check(CLI::IsMember({"vertex", "region"}))
        ->capture_default_str();
}

nbtree::VertexFamily family_of(const RuleArgs& args, int d) {
    const int radius = args.rule == "pointwise" ? 0 : (args.rule == "majority" ? 1 : args.radius);
    return nbtree::make_vertex_family(args.rule, d, radius, args.lambda, args.level);
}

std::string sweep_output(const Common& common, const std::vector<nbtree::SweepRow>& rows) {
    std::string text;
    if (common.format == "csv") {
        text = std::string(nbtree::kSweepCsvHeader) + "\n";
        for (const auto& r : rows) {
            text += nbtree::to_csv(r) + "\n";
        }
    } else {
        for (const auto& r : rows) {
            text += nbtree::to_json(r).dump() + "\n";
        }
    }
    return text;
}

int verdict_exit(const std::vector<nbtree::SweepRow>& rows) {
    for (const auto& r : rows) {
        if (!r.pass) {
            return kExitFail;
        }
    }
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nbtree: tree balls, non-backtracking operators and block-factor correlations"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Common common;
    int d = 3;
    int radius = 4;
    int k = 1;
    int k_max = 8;
    auto degree_opt = [&](CLI::App* cmd) {
        cmd->add_option("--d", d, "Tree degree (>= 3)")->capture_default_str();
    };

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "Closed-form bound table");
    degree_opt(bounds_cmd);
    bounds_cmd->add_option("--k-max", k_max, "Largest distance")->capture_default_str();
    add_common(bounds_cmd, common);

    // ball-info
    std::string dump_config;
    std::string domain_name = "uniform";
    std::uint32_t alphabet = 2;
    auto* info_cmd = app.add_subcommand("ball-info", "Size and sphere profile of a tree ball");
    degree_opt(info_cmd);
    info_cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
    info_cmd->add_option("--dump-config", dump_config, "Sample i.i.d. labels and write them in the binary replay format");
    info_cmd->add_option("--domain", domain_name, "Label domain for --dump-config")
        ->check(CLI::IsMember({"uniform", "discrete", "rademacher", "centered-uniform"}))
        ->capture_default_str();
    info_cmd->add_option("--alphabet", alphabet, "Alphabet size of the discrete domain")->capture_default_str();
    add_common(info_cmd, common);

    // nb-norm
    double tol = 1e-10;
    int max_iter = 10000;
    auto* norm_cmd = app.add_subcommand("nb-norm", "Estimate ||B^k|| by power iteration");
    degree_opt(norm_cmd);
    norm_cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
    norm_cmd->add_option("--k", k, "Power")->capture_default_str();
    norm_cmd->add_option("--tol", tol, "Relative tolerance")->capture_default_str();
    norm_cmd->add_option("--max-iter", max_iter, "Iteration limit")->capture_default_str();
    add_common(norm_cmd, common);

    // nb-certify
    std::string scope = "all";
    auto* cert_cmd = app.add_subcommand("nb-certify", "Exact weight-sum certificate for the norm bound");
    degree_opt(cert_cmd);
    cert_cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
    cert_cmd->add_option("--k", k, "Power")->capture_default_str();
    cert_cmd->add_option("--scope", scope, "all: every edge; orbit: one edge per (height, orientation)")
        ->check(CLI::IsMember({"all", "orbit"}))
        ->capture_default_str();
    add_common(cert_cmd, common);

    // walk-count
    std::uint32_t edge = 0;
    auto* walk_cmd = app.add_subcommand("walk-count", "Number of edges reachable in k non-backtracking steps");
    degree_opt(walk_cmd);
    walk_cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
    walk_cmd->add_option("--edge", edge, "Directed edge id")->capture_default_str();
    walk_cmd->add_option("--k", k, "Walk length")->capture_default_str();
    add_common(walk_cmd, common);

    // hull-distance
    std::string v1_text, v2_text;
    auto* hull_cmd = app.add_subcommand("hull-distance", "Distance between the convex hulls of two vertex sets");
    degree_opt(hull_cmd);
    hull_cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
    hull_cmd->add_option("--v1", v1_text, "Comma-separated vertex ids")->required();
    hull_cmd->add_option("--v2", v2_text, "Comma-separated vertex ids")->required();
    add_common(hull_cmd, common);

    // simulate-vertex
    RuleArgs rule_args;
    std::uint64_t samples = 20000;
    auto* simv_cmd = app.add_subcommand("simulate-vertex", "Monte Carlo correlation of a block factor");
    degree_opt(simv_cmd);
    simv_cmd->add_option("--k", k, "Distance")->capture_default_str();
    add_rule_options(simv_cmd, rule_args);
    simv_cmd->add_option("--samples", samples, "Sample count (>= 100)")->capture_default_str();
    add_common(simv_cmd, common);

    // simulate-edge
    std::string edge_rule = "subtree-sum";
    std::string orientation = "forward";
    int depth = 1;
    auto* sime_cmd = app.add_subcommand("simulate-edge", "Monte Carlo correlation of an edge process");
    degree_opt(sime_cmd);
    sime_cmd->add_option("--k", k, "Edge distance")->capture_default_str();
    sime_cmd->add_option("--rule", edge_rule, "Edge rule family")
        ->check(CLI::IsMember({"tail-value", "subtree-sum", "subtree-threshold"}))
        ->capture_default_str();
    sime_cmd->add_option("--depth", depth, "Subtree depth")->capture_default_str();
    sime_cmd->add_option("--orientation", orientation, "Orientation of the two edges")
        ->check(CLI::IsMember({"forward", "apart", "facing"}))
        ->capture_default_str();
    sime_cmd->add_option("--samples", samples, "Sample count (>= 100)")->capture_default_str();
    add_common(sime_cmd, common);

    // exact-corr
    auto* exact_cmd = app.add_subcommand("exact-corr", "Exact correlation by enumeration of the label support");
    degree_opt(exact_cmd);
    exact_cmd->add_option("--k", k, "Distance")->capture_default_str();
    add_rule_options(exact_cmd, rule_args);
    add_common(exact_cmd, common);

    // symmetrize-check
    std::string sym_rule = "xor-pair";
    auto* sym_cmd = app.add_subcommand("symmetrize-check", "Orbit-average a rule and check its moment properties");
    degree_opt(sym_cmd);
    sym_cmd->add_option("--rule", sym_rule, "xor-pair or a random table")
        ->check(CLI::IsMember({"xor-pair", "table"}))
        ->capture_default_str();
    sym_cmd->add_option("--radius", radius, "Radius of the table rule")->capture_default_str();
    sym_cmd->add_option("--alphabet", alphabet, "Alphabet size")->capture_default_str();
    add_common(sym_cmd, common);

    // universal-check
    std::uint64_t trials = 500;
    std::optional<int> universal_radius;
    auto* uni_cmd = app.add_subcommand("universal-check", "Encode/reconstruct roundtrip of the universal factor");
    degree_opt(uni_cmd);
    uni_cmd->add_option("--depth", depth, "Code depth D")->capture_default_str();
    uni_cmd->add_option("--trials", trials, "Number of random pairs")->capture_default_str();
    uni_cmd->add_option("--radius", universal_radius, "Ball radius (default: smallest admissible)");
    add_common(uni_cmd, common);

    // report
    auto* report_cmd = app.add_subcommand("report", "Run the acceptance suite and print one JSON document");
    add_common(report_cmd, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "nbtree: error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (common.threads > 0) {
            nbtree::set_thread_count(common.threads);
        }

        if (*bounds_cmd) {
            const auto rows = nbtree::bounds::bound_table(d, k_max);
            std::string text;
            if (common.format == "csv") {
                text = std::string(nbtree::kBoundsCsvHeader) + "\n";
                for (const auto& r : rows) {
                    text += nbtree::to_csv(r) + "\n";
                }
            } else {
                for (const auto& r : rows) {
                    text += nbtree::to_json(r).dump() + "\n";
                }
            }
            emit(common, text);
            return kExitPass;
        }

        if (*info_cmd) {
            const nbtree::TreeBall ball(d, radius);
            Json spheres = Json::array();
            for (int i = 0; i <= radius; ++i) {
                spheres.push_back(nbtree::sphere_size(d, i));
            }
            Json info = {{"d", d},
                         {"radius", radius},
                         {"vertices", ball.vertex_count()},
                         {"directed_edges", ball.edge_count()},
                         {"sphere_sizes", spheres}};
            if (!dump_config.empty()) {
                const auto domain = nbtree::LabelDomain::parse(domain_name, alphabet);
                const auto config = nbtree::sample_iid(ball, domain, common.seed);
                std::ofstream out(dump_config, std::ios::binary);
                nbtree::write_config(out, config);
                info["config"] = dump_config;
                info["domain"] = domain.name();
                info["seed"] = common.seed;
            }
            emit(common, render(common, info));
            return kExitPass;
        }

        if (*norm_cmd) {
            const nbtree::TreeBall ball(d, radius);
            const nbtree::NbOperator op(ball);
            try {
                const auto r = nbtree::operator_norm_pow(op, k, {tol, max_iter});
                emit(common, render(common, nbtree::to_json(r)));
                return r.converged ? kExitPass : kExitFail;
            } catch (const std::logic_error& e) {
                if (dynamic_cast<const nbtree::Error*>(&e) != nullptr) {
                    throw;
                }
                std::cerr << "nbtree: " << e.what() << "\n";
                return kExitFail;
            }
        }

        if (*cert_cmd) {
            const nbtree::TreeBall ball(d, radius);
            const auto r = nbtree::certify_claims(
                ball, k, scope == "all" ? nbtree::CertifyScope::all_edges : nbtree::CertifyScope::orbit_representatives);
            emit(common, render(common, nbtree::to_json(r)));
            return r.strictly_below ? kExitPass : kExitFail;
        }

        if (*walk_cmd) {
            const nbtree::TreeBall ball(d, radius);
            const nbtree::NbOperator op(ball);
            const auto count = nbtree::walk_count(op, edge, k);
            std::uint64_t full = 1;
            for (int i = 0; i < k; ++i) {
                full *= static_cast<std::uint64_t>(d - 1);
            }
            const auto e = ball.edge(edge);
            emit(common, render(common, {{"d", d},
                                         {"radius", radius},
                                         {"edge", edge},
                                         {"tail", e.tail},
                                         {"head", e.head},
                                         {"height", e.height},
                                         {"k", k},
                                         {"count", count},
                                         {"interior_count", full},
                                         {"interior", count == full}}));
            return kExitPass;
        }

        if (*hull_cmd) {
            const nbtree::TreeBall ball(d, radius);
            const auto r = nbtree::hull_distance(ball, parse_vertices(v1_text), parse_vertices(v2_text));
            emit(common, render(common, {{"k", r.k}, {"v1", r.v1}, {"v2", r.v2}}));
            return kExitPass;
        }

        if (*simv_cmd) {
            const auto family = family_of(rule_args, d);
            const bool region = rule_args.pair == "region";
            const auto est = region ? nbtree::mc_region_corr(d, k, family, samples, common.seed)
                                    : nbtree::mc_vertex_corr(d, k, family, samples, common.seed);
            const double bound = region ? nbtree::bounds::hull_corr_bound(d, k) : nbtree::bounds::vertex_corr_bound(d, k);
            const auto v = nbtree::verify_bound(est.estimate, bound, est.std_error);
            const std::vector<nbtree::SweepRow> rows{{d, k, rule_args.rule, region ? "mc-region" : "mc-vertex",
                                                      est.estimate, est.std_error, bound, v.pass, v.margin, est.samples,
                                                      est.seed}};
            emit(common, sweep_output(common, rows));
            return verdict_exit(rows);
        }

        if (*sime_cmd) {
            const auto family = nbtree::make_edge_family(edge_rule, d, depth);
            const auto o = orientation == "forward" ? nbtree::EdgeOrientation::forward
                           : orientation == "apart" ? nbtree::EdgeOrientation::apart
                                                    : nbtree::EdgeOrientation::facing;
            const auto est = nbtree::mc_edge_corr(d, k, family, o, samples, common.seed);
            const double bound = nbtree::bounds::edge_corr_bound(d, k);
            const auto v = nbtree::verify_bound(est.estimate, bound, est.std_error);
            const std::vector<nbtree::SweepRow> rows{{d, k, edge_rule + "/" + orientation, "mc-edge", est.estimate,
                                                      est.std_error, bound, v.pass, v.margin, est.samples, est.seed}};
            emit(common, sweep_output(common, rows));
            return verdict_exit(rows);
        }

        if (*exact_cmd) {
            const auto family = family_of(rule_args, d);
            const bool region = rule_args.pair == "region";
            const auto r = region ? nbtree::exact_region_corr(d, k, family) : nbtree::exact_vertex_corr(d, k, family);
            const double bound = region ? nbtree::bounds::hull_corr_bound(d, k) : nbtree::bounds::vertex_corr_bound(d, k);
            const auto v = nbtree::verify_bound(r.correlation, bound);
            const std::vector<nbtree::SweepRow> rows{{d, k, rule_args.rule, region ? "exact-region" : "exact-vertex",
                                                      r.correlation, 0.0, bound, v.pass, v.margin, r.configurations, 0}};
            emit(common, sweep_output(common, rows));
            return verdict_exit(rows);
        }

        if (*sym_cmd) {
            const auto domain = nbtree::LabelDomain::discrete(alphabet);
            const auto rule = sym_rule == "xor-pair" ? nbtree::BlockRule::xor_pair()
                                                     : nbtree::BlockRule::random_table(d, radius, domain, common.seed);
            const auto layout = nbtree::RootedLayout::vertex_ball(d, rule.radius());
            const auto sym = nbtree::symmetrize_rule(rule, d, domain);
            // Moments of f and its orbit average under i.i.d. uniform labels.
            std::vector<nbtree::VertexId> support(layout.size());
            for (std::uint32_t p = 0; p < layout.size(); ++p) {
                support[p] = p;
            }
            const auto m = nbtree::exact_moments(layout.size(), support, domain, [&](const std::vector<double>& z) {
                return std::pair<double, double>{rule.evaluate(z, layout), sym.evaluate(z, layout)};
            });
            constexpr double kTol = 1e-12;
            const double mean_gap = static_cast<double>(std::abs(m.mean_a - m.mean_b));
            const double second_excess = static_cast<double>(m.second_b - m.second_a);
            const bool invariant = nbtree::spot_check_symmetry(sym, layout, domain, 100, common.seed);
            const bool ok = mean_gap <= kTol && second_excess <= kTol && invariant;
            emit(common, render(common, {{"d", d},
                                         {"rule", rule.name()},
                                         {"radius", rule.radius()},
                                         {"alphabet", alphabet},
                                         {"orbit_size", layout.automorphism_count()},
                                         {"mean", static_cast<double>(m.mean_a)},
                                         {"mean_symmetrized", static_cast<double>(m.mean_b)},
                                         {"second", static_cast<double>(m.second_a)},
                                         {"second_symmetrized", static_cast<double>(m.second_b)},
                                         {"invariant", invariant},
                                         {"verdict", ok ? "PASS" : "FAIL"}}));
            return ok ? kExitPass : kExitFail;
        }

        if (*uni_cmd) {
            const int need = depth + (depth + 2) / 2 + 1;
            const nbtree::TreeBall ball(d, universal_radius.value_or(need));
            const auto r = nbtree::roundtrip_check(ball, depth, trials, common.seed);
            emit(common, render(common, nbtree::to_json(r)));
            return r.successes == r.trials ? kExitPass : kExitFail;
        }

        if (*report_cmd) {
            const auto report = nbtree::acceptance::run_report(common.seed);
            emit(common, report.dump(2) + "\n");
            return report["pass"].get<bool>() ? kExitPass : kExitFail;
        }
    } catch (const nbtree::Error& e) {
        std::cerr << "nbtree: error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "nbtree: error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
