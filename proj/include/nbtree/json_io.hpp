// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Serialization of reports. Requires nlohmann/json (vendor/json.hpp) on the
// include path.

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nbtree/bounds.hpp"
#include "nbtree/correlation.hpp"
#include "nbtree/nb_operator.hpp"
#include "nbtree/sweep.hpp"
#include "nbtree/universal.hpp"

namespace nbtree {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal separator, independent of the locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline Json to_json(const bounds::BoundRow& r) {
    return {{"d", r.d},
            {"k", r.k},
            {"vertex_bound", r.vertex_bound},
            {"hull_bound", r.hull_bound},
            {"edge_bound", r.edge_bound},
            {"bnorm_bound", r.bnorm_bound}};
}

inline Json to_json(const NormReport& r) {
    return {{"d", r.d},
            {"radius", r.radius},
            {"k", r.k},
            {"estimate", r.estimate},
            {"bound", r.bound},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

inline Json to_json(const SumStats& s) {
    if (s.count == 0) {
        return {{"count", 0}};
    }
    return {{"count", s.count}, {"min", static_cast<double>(s.min)}, {"max", static_cast<double>(s.max)}};
}

inline Json to_json(const CertificateReport& r) {
    Json inv = Json::object();
    Json fwd = Json::object();
    for (int c = 0; c < 3; ++c) {
        inv[to_string(static_cast<EdgeClass>(c))] = to_json(r.s_inv[c]);
        fwd[to_string(static_cast<EdgeClass>(c))] = to_json(r.s_fwd[c]);
    }
    return {{"d", r.d},
            {"radius", r.radius},
            {"k", r.k},
            {"max_s_inv", static_cast<double>(r.max_s_inv)},
            {"max_s_fwd", static_cast<double>(r.max_s_fwd)},
            {"bound", static_cast<double>(r.bound)},
            {"interior_edge_count", r.interior_edge_count},
            {"interior_edge_count_fwd", r.interior_edge_count_fwd},
            {"excluded_edge_count", r.excluded_edge_count},
            {"s_inv", inv},
            {"s_fwd", fwd},
            {"strictly_below", r.strictly_below}};
}

inline Json to_json(const CorrEstimate& r) {
    return {{"estimate", r.estimate}, {"samples", r.samples},  {"stderr", r.std_error}, {"ci_low", r.ci_low},
            {"ci_high", r.ci_high},   {"seed", r.seed},        {"degenerate", r.degenerate}};
}

inline Json to_json(const ExactCorrResult& r) {
    return {{"covariance", r.covariance},
            {"variance1", r.variance1},
            {"variance2", r.variance2},
            {"correlation", r.correlation},
            {"configurations", r.configurations}};
}

inline Json to_json(const RoundtripResult& r) {
    return {{"trials", r.trials}, {"successes", r.successes}, {"collisions", r.collisions}};
}

inline Json to_json(const SweepRow& r) {
    return {{"d", r.d},
            {"k", r.k},
            {"rule", r.rule},
            {"mode", r.mode},
            {"value", r.value},
            {"stderr", r.std_error},
            {"bound", r.bound},
            {"verdict", r.pass ? "PASS" : "FAIL"},
            {"n_samples", r.n_samples},
            {"seed", r.seed}};
}

// -- CSV ---------------------------------------------------------------------

inline constexpr const char* kBoundsCsvHeader = "d,k,vertex_bound,hull_bound,edge_bound,bnorm_bound";
inline constexpr const char* kSweepCsvHeader = "d,k,rule,mode,value,stderr,bound,verdict,n_samples,seed";

inline std::string to_csv(const bounds::BoundRow& r) {
    return std::to_string(r.d) + "," + std::to_string(r.k) + "," + format_double(r.vertex_bound) + "," +
           format_double(r.hull_bound) + "," + format_double(r.edge_bound) + "," + format_double(r.bnorm_bound);
}

inline std::string to_csv(const SweepRow& r) {
    return std::to_string(r.d) + "," + std::to_string(r.k) + "," + r.rule + "," + r.mode + "," +
           format_double(r.value) + "," + format_double(r.std_error) + "," + format_double(r.bound) + "," +
           (r.pass ? "PASS" : "FAIL") + "," + std::to_string(r.n_samples) + "," + std::to_string(r.seed);
}

} // namespace nbtree
