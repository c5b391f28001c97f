#pragma once
/*
 * JSON views of the report types with stable field names; the CLI and the
 * golden-file tests both parse these.
 */

#include <json.hpp>

#include "bounds.hpp"
#include "risklab.hpp"

namespace pluginrisk {

using json = nlohmann::json;

inline json to_json(const BoundReport& r) {
    json comps = json::array();
    for (const auto& c : r.bias_components) comps.push_back({{"label", c.label}, {"value", c.value}});
    json j{{"regime", r.regime},
           {"bias_components", comps},
           {"bias_bound", r.bias_bound},
           {"variance_bound", r.variance_bound},
           {"total", r.total}};
    if (!r.diagnostics.empty()) {
        json diag = json::array();
        for (const auto& c : r.diagnostics) diag.push_back({{"label", c.label}, {"value", c.value}});
        j["diagnostics"] = diag;
    }
    return j;
}

inline json to_json(const LowerBoundReport& r) {
    json j{{"bias_part", r.bias_part},
           {"variance_or_minimax_part", r.variance_or_minimax_part},
           {"total", r.total},
           {"valid", r.valid}};
    j["unspecified_constant_used"] =
        r.unspecified_constant_used ? json(*r.unspecified_constant_used) : json(nullptr);
    if (r.miller_madow_total) j["miller_madow_total"] = *r.miller_madow_total;
    return j;
}

inline json to_json(const RiskReport& r) {
    json j{{"bias", r.bias},
           {"variance", r.variance},
           {"mse", r.mse},
           {"method", risk_method_name(r.method)}};
    if (r.ci_halfwidth) j["ci_halfwidth"] = *r.ci_halfwidth;
    if (r.replicates) j["replicates"] = *r.replicates;
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

inline json to_json(const SweepRecord& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j{{"schema_version", kSweepSchemaVersion},
           {"functional", r.functional},
           {"alpha", opt(r.alpha)},
           {"estimator", r.estimator},
           {"dist", r.dist},
           {"S", r.S},
           {"n", r.n},
           {"method", r.method},
           {"replicates", r.replicates},
           {"seed", r.seed},
           {"bias", opt(r.bias)},
           {"bias_method", r.bias_method},
           {"variance", opt(r.variance)},
           {"variance_method", r.variance_method},
           {"mse", opt(r.mse)},
           {"mse_method", r.mse_method},
           {"ci_halfwidth", opt(r.ci_halfwidth)},
           {"upper_total", opt(r.upper_total)},
           {"upper_bias_bound", opt(r.upper_bias_bound)},
           {"upper_variance_bound", opt(r.upper_variance_bound)},
           {"lower_total", opt(r.lower_total)},
           {"lower_valid", r.lower_valid ? json(*r.lower_valid) : json(nullptr)},
           {"minimax_rate", opt(r.minimax_rate)},
           {"phase_boundary", opt(r.phase_boundary)},
           {"log_n_over_log_s", opt(r.log_n_over_log_s)},
           {"error", r.error}};
    return j;
}

inline json to_json(const DiscreteDistribution& dist) {
    return json{{"probs", dist.probs()}};
}

} // namespace pluginrisk
