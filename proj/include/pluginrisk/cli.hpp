#pragma once
/*
 * Command-line surface. One binary, subcommand style:
 *
 *   estimate   plug-in / Miller-Madow estimate from a count vector
 *   bias       exact plug-in bias at (functional, distribution, n)
 *   bounds     closed-form upper/lower risk bounds and the minimax rate
 *   modulus    closed-form and numeric moduli of smoothness
 *   risk       bias/variance/MSE by enumeration, exact bias, or Monte Carlo
 *   sweep      grids of the above joined with the bounds, CSV or JSON lines
 *
 * Every run echoes its resolved configuration so outputs are reproducible.
 * Exit codes: 0 ok, 2 usage error, 3 enumeration infeasible.
 */

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pluginrisk.hpp"
#include "serialize.hpp"

namespace pluginrisk::cli {

using nlohmann::json;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline long long parse_ll(const std::string& s, const std::string& flag) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(flag + ": expected an integer, got '" + s + "'");
    }
}

inline double parse_real(const std::string& s, const std::string& flag) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(flag + ": expected a number, got '" + s + "'");
    }
}

inline Functional parse_functional(const std::string& spec, std::optional<double> alpha_flag) {
    if (spec == "entropy") return Functional::entropy();
    if (spec == "power") {
        if (!alpha_flag) throw DomainError("--functional power requires --alpha");
        return Functional::power(*alpha_flag);
    }
    if (spec.rfind("power:", 0) == 0)
        return Functional::power(parse_real(spec.substr(6), "--functional"));
    throw DomainError("--functional: expected entropy, power:ALPHA, or power with --alpha; got '" +
                      spec + "'");
}

inline DiscreteDistribution parse_dist(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "uniform" && parts.size() == 2)
        return uniform(static_cast<int>(parse_ll(parts[1], "--dist")));
    if (parts[0] == "w" && parts.size() == 3)
        return worst_case_w(static_cast<int>(parse_ll(parts[1], "--dist")),
                            parse_ll(parts[2], "--dist"));
    if (parts[0] == "capped" && parts.size() == 3)
        return capped_uniform(static_cast<int>(parse_ll(parts[1], "--dist")),
                              parse_ll(parts[2], "--dist"));
    if (parts[0] == "file" && parts.size() >= 2) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw DomainError("--dist: cannot open file '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw DomainError("--dist: invalid JSON in '" + path + "': " + e.what());
        }
        if (!j.contains("probs") || !j["probs"].is_array())
            throw DomainError("--dist: file '" + path + "' must contain a \"probs\" array");
        return make_distribution(j["probs"].get<std::vector<double>>());
    }
    throw DomainError("--dist: expected uniform:S, w:S:n, capped:S:n, or file:PATH; got '" +
                      spec + "'");
}

inline CountVector parse_counts(const std::string& spec) {
    std::vector<long long> counts;
    for (const auto& tok : split(spec, ','))
        counts.push_back(parse_ll(tok, "--counts"));
    return CountVector(std::move(counts));
}

inline EstimatorSpec parse_estimator(const std::string& name, int s_known) {
    if (name == "mle") return EstimatorSpec::plug_in();
    if (name == "miller-madow")
        return s_known >= 1 ? EstimatorSpec::miller_madow(s_known)
                            : EstimatorSpec::miller_madow_observed();
    throw DomainError("--estimator: expected mle or miller-madow, got '" + name + "'");
}

inline SweepMethod parse_method(const std::string& name) {
    if (name == "exact") return SweepMethod::Exact;
    if (name == "bernstein") return SweepMethod::Bernstein;
    if (name == "mc") return SweepMethod::MonteCarlo;
    throw DomainError("--method: expected exact, bernstein, or mc; got '" + name + "'");
}

inline ModulusKind parse_modulus_kind(const std::string& name) {
    if (name == "omega1") return ModulusKind::Omega1;
    if (name == "omega2") return ModulusKind::Omega2;
    if (name == "omega1-phi") return ModulusKind::Omega1Phi;
    if (name == "omega2-phi") return ModulusKind::Omega2Phi;
    throw DomainError("--kind: expected omega1, omega2, omega1-phi, or omega2-phi; got '" +
                      name + "'");
}

inline void emit(const json& payload, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << payload.dump(2) << '\n';
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw DomainError("--out: cannot open '" + out_path + "' for writing");
    f << payload.dump(2) << '\n';
}

} // namespace detail

struct CliOptions {
    std::string functional;
    std::string dist;
    std::string counts;
    long long n = 0;
    int S = 0;
    std::optional<double> alpha;
    std::string estimator = "mle";
    std::string method = "exact";
    long long replicates = 10000;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out_path;
    int threads = 0;
    double t = 0.0;
    int grid_points = 100000;
    std::string kind;
    double c_minimax = 0.0;
    bool diagnostics = false;
    std::string n_list, s_list, dists = "uniform";
    int order = 0;
    double enum_cap = kDefaultEnumerationCap;
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"plug-in estimation of entropy and power sums: exact bias, risk bounds, "
                 "and simulation harness"};
    app.require_subcommand(1);
    CliOptions o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out_path, "write output to this path instead of stdout");
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "estimate F(P) from counts");
    estimate->add_option("--functional", o.functional, "entropy | power:ALPHA")->required();
    estimate->add_option("--counts", o.counts, "comma-separated multinomial counts");
    estimate->add_option("--dist", o.dist, "sample counts from this distribution instead");
    estimate->add_option("--n", o.n, "sample size when sampling from --dist");
    estimate->add_option("--seed", o.seed, "sampling seed");
    estimate->add_option("--alpha", o.alpha, "alpha for --functional power");
    estimate->add_option("--estimator", o.estimator, "mle | miller-madow");
    estimate->add_option("--S", o.S, "alphabet size for miller-madow (0 = observed support)");
    add_common(estimate);

    CLI::App* bias = app.add_subcommand("bias", "exact plug-in bias at (functional, dist, n)");
    bias->add_option("--functional", o.functional)->required();
    bias->add_option("--dist", o.dist, "uniform:S | w:S:n | capped:S:n | file:PATH")->required();
    bias->add_option("--n", o.n, "sample size")->required();
    bias->add_option("--alpha", o.alpha);
    bias->add_option("--order", o.order, "also report the order-1/2 entropy expansion");
    add_common(bias);

    CLI::App* bounds = app.add_subcommand("bounds", "closed-form risk bounds at (S, n)");
    bounds->add_option("--functional", o.functional)->required();
    bounds->add_option("--S", o.S, "alphabet size")->required();
    bounds->add_option("--n", o.n, "sample size")->required();
    bounds->add_option("--alpha", o.alpha);
    bounds->add_option("--c-minimax", o.c_minimax,
                       "constant for the ln^2(S)/n lower-bound term (default 0)");
    bounds->add_flag("--diagnostics", o.diagnostics, "include sharper constants");
    add_common(bounds);

    CLI::App* modulus = app.add_subcommand("modulus", "moduli of smoothness");
    modulus->add_option("--kind", o.kind, "omega1 | omega2 | omega1-phi | omega2-phi")->required();
    modulus->add_option("--functional", o.functional)->required();
    modulus->add_option("--t", o.t, "step parameter")->required();
    modulus->add_option("--alpha", o.alpha);
    modulus->add_option("--grid-points", o.grid_points, "numeric optimizer grid budget");
    add_common(modulus);

    CLI::App* risk = app.add_subcommand("risk", "bias/variance/MSE of an estimator");
    risk->add_option("--functional", o.functional)->required();
    risk->add_option("--dist", o.dist)->required();
    risk->add_option("--n", o.n)->required();
    risk->add_option("--alpha", o.alpha);
    risk->add_option("--estimator", o.estimator, "mle | miller-madow");
    risk->add_option("--S", o.S, "alphabet size for miller-madow (0 = observed support)");
    risk->add_option("--method", o.method, "exact | bernstein | mc");
    risk->add_option("--replicates", o.replicates, "Monte Carlo replicates");
    risk->add_option("--seed", o.seed, "Monte Carlo seed");
    risk->add_option("--enum-cap", o.enum_cap, "outcome cap for --method exact");
    add_common(risk);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "risk/bound sweep over (S, n) grids");
    sweep_cmd->add_option("--functional", o.functional, "comma list, e.g. entropy,power:0.5")
        ->required();
    sweep_cmd->add_option("--S", o.s_list, "comma list of alphabet sizes")->required();
    sweep_cmd->add_option("--n", o.n_list, "comma list of sample sizes")->required();
    sweep_cmd->add_option("--dists", o.dists, "comma list of uniform | w | capped");
    sweep_cmd->add_option("--estimator", o.estimator, "comma list of mle | miller-madow");
    sweep_cmd->add_option("--method", o.method, "exact | bernstein | mc");
    sweep_cmd->add_option("--replicates", o.replicates);
    sweep_cmd->add_option("--seed", o.seed);
    sweep_cmd->add_option("--format", o.format, "json | csv");
    sweep_cmd->add_option("--enum-cap", o.enum_cap, "outcome cap for --method exact");
    add_common(sweep_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        json config{{"seed", o.seed}, {"threads", o.threads}, {"schema_version", kSweepSchemaVersion}};
        if (!o.functional.empty()) config["functional"] = o.functional;
        if (!o.out_path.empty()) config["out"] = o.out_path;

        if (app.got_subcommand(estimate)) {
            config["command"] = "estimate";
            config["estimator"] = o.estimator;
            const Functional func = detail::parse_functional(o.functional, o.alpha);
            std::optional<CountVector> counts;
            if (!o.counts.empty() && !o.dist.empty())
                throw DomainError("estimate: give --counts or --dist, not both");
            if (!o.counts.empty()) {
                counts = detail::parse_counts(o.counts);
                config["counts"] = counts->counts();
            } else if (!o.dist.empty()) {
                if (o.n < 1) throw DomainError("estimate: sampling from --dist requires --n >= 1");
                counts = sample_counts(detail::parse_dist(o.dist), o.n, o.seed);
                config["dist"] = o.dist;
                config["n"] = o.n;
                config["sampled_counts"] = counts->counts();
            } else {
                throw DomainError("estimate: requires --counts or --dist");
            }
            const EstimatorSpec est = detail::parse_estimator(o.estimator, o.S);
            if (est.kind == EstimatorSpec::Kind::MillerMadow)
                config["s_mode"] = o.S >= 1 ? std::to_string(o.S) : "observed-support";
            json payload{{"config", config},
                         {"estimate", apply_estimator(est, func, *counts)}};
            detail::emit(payload, o.out_path, out);
            return 0;
        }

        if (app.got_subcommand(bias)) {
            config["command"] = "bias";
            config["dist"] = o.dist;
            config["n"] = o.n;
            const Functional func = detail::parse_functional(o.functional, o.alpha);
            const DiscreteDistribution dist = detail::parse_dist(o.dist);
            config["probs"] = dist.probs();
            const BiasDecomposition bd = exact_bias(func, dist, o.n, o.threads);
            json payload{{"config", config},
                         {"total", bd.total},
                         {"per_symbol", bd.per_symbol},
                         {"method", "bernstein-exact"}};
            if (o.order >= 1) {
                if (func.kind() != Functional::Kind::Entropy)
                    throw DomainError("bias: --order applies to --functional entropy only");
                payload["asymptotic"] = asymptotic_bias_entropy(dist, o.n, o.order);
            }
            detail::emit(payload, o.out_path, out);
            return 0;
        }

        if (app.got_subcommand(bounds)) {
            config["command"] = "bounds";
            config["S"] = o.S;
            config["n"] = o.n;
            config["c_minimax"] = o.c_minimax;
            const Functional func = detail::parse_functional(o.functional, o.alpha);
            const BoundReport up = upper_risk(func, o.S, o.n, o.diagnostics);
            const LowerBoundReport lo = lower_risk(func, o.S, o.n, o.c_minimax);
            json payload{{"config", config},
                         {"upper", to_json(up)},
                         {"lower", to_json(lo)},
                         {"total", up.total}};
            try {
                payload["minimax_rate"] = minimax_reference(func, o.S, o.n);
            } catch (const Error&) {
                payload["minimax_rate"] = nullptr;
            }
            detail::emit(payload, o.out_path, out);
            return 0;
        }

        if (app.got_subcommand(modulus)) {
            config["command"] = "modulus";
            config["kind"] = o.kind;
            config["t"] = o.t;
            config["grid_points"] = o.grid_points;
            const Functional func = detail::parse_functional(o.functional, o.alpha);
            const ModulusKind kind = detail::parse_modulus_kind(o.kind);
            json payload{{"config", config}};
            try {
                payload["closed"] = omega_closed(kind, func, o.t);
            } catch (const NoClosedForm&) {
                payload["closed"] = nullptr;
            } catch (const OutOfValidityRange&) {
                payload["closed"] = nullptr;
            }
            const ModulusEstimate est = omega_numeric_search(
                kind, [&func](double x) { return func(x); }, o.t, o.grid_points);
            payload["numeric"] = est.value;
            payload["maximizer"] = {{"u", est.u}, {"v", est.v}};
            detail::emit(payload, o.out_path, out);
            return 0;
        }

        if (app.got_subcommand(risk)) {
            config["command"] = "risk";
            config["dist"] = o.dist;
            config["n"] = o.n;
            config["estimator"] = o.estimator;
            config["method"] = o.method;
            const Functional func = detail::parse_functional(o.functional, o.alpha);
            const DiscreteDistribution dist = detail::parse_dist(o.dist);
            config["probs"] = dist.probs();
            // Risk statements are about a fixed-S estimator: an omitted --S
            // resolves to the distribution's alphabet size.
            const EstimatorSpec est =
                detail::parse_estimator(o.estimator, o.S >= 1 ? o.S : dist.size());
            const SweepMethod method = detail::parse_method(o.method);
            config["enum_cap"] = o.enum_cap;
            json payload{{"config", config}};
            if (method == SweepMethod::Exact) {
                payload.update(to_json(exact_moments(est, func, dist, o.n, o.enum_cap)));
            } else if (method == SweepMethod::MonteCarlo) {
                config["replicates"] = o.replicates;
                payload["config"] = config;
                payload.update(to_json(mc_moments(est, func, dist, o.n, o.replicates, o.seed,
                                                  o.threads)));
            } else {
                double b = exact_bias(func, dist, o.n, o.threads).total;
                if (est.kind == EstimatorSpec::Kind::MillerMadow) {
                    if (func.kind() != Functional::Kind::Entropy)
                        throw DomainError("risk: miller-madow requires --functional entropy");
                    b += static_cast<double>(est.s_known - 1) /
                         (2.0 * static_cast<double>(o.n));
                }
                payload["bias"] = b;
                payload["bias_method"] = "bernstein";
                if (o.replicates > 0) {
                    config["replicates"] = o.replicates;
                    payload["config"] = config;
                    RiskReport mc = mc_moments(est, func, dist, o.n, o.replicates, o.seed,
                                               o.threads);
                    payload["variance"] = mc.variance;
                    payload["variance_method"] = "mc";
                    payload["mse"] = b * b + mc.variance;
                    payload["mse_method"] = "bernstein+mc";
                    payload["ci_halfwidth"] = *mc.ci_halfwidth;
                }
            }
            detail::emit(payload, o.out_path, out);
            return 0;
        }

        // sweep
        config["command"] = "sweep";
        config["method"] = o.method;
        config["replicates"] = o.replicates;
        config["format"] = o.format;
        config["dists"] = o.dists;
        config["estimator"] = o.estimator;
        config["S"] = o.s_list;
        config["n"] = o.n_list;
        SweepConfig sc;
        for (const auto& tok : detail::split(o.functional, ','))
            sc.functionals.push_back(detail::parse_functional(tok, o.alpha));
        sc.estimators.clear();
        for (const auto& tok : detail::split(o.estimator, ','))
            sc.estimators.push_back(detail::parse_estimator(tok, 0));
        for (const auto& tok : detail::split(o.s_list, ','))
            sc.s_grid.push_back(static_cast<int>(detail::parse_ll(tok, "--S")));
        for (const auto& tok : detail::split(o.n_list, ','))
            sc.n_grid.push_back(detail::parse_ll(tok, "--n"));
        sc.dist_tags = detail::split(o.dists, ',');
        sc.method = detail::parse_method(o.method);
        sc.replicates = o.replicates;
        sc.seed = o.seed;
        sc.threads = o.threads;
        sc.enumeration_cap = o.enum_cap;
        const std::vector<SweepRecord> records = sweep(sc);

        std::ostringstream body;
        if (o.format == "csv") {
            body << "# config " << config.dump() << '\n';
            write_sweep_csv(records, body);
        } else if (o.format == "json") {
            body << json{{"config", config}}.dump() << '\n';
            for (const auto& r : records) body << to_json(r).dump() << '\n';
        } else {
            throw DomainError("--format: expected json or csv, got '" + o.format + "'");
        }
        if (o.out_path.empty()) {
            out << body.str();
        } else {
            std::ofstream f(o.out_path);
            if (!f) throw DomainError("--out: cannot open '" + o.out_path + "' for writing");
            f << body.str();
        }
        return 0;
    } catch (const FeasibilityCapExceeded& e) {
        err << "error: " << e.what() << "; use --method mc instead\n";
        return 3;
    } catch (const Error& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace pluginrisk::cli
