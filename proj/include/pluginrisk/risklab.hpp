#pragma once
/*
 * Ground-truth risk engines.
 *
 *   - exact risk (bias, variance, MSE) by full enumeration of the multinomial
 *     support, feasible while C(n+S-1, S-1) stays under a cap;
 *   - Monte Carlo risk with a 99% confidence half-width, deterministic in the
 *     seed and independent of thread scheduling (one derived seed per
 *     replicate);
 *   - a worst-case candidate search over the adversarial construction family;
 *   - a sweep engine joining empirical risk with the closed-form bounds,
 *     emitting one flat record per grid point (CSV or JSON lines downstream).
 */

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bernstein.hpp"
#include "bounds.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace pluginrisk {

enum class RiskMethod { ExactEnum, BernsteinBias, MonteCarlo };

inline const char* risk_method_name(RiskMethod m) {
    switch (m) {
        case RiskMethod::ExactEnum: return "exact-enum";
        case RiskMethod::BernsteinBias: return "bernstein";
        case RiskMethod::MonteCarlo: return "mc";
    }
    return "?";
}

struct RiskReport {
    double bias = 0.0;
    double variance = 0.0;
    double mse = 0.0; // equals bias^2 + variance up to accumulation error / MC noise
    RiskMethod method = RiskMethod::ExactEnum;
    std::optional<double> ci_halfwidth; // 99% half-width on the MSE (Monte Carlo)
    std::optional<long long> replicates;
    std::optional<std::uint64_t> seed;
};

inline constexpr double kDefaultEnumerationCap = 1e7;

// Number of compositions of n into S parts, C(n+S-1, S-1).
inline double enumeration_count(int S, long long n) {
    if (S < 1 || n < 0) throw DomainError("enumeration_count: requires S >= 1, n >= 0");
    return std::exp(std::lgamma(static_cast<double>(n) + static_cast<double>(S)) -
                    std::lgamma(static_cast<double>(S)) -
                    std::lgamma(static_cast<double>(n) + 1.0));
}

namespace detail {

inline double x_log_p(long long x, double p) {
    if (x == 0) return 0.0;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(x) * std::log(p);
}

template <class Fn>
void enumerate_rec(const std::vector<double>& p, std::vector<long long>& counts, std::size_t i,
                   long long remaining, double log_acc, Fn&& fn) {
    if (i + 1 == counts.size()) {
        counts[i] = remaining;
        const double lp = log_acc + x_log_p(remaining, p[i]) -
                          std::lgamma(static_cast<double>(remaining) + 1.0);
        fn(counts, std::exp(lp));
        return;
    }
    for (long long x = 0; x <= remaining; ++x) {
        counts[i] = x;
        enumerate_rec(p, counts, i + 1, remaining - x,
                      log_acc + x_log_p(x, p[i]) - std::lgamma(static_cast<double>(x) + 1.0),
                      fn);
    }
}

} // namespace detail

// Visits every composition of n into S parts exactly once with its
// multinomial probability under dist. Probabilities over the whole stream
// sum to 1 (compositions unreachable under dist carry probability 0).
template <class Fn>
void for_each_outcome(const DiscreteDistribution& dist, long long n, Fn&& fn,
                      double cap = kDefaultEnumerationCap) {
    if (n < 0) throw DomainError("for_each_outcome: n must be >= 0");
    const double total = enumeration_count(dist.size(), n);
    if (total > cap)
        throw FeasibilityCapExceeded("enumeration needs " + std::to_string(total) +
                                     " outcomes, cap is " + std::to_string(cap));
    std::vector<long long> counts(dist.probs().size(), 0);
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    detail::enumerate_rec(dist.probs(), counts, 0, n, log_n_fact, fn);
}

// Materialized variant for small supports.
inline std::vector<std::pair<CountVector, double>> enumerate_outcomes(
    const DiscreteDistribution& dist, long long n, double cap = kDefaultEnumerationCap) {
    std::vector<std::pair<CountVector, double>> out;
    for_each_outcome(
        dist, n,
        [&](const std::vector<long long>& counts, double prob) {
            out.emplace_back(CountVector(counts), prob);
        },
        cap);
    return out;
}

// Exact bias/variance/MSE of the estimator at (dist, n) by summation over the
// whole multinomial support.
inline RiskReport exact_moments(const EstimatorSpec& est, const Functional& func,
                                const DiscreteDistribution& dist, long long n,
                                double cap = kDefaultEnumerationCap) {
    if (n < 1) throw DomainError("exact_moments: n must be >= 1");
    const double truth = eval_functional(func, dist);
    double m1 = 0.0, m2 = 0.0, mse = 0.0;
    for_each_outcome(
        dist, n,
        [&](const std::vector<long long>& counts, double prob) {
            if (prob == 0.0) return;
            const double v = apply_estimator_counts(est, func, counts, n);
            m1 += prob * v;
            m2 += prob * v * v;
            const double d = v - truth;
            mse += prob * d * d;
        },
        cap);
    RiskReport r;
    r.method = RiskMethod::ExactEnum;
    r.bias = m1 - truth;
    r.variance = std::max(m2 - m1 * m1, 0.0);
    r.mse = mse;
    return r;
}

// Monte Carlo estimate of the same moments. Replicate r draws its own engine
// from hash64(seed, r), so results do not depend on batching or thread count.
inline RiskReport mc_moments(const EstimatorSpec& est, const Functional& func,
                             const DiscreteDistribution& dist, long long n,
                             long long replicates, std::uint64_t seed, int threads = 0) {
    if (n < 1) throw DomainError("mc_moments: n must be >= 1");
    if (replicates < 100) throw DomainError("mc_moments: requires replicates >= 100");
    const double truth = eval_functional(func, dist);
    const std::size_t r_count = static_cast<std::size_t>(replicates);

    std::vector<double> dev(r_count); // estimator value minus truth
    parallel_for(r_count, threads, [&](std::size_t r) {
        std::mt19937_64 engine = make_engine(hash64(seed, r));
        std::vector<long long> counts;
        sample_counts_into(dist, n, engine, counts);
        dev[r] = apply_estimator_counts(est, func, counts, n) - truth;
    });

    const double nd = static_cast<double>(replicates);
    const double mean_dev = pairwise_sum(dev) / nd;
    std::vector<double> sq(r_count), centered(r_count);
    for (std::size_t r = 0; r < r_count; ++r) {
        sq[r] = dev[r] * dev[r];
        const double c = dev[r] - mean_dev;
        centered[r] = c * c;
    }
    const double mse = pairwise_sum(sq) / nd;
    const double variance = pairwise_sum(centered) / (nd - 1.0);
    for (std::size_t r = 0; r < r_count; ++r) {
        const double c = sq[r] - mse;
        centered[r] = c * c;
    }
    const double mse_sd = std::sqrt(pairwise_sum(centered) / (nd - 1.0));

    RiskReport r;
    r.method = RiskMethod::MonteCarlo;
    r.bias = mean_dev;
    r.variance = variance;
    r.mse = mse;
    r.ci_halfwidth = 2.576 * mse_sd / std::sqrt(nd); // 99% normal CI on the MSE
    r.replicates = replicates;
    r.seed = seed;
    return r;
}

struct WorstCaseOptions {
    double enumeration_cap = kDefaultEnumerationCap;
    long long replicates = 20000; // Monte Carlo fallback when enumeration is infeasible
    std::uint64_t seed = 20240601;
    int threads = 1;
};

struct WorstCaseResult {
    DiscreteDistribution dist;
    RiskReport report;
    std::string label;
};

// Highest-MSE member of the candidate family: uniform, the W construction,
// capped uniform, and two-level mixtures (mass q spread over k symbols, the
// rest uniform) on a coarse (k, q) grid. A lower estimate of the true
// worst case; it never claims to maximize over the whole simplex.
inline WorstCaseResult worst_case_search(const EstimatorSpec& est, const Functional& func, int S,
                                         long long n, const WorstCaseOptions& opts = {}) {
    if (S < 1) throw DomainError("worst_case_search: S must be >= 1");
    if (n < 1) throw DomainError("worst_case_search: n must be >= 1");

    std::vector<std::pair<std::string, DiscreteDistribution>> candidates;
    candidates.emplace_back("uniform", uniform(S));
    if (n >= S) candidates.emplace_back("w", worst_case_w(S, n));
    candidates.emplace_back("capped", capped_uniform(S, n));
    std::vector<int> ks = {1, S / 4, S / 2, S - 1};
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
        if (k < 1 || k >= S) continue;
        for (int qi = 1; qi <= 9; ++qi) {
            const double q = 0.1 * qi;
            std::vector<double> p(static_cast<std::size_t>(S), (1.0 - q) / (S - k));
            for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = q / k;
            char label[64];
            std::snprintf(label, sizeof(label), "two-level:k=%d,q=%.1f", k, q);
            candidates.emplace_back(label, make_distribution(std::move(p)));
        }
    }

    const bool feasible = enumeration_count(S, n) <= opts.enumeration_cap;
    std::optional<WorstCaseResult> best;
    for (auto& [label, dist] : candidates) {
        RiskReport r = feasible
                           ? exact_moments(est, func, dist, n, opts.enumeration_cap)
                           : mc_moments(est, func, dist, n, opts.replicates, opts.seed,
                                        opts.threads);
        if (!best || r.mse > best->report.mse) best = WorstCaseResult{dist, r, label};
    }
    return *best;
}

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

enum class SweepMethod { Exact, Bernstein, MonteCarlo };

inline const char* sweep_method_name(SweepMethod m) {
    switch (m) {
        case SweepMethod::Exact: return "exact";
        case SweepMethod::Bernstein: return "bernstein";
        case SweepMethod::MonteCarlo: return "mc";
    }
    return "?";
}

struct SweepConfig {
    std::vector<Functional> functionals;
    std::vector<EstimatorSpec> estimators = {EstimatorSpec::plug_in()};
    std::vector<int> s_grid;
    std::vector<long long> n_grid;
    std::vector<std::string> dist_tags = {"uniform"}; // uniform | w | capped
    SweepMethod method = SweepMethod::Bernstein;
    long long replicates = 10000; // 0 disables the Monte Carlo half of `bernstein`
    std::uint64_t seed = 0;
    int threads = 0;
    double enumeration_cap = kDefaultEnumerationCap;
    bool with_bounds = true;
};

// One flat row per grid point; every field needed to reproduce the row is on
// the row itself (method, replicates, derived seed).
struct SweepRecord {
    std::string functional;
    std::optional<double> alpha;
    std::string estimator;
    std::string dist;
    int S = 0;
    long long n = 0;
    std::string method;
    long long replicates = 0;
    std::uint64_t seed = 0;

    std::optional<double> bias;
    std::string bias_method;
    std::optional<double> variance;
    std::string variance_method;
    std::optional<double> mse;
    std::string mse_method;
    std::optional<double> ci_halfwidth;

    std::optional<double> upper_total;
    std::optional<double> upper_bias_bound;
    std::optional<double> upper_variance_bound;
    std::optional<double> lower_total;
    std::optional<bool> lower_valid;
    std::optional<double> minimax_rate;

    // Consistency threshold ln n / ln S for the plug-in: 1/alpha below 1, 0
    // above 1, and 1 for entropy.
    std::optional<double> phase_boundary;
    std::optional<double> log_n_over_log_s;

    std::string error; // per-row failure; empty on success
};

inline DiscreteDistribution dist_from_tag(const std::string& tag, int S, long long n) {
    if (tag == "uniform") return uniform(S);
    if (tag == "w") return worst_case_w(S, n);
    if (tag == "capped") return capped_uniform(S, n);
    throw DomainError("unknown distribution tag: " + tag);
}

namespace detail {

inline void fill_risk(SweepRecord& rec, const SweepConfig& cfg, const EstimatorSpec& est_in,
                      const Functional& func, const DiscreteDistribution& dist) {
    // An observed-support Miller-Madow spec resolves to this row's S so the
    // exact, Monte Carlo, and closed-form bias paths all describe the same
    // estimator.
    EstimatorSpec est = est_in;
    if (est.kind == EstimatorSpec::Kind::MillerMadow) {
        if (func.kind() != Functional::Kind::Entropy)
            throw DomainError("miller-madow requires the entropy functional");
        if (est.s_known < 1) est = EstimatorSpec::miller_madow(rec.S);
    }
    switch (cfg.method) {
        case SweepMethod::Exact: {
            RiskReport r = exact_moments(est, func, dist, rec.n, cfg.enumeration_cap);
            rec.bias = r.bias;
            rec.variance = r.variance;
            rec.mse = r.mse;
            rec.bias_method = rec.variance_method = rec.mse_method = "exact-enum";
            return;
        }
        case SweepMethod::MonteCarlo: {
            RiskReport r = mc_moments(est, func, dist, rec.n, cfg.replicates, rec.seed, 1);
            rec.bias = r.bias;
            rec.variance = r.variance;
            rec.mse = r.mse;
            rec.ci_halfwidth = r.ci_halfwidth;
            rec.bias_method = rec.variance_method = rec.mse_method = "mc";
            return;
        }
        case SweepMethod::Bernstein: {
            double bias = exact_bias(func, dist, rec.n).total;
            if (est.kind == EstimatorSpec::Kind::MillerMadow)
                bias += static_cast<double>(est.s_known - 1) /
                        (2.0 * static_cast<double>(rec.n));
            rec.bias = bias;
            rec.bias_method = "bernstein";
            if (cfg.replicates > 0) {
                RiskReport r = mc_moments(est, func, dist, rec.n, cfg.replicates, rec.seed, 1);
                rec.variance = r.variance;
                rec.variance_method = "mc";
                rec.mse = bias * bias + r.variance;
                rec.mse_method = "bernstein+mc";
                rec.ci_halfwidth = r.ci_halfwidth;
            }
            return;
        }
    }
}

} // namespace detail

inline std::vector<SweepRecord> sweep(const SweepConfig& cfg) {
    std::vector<SweepRecord> records;
    std::vector<std::pair<const Functional*, const EstimatorSpec*>> meta;
    for (const auto& func : cfg.functionals)
        for (const auto& est : cfg.estimators)
            for (const auto& tag : cfg.dist_tags)
                for (int S : cfg.s_grid)
                    for (long long n : cfg.n_grid) {
                        SweepRecord rec;
                        rec.functional = func.name();
                        if (func.kind() == Functional::Kind::Power) rec.alpha = func.alpha();
                        rec.estimator = est.name();
                        rec.dist = tag;
                        rec.S = S;
                        rec.n = n;
                        rec.method = sweep_method_name(cfg.method);
                        rec.replicates =
                            cfg.method == SweepMethod::Exact ? 0 : cfg.replicates;
                        records.push_back(std::move(rec));
                        meta.emplace_back(&func, &est);
                    }

    parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
        SweepRecord& rec = records[i];
        rec.seed = hash64(cfg.seed, i);
        const Functional* func = meta[i].first;
        const EstimatorSpec* est = meta[i].second;
        try {
            if (func->kind() != Functional::Kind::Custom) {
                if (func->kind() == Functional::Kind::Entropy) {
                    rec.phase_boundary = 1.0;
                } else {
                    rec.phase_boundary = func->alpha() < 1.0 ? 1.0 / func->alpha() : 0.0;
                }
            }
            if (rec.S >= 2)
                rec.log_n_over_log_s =
                    std::log(static_cast<double>(rec.n)) / std::log(static_cast<double>(rec.S));

            const DiscreteDistribution dist = dist_from_tag(rec.dist, rec.S, rec.n);
            detail::fill_risk(rec, cfg, *est, *func, dist);
            if (cfg.with_bounds) {
                try {
                    BoundReport up = upper_risk(*func, rec.S, rec.n);
                    rec.upper_total = up.total;
                    rec.upper_bias_bound = up.bias_bound;
                    rec.upper_variance_bound = up.variance_bound;
                } catch (const Error&) {
                }
                try {
                    LowerBoundReport lo = lower_risk(*func, rec.S, rec.n);
                    rec.lower_total = lo.total;
                    rec.lower_valid = lo.valid;
                } catch (const Error&) {
                }
                try {
                    rec.minimax_rate = minimax_reference(*func, rec.S, rec.n);
                } catch (const Error&) {
                }
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    return records;
}

// ---------------------------------------------------------------------------
// CSV emission (frozen column order; schema_version is the first column)
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepSchemaVersion = "1";

inline const char* sweep_csv_header() {
    return "schema_version,functional,alpha,estimator,dist,S,n,method,replicates,seed,"
           "bias,bias_method,variance,variance_method,mse,mse_method,ci_halfwidth,"
           "upper_total,upper_bias_bound,upper_variance_bound,lower_total,lower_valid,"
           "minimax_rate,phase_boundary,log_n_over_log_s,error";
}

namespace detail {

inline std::string csv_double(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

inline std::string csv_text(std::string s) {
    for (char& c : s)
        if (c == '"' || c == '\n') c = '\'';
    return s;
}

} // namespace detail

inline void write_sweep_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
    os << sweep_csv_header() << '\n';
    for (const auto& r : records) {
        os << kSweepSchemaVersion << ',' << r.functional << ',' << detail::csv_double(r.alpha)
           << ',' << r.estimator << ',' << r.dist << ',' << r.S << ',' << r.n << ',' << r.method
           << ',' << r.replicates << ',' << r.seed << ',' << detail::csv_double(r.bias) << ','
           << r.bias_method << ',' << detail::csv_double(r.variance) << ',' << r.variance_method
           << ',' << detail::csv_double(r.mse) << ',' << r.mse_method << ','
           << detail::csv_double(r.ci_halfwidth) << ',' << detail::csv_double(r.upper_total)
           << ',' << detail::csv_double(r.upper_bias_bound) << ','
           << detail::csv_double(r.upper_variance_bound) << ','
           << detail::csv_double(r.lower_total) << ','
           << (r.lower_valid ? (*r.lower_valid ? "true" : "false") : "") << ','
           << detail::csv_double(r.minimax_rate) << ',' << detail::csv_double(r.phase_boundary)
           << ',' << detail::csv_double(r.log_n_over_log_s) << ",\"" << detail::csv_text(r.error)
           << "\"\n";
    }
}

} // namespace pluginrisk
