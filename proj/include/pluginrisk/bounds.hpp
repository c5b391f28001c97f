#pragma once
/*
 * Closed-form evaluators for the worst-case L2 risk of the plug-in estimator:
 * upper bounds (squared-bias term plus variance term, per smoothness regime
 * of the functional), matching lower bounds built from the Taylor-polynomial
 * Bernstein-error bounds and minimax lower bounds, and the order-only
 * minimax reference rates used as a benchmark.
 *
 * Every formula is evaluated verbatim; nothing here samples or enumerates.
 * Empirical comparison against these bounds lives in risklab.hpp.
 */

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "moduli.hpp"

namespace pluginrisk {

struct BoundComponent {
    std::string label;
    double value = 0.0;
};

struct BoundReport {
    std::string regime;
    std::vector<BoundComponent> bias_components; // candidates; bound is their min
    double bias_bound = 0.0;
    double variance_bound = 0.0;
    double total = 0.0; // bias_bound^2 + variance_bound
    // Sharper constants printed alongside the headline ones; never feed the min.
    std::vector<BoundComponent> diagnostics;
};

namespace detail {

inline void finalize(BoundReport& r) {
    double m = r.bias_components.front().value;
    for (const auto& c : r.bias_components) m = std::min(m, c.value);
    r.bias_bound = m;
    r.total = r.bias_bound * r.bias_bound + r.variance_bound;
}

} // namespace detail

// Worst-case MSE upper bound for F(P_n) over all P with support size S.
// The first addend of `total` bounds the squared bias, the second the
// variance, each valid for every P individually.
inline BoundReport upper_risk(const Functional& func, int S, long long n,
                              bool include_diagnostics = false) {
    if (S < 1) throw DomainError("upper_risk: S must be >= 1");
    if (n < 1) throw DomainError("upper_risk: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double sd = static_cast<double>(S);
    BoundReport r;

    if (func.kind() == Functional::Kind::Entropy) {
        r.regime = "entropy";
        r.bias_components.push_back({"ln(1+(S-1)/n)", std::log1p((sd - 1.0) / nd)});
        const double v_logn = std::pow(std::log(nd), 2) / nd;
        const double v_logs = 2.0 * std::pow(std::log(sd) + 2.0, 2) / nd;
        r.variance_bound = std::min(v_logn, v_logs);
        if (include_diagnostics) {
            r.diagnostics.push_back(
                {"pointwise: (3/2)ln4*sqrt(S/n)", 1.5 * std::log(4.0) * std::sqrt(sd / nd)});
            r.diagnostics.push_back({"norm: 5S*ln4/(2n)", 2.5 * sd * std::log(4.0) / nd});
            r.diagnostics.push_back({"variance: ln(n)^2/n", v_logn});
            r.diagnostics.push_back({"variance: 2(ln S+2)^2/n", v_logs});
        }
        detail::finalize(r);
        return r;
    }
    if (func.kind() != Functional::Kind::Power)
        throw DomainError("upper_risk: requires the entropy or a power functional");

    const double a = func.alpha();
    if (a == 1.0) throw DomainError("upper_risk: alpha = 1 is the identity; risk is 0");
    const double abs_gap = std::abs(2.0 - std::pow(2.0, a)); // |2 - 2^alpha|

    if (a >= 2.0) {
        r.regime = "alpha>=2";
        r.bias_components.push_back({"alpha(alpha-1)/(2n)", a * (a - 1.0) / (2.0 * nd)});
        r.variance_bound = a * a / (4.0 * nd);
        detail::finalize(r);
        return r;
    }

    if (a > 1.0) {
        r.regime = "1<alpha<2";
        r.bias_components.push_back({"4/n^(alpha-1)", 4.0 / std::pow(nd, a - 1.0)});
        r.bias_components.push_back(
            {"3*S^(1-alpha/2)/n^(alpha/2)", 3.0 * std::pow(sd, 1.0 - a / 2.0) / std::pow(nd, a / 2.0)});
        r.bias_components.push_back(
            {"C(alpha,n)*5S/(2n)", c_alpha_n(a, n) * 5.0 * sd / (2.0 * nd)});
        r.variance_bound = a * a / (4.0 * nd);
        if (include_diagnostics) {
            r.diagnostics.push_back({"(3/2)|2-2^alpha|*S^(1-alpha/2)/n^(alpha/2)",
                                     1.5 * abs_gap * std::pow(sd, 1.0 - a / 2.0) /
                                         std::pow(nd, a / 2.0)});
        }
        detail::finalize(r);
        return r;
    }

    // 0 < alpha < 1
    r.regime = a >= 0.5 ? "1/2<=alpha<1" : "0<alpha<1/2";
    r.bias_components.push_back({"3*S^(1-alpha/2)/(2*n^(alpha/2))",
                                 1.5 * std::pow(sd, 1.0 - a / 2.0) / std::pow(nd, a / 2.0)});
    r.bias_components.push_back({"5S/(2*n^alpha)", 2.5 * sd / std::pow(nd, a)});
    const double small_symbol = std::min(sd / std::pow(nd, 2.0 * a), std::pow(nd, 1.0 - 2.0 * a));
    const double lead = a >= 0.5 ? 10.0 * std::pow(sd, 2.0 - 2.0 * a) / nd
                                 : 10.0 * sd / std::pow(nd, 2.0 * a);
    r.variance_bound = lead + (120.0 / (a * a)) * small_symbol;
    if (include_diagnostics) {
        r.diagnostics.push_back({"(3/2)|2-2^alpha|*S^(1-alpha/2)/n^(alpha/2)",
                                 1.5 * abs_gap * std::pow(sd, 1.0 - a / 2.0) /
                                     std::pow(nd, a / 2.0)});
        r.diagnostics.push_back(
            {"|2-2^alpha|*5S/(2*n^alpha)", abs_gap * 2.5 * sd / std::pow(nd, a)});
        // Sharp variance constant that 120/alpha^2 rounds up.
        const double k_sharp = (3.0 * a * std::pow(2.0, 3.0 + 2.0 * a) + 1.0) / (8.0 * a * a) *
                                   std::pow(8.0 * a / std::exp(1.0), 2.0 * a) +
                               4.0;
        r.diagnostics.push_back({"sharp-variance-constant", lead + k_sharp * small_symbol});
    }
    detail::finalize(r);
    return r;
}

// Per-symbol variance bound for (X/n)^alpha, X ~ Binomial(n, p), 0 < alpha < 1.
// Small masses (p <= 1/n) get the moment bound, larger ones the Taylor-remainder
// bound with its three constant tail terms.
inline double per_symbol_var_bound(double alpha, long long n, double p) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("per_symbol_var_bound: requires 0 < alpha < 1");
    if (n < 1) throw DomainError("per_symbol_var_bound: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw DomainError("per_symbol_var_bound: p must lie in [0,1]");
    const double nd = static_cast<double>(n);
    if (p <= 1.0 / nd)
        return std::min(2.0 / std::pow(nd, 2.0 * alpha),
                        2.0 * p / std::pow(nd, 2.0 * alpha - 1.0));
    const double e = std::exp(1.0);
    return 10.0 * std::pow(p, 2.0 * alpha - 1.0) / nd +
           1.5 / alpha * std::pow(16.0 * alpha / (e * nd), 2.0 * alpha) +
           2.0 / std::pow(nd, 2.0 * alpha) +
           1.0 / (8.0 * alpha * alpha) * std::pow(8.0 * alpha / (e * nd), 2.0 * alpha);
}

// Bounded-differences variance bound: one resampled observation moves F(P_n)
// by at most two f-gaps (one when f is monotone), so
//   Var(F(P_n)) <= n * max_j (f((j+1)/n) - f(j/n))^2   (n/4 when monotone).
inline double efron_stein_var_bound(const Functional& func, long long n, bool monotone) {
    if (n < 1) throw DomainError("efron_stein_var_bound: n must be >= 1");
    const double nd = static_cast<double>(n);
    double worst = 0.0;
    double prev = 0.0; // f(0) = 0
    for (long long j = 1; j <= n; ++j) {
        const double cur = func(static_cast<double>(j) / nd);
        const double gap = cur - prev;
        worst = std::max(worst, gap * gap);
        prev = cur;
    }
    return (monotone ? nd / 4.0 : nd) * worst;
}

struct LowerBoundReport {
    double bias_part = 0.0;
    double variance_or_minimax_part = 0.0;
    double total = 0.0;
    bool valid = false; // regime precondition (n >= S, n >= 15S) met
    std::optional<double> unspecified_constant_used;
    // Entropy only: same bound with the (S-1)/(2n) correction cancelled.
    std::optional<double> miller_madow_total;
};

// Worst-case risk lower bound for the plug-in estimator. The universal
// constant in the ln^2(S)/n minimax term is never pinned down, so it defaults
// to 0 (conservative but unconditionally valid); pass a positive c_minimax
// for exploratory plots. Out-of-regime inputs are reported, not thrown.
inline LowerBoundReport lower_risk(const Functional& func, int S, long long n,
                                   double c_minimax = 0.0) {
    if (S < 1) throw DomainError("lower_risk: S must be >= 1");
    if (n < 1) throw DomainError("lower_risk: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double sd = static_cast<double>(S);
    LowerBoundReport r;

    if (func.kind() == Functional::Kind::Entropy) {
        r.unspecified_constant_used = c_minimax;
        // S = 1 has zero risk and the bracket below turns negative, so the
        // squared form would overstate; the statement needs S >= 2.
        if (S < 2 || n < 15LL * S) return r;
        r.valid = true;
        const double mm_gap = sd * sd / (20.0 * nd * nd) - 1.0 / (12.0 * nd * nd);
        const double full = (sd - 1.0) / (2.0 * nd) + mm_gap;
        r.bias_part = 0.5 * full * full;
        r.variance_or_minimax_part = c_minimax * std::pow(std::log(sd), 2) / nd;
        r.total = r.bias_part + r.variance_or_minimax_part;
        r.miller_madow_total = 0.5 * mm_gap * mm_gap + r.variance_or_minimax_part;
        return r;
    }

    if (func.kind() != Functional::Kind::Power) return r;
    const double a = func.alpha();
    if (a >= 1.0) return r; // covered by the asymptotic constant, not this bound
    if (n < S) return r;
    r.valid = true;

    const double shrink = (sd - 1.0) * (1.0 - 1.0 / nd);
    const double w_term = a * a * (1.0 - a) * (1.0 - a) * shrink * shrink /
                          std::pow(nd, 2.0 * a);
    if (a < 0.5) {
        r.bias_part = w_term / 36.0;
        r.total = r.bias_part;
        return r;
    }

    // 1/2 <= alpha < 1: half of (W-construction bound + minimax bound). The
    // second half can be negative at small n; it is kept signed, as stated.
    // S = 1 again has zero risk while the squared bracket would not.
    if (S < 2) {
        r.valid = false;
        return r;
    }
    r.bias_part = w_term / 72.0;
    const double big = std::pow(2.0 * (sd - 1.0), 1.0 - a);
    const double small = std::pow(2.0, -a);
    const double bracket = big - small - (1.0 - a) / (4.0 * nd) * (big + small);
    const double minimax = a * a / (32.0 * std::exp(1.0) * nd) * bracket * bracket -
                           std::exp(-nd / 4.0) * std::pow(sd, 2.0 * (1.0 - a));
    r.variance_or_minimax_part = 0.5 * minimax;
    r.total = r.bias_part + r.variance_or_minimax_part;
    return r;
}

// Asymptotic worst-case bias constant for 1 < alpha < 3/2 with S = c*n:
// liminf n^(2(alpha-1)) * risk >= c_alpha with sqrt(c_alpha) returned here.
// Values of c above 1 match c = 1 (the capped-uniform construction).
inline double lower_risk_alpha_high(double alpha, double c) {
    if (!(alpha > 1.0 && alpha < 1.5))
        throw DomainError("lower_risk_alpha_high: requires 1 < alpha < 3/2");
    if (!(c > 0.0)) throw DomainError("lower_risk_alpha_high: requires c > 0");
    const double poly = 124.0 - 330.0 * alpha + 285.0 * alpha * alpha -
                        90.0 * alpha * alpha * alpha + 11.0 * alpha * alpha * alpha * alpha;
    return alpha * std::pow(std::min(c, 1.0), 2.0 - alpha) * poly / 120.0;
}

// Order-only minimax risk rate (no constants) for the benchmark estimators;
// the plug-in is strictly slower than this for entropy and alpha < 3/2.
inline double minimax_reference(const Functional& func, int S, long long n) {
    if (n < 3) throw DomainError("minimax_reference: n must be >= 3");
    if (S < 2) throw DomainError("minimax_reference: S must be >= 2");
    const double nd = static_cast<double>(n);
    const double sd = static_cast<double>(S);
    const double nlogn = nd * std::log(nd);
    if (func.kind() == Functional::Kind::Entropy)
        return sd * sd / (nlogn * nlogn) + std::pow(std::log(sd), 2) / nd;
    if (func.kind() != Functional::Kind::Power)
        throw DomainError("minimax_reference: requires the entropy or a power functional");
    const double a = func.alpha();
    if (a == 1.0) throw DomainError("minimax_reference: alpha = 1 is the identity");
    if (a >= 1.5) return 1.0 / nd;
    if (a > 1.0) return std::pow(nlogn, -2.0 * (a - 1.0));
    if (a > 0.5) return sd * sd / std::pow(nlogn, 2.0 * a) + std::pow(sd, 2.0 - 2.0 * a) / nd;
    return sd * sd / std::pow(nlogn, 2.0 * a);
}

} // namespace pluginrisk
