#pragma once
/*
 * Bernstein operator machinery.
 *
 * B_{j,n}(x) = C(n,j) x^j (1-x)^(n-j) is the binomial pmf in disguise, so
 * B_n[f](x) = sum_j f(j/n) B_{j,n}(x) = E f(X/n) for X ~ Binomial(n, x),
 * and B_n[f](p) - f(p) is exactly the per-symbol bias of the plug-in
 * estimator. This module evaluates the operator, the resulting exact bias
 * of F(P_n), closed-form binomial central moments, Taylor-polynomial lower
 * bounds on the approximation error of x^alpha and -x ln x, and the
 * classical fixed-P expansions of the entropy plug-in bias.
 */

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace pluginrisk {

namespace detail {

// Stirling-series error ln n! - ln sqrt(2 pi n) (n/e)^n. Direct lgamma is fine
// for small n (the cancellation is harmless there); the series takes over
// where lgamma differences of ~n ln n magnitude would cost ~1e-11 absolute.
inline double stirlerr(double n) {
    constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0, s3 = 1.0 / 1680.0,
                     s4 = 1.0 / 1188.0;
    constexpr double half_ln_2pi = 0.918938533204672741780329736406;
    if (n < 16.0)
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - half_ln_2pi;
    const double n2 = 1.0 / (n * n);
    if (n > 500.0) return (s0 - s1 * n2) / n;
    if (n > 80.0) return (s0 - (s1 - s2 * n2) * n2) / n;
    if (n > 35.0) return (s0 - (s1 - (s2 - s3 * n2) * n2) * n2) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 * n2) * n2) * n2) * n2) / n;
}

// Binomial deviance x ln(x/m) + m - x, evaluated by series when x is close
// to m, where the direct form cancels.
inline double bd0(double x, double m) {
    if (std::abs(x - m) < 0.1 * (x + m)) {
        const double v = (x - m) / (x + m);
        double s = (x - m) * v;
        double ej = 2.0 * x * v;
        for (int j = 1;; ++j) {
            ej *= v * v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / m) + m - x;
}

// ln B_{j,n}(x) by the saddle-point form; relative error stays near machine
// precision uniformly in n, unlike plain lgamma differences.
inline double log_basis(long long j, long long n, double x) {
    const double nd = static_cast<double>(n);
    if (j == 0) return nd * std::log1p(-x);
    if (j == n) return nd * std::log(x);
    const double jd = static_cast<double>(j);
    const double kd = static_cast<double>(n - j);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return stirlerr(nd) - stirlerr(jd) - stirlerr(kd) - bd0(jd, nd * x) - bd0(kd, nd * (1.0 - x)) +
           0.5 * std::log(nd / (two_pi * jd * kd));
}

} // namespace detail

// Basis value in log space; finite up to n ~ 1e6 where direct factorials are
// long gone (double overflows at 171!).
inline double basis(long long j, long long n, double x) {
    if (n < 0 || j < 0 || j > n) throw DomainError("basis: requires 0 <= j <= n");
    if (x < 0.0 || x > 1.0) throw DomainError("basis: x must lie in [0,1]");
    if (x == 0.0) return j == 0 ? 1.0 : 0.0;
    if (x == 1.0) return j == n ? 1.0 : 0.0;
    return std::exp(detail::log_basis(j, n, x));
}

namespace detail {

// Above this n the j-sum is restricted to a +-(12 sd + 25) window around nx;
// the excluded binomial mass is below 1e-12 (checked by the assert), so the
// truncation error is additive 1e-12 * ||f||_inf at worst.
inline constexpr long long kFullSumMaxN = 5000;

struct SumWindow {
    long long lo;
    long long hi;
};

inline SumWindow sum_window(long long n, double x) {
    if (n <= kFullSumMaxN) return {0, n};
    const double v = std::max(x * (1.0 - x), 1.0 / static_cast<double>(n));
    const double w = 12.0 * std::sqrt(static_cast<double>(n) * v) + 25.0;
    const double center = static_cast<double>(n) * x;
    SumWindow win;
    win.lo = std::max<long long>(0, static_cast<long long>(std::floor(center - w)));
    win.hi = std::min<long long>(n, static_cast<long long>(std::ceil(center + w)));
#ifndef NDEBUG
    // Bernstein inequality: P(|X - nx| >= w) <= 2 exp(-w^2 / (2(n x(1-x) + w/3))).
    const double tail =
        2.0 * std::exp(-(w * w) / (2.0 * (static_cast<double>(n) * x * (1.0 - x) + w / 3.0)));
    assert(tail <= 1e-12);
#endif
    return win;
}

// sum_{j in window} f(j/n) B_{j,n}(x), expanding outward from the modal term
// by the one-step pmf recurrence. FValues is any callable j -> f(j/n).
template <class FValues>
double bernstein_sum(FValues&& fj, long long n, double x) {
    if (x <= 0.0) return fj(0);
    if (x >= 1.0) return fj(n);
    const SumWindow win = sum_window(n, x);
    long long m = static_cast<long long>(std::llround(static_cast<double>(n) * x));
    m = std::max(win.lo, std::min(win.hi, m));
    const double bm = std::exp(log_basis(m, n, x));
    const double odds = x / (1.0 - x);

    double sum = bm * fj(m);
    double b = bm;
    for (long long j = m; j > win.lo; --j) {
        b *= static_cast<double>(j) / (static_cast<double>(n - j + 1) * odds);
        if (b == 0.0) break;
        sum += b * fj(j - 1);
    }
    b = bm;
    for (long long j = m; j < win.hi; ++j) {
        b *= static_cast<double>(n - j) * odds / static_cast<double>(j + 1);
        if (b == 0.0) break;
        sum += b * fj(j + 1);
    }
    return sum;
}

} // namespace detail

// B_n[f](x).
inline double apply(const Functional& func, long long n, double x) {
    if (n < 1) throw DomainError("apply: n must be >= 1");
    if (x < 0.0 || x > 1.0) throw DomainError("apply: x must lie in [0,1]");
    const double nd = static_cast<double>(n);
    return detail::bernstein_sum(
        [&](long long j) { return j == 0 ? 0.0 : func(static_cast<double>(j) / nd); }, n, x);
}

struct BiasDecomposition {
    std::vector<double> per_symbol; // B_n[f](p_i) - f(p_i)
    double total = 0.0;             // pairwise sum of per_symbol
};

// Exact bias of F(P_n) at (dist, n): no sampling, O(S n) work, or O(S sqrt(n))
// once the truncated window kicks in. per_symbol entries are computed
// independently, so the parallel path reproduces the serial result bit for bit.
inline BiasDecomposition exact_bias(const Functional& func, const DiscreteDistribution& dist,
                                    long long n, int threads = 1) {
    if (n < 1) throw DomainError("exact_bias: n must be >= 1");
    const double nd = static_cast<double>(n);
    const auto& probs = dist.probs();

    std::vector<double> fv;
    const bool precompute = n <= (1LL << 22);
    if (precompute) {
        fv.resize(static_cast<std::size_t>(n) + 1);
        fv[0] = 0.0;
        for (long long j = 1; j <= n; ++j)
            fv[static_cast<std::size_t>(j)] = func(static_cast<double>(j) / nd);
    }
    auto fj = [&](long long j) {
        if (precompute) return fv[static_cast<std::size_t>(j)];
        return j == 0 ? 0.0 : func(static_cast<double>(j) / nd);
    };

    BiasDecomposition out;
    out.per_symbol.resize(probs.size());
    parallel_for(probs.size(), probs.size() >= 64 ? threads : 1, [&](std::size_t i) {
        const double p = probs[i];
        out.per_symbol[i] = detail::bernstein_sum(fj, n, p) - func(p);
    });
    out.total = pairwise_sum(out.per_symbol);
    return out;
}

// Central moments B_n[(x - x0)^k](x0) = E (X/n - x0)^k, X ~ Binomial(n, x0),
// in closed form for k = 2..5.
inline double central_moment(int k, long long n, double x0) {
    if (n < 1) throw DomainError("central_moment: n must be >= 1");
    if (x0 < 0.0 || x0 > 1.0) throw DomainError("central_moment: x0 must lie in [0,1]");
    const double nd = static_cast<double>(n);
    const double v = x0 * (1.0 - x0);
    switch (k) {
        case 2: return v / nd;
        case 3: return v * (1.0 - 2.0 * x0) / (nd * nd);
        case 4: return 3.0 * v * v / (nd * nd) + v * (1.0 - 6.0 * v) / (nd * nd * nd);
        case 5:
            return (10.0 * v * v / (nd * nd * nd) + v * (1.0 - 12.0 * v) / (nd * nd * nd * nd)) *
                   (1.0 - 2.0 * x0);
        default: throw DomainError("central_moment: k must be in {2,3,4,5}");
    }
}

// Unclamped degree-5 Taylor lower bound on x^alpha's Bernstein error,
// 1 < alpha < 2 (stated for f = -x^alpha, whose error equals B_n[x^a]-x^a).
// Can be negative for some (alpha, x, n); exposed for diagnostics.
inline double taylor_lower_alpha_high_raw(double alpha, long long n, double x) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("taylor_lower_alpha_high: requires 1 < alpha < 2");
    if (!(x > 0.0 && x < 1.0)) throw DomainError("taylor_lower_alpha_high: requires 0 < x < 1");
    if (n < 1) throw DomainError("taylor_lower_alpha_high: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double a1 = alpha * (alpha - 1.0);
    const double main = a1 * std::pow(x, alpha - 2.0) * (1.0 - x) / (2.0 * nd) *
                        (x + (2.0 - alpha) * (3.0 * alpha - 1.0) * x / (12.0 * nd) +
                         (2.0 - alpha) * (5.0 - 3.0 * alpha) / (12.0 * nd));
    const double r1 = a1 * (alpha - 2.0) * (alpha - 3.0) * std::pow(x, alpha - 3.0) * (1.0 - x) /
                      24.0 *
                      (1.0 + 2.0 * (1.0 - x) * ((5.0 - 2.0 * alpha) * x + alpha - 4.0));
    const double r2 = a1 * (alpha - 2.0) * (alpha - 3.0) * (alpha - 4.0) *
                      std::pow(x, alpha - 4.0) * (1.0 - x) * (1.0 - 2.0 * x) *
                      (1.0 - 12.0 * x * (1.0 - x)) / 120.0;
    return main + r1 / (nd * nd * nd) + r2 / (nd * nd * nd * nd);
}

inline double taylor_lower_alpha_high(double alpha, long long n, double x) {
    return std::max(taylor_lower_alpha_high_raw(alpha, n, x), 0.0);
}

// Degree-3 Taylor lower bound on x^alpha - B_n[x^alpha](x), 0 < alpha < 1.
inline double taylor_lower_alpha_low(double alpha, long long n, double x) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("taylor_lower_alpha_low: requires 0 < alpha < 1");
    if (!(x > 0.0 && x < 1.0)) throw DomainError("taylor_lower_alpha_low: requires 0 < x < 1");
    if (n < 1) throw DomainError("taylor_lower_alpha_low: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double value = alpha * (1.0 - alpha) / (2.0 * nd) * std::pow(x, alpha - 2.0) *
                         (1.0 - x) * (x - (2.0 - alpha) / (3.0 * nd));
    return std::max(value, 0.0);
}

// Lower bound on (-x ln x) - B_n[-x ln x](x), valid for x >= 15/n.
inline double taylor_lower_entropy(long long n, double x) {
    if (n < 1) throw DomainError("taylor_lower_entropy: n must be >= 1");
    if (x > 1.0 || x < 15.0 / static_cast<double>(n))
        throw OutOfValidityRange("taylor_lower_entropy: requires 15/n <= x <= 1");
    const double nd = static_cast<double>(n);
    return (1.0 - x) / (2.0 * nd) + 1.0 / (20.0 * nd * nd * x) - x / (12.0 * nd * nd);
}

// Fixed-P expansion of the entropy plug-in bias: -(S-1)/(2n) at order 1, plus
// (1 - sum 1/p_i)/(12 n^2) at order 2. This is an asymptotic expansion, not a
// bound, and it is not uniform in P (sum 1/p_i is unbounded over the simplex).
// Order 1 uses the strictly-positive support count, since zero-mass symbols
// never contribute to the bias.
inline double asymptotic_bias_entropy(const DiscreteDistribution& dist, long long n, int order) {
    if (n < 1) throw DomainError("asymptotic_bias_entropy: n must be >= 1");
    if (order != 1 && order != 2) throw DomainError("asymptotic_bias_entropy: order must be 1 or 2");
    const double nd = static_cast<double>(n);
    const double miller = -static_cast<double>(dist.support_count() - 1) / (2.0 * nd);
    if (order == 1) return miller;
    double inv_sum = 0.0;
    for (double p : dist.probs()) {
        if (p <= 0.0)
            throw DomainError("asymptotic_bias_entropy: order 2 requires all p_i > 0");
        inv_sum += 1.0 / p;
    }
    return miller + (1.0 - inv_sum) / (12.0 * nd * nd);
}

} // namespace pluginrisk
