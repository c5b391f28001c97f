#pragma once
/*
 * Moduli of smoothness on [0,1].
 *
 *   omega^1(f,t)     = sup |f(u)-f(v)|,              |u-v| <= t
 *   omega^2(f,t)     = sup |f(u)-2f((u+v)/2)+f(v)|,  |u-v| <= 2t
 *   omega^1_phi(f,t) = as omega^1 with |u-v| <= t  phi((u+v)/2)
 *   omega^2_phi(f,t) = as omega^2 with |u-v| <= 2t phi((u+v)/2)
 *
 * with phi(x) = sqrt(x(1-x)), the binomial's local standard-deviation shape.
 *
 * Second-order closed forms are available for -x ln x and x^alpha, and a
 * generic numeric maximizer covers the rest. The numeric value is a grid +
 * golden-section estimate of a supremum, i.e. a lower bound of the truth,
 * and the tests treat the closed forms as the reference.
 */

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace pluginrisk {

enum class ModulusKind { Omega1, Omega2, Omega1Phi, Omega2Phi };

inline double phi(double x) { return std::sqrt(x * (1.0 - x)); }

namespace detail {

// (entropy?, alpha) view of a functional for the closed-form table. Custom
// functionals qualify only if they declare a power-type smoothness exponent.
struct SmoothnessClass {
    bool is_entropy = false;
    double alpha = 0.0;
};

inline SmoothnessClass classify_for_closed_form(const Functional& func) {
    switch (func.kind()) {
        case Functional::Kind::Entropy: return {true, 0.0};
        case Functional::Kind::Power: return {false, func.alpha()};
        case Functional::Kind::Custom:
            if (func.smoothness_alpha()) return {false, *func.smoothness_alpha()};
            throw NoClosedForm("omega_closed: custom functional without smoothness metadata");
    }
    throw NoClosedForm("omega_closed: unsupported functional");
}

} // namespace detail

// Closed-form second-order moduli. First-order moduli have no closed form
// here, and neither does omega^2_phi of x^alpha for 1 < alpha < 2 (only its
// t^2 order is known).
inline double omega_closed(ModulusKind kind, const Functional& func, double t) {
    if (kind == ModulusKind::Omega1 || kind == ModulusKind::Omega1Phi)
        throw NoClosedForm("omega_closed: no closed form for first-order moduli");
    if (!(t > 0.0)) throw OutOfValidityRange("omega_closed: requires t > 0");
    const auto cls = detail::classify_for_closed_form(func);

    if (kind == ModulusKind::Omega2) {
        if (t > 0.5) throw OutOfValidityRange("omega_closed: omega^2 forms hold for t <= 1/2");
        if (cls.is_entropy) return t * std::log(4.0);
        if (cls.alpha >= 2.0)
            throw NoClosedForm("omega_closed: no closed form for x^alpha, alpha >= 2");
        return std::abs(2.0 - std::pow(2.0, cls.alpha)) * std::pow(t, cls.alpha);
    }

    // Omega2Phi
    if (t > 1.0) throw OutOfValidityRange("omega_closed: omega^2_phi forms hold for t <= 1");
    if (cls.is_entropy) return t * t * std::log(4.0) / (1.0 + t * t);
    if (cls.alpha > 1.0)
        throw NoClosedForm("omega_closed: omega^2_phi of x^alpha, alpha > 1, has no closed form");
    return std::abs(2.0 - std::pow(2.0, cls.alpha)) * std::pow(t, 2.0 * cls.alpha) /
           std::pow(1.0 + t * t, cls.alpha);
}

struct ModulusEstimate {
    double value = 0.0;
    double u = 0.0; // maximizing pair
    double v = 0.0;
};

namespace detail {

template <class G>
std::pair<double, double> golden_max(G&& g, double lo, double hi) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 90 && b - a > 1e-16; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, g(xm)};
}

inline constexpr int kDefaultModulusGrid = 100000;

} // namespace detail

// Grid search over midpoint M and a fraction sigma of the largest feasible
// half-width at M, followed by coordinate golden-section refinement of the
// best candidates. The sigma = 1 slice realizes the endpoint pairs where the
// supremum of a convex or concave f lives: u = 0 (or v = 1) once the width
// constraint is clipped by the interval, full phi-width in the interior.
template <class F>
ModulusEstimate omega_numeric_search(ModulusKind kind, F&& f, double t, int grid_points) {
    if (!(t > 0.0)) throw DomainError("omega_numeric: requires t > 0");
    if (grid_points < 1000) throw DomainError("omega_numeric: requires grid_points >= 1000");

    const bool second_order = kind == ModulusKind::Omega2 || kind == ModulusKind::Omega2Phi;
    const bool phi_weighted = kind == ModulusKind::Omega1Phi || kind == ModulusKind::Omega2Phi;
    const double width_scale = second_order ? t : t / 2.0;

    auto h_cap = [&](double m) {
        const double base = phi_weighted ? width_scale * phi(m) : width_scale;
        return std::min({base, m, 1.0 - m});
    };
    auto objective = [&](double m, double sigma) {
        const double h = sigma * h_cap(m);
        if (!(h > 0.0)) return 0.0;
        const double lo = f(std::max(m - h, 0.0)), hi = f(std::min(m + h, 1.0));
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw DomainError("omega_numeric: non-finite function value");
        return second_order ? std::abs(lo - 2.0 * f(m) + hi) : std::abs(lo - hi);
    };

    const int n_sigma = 32;
    const int n_mid = std::max(grid_points / n_sigma, 257);
    const double dm = 1.0 / static_cast<double>(n_mid - 1);

    struct Candidate {
        double value, m, sigma;
    };
    Candidate best[3] = {{-1.0, 0, 0}, {-1.0, 0, 0}, {-1.0, 0, 0}};
    for (int i = 0; i < n_mid; ++i) {
        const double m = static_cast<double>(i) * dm;
        for (int k = 1; k <= n_sigma; ++k) {
            const double sigma = static_cast<double>(k) / n_sigma;
            const double val = objective(m, sigma);
            if (val > best[0].value) {
                best[2] = best[1];
                best[1] = best[0];
                best[0] = {val, m, sigma};
            } else if (val > best[1].value) {
                best[2] = best[1];
                best[1] = {val, m, sigma};
            } else if (val > best[2].value) {
                best[2] = {val, m, sigma};
            }
        }
    }

    Candidate winner = best[0];
    for (const Candidate& c : best) {
        if (c.value < 0.0) continue;
        double m = c.m, sigma = c.sigma, val = c.value;
        for (int round = 0; round < 3; ++round) {
            auto [m_ref, v_m] = detail::golden_max(
                [&](double mm) { return objective(mm, sigma); }, std::max(0.0, m - dm),
                std::min(1.0, m + dm));
            if (v_m >= val) {
                m = m_ref;
                val = v_m;
            }
            auto [s_ref, v_s] = detail::golden_max(
                [&](double ss) { return objective(m, ss); },
                std::max(0.0, sigma - 1.0 / n_sigma), std::min(1.0, sigma + 1.0 / n_sigma));
            if (v_s >= val) {
                sigma = s_ref;
                val = v_s;
            }
        }
        if (val > winner.value) winner = {val, m, sigma};
    }

    ModulusEstimate out;
    const double h = winner.sigma * h_cap(winner.m);
    out.value = std::max(winner.value, 0.0);
    out.u = winner.m - h;
    out.v = winner.m + h;
    return out;
}

template <class F>
double omega_numeric(ModulusKind kind, F&& f, double t,
                     int grid_points = detail::kDefaultModulusGrid) {
    return omega_numeric_search(kind, std::forward<F>(f), t, grid_points).value;
}

// C_{alpha,n} = n * omega^2_phi(x^alpha, n^{-1/2}), the constant multiplying
// the S/n norm-estimate bias bound for 1 < alpha < 2. Memoized: bound sweeps
// request the same (alpha, n) thousands of times. Values are deterministic
// whichever thread computes them first.
inline double c_alpha_n(double alpha, long long n,
                        int grid_points = detail::kDefaultModulusGrid) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("c_alpha_n: requires 1 < alpha < 2");
    if (n < 1) throw DomainError("c_alpha_n: n must be >= 1");

    static std::map<std::pair<double, long long>, double> cache;
    static std::mutex cache_mutex;
    const std::pair<double, long long> key{alpha, n};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double t = 1.0 / std::sqrt(static_cast<double>(n));
    const double value =
        static_cast<double>(n) *
        omega_numeric(ModulusKind::Omega2Phi, [alpha](double x) { return std::pow(x, alpha); }, t,
                      grid_points);
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, value);
    return value;
}

enum class BiasBoundMode { Pointwise, DitzianTotik };

namespace detail {

inline double omega2_best(ModulusKind kind, const Functional& func, double t) {
    try {
        return omega_closed(kind, func, t);
    } catch (const NoClosedForm&) {
    } catch (const OutOfValidityRange&) {
    }
    return omega_numeric(kind, [&func](double x) { return func(x); }, t);
}

} // namespace detail

// Bias bound for a plug-in f(theta_hat) built from an unbiased theta_hat:
//   Pointwise:     (3/2) omega^2(f, sqrt(Var)),            needs Var <= 1/2
//   DitzianTotik:  (5/2) omega^2_phi(f, sqrt(Var)/phi(theta)),
//                                           needs Var <= phi(theta)^2 / 4
// Closed forms are used when the table has them, the numeric maximizer
// otherwise.
inline double plugin_bias_bound(const Functional& func, double variance_of_theta_hat,
                                BiasBoundMode mode, double theta) {
    if (!(variance_of_theta_hat >= 0.0) || !std::isfinite(variance_of_theta_hat))
        throw DomainError("plugin_bias_bound: variance must be finite and >= 0");
    if (variance_of_theta_hat == 0.0) return 0.0;

    if (mode == BiasBoundMode::Pointwise) {
        if (variance_of_theta_hat > 0.5)
            throw DomainError("plugin_bias_bound: pointwise mode requires Var <= 1/2");
        const double t = std::sqrt(variance_of_theta_hat);
        return 1.5 * detail::omega2_best(ModulusKind::Omega2, func, t);
    }

    if (!(theta > 0.0 && theta < 1.0))
        throw DomainError("plugin_bias_bound: Ditzian-Totik mode requires 0 < theta < 1");
    const double phi2 = theta * (1.0 - theta);
    if (variance_of_theta_hat > phi2 / 4.0)
        throw DomainError("plugin_bias_bound: Ditzian-Totik mode requires Var <= phi(theta)^2/4");
    const double t = std::sqrt(variance_of_theta_hat / phi2);
    return 2.5 * detail::omega2_best(ModulusKind::Omega2Phi, func, t);
}

} // namespace pluginrisk
