#pragma once
/*
 * Plug-in (MLE) functional estimation: F(P_n) = sum_i f(X_i / n), and the
 * Miller-Madow bias-corrected entropy estimator H(P_n) + (S-1)/(2n).
 */

#include <cmath>

#include "errors.hpp"
#include "model.hpp"

namespace pluginrisk {

struct EstimatorSpec {
    enum class Kind { PlugIn, MillerMadow };

    Kind kind = Kind::PlugIn;
    // True alphabet size for the Miller-Madow correction. 0 selects the
    // observed-support convenience mode (not the textbook estimator).
    int s_known = 0;

    static EstimatorSpec plug_in() { return {Kind::PlugIn, 0}; }
    static EstimatorSpec miller_madow(int s_known) {
        if (s_known < 1) throw DomainError("EstimatorSpec: Miller-Madow requires S >= 1");
        return {Kind::MillerMadow, s_known};
    }
    static EstimatorSpec miller_madow_observed() { return {Kind::MillerMadow, 0}; }

    const char* name() const {
        return kind == Kind::PlugIn ? "mle" : "miller-madow";
    }
};

// F(P_n) on a raw count array; zero counts contribute f(0) = 0.
inline double plug_in_counts(const Functional& func, const std::vector<long long>& counts,
                             long long n) {
    if (n < 1) throw DomainError("plug_in: n must be >= 1");
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (long long c : counts) {
        if (c > 0) sum += func(static_cast<double>(c) / nd);
    }
    return sum;
}

inline double plug_in(const Functional& func, const CountVector& counts) {
    return plug_in_counts(func, counts.counts(), counts.n());
}

inline double miller_madow(const CountVector& counts, int s_known) {
    if (counts.n() < 1) throw DomainError("miller_madow: n must be >= 1");
    if (s_known < 1) throw DomainError("miller_madow: S must be >= 1");
    return plug_in(Functional::entropy(), counts) +
           static_cast<double>(s_known - 1) / (2.0 * static_cast<double>(counts.n()));
}

// Convenience variant that plugs in the observed support count for S.
inline double miller_madow_observed(const CountVector& counts) {
    int observed = 0;
    for (long long c : counts.counts()) observed += (c > 0);
    return miller_madow(counts, observed < 1 ? 1 : observed);
}

inline double apply_estimator_counts(const EstimatorSpec& spec, const Functional& func,
                                     const std::vector<long long>& counts, long long n) {
    if (spec.kind == EstimatorSpec::Kind::PlugIn) return plug_in_counts(func, counts, n);
    if (func.kind() != Functional::Kind::Entropy)
        throw DomainError("apply_estimator: Miller-Madow is an entropy estimator");
    int s = spec.s_known;
    if (s < 1) {
        s = 0;
        for (long long c : counts) s += (c > 0);
        if (s < 1) s = 1;
    }
    return plug_in_counts(func, counts, n) +
           static_cast<double>(s - 1) / (2.0 * static_cast<double>(n));
}

inline double apply_estimator(const EstimatorSpec& spec, const Functional& func,
                              const CountVector& counts) {
    return apply_estimator_counts(spec, func, counts.counts(), counts.n());
}

} // namespace pluginrisk
