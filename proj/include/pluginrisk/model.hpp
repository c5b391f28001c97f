#pragma once
/*
 * Discrete distributions P = (p_1, ..., p_S), multinomial count vectors,
 * and the element-wise functionals F(P) = sum_i f(p_i) with f(0) = 0:
 * entropy f(x) = -x ln x, power f(x) = x^alpha, or a caller-supplied f.
 *
 * Also the two adversarial constructions used by the risk lower bounds:
 * the "W" distribution (S-1 masses at 1/n, remainder on the last symbol)
 * and the capped uniform (n masses at 1/n, zeros elsewhere, when S > n).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace pluginrisk {

class DiscreteDistribution {
public:
    const std::vector<double>& probs() const& { return probs_; }
    std::vector<double> probs() && { return std::move(probs_); } // safe on temporaries
    int size() const { return static_cast<int>(probs_.size()); }
    double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }

    // Number of strictly positive masses (structural zeros excluded).
    int support_count() const {
        int k = 0;
        for (double p : probs_) k += (p > 0.0);
        return k;
    }

    friend DiscreteDistribution make_distribution(std::vector<double> probs);
    friend DiscreteDistribution uniform(int S);
    friend DiscreteDistribution worst_case_w(int S, long long n);
    friend DiscreteDistribution capped_uniform(int S, long long n);
    friend DiscreteDistribution empirical(const class CountVector& counts);

private:
    explicit DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}
    static DiscreteDistribution trusted(std::vector<double> probs) {
        return DiscreteDistribution(std::move(probs));
    }

    std::vector<double> probs_;
};

// Validates and renormalizes so the entries sum to 1 in working precision.
// Tiny masses are kept as-is; structural zeros count toward the support size S.
inline DiscreteDistribution make_distribution(std::vector<double> probs) {
    if (probs.empty()) throw EmptyVector("make_distribution: empty probability vector");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p)) throw DomainError("make_distribution: non-finite probability");
        if (p < 0.0) throw NegativeProbability("make_distribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw SumNotOne("make_distribution: probabilities sum to " + std::to_string(sum));
    for (double& p : probs) p /= sum;
    return DiscreteDistribution(std::move(probs));
}

inline DiscreteDistribution uniform(int S) {
    if (S < 1) throw DomainError("uniform: S must be >= 1");
    return DiscreteDistribution::trusted(std::vector<double>(static_cast<std::size_t>(S), 1.0 / S));
}

// First S-1 masses at 1/n, the last takes the remainder 1 - (S-1)/n.
inline DiscreteDistribution worst_case_w(int S, long long n) {
    if (S < 1) throw DomainError("worst_case_w: S must be >= 1");
    if (n < S) throw DomainError("worst_case_w: requires n >= S");
    std::vector<double> p(static_cast<std::size_t>(S), 1.0 / static_cast<double>(n));
    p.back() = 1.0 - static_cast<double>(S - 1) / static_cast<double>(n);
    return DiscreteDistribution::trusted(std::move(p));
}

// Uniform on min(S, n) symbols; when S > n the remaining S-n symbols carry
// structural zeros (they still count toward S).
inline DiscreteDistribution capped_uniform(int S, long long n) {
    if (S < 1) throw DomainError("capped_uniform: S must be >= 1");
    if (n < 1) throw DomainError("capped_uniform: n must be >= 1");
    const long long m = std::min<long long>(S, n);
    std::vector<double> p(static_cast<std::size_t>(S), 0.0);
    for (long long i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(m);
    return DiscreteDistribution::trusted(std::move(p));
}

class CountVector {
public:
    explicit CountVector(std::vector<long long> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw EmptyVector("CountVector: empty counts");
        n_ = 0;
        for (long long c : counts_) {
            if (c < 0) throw DomainError("CountVector: negative count");
            n_ += c;
        }
    }

    const std::vector<long long>& counts() const& { return counts_; }
    std::vector<long long> counts() && { return std::move(counts_); }
    long long n() const { return n_; }
    int size() const { return static_cast<int>(counts_.size()); }
    long long operator[](int i) const { return counts_[static_cast<std::size_t>(i)]; }

private:
    std::vector<long long> counts_;
    long long n_ = 0;
};

// Multinomial sampler on a caller-owned engine, symbol by symbol with
// conditional binomials. Any float-rounding residue lands on the last
// positive-mass symbol, never on a structural zero.
inline void sample_counts_into(const DiscreteDistribution& dist, long long n,
                               std::mt19937_64& engine, std::vector<long long>& counts) {
    const auto& p = dist.probs();
    counts.assign(p.size(), 0);
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) last_positive = i;
    long long remaining = n;
    double tail = 1.0;
    for (std::size_t i = 0; i + 1 < p.size() && remaining > 0; ++i) {
        const double cond = p[i] <= 0.0 ? 0.0 : (tail > 0.0 ? p[i] / tail : 1.0);
        if (cond >= 1.0) {
            counts[i] += remaining;
            remaining = 0;
        } else if (cond > 0.0) {
            std::binomial_distribution<long long> binom(remaining, cond);
            counts[i] = binom(engine);
            remaining -= counts[i];
        }
        tail -= p[i];
    }
    counts[last_positive] += remaining;
}

// One multinomial draw of size n. Deterministic in (dist, n, seed) for a
// fixed build; the sampler owns a private engine, no global state.
inline CountVector sample_counts(const DiscreteDistribution& dist, long long n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample_counts: n must be >= 1");
    std::mt19937_64 engine = make_engine(seed);
    std::vector<long long> counts;
    sample_counts_into(dist, n, engine, counts);
    return CountVector(std::move(counts));
}

// Empirical distribution P_n(i) = X_i / n.
inline DiscreteDistribution empirical(const CountVector& counts) {
    if (counts.n() < 1) throw DomainError("empirical: counts sum to zero");
    std::vector<double> p(counts.counts().size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<double>(counts.counts()[i]) / static_cast<double>(counts.n());
    return DiscreteDistribution::trusted(std::move(p));
}

// Fingerprint h_j = #{i : X_i = j}, j = 0..n. Satisfies sum_j h_j = S and
// sum_j j*h_j = n.
inline std::vector<long long> fingerprint(const CountVector& counts) {
    std::vector<long long> h(static_cast<std::size_t>(counts.n()) + 1, 0);
    for (long long c : counts.counts()) ++h[static_cast<std::size_t>(c)];
    return h;
}

class Functional {
public:
    enum class Kind { Entropy, Power, Custom };

    static Functional entropy() { return Functional(Kind::Entropy, 0.0, nullptr, std::nullopt); }

    static Functional power(double alpha) {
        if (!(alpha > 0.0)) throw DomainError("Functional::power: alpha must be > 0");
        return Functional(Kind::Power, alpha, nullptr, std::nullopt);
    }

    // f is wrapped so f(0) returns exactly 0. smoothness_alpha, when given,
    // declares that f behaves like x^alpha for the closed-form moduli.
    static Functional custom(std::function<double(double)> f,
                             std::optional<double> smoothness_alpha = std::nullopt) {
        return Functional(Kind::Custom, 0.0, std::move(f), smoothness_alpha);
    }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::optional<double> smoothness_alpha() const { return smoothness_alpha_; }

    // Element-wise map with the conventions 0 ln 0 = 0 and 0^alpha = 0.
    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        switch (kind_) {
            case Kind::Entropy: return -x * std::log(x);
            case Kind::Power: return std::pow(x, alpha_);
            case Kind::Custom: return f_(x);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind_) {
            case Kind::Entropy: return "entropy";
            case Kind::Power: {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "power:%g", alpha_);
                return buf;
            }
            case Kind::Custom: return "custom";
        }
        return "?";
    }

private:
    Functional(Kind k, double a, std::function<double(double)> f, std::optional<double> sa)
        : kind_(k), alpha_(a), f_(std::move(f)), smoothness_alpha_(sa) {}

    Kind kind_;
    double alpha_;
    std::function<double(double)> f_;
    std::optional<double> smoothness_alpha_;
};

// F(P) = sum_i f(p_i).
inline double eval_functional(const Functional& func, const DiscreteDistribution& dist) {
    double sum = 0.0;
    for (double p : dist.probs()) {
        double term = func(p);
        if (!std::isfinite(term))
            throw DomainError("eval_functional: functional returned a non-finite value");
        sum += term;
    }
    return sum;
}

} // namespace pluginrisk
