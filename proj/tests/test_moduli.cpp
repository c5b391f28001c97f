#include <doctest.h>

#include <cmath>
#include <pluginrisk/moduli.hpp>
#include <thread>
#include <vector>

using namespace pluginrisk;

namespace {
double entropy_f(double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); }
}

TEST_SUITE_BEGIN("moduli");

TEST_CASE("closed forms") {
    CHECK(omega_closed(ModulusKind::Omega2, Functional::entropy(), 0.1) ==
          doctest::Approx(0.1 * std::log(4.0)));
    CHECK(omega_closed(ModulusKind::Omega2Phi, Functional::entropy(), 0.5) ==
          doctest::Approx(0.25 * std::log(4.0) / 1.25));
    CHECK(omega_closed(ModulusKind::Omega2, Functional::power(0.5), 0.25) ==
          doctest::Approx((2.0 - std::sqrt(2.0)) * 0.5));
    CHECK(omega_closed(ModulusKind::Omega2Phi, Functional::power(0.5), 0.3) ==
          doctest::Approx((2.0 - std::sqrt(2.0)) * 0.3 / std::sqrt(1.09)));

    // Validity ranges.
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega2, Functional::entropy(), 0.6),
                    OutOfValidityRange);
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega2Phi, Functional::entropy(), 1.5),
                    OutOfValidityRange);
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega2, Functional::entropy(), 0.0),
                    OutOfValidityRange);

    // No closed form: first-order kinds, x^alpha under omega^2_phi for
    // alpha > 1, alpha >= 2, and custom functionals without metadata.
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega1, Functional::entropy(), 0.1), NoClosedForm);
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega2Phi, Functional::power(1.5), 0.1),
                    NoClosedForm);
    CHECK_THROWS_AS(omega_closed(ModulusKind::Omega2, Functional::power(2.5), 0.1),
                    NoClosedForm);
    CHECK_THROWS_AS(
        omega_closed(ModulusKind::Omega2, Functional::custom([](double x) { return x; }), 0.1),
        NoClosedForm);

    // Custom with declared smoothness uses the power table.
    auto sqrtish = Functional::custom([](double x) { return std::sqrt(x); }, 0.5);
    CHECK(omega_closed(ModulusKind::Omega2, sqrtish, 0.25) ==
          doctest::Approx(omega_closed(ModulusKind::Omega2, Functional::power(0.5), 0.25)));
}

TEST_CASE("numeric optimizer matches the closed forms") {
    const std::vector<std::pair<Functional, const char*>> funcs = {
        {Functional::entropy(), "entropy"},
        {Functional::power(0.3), "power:0.3"},
        {Functional::power(0.5), "power:0.5"},
        {Functional::power(0.8), "power:0.8"},
    };
    for (const auto& [func, name] : funcs) {
        CAPTURE(name);
        for (double t : {0.05, 0.1, 0.25, 0.5}) {
            CAPTURE(t);
            auto f = [&func](double x) { return func(x); };
            CHECK(std::abs(omega_numeric(ModulusKind::Omega2, f, t) -
                           omega_closed(ModulusKind::Omega2, func, t)) <= 5e-4);
            CHECK(std::abs(omega_numeric(ModulusKind::Omega2Phi, f, t) -
                           omega_closed(ModulusKind::Omega2Phi, func, t)) <= 5e-4);
        }
    }
}

TEST_CASE("phi-modulus maximizer sits at u = 0, v = 2t^2/(1+t^2)") {
    for (double t : {0.1, 0.25, 0.5}) {
        auto est = omega_numeric_search(ModulusKind::Omega2Phi, entropy_f, t, 100000);
        const double v_expected = 2.0 * t * t / (1.0 + t * t);
        CHECK(std::abs(est.u) <= 1e-6);
        CHECK(est.v == doctest::Approx(v_expected).epsilon(1e-4));
    }
}

TEST_CASE("first-order modulus over the whole interval") {
    // Monotone f: the full-interval oscillation f(1) - f(0).
    CHECK(omega_numeric(ModulusKind::Omega1, [](double x) { return x * x; }, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // Non-monotone: the pair (1/e, 1) realizes max f - min f = 1/e.
    CHECK(omega_numeric(ModulusKind::Omega1, entropy_f, 1.0) ==
          doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-7));
}

TEST_CASE("moduli are non-decreasing in t") {
    for (ModulusKind kind : {ModulusKind::Omega1, ModulusKind::Omega2, ModulusKind::Omega1Phi,
                             ModulusKind::Omega2Phi}) {
        double prev = 0.0;
        for (double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            const double cur = omega_numeric(kind, entropy_f, t, 20000);
            CHECK(cur >= prev - 1e-6);
            prev = cur;
        }
    }
}

TEST_CASE("omega^2 <= 2 omega^1") {
    for (double t : {0.1, 0.3}) {
        for (const Functional& func : {Functional::entropy(), Functional::power(0.5)}) {
            auto f = [&func](double x) { return func(x); };
            CHECK(omega_numeric(ModulusKind::Omega2, f, t) <=
                  2.0 * omega_numeric(ModulusKind::Omega1, f, t) + 1e-6);
            CHECK(omega_numeric(ModulusKind::Omega2Phi, f, t) <=
                  2.0 * omega_numeric(ModulusKind::Omega1Phi, f, t) + 1e-6);
        }
    }
}

TEST_CASE("omega^2_phi of x^alpha is of order t^2 for 1 < alpha < 2") {
    for (double a : {1.1, 1.5, 1.9}) {
        double lo = 1e300, hi = 0.0;
        for (double t : {0.02, 0.05, 0.1, 0.3, 0.6, 1.0}) {
            const double ratio =
                omega_numeric(ModulusKind::Omega2Phi,
                              [a](double x) { return std::pow(x, a); }, t, 20000) /
                (t * t);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo < 10.0);
    }
}

TEST_CASE("c_alpha_n") {
    CHECK(c_alpha_n(1.5, 100) > 0.0);
    double lo = 1e300, hi = 0.0;
    for (long long n : {100LL, 1000LL, 10000LL}) {
        const double c = c_alpha_n(1.5, n);
        CHECK(c > 0.0);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK(hi / lo <= 3.0);

    // Self-consistency under grid refinement.
    const double coarse = c_alpha_n(1.5, 100);
    const double fine = 100.0 * omega_numeric(ModulusKind::Omega2Phi,
                                              [](double x) { return std::pow(x, 1.5); }, 0.1,
                                              400000);
    CHECK(std::abs(coarse - fine) / fine <= 1e-3);

    CHECK_THROWS_AS(c_alpha_n(2.5, 100), DomainError);
    CHECK_THROWS_AS(c_alpha_n(0.5, 100), DomainError);
}

TEST_CASE("c_alpha_n cache is race-free and deterministic") {
    std::vector<double> values(4);
    std::vector<std::thread> pool;
    for (int i = 0; i < 4; ++i)
        pool.emplace_back([&values, i] { values[static_cast<std::size_t>(i)] = c_alpha_n(1.3, 555); });
    for (auto& th : pool) th.join();
    for (double v : values) CHECK(v == values[0]);
}

TEST_CASE("plug-in bias bound from the moduli") {
    // Entropy, Var = theta(1-theta)/n.
    const double theta = 0.5;
    const long long n = 100;
    const double var = theta * (1.0 - theta) / static_cast<double>(n);
    const double pointwise =
        plugin_bias_bound(Functional::entropy(), var, BiasBoundMode::Pointwise, theta);
    CHECK(pointwise == doctest::Approx(1.5 * std::log(4.0) * std::sqrt(var)).epsilon(1e-12));

    const double dt =
        plugin_bias_bound(Functional::entropy(), var, BiasBoundMode::DitzianTotik, theta);
    CHECK(dt == doctest::Approx(2.5 * std::log(4.0) / (static_cast<double>(n) * (1.0 + 1.0 / n)))
                    .epsilon(1e-12));
    CHECK(dt < pointwise);

    CHECK(plugin_bias_bound(Functional::entropy(), 0.0, BiasBoundMode::Pointwise, theta) == 0.0);
    CHECK_THROWS_AS(plugin_bias_bound(Functional::entropy(), 0.6, BiasBoundMode::Pointwise, theta),
                    DomainError);
    CHECK_THROWS_AS(
        plugin_bias_bound(Functional::entropy(), 0.2, BiasBoundMode::DitzianTotik, theta),
        DomainError);
    CHECK_THROWS_AS(
        plugin_bias_bound(Functional::entropy(), 0.01, BiasBoundMode::DitzianTotik, 0.0),
        DomainError);

    // No closed form for omega^2_phi of x^1.5: falls back to the numeric path.
    const double numeric_backed =
        plugin_bias_bound(Functional::power(1.5), 0.01, BiasBoundMode::DitzianTotik, 0.5);
    CHECK(numeric_backed > 0.0);
    CHECK(numeric_backed ==
          doctest::Approx(2.5 * omega_numeric(ModulusKind::Omega2Phi,
                                              [](double x) { return std::pow(x, 1.5); },
                                              std::sqrt(0.01 / 0.25)))
              .epsilon(1e-9));
}

TEST_SUITE_END();
