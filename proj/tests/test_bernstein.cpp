#include <doctest.h>

#include <cmath>
#include <pluginrisk/bernstein.hpp>

#include "oracles.hpp"

using namespace pluginrisk;

TEST_SUITE_BEGIN("bernstein");

TEST_CASE("basis values") {
    CHECK(basis(1, 2, 0.5) == doctest::Approx(0.5));
    CHECK(basis(0, 7, 0.0) == 1.0);
    CHECK(basis(3, 7, 0.0) == 0.0);
    CHECK(basis(7, 7, 1.0) == 1.0);
    CHECK_THROWS_AS(basis(3, 2, 0.5), DomainError);
    CHECK_THROWS_AS(basis(0, 2, 1.5), DomainError);
    // Finite far beyond the factorial overflow point.
    CHECK(std::isfinite(basis(500000, 1000000, 0.5)));
    CHECK(basis(500000, 1000000, 0.5) > 0.0);
}

TEST_CASE("basis partitions unity") {
    for (long long n : {1LL, 10LL, 100LL, 10000LL}) {
        for (double x : {0.0, 0.05, 0.37, 0.5, 0.81, 1.0}) {
            long double sum = 0.0L;
            for (long long j = 0; j <= n; ++j) sum += basis(j, n, x);
            CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("apply reproduces the quadratic error exactly") {
    // B_n[x^2](x) = x^2 + x(1-x)/n.
    auto sq = Functional::custom([](double x) { return x * x; });
    CHECK(apply(sq, 2, 0.5) == doctest::Approx(0.375));
    for (long long n : {1LL, 3LL, 17LL}) {
        for (double x : {0.1, 0.5, 0.9}) {
            CHECK(apply(sq, n, x) ==
                  doctest::Approx(x * x + x * (1.0 - x) / static_cast<double>(n)).epsilon(1e-13));
        }
    }
}

TEST_CASE("apply reproduces affine functions") {
    auto affine = Functional::custom([](double x) { return 3.0 * x; });
    for (long long n : {1LL, 5LL, 64LL})
        for (double x : {0.0, 0.2, 0.7, 1.0})
            CHECK(apply(affine, n, x) == doctest::Approx(3.0 * x).epsilon(1e-12));
}

TEST_CASE("apply matches the binomial-expectation oracle") {
    // Direct j-sum over the pmf, built by an independent recurrence.
    auto g = [](double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); };
    CHECK(apply(Functional::entropy(), 2, 0.5) ==
          doctest::Approx(oracle::binomial_expectation(g, 2, 0.5)).epsilon(1e-14));
    CHECK(apply(Functional::entropy(), 2, 0.5) == doctest::Approx(0.25 * std::log(2.0)));
    for (long long n : {7LL, 40LL}) {
        for (double x : {0.03, 0.4, 0.99}) {
            CHECK(apply(Functional::power(0.5), n, x) ==
                  doctest::Approx(oracle::binomial_expectation(
                                      [](double y) { return std::sqrt(y); }, n, x))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("apply endpoint interpolation") {
    for (const Functional& f :
         {Functional::entropy(), Functional::power(0.5), Functional::power(1.7)}) {
        CHECK(apply(f, 9, 0.0) == 0.0);
        CHECK(apply(f, 9, 1.0) == f(1.0));
    }
}

TEST_CASE("truncated sum stays within 1e-12 of the full sum") {
    const long long n = 8192; // above the truncation threshold
    auto g = [](double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); };
    for (double x : {0.01, 0.37, 0.5, 0.93}) {
        const double full = oracle::binomial_expectation(g, n, x);
        CHECK(std::abs(apply(Functional::entropy(), n, x) - full) <= 1e-12);
    }
}

TEST_CASE("exact_bias small cases") {
    auto bd = exact_bias(Functional::entropy(), uniform(2), 2);
    CHECK(bd.total == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-13));
    CHECK(bd.per_symbol.size() == 2);
    CHECK(bd.per_symbol[0] == doctest::Approx(bd.per_symbol[1]));

    // E F(P_n) over the three outcomes (2,0),(1,1),(0,2) is 0.5 + sqrt(1/2).
    auto bp = exact_bias(Functional::power(0.5), uniform(2), 2);
    CHECK(bp.total == doctest::Approx(0.5 + std::sqrt(0.5) - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(bp.total == doctest::Approx(-0.2071068).epsilon(1e-6));
}

TEST_CASE("exact_bias sign follows concavity") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto d = make_distribution(oracle::random_probs(5, 300 + s));
        for (long long n : {2LL, 9LL}) {
            for (double per : exact_bias(Functional::entropy(), d, n).per_symbol)
                CHECK(per <= 1e-15);
            for (double per : exact_bias(Functional::power(0.5), d, n).per_symbol)
                CHECK(per <= 1e-15);
            for (double per : exact_bias(Functional::power(1.5), d, n).per_symbol)
                CHECK(per >= -1e-15);
        }
    }
}

TEST_CASE("exact_bias per symbol equals the binomial oracle") {
    auto d = make_distribution({0.05, 0.2, 0.75});
    for (long long n : {3LL, 25LL}) {
        auto bd = exact_bias(Functional::entropy(), d, n);
        for (int i = 0; i < 3; ++i) {
            const double p = d[i];
            const double expected = oracle::binomial_expectation(
                                        [](double y) { return y <= 0.0 ? 0.0 : -y * std::log(y); },
                                        n, p) -
                                    (-p * std::log(p));
            CHECK(bd.per_symbol[static_cast<std::size_t>(i)] ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact_bias is thread-count invariant") {
    auto d = make_distribution(oracle::random_probs(200, 4242));
    auto serial = exact_bias(Functional::entropy(), d, 50, 1);
    auto parallel = exact_bias(Functional::entropy(), d, 50, 4);
    CHECK(serial.total == parallel.total); // bitwise: same reduction tree
}

TEST_CASE("central moments match brute force") {
    for (int k : {2, 3, 4, 5}) {
        for (long long n : {5LL, 20LL, 200LL}) {
            for (double x0 : {0.1, 0.25, 0.5, 0.9}) {
                CHECK(std::abs(central_moment(k, n, x0) -
                               oracle::binomial_central_moment(k, n, x0)) <= 1e-10);
            }
        }
    }
    CHECK(central_moment(2, 10, 0.5) == doctest::Approx(0.025));
    CHECK(central_moment(3, 12, 0.5) == 0.0);
    CHECK(central_moment(3, 4, 0.25) == doctest::Approx(0.25 * 0.75 * 0.5 / 16.0));
    CHECK_THROWS_AS(central_moment(6, 10, 0.5), DomainError);
    CHECK_THROWS_AS(central_moment(1, 10, 0.5), DomainError);
}

TEST_CASE("taylor lower bound, 1 < alpha < 2") {
    // Never negative after clamping.
    for (double a : {1.1, 1.5, 1.9})
        for (double x : {0.01, 0.3, 0.8})
            for (long long n : {2LL, 20LL}) CHECK(taylor_lower_alpha_high(a, n, x) >= 0.0);

    // Bounded by the exact Bernstein error of -x^alpha.
    for (double a : {1.25, 1.6}) {
        auto neg_pow = Functional::custom([a](double x) { return -std::pow(x, a); });
        for (long long n : {20LL, 50LL}) {
            for (double x : {0.2, 0.5, 0.8}) {
                const double exact = -std::pow(x, a) - apply(neg_pow, n, x);
                CHECK(exact >= 0.0);
                CHECK(taylor_lower_alpha_high(a, n, x) <= exact + 1e-12);
            }
        }
    }

    // As alpha -> 2 the corrections vanish and the leading term remains.
    const double a = 2.0 - 1e-9;
    const double x = 0.3;
    const long long n = 10;
    const double lead = a * (a - 1.0) * std::pow(x, a - 1.0) * (1.0 - x) / (2.0 * n);
    CHECK(taylor_lower_alpha_high(a, n, x) == doctest::Approx(lead).epsilon(1e-6));

    CHECK_THROWS_AS(taylor_lower_alpha_high(2.5, 10, 0.5), DomainError);
    CHECK_THROWS_AS(taylor_lower_alpha_high(1.5, 10, 0.0), DomainError);
}

TEST_CASE("taylor lower bound, 0 < alpha < 1") {
    CHECK(taylor_lower_alpha_low(0.5, 10, 0.5) ==
          doctest::Approx(0.0125 * std::pow(0.5, -1.5) * 0.5 * 0.45).epsilon(1e-13));
    CHECK(taylor_lower_alpha_low(0.5, 10, 0.5) == doctest::Approx(0.0079550).epsilon(1e-5));

    // Clamped to zero at and below x = (2 - alpha)/(3n).
    CHECK(taylor_lower_alpha_low(0.5, 10, 0.05) == 0.0);
    CHECK(taylor_lower_alpha_low(0.5, 10, 0.01) == 0.0);

    // Below the exact per-symbol bias magnitude for x >= 1/n.
    for (double a : {0.3, 0.5, 0.7}) {
        for (long long n : {10LL, 40LL}) {
            for (double x = 1.0 / static_cast<double>(n); x < 1.0; x += 0.13) {
                const double exact = std::pow(x, a) - apply(Functional::power(a), n, x);
                CHECK(taylor_lower_alpha_low(a, n, x) <= exact + 1e-12);
            }
        }
    }

    CHECK_THROWS_AS(taylor_lower_alpha_low(1.5, 10, 0.5), DomainError);
}

TEST_CASE("taylor lower bound for the entropy integrand") {
    const double expected = 0.75 / 120.0 + 1.0 / (20.0 * 3600.0 * 0.25) - 0.25 / (12.0 * 3600.0);
    CHECK(taylor_lower_entropy(60, 0.25) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(taylor_lower_entropy(60, 0.25) == doctest::Approx(0.0062998).epsilon(1e-4));

    CHECK_THROWS_AS(taylor_lower_entropy(60, 0.2), OutOfValidityRange);
    CHECK_THROWS_AS(taylor_lower_entropy(60, 1.1), OutOfValidityRange);

    const long long n = 1000;
    for (double x : {0.02, 0.25, 0.5, 0.9}) {
        const double exact = -x * std::log(x) - apply(Functional::entropy(), n, x);
        CHECK(taylor_lower_entropy(n, x) <= exact + 1e-12);
    }
}

TEST_CASE("entropy bias expansions") {
    CHECK(asymptotic_bias_entropy(uniform(4), 100, 1) == doctest::Approx(-0.015));
    CHECK(asymptotic_bias_entropy(uniform(4), 100, 2) ==
          doctest::Approx(-0.015 + (1.0 - 16.0) / 120000.0).epsilon(1e-14));
    CHECK(asymptotic_bias_entropy(uniform(1), 50, 1) == 0.0);
    CHECK(asymptotic_bias_entropy(uniform(1), 50, 2) == 0.0);
    CHECK_THROWS_AS(asymptotic_bias_entropy(capped_uniform(3, 2), 10, 2), DomainError);
    CHECK_THROWS_AS(asymptotic_bias_entropy(uniform(4), 100, 3), DomainError);
}

TEST_SUITE_END();
