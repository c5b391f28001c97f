#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <pluginrisk/estimators.hpp>

#include "oracles.hpp"

using namespace pluginrisk;

TEST_SUITE_BEGIN("estimators");

TEST_CASE("plug_in basics") {
    CHECK(plug_in(Functional::entropy(), CountVector({1, 1})) == doctest::Approx(std::log(2.0)));
    CHECK(plug_in(Functional::power(0.5), CountVector({1, 1})) ==
          doctest::Approx(std::sqrt(2.0)));
    CHECK(plug_in(Functional::entropy(), CountVector({2, 0})) == 0.0);
}

TEST_CASE("plug_in equals its fingerprint form") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const int S = 2 + static_cast<int>(s % 49);
        auto d = make_distribution(oracle::random_probs(S, 900 + s));
        auto c = sample_counts(d, 1 + static_cast<long long>((s * 37) % 1000), s);
        auto h = fingerprint(c);
        for (const Functional& f :
             {Functional::entropy(), Functional::power(0.5), Functional::power(2.0)}) {
            double via_fingerprint = 0.0;
            for (std::size_t j = 1; j < h.size(); ++j)
                if (h[j] > 0)
                    via_fingerprint += static_cast<double>(h[j]) *
                                       f(static_cast<double>(j) / static_cast<double>(c.n()));
            CHECK(plug_in(f, c) == doctest::Approx(via_fingerprint).epsilon(1e-12));
        }
    }
}

TEST_CASE("plug_in entropy range and permutation symmetry") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto d = make_distribution(oracle::random_probs(8, 40 + s));
        auto c = sample_counts(d, 50, s);
        const double h = plug_in(Functional::entropy(), c);
        int observed = 0;
        for (long long x : c.counts()) observed += (x > 0);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(static_cast<double>(observed)) + 1e-12);

        auto perm = c.counts();
        std::reverse(perm.begin(), perm.end());
        CountVector pc(perm);
        CHECK(plug_in(Functional::entropy(), pc) == doctest::Approx(h).epsilon(1e-13));
        CHECK(miller_madow(pc, 8) == doctest::Approx(miller_madow(c, 8)).epsilon(1e-13));
    }
}

TEST_CASE("power-sum one-sidedness") {
    // sum (X_i/n)^a is >= 1 for a < 1 and <= 1 for a > 1, with equality only
    // when the empirical distribution is a point mass.
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto d = make_distribution(oracle::random_probs(6, 70 + s));
        auto c = sample_counts(d, 30, s);
        int observed = 0;
        for (long long x : c.counts()) observed += (x > 0);
        const double low = plug_in(Functional::power(0.5), c);
        const double high = plug_in(Functional::power(2.0), c);
        CHECK(low >= 1.0 - 1e-12);
        CHECK(high <= 1.0 + 1e-12);
        if (observed > 1) {
            CHECK(low > 1.0);
            CHECK(high < 1.0);
        }
    }
    CHECK(plug_in(Functional::power(0.5), CountVector({5, 0})) == doctest::Approx(1.0));
    CHECK(plug_in(Functional::power(2.0), CountVector({5, 0})) == doctest::Approx(1.0));
}

TEST_CASE("miller_madow") {
    CHECK(miller_madow(CountVector({1, 1}), 2) == doctest::Approx(std::log(2.0) + 0.25));
    CHECK(miller_madow(CountVector({7}), 1) == 0.0);
    // Correction vanishes as n grows.
    CHECK(miller_madow(CountVector({5000, 5000}), 2) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-4));
    CHECK_THROWS_AS(miller_madow(CountVector({1, 1}), 0), DomainError);

    // Observed-support mode is the labeled convenience variant.
    CHECK(miller_madow_observed(CountVector({3, 1, 0})) ==
          doctest::Approx(plug_in(Functional::entropy(), CountVector({3, 1, 0})) + 1.0 / 8.0));
}

TEST_CASE("apply_estimator dispatch") {
    CountVector c({2, 2});
    CHECK(apply_estimator(EstimatorSpec::plug_in(), Functional::power(2.0), c) ==
          doctest::Approx(0.5));
    CHECK(apply_estimator(EstimatorSpec::miller_madow(3), Functional::entropy(), c) ==
          doctest::Approx(std::log(2.0) + 2.0 / 8.0));
    CHECK_THROWS_AS(apply_estimator(EstimatorSpec::miller_madow(3), Functional::power(2.0), c),
                    DomainError);
}

TEST_SUITE_END();
