#include <doctest.h>

#include <cmath>

#include "ldsc/errors.hpp"
#include "ldsc/source_stats.hpp"
#include "oracles.hpp"

using namespace ldsc;
using doctest::Approx;

TEST_CASE("rationals parse, reduce and approximate") {
    CHECK(Rational::parse("11/100") == Rational{11, 100});
    CHECK(Rational::parse("6/8") == Rational{3, 4});
    CHECK(Rational::parse("1") == Rational{1, 1});
    CHECK_THROWS_AS(Rational::parse("1/0"), DomainError);
    CHECK_THROWS_AS(Rational::parse("x/3"), DomainError);
    CHECK(Rational::approximate(0.11) == Rational{11, 100});
    CHECK(Rational::approximate(0.3) == Rational{3, 10});
    CHECK(Rational{11, 100}.to_string() == "11/100");
}

TEST_CASE("source model rejects degenerate p") {
    CHECK_THROWS_AS(SourceModel(Rational{0, 1}), DomainError);
    CHECK_THROWS_AS(SourceModel(Rational{1, 1}), DomainError);
    const SourceModel m(Rational{3, 10});
    CHECK(m.p() == Approx(0.3));
    CHECK_FALSE(m.most_probable_symbol());
    CHECK(SourceModel(0.7).most_probable_symbol());
    CHECK(m.sequence_probability(1, 3) == Approx(0.3 * 0.49));
}

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) == Approx(0.49993).epsilon(1e-4));
    for (double q = 0.01; q < 1.0; q += 0.01) CHECK(binary_entropy(q) == Approx(oracle::h2(q)).epsilon(1e-13));
}

TEST_CASE("KL divergence") {
    CHECK(kl_divergence(0.3, 0.3) == Approx(0.0).epsilon(1e-15));
    CHECK(kl_divergence(0.0, 0.5) == Approx(1.0));
    CHECK(std::abs(kl_divergence(0.1461, 0.11) - 0.0088) <= 5e-4);
    for (double q = 0.0; q <= 1.0; q += 0.05) {
        CHECK(kl_divergence(q, 0.11) == Approx(oracle::kl(q, 0.11)).epsilon(1e-12));
        CHECK(kl_divergence(q, 0.11) >= 0.0);
    }
}

TEST_CASE("error exponent") {
    const SourceModel m(Rational{11, 100});
    CHECK(error_exponent(m.entropy(), m) == Approx(0.0).epsilon(1e-12));
    CHECK(error_exponent(0.3, m) == 0.0);
    CHECK(std::abs(error_exponent(0.6, m) - 0.0088) <= 5e-4);
    CHECK(error_exponent_minimizer(0.6, m) == Approx(0.1461).epsilon(1e-3));
    // At r = 1 the constraint forces q* = 1/2: D(0.5 || 0.11) = 0.6763.
    CHECK(error_exponent(1.0, m) == Approx(oracle::kl(0.5, 0.11)).epsilon(1e-7));
    CHECK(std::abs(error_exponent(1.0, m) - 0.6763) <= 1e-3);
}

TEST_CASE("error exponent agrees with grid minimization") {
    for (double p : {0.11, 0.3, 0.89}) {
        const SourceModel m(p);
        for (int i = 0; i <= 10; ++i) {
            const double r = 0.5 + 0.05 * i;
            CHECK(error_exponent(r, m) == Approx(oracle::error_exponent_grid(r, m.p())).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("error exponent is symmetric under p -> 1-p and increasing in r") {
    const SourceModel lo(Rational{11, 100});
    const SourceModel hi(Rational{89, 100});
    double prev = 0.0;
    for (double r = 0.5; r <= 1.0; r += 0.01) {
        CHECK(error_exponent(r, lo) == Approx(error_exponent(r, hi)).epsilon(1e-10));
        const double e = error_exponent(r, lo);
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_CASE("rate distortion") {
    const SourceModel half(Rational{1, 2});
    CHECK(rate_distortion(half, 0.25) == Approx(1.0 - 0.8113).epsilon(1e-4));
    CHECK(rate_distortion(half, 0.5) == 0.0);
    const SourceModel m(Rational{11, 100});
    CHECK(rate_distortion(m, 0.0) == Approx(m.entropy()));
    CHECK(rate_distortion(m, 0.2) == 0.0);
}

TEST_CASE("local lossy rate bound") {
    const SourceModel half(Rational{1, 2});
    CHECK(ldlsc_rate_bound(half, 0.25, 3) == Approx(1.245).epsilon(1e-3));
    const SourceModel m(Rational{11, 100});
    CHECK(ldlsc_rate_bound(m, 0.05, 16) == Approx(0.7135).epsilon(1e-3));
    CHECK(ldlsc_rate_bound(m, 0.05, 1e9) == Approx(rate_distortion(m, 0.05)).epsilon(1e-6));
    CHECK_THROWS_AS((void)ldlsc_rate_bound(m, 0.0, 4), DomainError);
    CHECK_THROWS_AS((void)ldlsc_rate_bound(m, 0.2, 4), DomainError);
}

TEST_CASE("succinct structure rate") {
    const SourceModel m(Rational{11, 100});
    CHECK(succinct_rate_bound(m, 65536, 1) == Approx(0.6252).epsilon(1e-3));
    const SourceModel half(Rational{1, 2});
    CHECK(succinct_rate_bound(half, std::ldexp(1.0, 20), 1) == Approx(1.0812).epsilon(1e-3));
    CHECK(succinct_rate_bound(m, std::ldexp(1.0, 60), 1) == Approx(m.entropy()).epsilon(2e-2));
}

TEST_CASE("bound comparison at a fixed distortion") {
    const SourceModel m(Rational{11, 100});
    const auto rows = compare_bounds(m, 0.05, 1, {65536.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].our_bound == Approx(0.4635).epsilon(1e-3));
    CHECK(rows[0].succinct_bound == Approx(0.6252).epsilon(1e-3));
    CHECK(rows[0].tighter == Tighter::ours);
    CHECK(rows[0].locality == 16.0);
    CHECK(to_string(rows[0].tighter) == "ours");

    const auto edge = compare_bounds(m, 0.0, 1, {65536.0});
    CHECK(edge[0].skipped);
    CHECK_FALSE(edge[0].note.empty());
}

TEST_CASE("vanishing distortion flips the comparison at large n") {
    const SourceModel m(Rational{11, 100});
    std::vector<double> ns;
    for (int e = 8; e <= 24; ++e) ns.push_back(std::ldexp(1.0, e));
    const auto rows = compare_bounds_vanishing_distortion(m, 1, ns);
    REQUIRE(rows.size() == ns.size());
    std::size_t flip = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].distortion == Approx(1.0 / (std::exp(1.0) * std::log2(ns[i]))));
        if (flip == rows.size() && rows[i].tighter == Tighter::theirs) flip = i;
    }
    REQUIRE(flip < rows.size());
    for (std::size_t i = flip; i < rows.size(); ++i) CHECK(rows[i].tighter == Tighter::theirs);
    MESSAGE("crossover n = 2^" << 8 + flip);
}
