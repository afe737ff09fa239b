#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ldsc/converse.hpp"
#include "ldsc/errors.hpp"
#include "oracles.hpp"

using namespace ldsc;
using namespace ldsc::converse;
using f2::BitMatrix;
using f2::BitVector;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::vector<BitVector> rs;
    for (std::size_t r = 0; r < rows; ++r) {
        BitVector v(cols);
        for (std::size_t c = 0; c < cols; ++c) v.set(c, rng() & 1U);
        rs.push_back(v);
    }
    return BitMatrix::from_rows(rs);
}

// 1 − Σ_y max_x P(x)·1{f(x) = y}: the best any (non-local) decoder can do.
double block_map_error(const EncoderTable& enc, double p) {
    std::map<std::uint32_t, double> best;
    for (std::uint32_t x = 0; x < enc.image.size(); ++x) {
        auto& slot = best[enc.image[x]];
        slot = std::max(slot, oracle::block_prob(x, static_cast<int>(enc.n), p));
    }
    double s = 0.0;
    for (const auto& [y, m] : best) s += m;
    return 1.0 - s;
}

std::vector<std::vector<std::uint32_t>> all_bits(std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> every;
    for (std::uint32_t j = 0; j < k; ++j) every.push_back(j);
    return std::vector<std::vector<std::uint32_t>>(n, every);
}

}  // namespace

TEST_CASE("identity scheme has zero error") {
    const auto enc = encoder_from_matrix(BitMatrix::identity(4));
    CHECK(enc.image[0b1010] == 0b1010U);
    const auto dec = optimal_local_decoder(enc, {{0}, {1}, {2}, {3}}, SourceModel(0.3));
    CHECK(dec.locality() == 1);
    CHECK_NOTHROW(dec.validate(1));
    for (std::uint32_t a = 0; a < 4; ++a) {
        CHECK(dec.tables[a] == std::vector<std::uint8_t>{0, 1});
    }
    CHECK(exact_block_error(enc, dec, SourceModel(0.3)) == 0.0);
}

TEST_CASE("encoder table is x·G") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t k = 1 + rng() % 8;
        const auto g = random_matrix(rng, n, k);
        const auto enc = encoder_from_matrix(g);
        REQUIRE(enc.image.size() == (std::size_t{1} << n));
        for (std::uint32_t x = 0; x < enc.image.size(); ++x) {
            CHECK(enc.image[x] == g.left_multiply(BitVector::from_uint(x, n)).to_uint());
        }
    }
}

TEST_CASE("decoder spec validation") {
    LocalDecoderSpec dec;
    dec.n = 1;
    dec.k = 3;
    dec.neighborhoods = {{0, 1, 2}};
    dec.tables = {std::vector<std::uint8_t>(8, 0)};
    CHECK_NOTHROW(dec.validate(3));
    CHECK_THROWS_AS(dec.validate(2), DomainError);
    dec.neighborhoods = {{0, 5}};
    CHECK_THROWS_AS(dec.validate(3), DomainError);
}

TEST_CASE("MAP decoder never beats the block-MAP error") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t n = 2 + rng() % 7;
        const std::uint32_t k = 1 + rng() % n;
        const auto g = random_matrix(rng, n, k);
        const auto enc = encoder_from_matrix(g);
        for (double p : {0.3, 0.5}) {
            const SourceModel m(p);
            const auto dec = optimal_local_decoder(enc, all_bits(n, k), m);
            const double err = exact_block_error(enc, dec, m);
            CHECK(err >= block_map_error(enc, p) - 1e-12);
            if (f2::rank(g) == n) CHECK(err == doctest::Approx(block_map_error(enc, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("per-symbol MAP can lose to block MAP") {
    // Parity of three symbols at p = 0.3: y = 1 is best explained by 100,
    // but each symbol alone still prefers 0.
    const auto enc = encoder_from_matrix(BitMatrix::from_rows(std::vector<std::string>{"1", "1", "1"}));
    const SourceModel m(0.3);
    const auto dec = optimal_local_decoder(enc, all_bits(3, 1), m);
    CHECK(dec.tables[0][1] == 0);
    CHECK(exact_block_error(enc, dec, m) > block_map_error(enc, 0.3) + 0.1);
}

TEST_CASE("symbol errors lower-bound the block error") {
    std::mt19937_64 rng(8);
    const SourceModel m(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t n = 3 + rng() % 5;
        const auto enc = encoder_from_matrix(random_matrix(rng, n, n - 1));
        std::vector<std::vector<std::uint32_t>> nb(n);
        for (auto& na : nb) na = {static_cast<std::uint32_t>(rng() % (n - 1))};
        const auto dec = optimal_local_decoder(enc, nb, m);
        const auto per = exact_symbol_errors(enc, dec, m);
        const double block = exact_block_error(enc, dec, m);
        for (double e : per) CHECK(block >= e - 1e-15);
    }
}

TEST_CASE("exhaustive two-local search") {
    const SourceModel half(Rational{1, 2});
    const SourceModel p3(Rational{3, 10});
    CHECK(best_2local_success(2, 1, half) == 0.5);
    CHECK(best_2local_success(2, 1, p3) == doctest::Approx(0.70).epsilon(1e-12));
    const auto r = search_local_schemes(3, 2, p3, 2, 4);
    CHECK(r.holds());
    CHECK(r.best_success <= 1 - 0.09 + 1e-12);
    CHECK(r.encoders_total == 65536);
    CHECK(r.encoders_searched < r.encoders_total);
    CHECK(r.witness.size() == 8);
    // serial and parallel runs agree
    CHECK(search_local_schemes(3, 2, p3, 2, 1).best_success == r.best_success);
    // the (3, 2) half case cannot beat two free coordinates
    CHECK(best_2local_success(3, 2, half) <= 0.75);
    CHECK_THROWS_AS((void)search_local_schemes(4, 2, half), CapacityError);
}

TEST_CASE("linear decoders recover only a span") {
    const SourceModel m(0.3);
    CHECK(linear_decoder_error({BitVector::from_string("100")}, m) == doctest::Approx(0.51).epsilon(1e-12));
    const auto check = check_linear_decoder({BitVector::from_string("100")}, m);
    CHECK(check.bound == doctest::Approx(0.51).epsilon(1e-12));
    CHECK(check.holds());
    CHECK(linear_decoder_error({BitVector::from_string("10"), BitVector::from_string("01")}, m) ==
          doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<BitVector> imgs;
        for (int j = 0; j < 5; ++j) {
            BitVector v(10);
            for (std::size_t i = 0; i < 10; ++i) v.set(i, rng() & 1U);
            imgs.push_back(v);
        }
        const auto c = check_linear_decoder(imgs, m);
        CHECK(c.error >= 1 - std::pow(0.7, 5) - 1e-12);
        CHECK(c.k_lower_bound <= 5 + 1e-9);
    }
}

TEST_CASE("subspace sandwich holds exhaustively") {
    const auto report = verify_subspace_bounds(4, {0.1, 0.3, 0.5});
    CHECK(report.subspaces == 91);
    CHECK(report.checks == 273);
    CHECK(report.violations == 0);
    CHECK(report.min_upper_slack >= -1e-12);
    CHECK(report.min_lower_slack >= -1e-12);
    CHECK(report.min_upper_slack == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("randomized suites are reproducible and never fail") {
    for (double p : {0.3, 0.5}) {
        const SourceModel m(p);
        const auto a = linear_encoder_suite(7, 200, m, NeighborhoodKind::random);
        const auto b = linear_encoder_suite(7, 200, m, NeighborhoodKind::random);
        CHECK(a.failures == 0);
        CHECK(a.min_margin == b.min_margin);
        CHECK(a.bound == doctest::Approx(std::min(p, 1 - p) * std::min(p, 1 - p)));
        CHECK(linear_encoder_suite(7, 200, m, NeighborhoodKind::leading).failures == 0);
        CHECK(linear_decoder_suite(7, 200, m).failures == 0);
    }
}
