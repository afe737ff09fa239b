#include "ldsc/enumerative.hpp"

#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ldsc/errors.hpp"

namespace ldsc {

struct TopSetCode::Tables {
    std::vector<mpz_class> class_size;    // C(b, w)
    std::vector<mpz_class> class_offset;  // first rank of weight class w
    mpz_class covered;                    // 2^k_b
    double coverage = 0.0;
    double uncovered = 0.0;
};

namespace {

mpz_class to_mpz(const f2::BitVector& bits) {
    mpz_class z;
    const auto& words = bits.words();
    if (!words.empty()) mpz_import(z.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0, words.data());
    return z;
}

f2::BitVector to_bits(const mpz_class& z, std::size_t length) {
    f2::BitVector out(length);
    const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
    for (std::size_t i = 0; i < bits && i < length; ++i) {
        if (mpz_tstbit(z.get_mpz_t(), i)) out.set(i, true);
    }
    return out;
}

// count · p^w · q^(b−w), evaluated in the log domain so huge counts and tiny
// probabilities do not overflow.
double class_mass(const mpz_class& count, std::uint32_t w, std::uint32_t b, double log_p, double log_q) {
    if (count == 0) return 0.0;
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, count.get_mpz_t());
    const double log_mass = std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2 +
                            static_cast<double>(w) * log_p + static_cast<double>(b - w) * log_q;
    return std::exp(log_mass);
}

}  // namespace

TopSetCode::TopSetCode(std::uint32_t block_len, std::uint32_t code_bits, const SourceModel& model)
    : block_len_(block_len), code_bits_(code_bits), model_(model) {
    if (block_len == 0) throw DomainError("TopSetCode: block length must be positive");
    if (block_len > kMaxTopSetBlockLen) {
        throw CapacityError("TopSetCode: block length " + std::to_string(block_len) + " exceeds " +
                            std::to_string(kMaxTopSetBlockLen));
    }
    if (code_bits > block_len) throw DomainError("TopSetCode: code bits exceed block length");

    auto tables = std::make_shared<Tables>();
    const std::uint32_t b = block_len;
    tables->class_size.resize(b + 1);
    tables->class_offset.resize(b + 1);
    tables->class_size[0] = 1;
    for (std::uint32_t w = 0; w < b; ++w) {
        tables->class_size[w + 1] = tables->class_size[w] * (b - w);
        mpz_divexact_ui(tables->class_size[w + 1].get_mpz_t(), tables->class_size[w + 1].get_mpz_t(), w + 1);
    }

    mpz_class running = 0;
    for (std::uint32_t step = 0; step <= b; ++step) {
        const std::uint32_t w = weight_ascending() ? step : b - step;
        tables->class_offset[w] = running;
        running += tables->class_size[w];
    }
    mpz_ui_pow_ui(tables->covered.get_mpz_t(), 2, code_bits);

    const double log_p = std::log(model.p());
    const double log_q = std::log(model.q());
    for (std::uint32_t w = 0; w <= b; ++w) {
        const mpz_class& offset = tables->class_offset[w];
        const mpz_class& size = tables->class_size[w];
        mpz_class inside = 0;
        if (offset < tables->covered) {
            inside = tables->covered - offset;
            if (inside > size) inside = size;
        }
        const mpz_class outside = size - inside;
        tables->coverage += class_mass(inside, w, b, log_p, log_q);
        tables->uncovered += class_mass(outside, w, b, log_p, log_q);
    }
    if (code_bits == block_len) {
        tables->coverage = 1.0;
        tables->uncovered = 0.0;
    }
    tables_ = std::move(tables);
}

std::optional<f2::BitVector> TopSetCode::rank(const f2::BitVector& x) const {
    if (x.size() != block_len_) throw DomainError("TopSetCode::rank: block length mismatch");
    const auto w = static_cast<std::uint32_t>(x.weight());
    if (tables_->class_offset[w] >= tables_->covered) return std::nullopt;

    // Colex rank within the weight class: Σ C(c_i, i) over set positions
    // c_1 < … < c_w. Walk positions downward keeping binom = C(c, i).
    mpz_class within = 0;
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), block_len_ - 1, w);
    std::uint32_t i = w;
    for (std::uint32_t c = block_len_ - 1; i > 0; --c) {
        if (x.get(c)) {
            within += binom;
            if (i == 1) break;
            binom *= i;
            mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), c);
            --i;
        } else if (c > i) {
            binom *= c - i;
            mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), c);
        } else {
            binom = 0;
        }
    }
    mpz_class index = tables_->class_offset[w] + within;
    if (index >= tables_->covered) return std::nullopt;
    return to_bits(index, code_bits_);
}

f2::BitVector TopSetCode::unrank(const f2::BitVector& index_bits) const {
    if (index_bits.size() != code_bits_) throw DomainError("TopSetCode::unrank: index width mismatch");
    const mpz_class index = to_mpz(index_bits);
    if (index >= tables_->covered) throw DomainError("TopSetCode::unrank: index outside the covered set");

    const std::uint32_t b = block_len_;
    std::uint32_t w = 0;
    for (std::uint32_t step = 0; step <= b; ++step) {
        w = weight_ascending() ? step : b - step;
        if (index < tables_->class_offset[w] + tables_->class_size[w]) break;
    }
    mpz_class within = index - tables_->class_offset[w];

    f2::BitVector x(b);
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), b - 1, w);
    std::uint32_t i = w;
    for (std::uint32_t c = b - 1; i > 0; --c) {
        if (binom <= within) {
            x.set(c, true);
            within -= binom;
            if (i == 1) break;
            binom *= i;
            mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), c);
            --i;
        } else if (c > i) {
            binom *= c - i;
            mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), c);
        } else {
            binom = 0;
        }
    }
    return x;
}

std::optional<std::uint64_t> TopSetCode::rank_value(const f2::BitVector& x) const {
    if (code_bits_ > 64) throw CapacityError("TopSetCode::rank_value: index wider than 64 bits");
    auto r = rank(x);
    if (!r) return std::nullopt;
    return r->to_uint();
}

f2::BitVector TopSetCode::unrank_value(std::uint64_t index) const {
    if (code_bits_ > 64) throw CapacityError("TopSetCode::unrank_value: index wider than 64 bits");
    if (code_bits_ < 64 && index >= (std::uint64_t{1} << code_bits_)) {
        throw DomainError("TopSetCode::unrank: index outside the covered set");
    }
    return unrank(f2::BitVector::from_uint(index, code_bits_));
}

double TopSetCode::coverage_probability() const { return tables_->coverage; }

double TopSetCode::block_error() const { return tables_->uncovered; }

}  // namespace ldsc
