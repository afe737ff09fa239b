#pragma once

// Lossy locally decodable compression with per-block covering codebooks under
// Hamming distortion. Blocks are at most 16 symbols so every expectation is an
// exact sum over all 2^b source blocks.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldsc/container.hpp"
#include "ldsc/f2linalg.hpp"
#include "ldsc/lossless.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc {

enum class CodebookMethod { greedy, exhaustive };

/// Ordered list of distinct length-b codewords (packed, coordinate 1 = bit 0).
/// Index order is the encoding order; nearest-codeword ties go to the lower index.
class LossyCodebook {
public:
    LossyCodebook(std::uint32_t block_len, std::vector<std::uint32_t> codewords, const SourceModel& model);

    [[nodiscard]] std::uint32_t block_len() const noexcept { return block_len_; }
    [[nodiscard]] std::uint32_t code_bits() const noexcept { return code_bits_; }
    [[nodiscard]] std::size_t size() const noexcept { return codewords_.size(); }
    [[nodiscard]] const std::vector<std::uint32_t>& codewords() const noexcept { return codewords_; }
    [[nodiscard]] f2::BitVector codeword(std::size_t index) const;
    [[nodiscard]] const SourceModel& model() const noexcept { return model_; }

    /// Index of the nearest codeword to a packed block.
    [[nodiscard]] std::uint32_t nearest(std::uint32_t block) const { return nearest_[block]; }
    /// Hamming distance from a packed block to its nearest codeword.
    [[nodiscard]] std::uint32_t distance(std::uint32_t block) const { return distance_[block]; }

private:
    std::uint32_t block_len_;
    std::uint32_t code_bits_;
    std::vector<std::uint32_t> codewords_;
    SourceModel model_;
    std::vector<std::uint32_t> nearest_;
    std::vector<std::uint8_t> distance_;
};

/// Greedy: start at the most probable block, then repeatedly add the codeword
/// with the largest exact drop in expected distortion (ties: smallest value).
/// Exhaustive: best subset of size 2^k_b, only for b ≤ 4 and 2^k_b ≤ 4.
[[nodiscard]] LossyCodebook build_codebook(std::uint32_t block_len, std::uint32_t code_bits, const SourceModel& model,
                                           CodebookMethod method = CodebookMethod::greedy);

/// E[min_c H(X^b ⊕ c)] / b.
[[nodiscard]] double expected_distortion(const LossyCodebook& codebook);

/// Runs the greedy construction one codeword at a time so callers can read the
/// distortion of every prefix; the first 2^k codewords are build_codebook(b, k).
class GreedyCodebookBuilder {
public:
    GreedyCodebookBuilder(std::uint32_t block_len, const SourceModel& model);

    /// Adds one codeword and returns it. Throws CapacityError once all 2^b words are used.
    std::uint32_t add_next();
    /// Grows the codebook to `count` codewords.
    void grow_to(std::size_t count);

    [[nodiscard]] std::size_t size() const noexcept { return codewords_.size(); }
    [[nodiscard]] const std::vector<std::uint32_t>& codewords() const noexcept { return codewords_; }
    /// Exact expected per-symbol distortion of the current codewords.
    [[nodiscard]] double distortion() const;

private:
    void recompute_gains();
    void apply_incremental(const std::vector<std::uint32_t>& changed, const std::vector<std::uint8_t>& new_dist);

    std::uint32_t b_;
    std::uint32_t size_;  // 2^b
    SourceModel model_;
    std::vector<double> prob_;
    std::vector<std::int64_t> prob_fixed_;
    std::vector<std::uint8_t> dist_;
    std::vector<std::int64_t> gain_;
    std::vector<bool> used_;
    std::vector<std::uint32_t> codewords_;
    std::vector<std::vector<std::uint32_t>> masks_by_weight_;
    std::vector<std::vector<std::int64_t>> krawtchouk_;  // [r][weight]
};

struct LossyPlan {
    std::uint64_t n = 0;
    std::uint32_t block_len = 1;
    std::uint32_t code_bits = 0;
    SourceModel model{Rational{1, 2}};
    double d_target = 0.0;
    double d_achieved = 0.0;  // exact per-block expected distortion
    std::vector<std::uint32_t> codewords;

    [[nodiscard]] double rate() const { return static_cast<double>(code_bits) / block_len; }
    [[nodiscard]] std::uint32_t locality() const { return code_bits; }
    [[nodiscard]] std::uint64_t full_blocks() const { return n / block_len; }
    [[nodiscard]] std::uint32_t partial_len() const { return static_cast<std::uint32_t>(n % block_len); }
    [[nodiscard]] LossyCodebook codebook() const { return LossyCodebook(block_len, codewords, model); }
};

/// Largest b ≤ min(16, n) for which a greedy codebook with k_b ≤ t bits meets
/// distortion d, at the smallest such k_b. d ≥ min{p, 1−p} yields the rate-0
/// plan that reproduces the most probable symbol everywhere.
[[nodiscard]] LossyPlan plan_lossy(std::uint64_t n, double d, std::uint32_t t, const SourceModel& model);

/// Plan at a fixed block length: smallest k_b ≤ max_code_bits meeting d.
/// Throws PlanningError if none does.
[[nodiscard]] LossyPlan plan_lossy_at(std::uint64_t n, std::uint32_t block_len, double d, std::uint32_t max_code_bits,
                                      const SourceModel& model);

/// End-to-end expected distortion over all n symbols (raw partial symbols are exact).
[[nodiscard]] double expected_distortion(const LossyPlan& plan);

/// Nearest-codeword encoding per block; the trailing n mod b symbols are stored raw.
[[nodiscard]] CompressedContainer compress_lossy(const f2::BitVector& x, const LossyPlan& plan, unsigned workers = 1);

class LossyDecoder {
public:
    explicit LossyDecoder(const CompressedContainer& container);

    [[nodiscard]] DecodeResult decode_symbol(std::uint64_t i, QueryLedger& ledger) const;
    [[nodiscard]] DecodeResult decode_symbol(std::uint64_t i) const;
    [[nodiscard]] f2::BitVector decompress_all(QueryLedger& ledger) const;
    [[nodiscard]] f2::BitVector decompress_all() const;

private:
    const CompressedContainer& container_;
};

[[nodiscard]] DecodeResult decode_symbol_lossy(const CompressedContainer& c, std::uint64_t i, QueryLedger& ledger);

}  // namespace ldsc
