#pragma once

// Almost-lossless locally decodable compression: the source is cut into
// length-b blocks, each block is replaced by its k_b-bit TopSetCode index, and
// the trailing n mod b symbols are stored raw. Decoding one symbol reads only
// its own block's k_b payload bits.

#include <cstddef>
#include <cstdint>

#include "ldsc/container.hpp"
#include "ldsc/enumerative.hpp"
#include "ldsc/f2linalg.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc {

struct LosslessPlan {
    std::uint64_t n = 0;
    std::uint32_t block_len = 1;
    std::uint32_t code_bits = 1;
    SourceModel model{Rational{1, 2}};
    double target_rate = 1.0;      // r requested from the planner
    double epsilon_target = 0.0;   // block error budget; 0 when built by hand
    std::uint32_t search_start = 1;

    [[nodiscard]] double rate() const { return static_cast<double>(code_bits) / block_len; }
    /// Compressed bits read per decoded symbol of a full block.
    [[nodiscard]] std::uint32_t locality() const { return code_bits; }
    [[nodiscard]] std::uint64_t full_blocks() const { return n / block_len; }
    [[nodiscard]] std::uint32_t partial_len() const { return static_cast<std::uint32_t>(n % block_len); }
    [[nodiscard]] std::uint64_t payload_bits() const { return full_blocks() * code_bits + partial_len(); }
    /// b / log₂n, the constant in locality C·log n.
    [[nodiscard]] double implied_c() const;
};

/// Plan with explicit parameters. Throws DomainError on b = 0, k_b > b, or b over capacity.
[[nodiscard]] LosslessPlan make_lossless_plan(std::uint64_t n, std::uint32_t block_len, std::uint32_t code_bits,
                                              const SourceModel& model);

/// Smallest b ≥ min(⌈log₂n / E*_b(r)⌉, n) with k_b = ⌈b·r⌉ whose exact error is ≤ epsilon.
/// r ≥ 1 gives the uncompressed plan b = k_b = 1. Throws PlanningError when
/// r ≤ h(p) or when no b ≤ max_block_len meets the budget.
[[nodiscard]] LosslessPlan plan_lossless(std::uint64_t n, double r, double epsilon, const SourceModel& model,
                                         std::uint32_t max_block_len = kMaxTopSetBlockLen);

/// Per-block error ε_b of the plan's TopSetCode.
[[nodiscard]] double block_error(const LosslessPlan& plan);

/// 1 − (1 − ε_b)^⌊n/b⌋; the raw partial block never errs.
[[nodiscard]] double exact_error(const LosslessPlan& plan);

/// ⌈n/b⌉·ε_b, the union bound over blocks.
[[nodiscard]] double union_bound_error(const LosslessPlan& plan);

struct CompressStats {
    std::uint64_t uncovered_blocks = 0;
};

/// Blocks outside the covered set are written as index 0. `workers` > 1 splits
/// the blocks across threads; the output does not depend on it.
[[nodiscard]] CompressedContainer compress(const f2::BitVector& x, const LosslessPlan& plan,
                                           CompressStats* stats = nullptr, unsigned workers = 1);

struct DecodeResult {
    bool bit = false;
    std::uint64_t queries = 0;
};

/// Random-access decoder over a lossless container. Holds the rebuilt code so
/// repeated queries do not pay for table construction.
class LosslessDecoder {
public:
    explicit LosslessDecoder(const CompressedContainer& container);

    [[nodiscard]] DecodeResult decode_symbol(std::uint64_t i, QueryLedger& ledger) const;
    [[nodiscard]] DecodeResult decode_symbol(std::uint64_t i) const;
    /// Decodes every block once; the ledger sees a single call covering the payload.
    [[nodiscard]] f2::BitVector decompress_all(QueryLedger& ledger) const;
    [[nodiscard]] f2::BitVector decompress_all() const;

    [[nodiscard]] const TopSetCode& code() const noexcept { return code_; }

private:
    const CompressedContainer& container_;
    TopSetCode code_;
};

[[nodiscard]] DecodeResult decode_symbol(const CompressedContainer& c, std::uint64_t i, QueryLedger& ledger);
[[nodiscard]] f2::BitVector decompress_all(const CompressedContainer& c);

/// Reconstructs the source model stored in a container header.
[[nodiscard]] SourceModel model_of(const ContainerHeader& header);

}  // namespace ldsc
