#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

#include "ldsc/f2linalg.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc {

/// Largest block length a TopSetCode accepts.
inline constexpr std::uint32_t kMaxTopSetBlockLen = 4096;

/// Fixed-length code over length-b blocks that indexes the 2^k_b most probable
/// blocks. Blocks are ordered by weight (ascending for p ≤ ½, descending for
/// p > ½), then by integer value with coordinate 1 as the least significant bit;
/// the covered set is the first 2^k_b blocks of that order.
///
/// Indices are k_b-bit vectors whose coordinate j carries weight 2^j.
class TopSetCode {
public:
    TopSetCode(std::uint32_t block_len, std::uint32_t code_bits, const SourceModel& model);

    [[nodiscard]] std::uint32_t block_len() const noexcept { return block_len_; }
    [[nodiscard]] std::uint32_t code_bits() const noexcept { return code_bits_; }
    [[nodiscard]] const SourceModel& model() const noexcept { return model_; }
    [[nodiscard]] bool weight_ascending() const noexcept { return !model_.most_probable_symbol(); }

    /// Position of x in the order, or nullopt when x is outside the covered set.
    [[nodiscard]] std::optional<f2::BitVector> rank(const f2::BitVector& x) const;
    [[nodiscard]] f2::BitVector unrank(const f2::BitVector& index) const;

    /// Convenience forms for k_b ≤ 64.
    [[nodiscard]] std::optional<std::uint64_t> rank_value(const f2::BitVector& x) const;
    [[nodiscard]] f2::BitVector unrank_value(std::uint64_t index) const;

    /// P[X^b ∈ covered set].
    [[nodiscard]] double coverage_probability() const;
    /// P[X^b ∉ covered set], summed directly over the uncovered blocks so small
    /// values keep full relative precision.
    [[nodiscard]] double block_error() const;

private:
    struct Tables;

    std::uint32_t block_len_;
    std::uint32_t code_bits_;
    SourceModel model_;
    std::shared_ptr<const Tables> tables_;  // immutable, shared between copies
};

}  // namespace ldsc
