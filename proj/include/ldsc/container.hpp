#pragma once

// Serialized compressed object and the query ledger that measures locality.
// The byte layout is documented in docs/format.md.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ldsc/f2linalg.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc {

enum class Mode : std::uint8_t { lossless = 0, lossy = 1 };

inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 42;
inline constexpr std::uint32_t kMaxLossyBlockLen = 16;

struct ContainerHeader {
    Mode mode = Mode::lossless;
    std::uint64_t n = 0;
    std::uint32_t block_len = 1;
    std::uint32_t code_bits = 1;
    Rational p{1, 2};
    std::uint32_t partial_len = 0;
    /// Lossy only: 2^code_bits codewords of block_len coordinates each.
    std::vector<f2::BitVector> codebook;
    /// Lossy only: exact expected distortion, fixed point with 32 fractional bits.
    std::uint64_t distortion_fixed = 0;

    [[nodiscard]] std::uint64_t full_blocks() const { return n / block_len; }
    [[nodiscard]] std::uint64_t payload_bits() const { return full_blocks() * code_bits + partial_len; }
    [[nodiscard]] double distortion() const;
    [[nodiscard]] static std::uint64_t to_fixed(double distortion);

    friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

/// Counts compressed payload bits read per decode call.
class QueryLedger {
public:
    /// Strict ledgers additionally charge the serialized header to every call.
    explicit QueryLedger(bool strict = false) : strict_(strict) {}

    void begin_call();
    void record(std::uint64_t bits);
    /// Closes the current call and returns its count.
    std::uint64_t end_call();

    [[nodiscard]] bool strict() const noexcept { return strict_; }
    [[nodiscard]] std::uint64_t current() const noexcept { return current_; }
    [[nodiscard]] std::uint64_t max() const noexcept { return max_; }
    [[nodiscard]] std::uint64_t calls() const noexcept { return calls_; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    /// reads-per-call → number of calls
    [[nodiscard]] const std::map<std::uint64_t, std::uint64_t>& histogram() const noexcept { return histogram_; }

    /// Sums histograms and maxes maxima; commutative and associative.
    void merge(const QueryLedger& other);

private:
    bool strict_;
    bool open_ = false;
    std::uint64_t current_ = 0;
    std::uint64_t max_ = 0;
    std::uint64_t calls_ = 0;
    std::uint64_t total_ = 0;
    std::map<std::uint64_t, std::uint64_t> histogram_;
};

class CompressedContainer {
public:
    /// Validates the header and that the payload length matches it exactly.
    CompressedContainer(ContainerHeader header, f2::BitVector payload);

    [[nodiscard]] const ContainerHeader& header() const noexcept { return header_; }
    [[nodiscard]] std::uint64_t payload_bits() const noexcept { return payload_.size(); }
    [[nodiscard]] std::uint64_t header_bits() const;

    /// The only access path to payload bits; charges `len` to the ledger's open call.
    [[nodiscard]] f2::BitVector read_bits(std::uint64_t offset, std::uint64_t len, QueryLedger& ledger) const;

    friend std::vector<std::uint8_t> serialize(const CompressedContainer& c);
    friend bool operator==(const CompressedContainer&, const CompressedContainer&) = default;

private:
    ContainerHeader header_;
    f2::BitVector payload_;
};

[[nodiscard]] std::vector<std::uint8_t> serialize(const CompressedContainer& c);
[[nodiscard]] CompressedContainer deserialize(std::span<const std::uint8_t> bytes);

/// Bits packed MSB-first within bytes, last byte zero-padded.
[[nodiscard]] std::vector<std::uint8_t> pack_bits(const f2::BitVector& bits);
/// Inverse of pack_bits for the first `bit_count` bits.
[[nodiscard]] f2::BitVector unpack_bits(std::span<const std::uint8_t> bytes, std::uint64_t bit_count);

}  // namespace ldsc
