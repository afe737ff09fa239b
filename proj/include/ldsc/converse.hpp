#pragma once

// Exact small-instance checks of the impossibility results: subspace mass
// sandwich, MAP local decoders for linear encoders, span probability for
// linear decoders, and exhaustive 2-local search.

#include <cstdint>
#include <string>
#include <vector>

#include "ldsc/f2linalg.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc::converse {

constexpr std::uint32_t kMaxEnumeratedSymbols = 20;

/// Total encoder as a lookup table: entry x (coordinate a = bit a) is the
/// packed k-bit codeword.
struct EncoderTable {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::vector<std::uint32_t> image;
};

/// y = x·G for an n×k matrix G.
[[nodiscard]] EncoderTable encoder_from_matrix(const f2::BitMatrix& g);

struct LocalDecoderSpec {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    /// Coded-bit positions (0-based) read by each symbol's decoder.
    std::vector<std::vector<std::uint32_t>> neighborhoods;
    /// tables[a][pattern], pattern bit j = coded bit neighborhoods[a][j].
    std::vector<std::vector<std::uint8_t>> tables;

    [[nodiscard]] std::uint32_t locality() const;
    /// Throws DomainError on shape errors or |N_a| > t.
    void validate(std::uint32_t t) const;
    [[nodiscard]] bool decode(std::uint32_t a, std::uint32_t codeword) const;
};

[[nodiscard]] double exact_block_error(const EncoderTable& encoder, const LocalDecoderSpec& dec,
                                       const SourceModel& model);
/// P[X̂_a ≠ X_a] for every symbol a.
[[nodiscard]] std::vector<double> exact_symbol_errors(const EncoderTable& encoder, const LocalDecoderSpec& dec,
                                                      const SourceModel& model);

/// Per-symbol MAP tables: pattern ↦ argmax_bit P[X_a = bit, Y^{N_a} = pattern], ties to 0.
[[nodiscard]] LocalDecoderSpec optimal_local_decoder(const EncoderTable& encoder,
                                                     const std::vector<std::vector<std::uint32_t>>& neighborhoods,
                                                     const SourceModel& model);
[[nodiscard]] LocalDecoderSpec optimal_local_decoder(const f2::BitMatrix& g,
                                                     const std::vector<std::vector<std::uint32_t>>& neighborhoods,
                                                     const SourceModel& model);

struct TwoLocalSearch {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint32_t t = 2;
    double best_success = 0.0;
    double bound = 1.0;                 // 1 − min(p, 1−p)²
    std::uint64_t encoders_total = 0;   // 2^(k·2^n)
    std::uint64_t encoders_searched = 0;  // orbit representatives
    std::vector<std::uint32_t> witness;   // an optimal encoder table
    [[nodiscard]] bool holds() const { return k >= n || best_success <= bound + 1e-12; }
};

/// Maximum exact success over all encoders and all t-local decoders. Encoders
/// are reduced to one representative per orbit under permuting and
/// complementing coded bits. Requires k·2^n ≤ 16.
[[nodiscard]] TwoLocalSearch search_local_schemes(std::uint32_t n, std::uint32_t k, const SourceModel& model,
                                                  std::uint32_t t = 2, unsigned workers = 1);
[[nodiscard]] double best_2local_success(std::uint32_t n, std::uint32_t k, const SourceModel& model,
                                         unsigned workers = 1);

struct LinearDecoderCheck {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint32_t rank = 0;
    double error = 0.0;
    double bound = 0.0;           // 1 − max(p, 1−p)^(n − rank)
    double bound_from_k = 0.0;    // 1 − max(p, 1−p)^(n − k)
    double k_lower_bound = 0.0;   // n − log(1 − error)/log max(p, 1−p)
    [[nodiscard]] bool holds() const;
};

[[nodiscard]] LinearDecoderCheck check_linear_decoder(const std::vector<f2::BitVector>& images, const SourceModel& model);
/// 1 − P[span of images]. Throws Error if the span bound is ever violated.
[[nodiscard]] double linear_decoder_error(const std::vector<f2::BitVector>& images, const SourceModel& model);

/// One line of a verification report.
struct CheckRecord {
    std::string claim;
    std::string instance;
    double bound = 0.0;
    double measured = 0.0;
    bool pass = false;
};

struct SubspaceBoundReport {
    std::uint64_t subspaces = 0;
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    double min_upper_slack = 1.0;  // min over checks of upper − P[U]
    double min_lower_slack = 1.0;  // min over checks of P[U] − lower
    std::vector<CheckRecord> violating;
};

/// Every subspace of F₂ⁿ for 0 ≤ n ≤ n_max, every p in p_list.
[[nodiscard]] SubspaceBoundReport verify_subspace_bounds(std::uint32_t n_max, const std::vector<double>& p_list,
                                                         double tolerance = 1e-12);

enum class NeighborhoodKind { random, leading };

struct WitnessSuite {
    std::uint64_t draws = 0;
    std::uint64_t failures = 0;
    double min_margin = 1.0;  // min over draws of measured − bound
    double bound = 0.0;
};

/// Random linear G (n×(n−1), n drawn in [2, n_max]) with 2-local neighborhoods;
/// block error of the MAP local decoder against min(p, 1−p)².
[[nodiscard]] WitnessSuite linear_encoder_suite(std::uint64_t seed, std::uint64_t draws, const SourceModel& model,
                                                NeighborhoodKind kind, std::uint32_t n_max = 10);

/// Random linear decoders (n in [2, n_max], k in [1, n−1]) against 1 − max(p, 1−p)^(n−k).
[[nodiscard]] WitnessSuite linear_decoder_suite(std::uint64_t seed, std::uint64_t draws, const SourceModel& model,
                                                std::uint32_t n_max = 12);

}  // namespace ldsc::converse
