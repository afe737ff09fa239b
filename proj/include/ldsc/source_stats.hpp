#pragma once

// Scalar information-theoretic quantities for a Bernoulli source and the
// closed-form rate bounds used to compare local decoding against succinct
// data structures. Logarithms are base 2; rates are bits per source symbol.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ldsc {

/// Exact probability num/den, kept so plans and containers reproduce bit-for-bit.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    /// Parses "num/den" (a bare integer is num/1). Reduces to lowest terms.
    static Rational parse(std::string_view text);
    /// Best approximation with denominator ≤ max_den (continued fractions).
    static Rational approximate(double value, std::uint64_t max_den = 1'000'000'000);

    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Bernoulli(p) source, p = P[X = 1] strictly between 0 and 1.
class SourceModel {
public:
    explicit SourceModel(Rational p);
    explicit SourceModel(double p) : SourceModel(Rational::approximate(p)) {}

    [[nodiscard]] const Rational& p_rational() const noexcept { return p_rational_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double q() const noexcept { return 1.0 - p_; }
    [[nodiscard]] double entropy() const;
    /// The more likely symbol; ties (p = ½) resolve to 0.
    [[nodiscard]] bool most_probable_symbol() const noexcept { return p_ > 0.5; }
    /// P[x] for a length-`length` word of Hamming weight `weight`.
    [[nodiscard]] double sequence_probability(std::uint64_t weight, std::uint64_t length) const;

private:
    Rational p_rational_;
    double p_;
};

[[nodiscard]] double binary_entropy(double q);

/// D(Bern(q) ‖ Bern(p)) in bits.
[[nodiscard]] double kl_divergence(double q, double p);

/// min over Q with H(Q) ≥ r of D(Q ‖ P); zero when r ≤ h(p).
[[nodiscard]] double error_exponent(double r, const SourceModel& model);

/// The Bern(q*) attaining error_exponent: h(q*) = r on p's side of ½ (or p itself when r ≤ h(p)).
[[nodiscard]] double error_exponent_minimizer(double r, const SourceModel& model);

/// Hamming rate-distortion function R(d) = max(0, h(p) − h(d)).
[[nodiscard]] double rate_distortion(const SourceModel& model, double d);

/// Local-decoding lossy rate bound h(p) − h(d) + c·log₂(t)/t.
/// The default c = 2 is the constant-locality form; c = 1 is the scaling-queries
/// form with the o(·) term dropped.
[[nodiscard]] double ldlsc_rate_bound(const SourceModel& model, double d, double t, double overhead_coefficient = 2.0);

/// Succinct-structure rate h(p) + log₂n/n + 1/((log₂n)/t)^t + n^(−1/4).
[[nodiscard]] double succinct_rate_bound(const SourceModel& model, double n, double t);

enum class Tighter { ours, theirs, tie };

[[nodiscard]] std::string_view to_string(Tighter t);

/// Surrogate constants substituted for the asymptotic terms; echoed with every report.
struct BoundConstants {
    double ours_overhead_coefficient = 1.0;   // c in c·log₂(T)/T, T = t·log₂n
    double succinct_log_coefficient = 1.0;    // O(log n / n)
    double succinct_tail_exponent = -0.25;    // Ō(n^{3/4})/n
};

struct BoundReport {
    double n = 0;
    double t = 0;
    double locality = 0;          // t·log₂n, where our bound is evaluated
    double distortion = 0;
    double our_bound = 0;
    double succinct_bound = 0;
    Tighter tighter = Tighter::tie;
    bool skipped = false;         // d outside (0, min{p, 1−p}): lossy bound undefined
    std::string note;
    BoundConstants constants;
};

inline constexpr double kBoundTieTolerance = 1e-9;

/// Fixed distortion.
[[nodiscard]] std::vector<BoundReport> compare_bounds(const SourceModel& model, double d, double t,
                                                      const std::vector<double>& n_range);

/// Distortion schedule d(n) = 1/(e·log₂n).
[[nodiscard]] std::vector<BoundReport> compare_bounds_vanishing_distortion(const SourceModel& model, double t,
                                                                           const std::vector<double>& n_range);

[[nodiscard]] double vanishing_distortion_schedule(double n);

}  // namespace ldsc
