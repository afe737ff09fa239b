#pragma once

// Dense linear algebra over the two-element field.
//
// Vectors pack coordinate 1 into the least significant bit of the first word,
// so for length ≤ 64 the integer value of a vector orders like its bit string
// read from the last coordinate to the first.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ldsc::f2 {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t length);

    /// Low `length` bits of `value`; bit j is coordinate j+1.
    static BitVector from_uint(std::uint64_t value, std::size_t length);
    /// "0110" -> coordinates 1..4 = 0,1,1,0.
    static BitVector from_string(std::string_view bits);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    [[nodiscard]] bool get(std::size_t i) const;
    void set(std::size_t i, bool value);
    void flip(std::size_t i);

    /// Hamming weight.
    [[nodiscard]] std::size_t weight() const noexcept;
    /// Requires size() ≤ 64.
    [[nodiscard]] std::uint64_t to_uint() const;
    [[nodiscard]] std::string to_string() const;
    /// Index of the first set coordinate, or size() if none.
    [[nodiscard]] std::size_t first_set() const noexcept;

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend bool operator==(const BitVector&, const BitVector&) = default;

    [[nodiscard]] const std::vector<std::uint64_t>& words() const noexcept { return words_; }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    /// Rows given as bit strings of equal length.
    static BitMatrix from_rows(const std::vector<std::string>& rows);
    static BitMatrix from_rows(std::vector<BitVector> rows);
    static BitMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] bool get(std::size_t r, std::size_t c) const { return rows_.at(r).get(c); }
    void set(std::size_t r, std::size_t c, bool value) { rows_.at(r).set(c, value); }
    [[nodiscard]] const BitVector& row(std::size_t r) const { return rows_.at(r); }

    /// Row-vector product v·m; v has rows() coordinates.
    [[nodiscard]] BitVector left_multiply(const BitVector& v) const;
    /// Sub-matrix keeping the listed columns, in the given order.
    [[nodiscard]] BitMatrix select_columns(const std::vector<std::size_t>& columns) const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::vector<BitVector> rows_;
    std::size_t cols_ = 0;
};

/// A linearly independent list of vectors in F₂ⁿ.
class SubspaceBasis {
public:
    /// Throws DomainError if the vectors are dependent or of the wrong length.
    SubspaceBasis(std::size_t ambient_dim, std::vector<BitVector> basis);

    /// Basis of the span of arbitrary (possibly dependent) vectors, in reduced echelon form.
    static SubspaceBasis span_of(std::size_t ambient_dim, const std::vector<BitVector>& vectors);
    static SubspaceBasis full_space(std::size_t ambient_dim);

    [[nodiscard]] std::size_t ambient_dim() const noexcept { return ambient_dim_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return basis_.size(); }
    [[nodiscard]] const std::vector<BitVector>& vectors() const noexcept { return basis_; }

    /// Visits all 2^dimension elements of the span in Gray-code order, starting at 0.
    void for_each_element(const std::function<void(const BitVector&)>& visit) const;

private:
    std::size_t ambient_dim_;
    std::vector<BitVector> basis_;
};

/// Largest span dimension `subspace_probability` will enumerate.
inline constexpr std::size_t kMaxEnumerableDimension = 30;

[[nodiscard]] std::size_t rank(const BitMatrix& m);

/// Basis of {v : v·m = 0}; its dimension is rows(m) − rank(m).
[[nodiscard]] SubspaceBasis kernel_basis(const BitMatrix& m);

/// Product-Bernoulli(p) mass of the span, Σ p^H(v) (1−p)^(n−H(v)).
[[nodiscard]] double subspace_probability(const SubspaceBasis& u, double p);

struct ProbabilityBounds {
    double lower;
    double upper;
};

/// (min{p,1−p}^(n−k), max{p,1−p}^(n−k)) for a k-dimensional subspace of F₂ⁿ.
[[nodiscard]] ProbabilityBounds subspace_mass_bounds(const SubspaceBasis& u, double p);

/// Every subspace of F₂ⁿ once, each as its reduced row-echelon basis. n ≤ 5.
[[nodiscard]] std::vector<SubspaceBasis> enumerate_all_subspaces(std::size_t n);

/// Number of k-dimensional subspaces of F₂ⁿ (Gaussian binomial at q = 2).
[[nodiscard]] std::uint64_t gaussian_binomial2(std::size_t n, std::size_t k);

}  // namespace ldsc::f2
