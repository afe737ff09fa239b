#include "ldsc/f2linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ldsc/errors.hpp"

namespace ldsc::f2 {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

// Reduces `vectors` in place to reduced row-echelon form (pivot = lowest set
// coordinate) and drops the zero rows. Returns the pivots, ascending.
std::vector<std::size_t> reduce_echelon(std::vector<BitVector>& vectors, std::size_t ambient_dim) {
    std::vector<std::size_t> pivots;
    std::size_t next = 0;
    for (std::size_t c = 0; c < ambient_dim && next < vectors.size(); ++c) {
        auto it = std::find_if(vectors.begin() + static_cast<std::ptrdiff_t>(next), vectors.end(),
                               [c](const BitVector& v) { return v.get(c); });
        if (it == vectors.end()) continue;
        std::iter_swap(vectors.begin() + static_cast<std::ptrdiff_t>(next), it);
        for (std::size_t r = 0; r < vectors.size(); ++r) {
            if (r != next && vectors[r].get(c)) vectors[r] ^= vectors[next];
        }
        pivots.push_back(c);
        ++next;
    }
    vectors.resize(next);
    return pivots;
}

}  // namespace

BitVector::BitVector(std::size_t length) : words_(word_count(length), 0), size_(length) {}

BitVector BitVector::from_uint(std::uint64_t value, std::size_t length) {
    if (length > kWordBits) throw DomainError("BitVector::from_uint: length exceeds 64");
    BitVector v(length);
    if (length > 0) {
        const std::uint64_t mask = length == kWordBits ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
        v.words_[0] = value & mask;
    }
    return v;
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i, true);
        } else if (bits[i] != '0') {
            throw DomainError("BitVector::from_string: expected only '0' and '1'");
        }
    }
    return v;
}

bool BitVector::get(std::size_t i) const {
    if (i >= size_) throw DomainError("BitVector::get: index out of range");
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void BitVector::set(std::size_t i, bool value) {
    if (i >= size_) throw DomainError("BitVector::set: index out of range");
    const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
    if (value) {
        words_[i / kWordBits] |= bit;
    } else {
        words_[i / kWordBits] &= ~bit;
    }
}

void BitVector::flip(std::size_t i) {
    if (i >= size_) throw DomainError("BitVector::flip: index out of range");
    words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

std::size_t BitVector::weight() const noexcept {
    std::size_t w = 0;
    for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
    return w;
}

std::uint64_t BitVector::to_uint() const {
    if (size_ > kWordBits) throw DomainError("BitVector::to_uint: length exceeds 64");
    return words_.empty() ? 0 : words_[0];
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::size_t BitVector::first_set() const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return size_;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.size_ != size_) throw DomainError("BitVector xor: length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows, BitVector(cols)), cols_(cols) {}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
    std::vector<BitVector> parsed;
    parsed.reserve(rows.size());
    for (const auto& r : rows) parsed.push_back(BitVector::from_string(r));
    return from_rows(std::move(parsed));
}

BitMatrix BitMatrix::from_rows(std::vector<BitVector> rows) {
    BitMatrix m;
    if (!rows.empty()) {
        m.cols_ = rows.front().size();
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw DomainError("BitMatrix::from_rows: ragged rows");
        }
    }
    m.rows_ = std::move(rows);
    return m;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitVector BitMatrix::left_multiply(const BitVector& v) const {
    if (v.size() != rows()) throw DomainError("BitMatrix::left_multiply: length mismatch");
    BitVector out(cols_);
    for (std::size_t r = 0; r < rows(); ++r) {
        if (v.get(r)) out ^= rows_[r];
    }
    return out;
}

BitMatrix BitMatrix::select_columns(const std::vector<std::size_t>& columns) const {
    BitMatrix out(rows(), columns.size());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t j = 0; j < columns.size(); ++j) out.set(r, j, get(r, columns[j]));
    }
    return out;
}

SubspaceBasis::SubspaceBasis(std::size_t ambient_dim, std::vector<BitVector> basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
    for (const auto& v : basis_) {
        if (v.size() != ambient_dim_) throw DomainError("SubspaceBasis: vector length differs from ambient dimension");
    }
    auto copy = basis_;
    reduce_echelon(copy, ambient_dim_);
    if (copy.size() != basis_.size()) throw DomainError("SubspaceBasis: vectors are linearly dependent");
}

SubspaceBasis SubspaceBasis::span_of(std::size_t ambient_dim, const std::vector<BitVector>& vectors) {
    auto reduced = vectors;
    for (const auto& v : reduced) {
        if (v.size() != ambient_dim) throw DomainError("SubspaceBasis::span_of: vector length differs from ambient dimension");
    }
    reduce_echelon(reduced, ambient_dim);
    return SubspaceBasis(ambient_dim, std::move(reduced));
}

SubspaceBasis SubspaceBasis::full_space(std::size_t ambient_dim) {
    std::vector<BitVector> units;
    for (std::size_t i = 0; i < ambient_dim; ++i) {
        BitVector e(ambient_dim);
        e.set(i, true);
        units.push_back(std::move(e));
    }
    return SubspaceBasis(ambient_dim, std::move(units));
}

void SubspaceBasis::for_each_element(const std::function<void(const BitVector&)>& visit) const {
    const std::size_t k = basis_.size();
    if (k >= 64) throw CapacityError("SubspaceBasis::for_each_element: dimension too large");
    BitVector current(ambient_dim_);
    visit(current);
    const std::uint64_t count = std::uint64_t{1} << k;
    for (std::uint64_t step = 1; step < count; ++step) {
        current ^= basis_[static_cast<std::size_t>(std::countr_zero(step))];
        visit(current);
    }
}

std::size_t rank(const BitMatrix& m) {
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    return reduce_echelon(rows, m.cols()).size();
}

SubspaceBasis kernel_basis(const BitMatrix& m) {
    const std::size_t n = m.rows();
    // Row-reduce [m | I]; rows whose m-part vanishes carry kernel vectors in the I-part.
    std::vector<BitVector> image;
    std::vector<BitVector> tracker;
    for (std::size_t r = 0; r < n; ++r) {
        image.push_back(m.row(r));
        BitVector e(n);
        e.set(r, true);
        tracker.push_back(std::move(e));
    }
    std::size_t next = 0;
    for (std::size_t c = 0; c < m.cols() && next < n; ++c) {
        std::size_t pivot = next;
        while (pivot < n && !image[pivot].get(c)) ++pivot;
        if (pivot == n) continue;
        std::swap(image[next], image[pivot]);
        std::swap(tracker[next], tracker[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r != next && image[r].get(c)) {
                image[r] ^= image[next];
                tracker[r] ^= tracker[next];
            }
        }
        ++next;
    }
    std::vector<BitVector> kernel(tracker.begin() + static_cast<std::ptrdiff_t>(next), tracker.end());
    return SubspaceBasis::span_of(n, kernel);
}

double subspace_probability(const SubspaceBasis& u, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("subspace_probability: p must lie in (0, 1)");
    if (u.dimension() > kMaxEnumerableDimension) {
        throw CapacityError("subspace_probability: span dimension " + std::to_string(u.dimension()) +
                            " exceeds enumeration limit");
    }
    const std::size_t n = u.ambient_dim();
    std::vector<std::uint64_t> weight_count(n + 1, 0);
    u.for_each_element([&](const BitVector& v) { ++weight_count[v.weight()]; });
    double total = 0.0;
    for (std::size_t w = 0; w <= n; ++w) {
        if (weight_count[w] == 0) continue;
        total += static_cast<double>(weight_count[w]) * std::pow(p, static_cast<double>(w)) *
                 std::pow(1.0 - p, static_cast<double>(n - w));
    }
    return total;
}

ProbabilityBounds subspace_mass_bounds(const SubspaceBasis& u, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("subspace_mass_bounds: p must lie in (0, 1)");
    const auto codim = static_cast<double>(u.ambient_dim() - u.dimension());
    return {std::pow(std::min(p, 1.0 - p), codim), std::pow(std::max(p, 1.0 - p), codim)};
}

std::vector<SubspaceBasis> enumerate_all_subspaces(std::size_t n) {
    if (n > 5) throw CapacityError("enumerate_all_subspaces: n > 5 not supported");
    std::vector<SubspaceBasis> out;
    // Each subspace has exactly one reduced echelon basis: pick the pivot set,
    // then fill the free entries (non-pivot coordinates after each row's pivot).
    for (std::uint32_t pivot_mask = 0; pivot_mask < (1U << n); ++pivot_mask) {
        std::vector<std::size_t> pivots;
        for (std::size_t c = 0; c < n; ++c) {
            if ((pivot_mask >> c) & 1U) pivots.push_back(c);
        }
        std::vector<std::pair<std::size_t, std::size_t>> free_slots;  // (row, coordinate)
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            for (std::size_t c = pivots[r] + 1; c < n; ++c) {
                if (!((pivot_mask >> c) & 1U)) free_slots.emplace_back(r, c);
            }
        }
        for (std::uint64_t fill = 0; fill < (std::uint64_t{1} << free_slots.size()); ++fill) {
            std::vector<BitVector> rows(pivots.size(), BitVector(n));
            for (std::size_t r = 0; r < pivots.size(); ++r) rows[r].set(pivots[r], true);
            for (std::size_t s = 0; s < free_slots.size(); ++s) {
                if ((fill >> s) & 1U) rows[free_slots[s].first].set(free_slots[s].second, true);
            }
            out.emplace_back(n, std::move(rows));
        }
    }
    return out;
}

std::uint64_t gaussian_binomial2(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    if (n > 16) throw CapacityError("gaussian_binomial2: n too large");
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < k; ++i) {
        num *= (std::uint64_t{1} << (n - i)) - 1;
        den *= (std::uint64_t{1} << (i + 1)) - 1;
        const std::uint64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
    }
    return num / den;
}

}  // namespace ldsc::f2
