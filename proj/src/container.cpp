#include "ldsc/container.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ldsc/enumerative.hpp"
#include "ldsc/errors.hpp"

namespace ldsc {

namespace {

constexpr std::uint8_t kMagic[4] = {'L', 'D', 'S', 'C'};
constexpr double kFixedScale = 4294967296.0;  // 2^32

void validate(const ContainerHeader& h) {
    if (h.block_len == 0) throw FormatError("container: block length must be positive");
    if (h.code_bits > h.block_len) throw FormatError("container: code bits exceed block length");
    if (h.p.den == 0 || h.p.num == 0 || h.p.num >= h.p.den) throw FormatError("container: p must lie in (0, 1)");
    if (h.partial_len != h.n % h.block_len) throw FormatError("container: partial block length disagrees with n mod b");
    if (h.mode == Mode::lossless) {
        if (h.block_len > kMaxTopSetBlockLen) throw FormatError("container: lossless block length over capacity");
        if (!h.codebook.empty()) throw FormatError("container: lossless header carries a codebook");
        if (h.distortion_fixed != 0) throw FormatError("container: lossless header carries a distortion");
    } else if (h.mode == Mode::lossy) {
        if (h.block_len > kMaxLossyBlockLen) throw FormatError("container: lossy block length over 16");
        const std::size_t m = std::size_t{1} << h.code_bits;
        if (h.codebook.size() != m) throw FormatError("container: codebook size is not 2^code_bits");
        std::set<std::uint64_t> seen;
        for (const auto& c : h.codebook) {
            if (c.size() != h.block_len) throw FormatError("container: codeword length differs from block length");
            if (!seen.insert(c.to_uint()).second) throw FormatError("container: duplicate codeword");
        }
    } else {
        throw FormatError("container: unknown mode");
    }
}

std::size_t codebook_bytes(const ContainerHeader& h) {
    if (h.mode != Mode::lossy) return 0;
    const std::uint64_t bits = h.codebook.size() * static_cast<std::uint64_t>(h.block_len);
    return static_cast<std::size_t>((bits + 7) / 8) + 8;
}

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
    void u8(std::uint8_t v) { out_.push_back(v); }
    void be(std::uint64_t v, int bytes) {
        for (int i = bytes - 1; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void raw(const std::vector<std::uint8_t>& bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint64_t be(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v = (v << 8) | in_[pos_++];
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t count) {
        need(count);
        auto s = in_.subspan(pos_, count);
        pos_ += count;
        return s;
    }
    [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t count) const {
        if (in_.size() - pos_ < count) throw FormatError("container: truncated stream");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void check_padding(std::span<const std::uint8_t> bytes, std::uint64_t bit_count) {
    if (bit_count % 8 == 0 || bytes.empty()) return;
    const auto used = static_cast<unsigned>(bit_count % 8);
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFU >> used);
    if (bytes.back() & pad_mask) throw FormatError("container: nonzero padding bits");
}

}  // namespace

double ContainerHeader::distortion() const { return static_cast<double>(distortion_fixed) / kFixedScale; }

std::uint64_t ContainerHeader::to_fixed(double distortion) {
    if (!(distortion >= 0.0 && distortion <= 1.0)) throw DomainError("distortion must lie in [0, 1]");
    return static_cast<std::uint64_t>(std::llround(distortion * kFixedScale));
}

void QueryLedger::begin_call() {
    if (open_) throw Error("QueryLedger: call already open");
    open_ = true;
    current_ = 0;
}

void QueryLedger::record(std::uint64_t bits) {
    if (!open_) throw Error("QueryLedger: read outside a decode call");
    current_ += bits;
}

std::uint64_t QueryLedger::end_call() {
    if (!open_) throw Error("QueryLedger: no open call");
    open_ = false;
    ++calls_;
    total_ += current_;
    max_ = std::max(max_, current_);
    ++histogram_[current_];
    return current_;
}

void QueryLedger::merge(const QueryLedger& other) {
    calls_ += other.calls_;
    total_ += other.total_;
    max_ = std::max(max_, other.max_);
    for (const auto& [reads, count] : other.histogram_) histogram_[reads] += count;
}

CompressedContainer::CompressedContainer(ContainerHeader header, f2::BitVector payload)
    : header_(std::move(header)), payload_(std::move(payload)) {
    validate(header_);
    if (payload_.size() != header_.payload_bits()) {
        throw FormatError("container: payload has " + std::to_string(payload_.size()) + " bits, header implies " +
                          std::to_string(header_.payload_bits()));
    }
}

std::uint64_t CompressedContainer::header_bits() const { return 8 * (kFixedHeaderBytes + codebook_bytes(header_)); }

f2::BitVector CompressedContainer::read_bits(std::uint64_t offset, std::uint64_t len, QueryLedger& ledger) const {
    if (offset > payload_.size() || len > payload_.size() - offset) {
        throw Error("read_bits: window [" + std::to_string(offset) + ", " + std::to_string(offset + len) +
                    ") outside payload of " + std::to_string(payload_.size()) + " bits");
    }
    f2::BitVector out(len);
    if (len == 0) return out;
    for (std::uint64_t j = 0; j < len; ++j) {
        if (payload_.get(offset + j)) out.set(j, true);
    }
    ledger.record(len);
    return out;
}

std::vector<std::uint8_t> pack_bits(const f2::BitVector& bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits.get(i)) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
    }
    return out;
}

f2::BitVector unpack_bits(std::span<const std::uint8_t> bytes, std::uint64_t bit_count) {
    if (bytes.size() * 8 < bit_count) throw FormatError("unpack_bits: not enough bytes");
    f2::BitVector out(bit_count);
    for (std::uint64_t i = 0; i < bit_count; ++i) {
        if (bytes[i / 8] & (0x80U >> (i % 8))) out.set(i, true);
    }
    return out;
}

std::vector<std::uint8_t> serialize(const CompressedContainer& c) {
    const auto& h = c.header_;
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    for (auto m : kMagic) w.u8(m);
    w.u8(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(h.mode));
    w.be(h.n, 8);
    w.be(h.block_len, 4);
    w.be(h.code_bits, 4);
    w.be(h.p.num, 8);
    w.be(h.p.den, 8);
    w.be(h.partial_len, 4);
    if (h.mode == Mode::lossy) {
        f2::BitVector book(h.codebook.size() * h.block_len);
        std::size_t pos = 0;
        for (const auto& cw : h.codebook) {
            for (std::size_t j = 0; j < cw.size(); ++j, ++pos) {
                if (cw.get(j)) book.set(pos, true);
            }
        }
        w.raw(pack_bits(book));
        w.be(h.distortion_fixed, 8);
    }
    w.raw(pack_bits(c.payload_));
    return out;
}

CompressedContainer deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    for (auto m : kMagic) {
        if (r.u8() != m) throw FormatError("container: bad magic");
    }
    const auto version = r.u8();
    if (version != kFormatVersion) throw FormatError("container: unsupported version " + std::to_string(version));
    ContainerHeader h;
    const auto mode = r.u8();
    if (mode > 1) throw FormatError("container: unknown mode " + std::to_string(mode));
    h.mode = static_cast<Mode>(mode);
    h.n = r.be(8);
    h.block_len = static_cast<std::uint32_t>(r.be(4));
    h.code_bits = static_cast<std::uint32_t>(r.be(4));
    h.p.num = r.be(8);
    h.p.den = r.be(8);
    h.partial_len = static_cast<std::uint32_t>(r.be(4));
    if (h.block_len == 0) throw FormatError("container: block length must be positive");
    if (h.mode == Mode::lossy) {
        if (h.block_len > kMaxLossyBlockLen || h.code_bits > h.block_len) throw FormatError("container: lossy code over capacity");
        const std::uint64_t m = std::uint64_t{1} << h.code_bits;
        const std::uint64_t bits = m * h.block_len;
        auto book_bytes = r.take(static_cast<std::size_t>((bits + 7) / 8));
        check_padding(book_bytes, bits);
        const auto book = unpack_bits(book_bytes, bits);
        for (std::uint64_t i = 0; i < m; ++i) {
            f2::BitVector cw(h.block_len);
            for (std::uint32_t j = 0; j < h.block_len; ++j) {
                if (book.get(i * h.block_len + j)) cw.set(j, true);
            }
            h.codebook.push_back(std::move(cw));
        }
        h.distortion_fixed = r.be(8);
    }
    validate(h);
    const std::uint64_t payload_bits = h.payload_bits();
    const auto payload_bytes = static_cast<std::size_t>((payload_bits + 7) / 8);
    if (r.remaining() != payload_bytes) {
        throw FormatError("container: expected " + std::to_string(payload_bytes) + " payload bytes, found " +
                          std::to_string(r.remaining()));
    }
    auto body = r.take(payload_bytes);
    check_padding(body, payload_bits);
    return CompressedContainer(std::move(h), unpack_bits(body, payload_bits));
}

}  // namespace ldsc
