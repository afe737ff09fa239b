#include "ldsc/lossless.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "ldsc/errors.hpp"

namespace ldsc {

namespace {

std::uint32_t code_bits_for_rate(std::uint32_t b, double r) {
    // ⌈b·r⌉ with slack for products like 5·0.6 = 3.0000000000000004
    const double exact = static_cast<double>(b) * r;
    auto k = static_cast<std::uint32_t>(std::ceil(exact - 1e-9));
    return std::min(k, b);
}

// Index bits go into the payload most significant bit first.
void write_index(f2::BitVector& payload, std::uint64_t offset, const f2::BitVector& index) {
    const std::size_t k = index.size();
    for (std::size_t t = 0; t < k; ++t) {
        if (index.get(k - 1 - t)) payload.set(offset + t, true);
    }
}

f2::BitVector read_index(const f2::BitVector& window) {
    const std::size_t k = window.size();
    f2::BitVector index(k);
    for (std::size_t t = 0; t < k; ++t) {
        if (window.get(t)) index.set(k - 1 - t, true);
    }
    return index;
}

f2::BitVector slice(const f2::BitVector& x, std::uint64_t offset, std::uint64_t len) {
    f2::BitVector out(len);
    for (std::uint64_t j = 0; j < len; ++j) {
        if (x.get(offset + j)) out.set(j, true);
    }
    return out;
}

}  // namespace

double LosslessPlan::implied_c() const {
    if (n < 2) return 0.0;
    return static_cast<double>(block_len) / std::log2(static_cast<double>(n));
}

LosslessPlan make_lossless_plan(std::uint64_t n, std::uint32_t block_len, std::uint32_t code_bits,
                                const SourceModel& model) {
    if (block_len == 0) throw DomainError("lossless plan: block length must be positive");
    if (code_bits > block_len) throw DomainError("lossless plan: code bits exceed block length");
    if (block_len > kMaxTopSetBlockLen) throw CapacityError("lossless plan: block length over TopSetCode capacity");
    LosslessPlan plan;
    plan.n = n;
    plan.block_len = block_len;
    plan.code_bits = code_bits;
    plan.model = model;
    plan.target_rate = plan.rate();
    plan.search_start = block_len;
    return plan;
}

LosslessPlan plan_lossless(std::uint64_t n, double r, double epsilon, const SourceModel& model,
                           std::uint32_t max_block_len) {
    if (n == 0) throw DomainError("plan_lossless: n must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("plan_lossless: epsilon must lie in (0, 1)");
    if (!(r > 0.0)) throw DomainError("plan_lossless: rate must be positive");
    max_block_len = std::min(max_block_len, kMaxTopSetBlockLen);

    if (r >= 1.0) {
        auto plan = make_lossless_plan(n, 1, 1, model);
        plan.target_rate = r;
        plan.epsilon_target = epsilon;
        return plan;
    }
    const double entropy = model.entropy();
    if (r <= entropy) {
        std::ostringstream msg;
        msg << "plan_lossless: rate " << r << " does not exceed the source entropy h(p) = " << entropy
            << " (gap " << entropy - r << " bits/symbol); block error cannot vanish";
        throw PlanningError(msg.str());
    }

    const double exponent = error_exponent(r, model);
    const double b0 = std::ceil(std::log2(static_cast<double>(n)) / exponent);
    const auto start = static_cast<std::uint32_t>(
        std::clamp(b0, 1.0, static_cast<double>(std::min<std::uint64_t>(n, kMaxTopSetBlockLen + 1ULL))));
    const auto last = static_cast<std::uint32_t>(std::min<std::uint64_t>(max_block_len, n));

    double best_error = 1.0;
    std::uint32_t best_b = 0;
    for (std::uint32_t b = start; b <= last; ++b) {
        auto plan = make_lossless_plan(n, b, code_bits_for_rate(b, r), model);
        plan.target_rate = r;
        plan.epsilon_target = epsilon;
        plan.search_start = start;
        const double err = exact_error(plan);
        if (err <= epsilon) return plan;
        if (err < best_error) {
            best_error = err;
            best_b = b;
        }
    }
    std::ostringstream msg;
    msg << "plan_lossless: no block length in [" << start << ", " << last << "] meets epsilon " << epsilon
        << " (n=" << n << ", r=" << r << ", E*_b(r)=" << exponent << ", b0=" << b0 << ")";
    if (best_b != 0) msg << "; best exact error " << best_error << " at b=" << best_b;
    if (start > last) msg << "; search start exceeds the block length cap " << last;
    throw PlanningError(msg.str());
}

double block_error(const LosslessPlan& plan) {
    if (plan.code_bits == plan.block_len) return 0.0;
    return TopSetCode(plan.block_len, plan.code_bits, plan.model).block_error();
}

double exact_error(const LosslessPlan& plan) {
    const double eps_b = block_error(plan);
    if (eps_b <= 0.0) return 0.0;
    if (eps_b >= 1.0) return plan.full_blocks() > 0 ? 1.0 : 0.0;
    return -std::expm1(static_cast<double>(plan.full_blocks()) * std::log1p(-eps_b));
}

double union_bound_error(const LosslessPlan& plan) {
    const auto blocks = (plan.n + plan.block_len - 1) / plan.block_len;
    return static_cast<double>(blocks) * block_error(plan);
}

SourceModel model_of(const ContainerHeader& header) { return SourceModel(header.p); }

CompressedContainer compress(const f2::BitVector& x, const LosslessPlan& plan, CompressStats* stats, unsigned workers) {
    if (x.size() != plan.n) throw DomainError("compress: input length differs from plan.n");
    const TopSetCode code(plan.block_len, plan.code_bits, plan.model);
    const std::uint64_t blocks = plan.full_blocks();
    const std::uint32_t b = plan.block_len;

    std::vector<std::optional<f2::BitVector>> indices(blocks);
    auto encode_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t j = begin; j < end; ++j) indices[j] = code.rank(slice(x, j * b, b));
    };
    workers = std::max(1U, workers);
    if (workers == 1 || blocks < 2) {
        encode_range(0, blocks);
    } else {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (blocks + workers - 1) / workers;
        for (std::uint64_t begin = 0; begin < blocks; begin += chunk) {
            pool.emplace_back(encode_range, begin, std::min(blocks, begin + chunk));
        }
    }

    f2::BitVector payload(plan.payload_bits());
    std::uint64_t uncovered = 0;
    for (std::uint64_t j = 0; j < blocks; ++j) {
        if (indices[j]) {
            write_index(payload, j * plan.code_bits, *indices[j]);
        } else {
            ++uncovered;  // left as index 0
        }
    }
    const std::uint64_t raw_offset = blocks * plan.code_bits;
    for (std::uint32_t j = 0; j < plan.partial_len(); ++j) {
        if (x.get(blocks * b + j)) payload.set(raw_offset + j, true);
    }
    if (stats) stats->uncovered_blocks = uncovered;

    ContainerHeader header;
    header.mode = Mode::lossless;
    header.n = plan.n;
    header.block_len = plan.block_len;
    header.code_bits = plan.code_bits;
    header.p = plan.model.p_rational();
    header.partial_len = plan.partial_len();
    return CompressedContainer(std::move(header), std::move(payload));
}

LosslessDecoder::LosslessDecoder(const CompressedContainer& container)
    : container_(container),
      code_(container.header().block_len, container.header().code_bits, model_of(container.header())) {
    if (container.header().mode != Mode::lossless) throw DomainError("LosslessDecoder: container is not lossless");
}

DecodeResult LosslessDecoder::decode_symbol(std::uint64_t i, QueryLedger& ledger) const {
    const auto& h = container_.header();
    if (i >= h.n) throw DomainError("decode_symbol: index " + std::to_string(i) + " out of range");
    ledger.begin_call();
    if (ledger.strict()) ledger.record(container_.header_bits());
    const std::uint64_t block = i / h.block_len;
    DecodeResult result;
    if (block < h.full_blocks()) {
        const auto window = container_.read_bits(block * h.code_bits, h.code_bits, ledger);
        const auto decoded = code_.unrank(read_index(window));
        result.bit = decoded.get(i % h.block_len);
    } else {
        const std::uint64_t raw_offset = h.full_blocks() * h.code_bits + (i - block * h.block_len);
        result.bit = container_.read_bits(raw_offset, 1, ledger).get(0);
    }
    result.queries = ledger.end_call();
    return result;
}

DecodeResult LosslessDecoder::decode_symbol(std::uint64_t i) const {
    QueryLedger ledger;
    return decode_symbol(i, ledger);
}

f2::BitVector LosslessDecoder::decompress_all(QueryLedger& ledger) const {
    const auto& h = container_.header();
    f2::BitVector out(h.n);
    ledger.begin_call();
    for (std::uint64_t j = 0; j < h.full_blocks(); ++j) {
        const auto decoded = code_.unrank(read_index(container_.read_bits(j * h.code_bits, h.code_bits, ledger)));
        for (std::uint32_t t = 0; t < h.block_len; ++t) {
            if (decoded.get(t)) out.set(j * h.block_len + t, true);
        }
    }
    const auto raw = container_.read_bits(h.full_blocks() * h.code_bits, h.partial_len, ledger);
    for (std::uint32_t t = 0; t < h.partial_len; ++t) {
        if (raw.get(t)) out.set(h.full_blocks() * h.block_len + t, true);
    }
    ledger.end_call();
    return out;
}

f2::BitVector LosslessDecoder::decompress_all() const {
    QueryLedger ledger;
    return decompress_all(ledger);
}

DecodeResult decode_symbol(const CompressedContainer& c, std::uint64_t i, QueryLedger& ledger) {
    return LosslessDecoder(c).decode_symbol(i, ledger);
}

f2::BitVector decompress_all(const CompressedContainer& c) { return LosslessDecoder(c).decompress_all(); }

}  // namespace ldsc
