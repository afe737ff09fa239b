#include "ldsc/lossy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "ldsc/errors.hpp"

namespace ldsc {

namespace {

constexpr double kDistortionSlack = 1e-12;
constexpr double kFixedProbScale = 4503599627370496.0;  // 2^52

__extension__ typedef __int128 i128;

int popcount(std::uint32_t v) { return std::popcount(v); }

void check_block_len(std::uint32_t b) {
    if (b == 0) throw DomainError("lossy: block length must be positive");
    if (b > kMaxLossyBlockLen) throw CapacityError("lossy: block length " + std::to_string(b) + " exceeds 16");
}

std::vector<double> block_probabilities(std::uint32_t b, const SourceModel& model) {
    std::vector<double> by_weight(b + 1);
    for (std::uint32_t w = 0; w <= b; ++w) by_weight[w] = model.sequence_probability(w, b);
    std::vector<double> prob(std::size_t{1} << b);
    for (std::size_t x = 0; x < prob.size(); ++x) prob[x] = by_weight[popcount(static_cast<std::uint32_t>(x))];
    return prob;
}

void walsh_hadamard(std::vector<i128>& a) {
    const std::size_t n = a.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const i128 u = a[j];
                const i128 v = a[j + len];
                a[j] = u + v;
                a[j + len] = u - v;
            }
        }
    }
}

std::uint32_t most_probable_block(std::uint32_t b, const SourceModel& model) {
    return model.most_probable_symbol() ? (std::uint32_t{1} << b) - 1 : 0;
}

std::uint32_t log2_exact(std::size_t m) {
    if (m == 0 || (m & (m - 1)) != 0) throw DomainError("lossy: codebook size must be a power of two");
    return static_cast<std::uint32_t>(std::countr_zero(m));
}

}  // namespace

LossyCodebook::LossyCodebook(std::uint32_t block_len, std::vector<std::uint32_t> codewords, const SourceModel& model)
    : block_len_(block_len), code_bits_(0), codewords_(std::move(codewords)), model_(model) {
    check_block_len(block_len);
    code_bits_ = log2_exact(codewords_.size());
    if (code_bits_ > block_len) throw DomainError("lossy: more codewords than blocks");
    const std::uint32_t size = std::uint32_t{1} << block_len;
    std::set<std::uint32_t> seen;
    for (auto c : codewords_) {
        if (c >= size) throw DomainError("lossy: codeword wider than the block");
        if (!seen.insert(c).second) throw DomainError("lossy: duplicate codeword");
    }

    // Multi-source BFS; a node's label is the smallest index among its
    // nearest codewords, which always reaches it through some shortest path.
    constexpr std::uint8_t kUnseen = 0xFF;
    nearest_.assign(size, 0);
    distance_.assign(size, kUnseen);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t i = 0; i < codewords_.size(); ++i) {
        distance_[codewords_[i]] = 0;
        nearest_[codewords_[i]] = i;
        frontier.push_back(codewords_[i]);
    }
    for (std::uint8_t d = 0; !frontier.empty(); ++d) {
        std::vector<std::uint32_t> next;
        for (auto u : frontier) {
            for (std::uint32_t j = 0; j < block_len; ++j) {
                const std::uint32_t v = u ^ (std::uint32_t{1} << j);
                if (distance_[v] == kUnseen) {
                    distance_[v] = static_cast<std::uint8_t>(d + 1);
                    nearest_[v] = nearest_[u];
                    next.push_back(v);
                } else if (distance_[v] == d + 1) {
                    nearest_[v] = std::min(nearest_[v], nearest_[u]);
                }
            }
        }
        frontier = std::move(next);
    }
}

f2::BitVector LossyCodebook::codeword(std::size_t index) const {
    return f2::BitVector::from_uint(codewords_.at(index), block_len_);
}

double expected_distortion(const LossyCodebook& codebook) {
    const auto prob = block_probabilities(codebook.block_len(), codebook.model());
    double total = 0.0;
    for (std::uint32_t x = 0; x < prob.size(); ++x) total += prob[x] * codebook.distance(x);
    return total / codebook.block_len();
}

GreedyCodebookBuilder::GreedyCodebookBuilder(std::uint32_t block_len, const SourceModel& model)
    : b_(block_len), size_(0), model_(model) {
    check_block_len(block_len);
    size_ = std::uint32_t{1} << b_;
    prob_ = block_probabilities(b_, model_);
    prob_fixed_.resize(size_);
    for (std::uint32_t x = 0; x < size_; ++x) prob_fixed_[x] = std::llround(prob_[x] * kFixedProbScale);

    masks_by_weight_.resize(b_ + 1);
    for (std::uint32_t e = 0; e < size_; ++e) masks_by_weight_[popcount(e)].push_back(e);

    krawtchouk_.assign(b_ + 1, std::vector<std::int64_t>(b_ + 1, 0));
    std::vector<std::vector<std::int64_t>> binom(b_ + 1, std::vector<std::int64_t>(b_ + 1, 0));
    for (std::uint32_t i = 0; i <= b_; ++i) {
        binom[i][0] = 1;
        for (std::uint32_t j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0);
    }
    for (std::uint32_t r = 0; r <= b_; ++r) {
        for (std::uint32_t w = 0; w <= b_; ++w) {
            std::int64_t sum = 0;
            for (std::uint32_t j = 0; j <= std::min(r, w); ++j) {
                if (r - j > b_ - w) continue;
                const std::int64_t term = binom[w][j] * binom[b_ - w][r - j];
                sum += (j % 2 == 0) ? term : -term;
            }
            krawtchouk_[r][w] = sum;
        }
    }

    used_.assign(size_, false);
    dist_.resize(size_);
    gain_.assign(size_, 0);
    const std::uint32_t first = most_probable_block(b_, model_);
    used_[first] = true;
    codewords_.push_back(first);
    for (std::uint32_t x = 0; x < size_; ++x) dist_[x] = static_cast<std::uint8_t>(popcount(x ^ first));
    recompute_gains();
}

// gain(c) = Σ_x P(x)·max(0, dist(x) − H(x ⊕ c)), written as Σ_r A_r ⊛ K_r with
// A_r(x) = P(x)·max(0, dist(x) − r) and K_r the weight-r indicator. Integer
// arithmetic keeps symmetric candidates exactly tied.
void GreedyCodebookBuilder::recompute_gains() {
    const std::uint32_t max_dist = *std::max_element(dist_.begin(), dist_.end());
    std::vector<i128> acc(size_, 0);
    std::vector<i128> a(size_);
    for (std::uint32_t r = 0; r < max_dist; ++r) {
        for (std::uint32_t x = 0; x < size_; ++x) {
            a[x] = dist_[x] > r ? static_cast<i128>(prob_fixed_[x]) * (dist_[x] - r) : 0;
        }
        walsh_hadamard(a);
        for (std::uint32_t s = 0; s < size_; ++s) acc[s] += a[s] * krawtchouk_[r][popcount(s)];
    }
    walsh_hadamard(acc);
    for (std::uint32_t c = 0; c < size_; ++c) gain_[c] = static_cast<std::int64_t>(acc[c] / size_);
}

void GreedyCodebookBuilder::apply_incremental(const std::vector<std::uint32_t>& changed,
                                              const std::vector<std::uint8_t>& new_dist) {
    for (auto x : changed) {
        const std::int64_t old_d = dist_[x];
        const std::int64_t new_d = new_dist[x];
        const std::int64_t weight = prob_fixed_[x];
        for (std::int64_t r = 0; r < old_d; ++r) {
            const std::int64_t delta = weight * (r < new_d ? new_d - old_d : r - old_d);
            for (auto e : masks_by_weight_[static_cast<std::size_t>(r)]) gain_[x ^ e] += delta;
        }
    }
}

std::uint32_t GreedyCodebookBuilder::add_next() {
    if (codewords_.size() == size_) throw CapacityError("greedy codebook: every block is already a codeword");
    std::uint32_t best = size_;
    for (std::uint32_t c = 0; c < size_; ++c) {
        if (used_[c]) continue;
        if (best == size_ || gain_[c] > gain_[best]) best = c;
    }

    std::vector<std::uint8_t> next(dist_);
    std::vector<std::uint32_t> changed;
    std::uint64_t incremental_cost = 0;
    std::vector<std::uint64_t> ball(b_ + 1, 0);  // number of masks of weight < r
    for (std::uint32_t r = 1; r <= b_; ++r) ball[r] = ball[r - 1] + masks_by_weight_[r - 1].size();
    for (std::uint32_t x = 0; x < size_; ++x) {
        const auto d = static_cast<std::uint8_t>(popcount(x ^ best));
        if (d < dist_[x]) {
            next[x] = d;
            changed.push_back(x);
            incremental_cost += ball[dist_[x]];
        }
    }
    const std::uint32_t max_dist = *std::max_element(dist_.begin(), dist_.end());
    const std::uint64_t transform_cost = std::uint64_t{4} * (max_dist + 1) * b_ * size_;
    if (incremental_cost > transform_cost) {
        dist_ = std::move(next);
        recompute_gains();
    } else {
        apply_incremental(changed, next);
        dist_ = std::move(next);
    }
    used_[best] = true;
    codewords_.push_back(best);
    return best;
}

void GreedyCodebookBuilder::grow_to(std::size_t count) {
    if (count > size_) throw CapacityError("greedy codebook: more codewords requested than blocks exist");
    while (codewords_.size() < count) add_next();
}

double GreedyCodebookBuilder::distortion() const {
    double total = 0.0;
    for (std::uint32_t x = 0; x < size_; ++x) total += prob_[x] * dist_[x];
    return total / b_;
}

LossyCodebook build_codebook(std::uint32_t block_len, std::uint32_t code_bits, const SourceModel& model,
                             CodebookMethod method) {
    check_block_len(block_len);
    if (code_bits > block_len) throw DomainError("build_codebook: code bits exceed block length");
    const std::size_t m = std::size_t{1} << code_bits;
    if (method == CodebookMethod::greedy) {
        GreedyCodebookBuilder builder(block_len, model);
        builder.grow_to(m);
        return LossyCodebook(block_len, builder.codewords(), model);
    }

    if (block_len > 4 || m > 4) throw CapacityError("build_codebook: exhaustive search needs b <= 4 and M <= 4");
    const auto size = static_cast<std::uint32_t>(std::size_t{1} << block_len);
    std::vector<std::uint32_t> pick(m);
    for (std::uint32_t i = 0; i < m; ++i) pick[i] = i;
    std::vector<std::uint32_t> best;
    double best_d = 2.0;
    // Subsets in lexicographic order; the first strictly better one wins.
    while (true) {
        const double d = expected_distortion(LossyCodebook(block_len, pick, model));
        if (d < best_d - 1e-15) {
            best_d = d;
            best = pick;
        }
        std::size_t i = m;
        while (i > 0 && pick[i - 1] == size - m + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }
    return LossyCodebook(block_len, best, model);
}

namespace {

LossyPlan make_plan(std::uint64_t n, std::uint32_t b, std::uint32_t k, double d, const GreedyCodebookBuilder& builder,
                    const SourceModel& model) {
    LossyPlan plan;
    plan.n = n;
    plan.block_len = b;
    plan.code_bits = k;
    plan.model = model;
    plan.d_target = d;
    plan.d_achieved = builder.distortion();
    plan.codewords = builder.codewords();
    return plan;
}

// Smallest k ≤ k_cap whose greedy prefix of 2^k codewords meets d.
std::optional<LossyPlan> try_block_len(std::uint64_t n, std::uint32_t b, double d, std::uint32_t k_cap,
                                       const SourceModel& model) {
    GreedyCodebookBuilder builder(b, model);
    for (std::uint32_t k = 0; k <= std::min(k_cap, b); ++k) {
        builder.grow_to(std::size_t{1} << k);
        if (builder.distortion() <= d + kDistortionSlack) return make_plan(n, b, k, d, builder, model);
    }
    return std::nullopt;
}

void check_plan_inputs(std::uint64_t n, double d) {
    if (n == 0) throw DomainError("plan_lossy: n must be positive");
    if (!(d > 0.0)) throw DomainError("plan_lossy: distortion must be positive");
}

}  // namespace

LossyPlan plan_lossy_at(std::uint64_t n, std::uint32_t block_len, double d, std::uint32_t max_code_bits,
                        const SourceModel& model) {
    check_plan_inputs(n, d);
    check_block_len(block_len);
    if (block_len > n) throw DomainError("plan_lossy_at: block length exceeds n");
    auto plan = try_block_len(n, block_len, d, max_code_bits, model);
    if (!plan) {
        std::ostringstream msg;
        msg << "plan_lossy_at: no codebook with at most " << max_code_bits << " bits reaches distortion " << d
            << " at b=" << block_len;
        throw PlanningError(msg.str());
    }
    return *plan;
}

LossyPlan plan_lossy(std::uint64_t n, double d, std::uint32_t t, const SourceModel& model) {
    check_plan_inputs(n, d);
    const auto b_max = static_cast<std::uint32_t>(std::min<std::uint64_t>(kMaxLossyBlockLen, n));
    for (std::uint32_t b = b_max; b >= 1; --b) {
        if (auto plan = try_block_len(n, b, d, t, model)) return *plan;
    }
    std::uint32_t needed = 0;
    for (std::uint32_t b = 1; b <= b_max; ++b) {
        if (auto plan = try_block_len(n, b, d, b, model)) {
            needed = needed == 0 ? plan->code_bits : std::min(needed, plan->code_bits);
        }
    }
    std::ostringstream msg;
    msg << "plan_lossy: locality " << t << " cannot reach distortion " << d << " with b <= " << b_max;
    if (needed != 0) msg << "; smallest feasible locality is " << needed;
    throw PlanningError(msg.str());
}

double expected_distortion(const LossyPlan& plan) {
    if (plan.n == 0) return 0.0;
    const double coded = static_cast<double>(plan.full_blocks() * plan.block_len);
    return coded * plan.d_achieved / static_cast<double>(plan.n);
}

CompressedContainer compress_lossy(const f2::BitVector& x, const LossyPlan& plan, unsigned workers) {
    if (x.size() != plan.n) throw DomainError("compress_lossy: input length differs from plan.n");
    const auto codebook = plan.codebook();
    const std::uint32_t b = plan.block_len;
    const std::uint32_t k = plan.code_bits;
    const std::uint64_t blocks = plan.full_blocks();

    std::vector<std::uint32_t> indices(blocks);
    auto encode_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t j = begin; j < end; ++j) {
            std::uint32_t packed = 0;
            for (std::uint32_t t = 0; t < b; ++t) {
                if (x.get(j * b + t)) packed |= std::uint32_t{1} << t;
            }
            indices[j] = codebook.nearest(packed);
        }
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

    ContainerHeader header;
    header.mode = Mode::lossy;
    header.n = plan.n;
    header.block_len = b;
    header.code_bits = k;
    header.p = plan.model.p_rational();
    header.partial_len = plan.partial_len();
    for (std::size_t i = 0; i < codebook.size(); ++i) header.codebook.push_back(codebook.codeword(i));
    header.distortion_fixed = ContainerHeader::to_fixed(plan.d_achieved);

    f2::BitVector payload(header.payload_bits());
    for (std::uint64_t j = 0; j < blocks; ++j) {
        for (std::uint32_t t = 0; t < k; ++t) {
            if ((indices[j] >> (k - 1 - t)) & 1U) payload.set(j * k + t, true);
        }
    }
    const std::uint64_t raw_offset = blocks * k;
    for (std::uint32_t j = 0; j < plan.partial_len(); ++j) {
        if (x.get(blocks * b + j)) payload.set(raw_offset + j, true);
    }
    return CompressedContainer(std::move(header), std::move(payload));
}

LossyDecoder::LossyDecoder(const CompressedContainer& container) : container_(container) {
    if (container.header().mode != Mode::lossy) throw DomainError("LossyDecoder: container is not lossy");
}

DecodeResult LossyDecoder::decode_symbol(std::uint64_t i, QueryLedger& ledger) const {
    const auto& h = container_.header();
    if (i >= h.n) throw DomainError("decode_symbol: index " + std::to_string(i) + " out of range");
    ledger.begin_call();
    if (ledger.strict()) ledger.record(container_.header_bits());
    const std::uint64_t block = i / h.block_len;
    DecodeResult result;
    if (block < h.full_blocks()) {
        const auto window = container_.read_bits(block * h.code_bits, h.code_bits, ledger);
        std::uint32_t index = 0;
        for (std::uint32_t t = 0; t < h.code_bits; ++t) index = (index << 1) | (window.get(t) ? 1U : 0U);
        result.bit = h.codebook[index].get(i % h.block_len);
    } else {
        const std::uint64_t raw_offset = h.full_blocks() * h.code_bits + (i - block * h.block_len);
        result.bit = container_.read_bits(raw_offset, 1, ledger).get(0);
    }
    result.queries = ledger.end_call();
    return result;
}

DecodeResult LossyDecoder::decode_symbol(std::uint64_t i) const {
    QueryLedger ledger;
    return decode_symbol(i, ledger);
}

f2::BitVector LossyDecoder::decompress_all(QueryLedger& ledger) const {
    const auto& h = container_.header();
    f2::BitVector out(h.n);
    ledger.begin_call();
    for (std::uint64_t j = 0; j < h.full_blocks(); ++j) {
        const auto window = container_.read_bits(j * h.code_bits, h.code_bits, ledger);
        std::uint32_t index = 0;
        for (std::uint32_t t = 0; t < h.code_bits; ++t) index = (index << 1) | (window.get(t) ? 1U : 0U);
        const auto& cw = h.codebook[index];
        for (std::uint32_t t = 0; t < h.block_len; ++t) {
            if (cw.get(t)) out.set(j * h.block_len + t, true);
        }
    }
    const auto raw = container_.read_bits(h.full_blocks() * h.code_bits, h.partial_len, ledger);
    for (std::uint32_t t = 0; t < h.partial_len; ++t) {
        if (raw.get(t)) out.set(h.full_blocks() * h.block_len + t, true);
    }
    ledger.end_call();
    return out;
}

f2::BitVector LossyDecoder::decompress_all() const {
    QueryLedger ledger;
    return decompress_all(ledger);
}

DecodeResult decode_symbol_lossy(const CompressedContainer& c, std::uint64_t i, QueryLedger& ledger) {
    return LossyDecoder(c).decode_symbol(i, ledger);
}

}  // namespace ldsc
