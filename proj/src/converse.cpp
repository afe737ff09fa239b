#include "ldsc/converse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "ldsc/errors.hpp"

namespace ldsc::converse {

namespace {

constexpr double kTolerance = 1e-12;

void check_symbols(std::uint32_t n) {
    if (n > kMaxEnumeratedSymbols) {
        throw CapacityError("converse: n = " + std::to_string(n) + " exceeds the 2^20 enumeration budget");
    }
}

std::vector<double> input_probabilities(std::uint32_t n, const SourceModel& model) {
    std::vector<double> by_weight(n + 1);
    for (std::uint32_t w = 0; w <= n; ++w) by_weight[w] = model.sequence_probability(w, n);
    std::vector<double> prob(std::size_t{1} << n);
    for (std::size_t x = 0; x < prob.size(); ++x) prob[x] = by_weight[std::popcount(x)];
    return prob;
}

std::uint32_t gather(std::uint32_t codeword, const std::vector<std::uint32_t>& positions) {
    std::uint32_t pattern = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) pattern |= ((codeword >> positions[j]) & 1U) << j;
    return pattern;
}

double min_symbol_prob(const SourceModel& model) { return std::min(model.p(), model.q()); }
double max_symbol_prob(const SourceModel& model) { return std::max(model.p(), model.q()); }

}  // namespace

EncoderTable encoder_from_matrix(const f2::BitMatrix& g) {
    const auto n = static_cast<std::uint32_t>(g.rows());
    const auto k = static_cast<std::uint32_t>(g.cols());
    check_symbols(n);
    if (k > 32) throw CapacityError("encoder_from_matrix: more than 32 coded bits");
    EncoderTable enc{n, k, std::vector<std::uint32_t>(std::size_t{1} << n, 0)};
    std::vector<std::uint32_t> row_bits(n);
    for (std::uint32_t a = 0; a < n; ++a) row_bits[a] = static_cast<std::uint32_t>(g.row(a).to_uint());
    // Gray-code walk: each step adds one row.
    std::uint32_t y = 0;
    for (std::uint32_t i = 1; i < enc.image.size(); ++i) {
        const auto a = static_cast<std::uint32_t>(std::countr_zero(i));
        y ^= row_bits[a];
        enc.image[i ^ (i >> 1)] = y;
    }
    return enc;
}

std::uint32_t LocalDecoderSpec::locality() const {
    std::size_t t = 0;
    for (const auto& na : neighborhoods) t = std::max(t, na.size());
    return static_cast<std::uint32_t>(t);
}

void LocalDecoderSpec::validate(std::uint32_t t) const {
    if (neighborhoods.size() != n || tables.size() != n) throw DomainError("LocalDecoderSpec: expected one entry per symbol");
    for (std::uint32_t a = 0; a < n; ++a) {
        const auto& na = neighborhoods[a];
        if (na.size() > t) {
            throw DomainError("LocalDecoderSpec: symbol " + std::to_string(a) + " reads " + std::to_string(na.size()) +
                              " bits, locality is " + std::to_string(t));
        }
        for (auto pos : na) {
            if (pos >= k) throw DomainError("LocalDecoderSpec: neighborhood position out of range");
        }
        if (tables[a].size() != (std::size_t{1} << na.size())) throw DomainError("LocalDecoderSpec: table size mismatch");
    }
}

bool LocalDecoderSpec::decode(std::uint32_t a, std::uint32_t codeword) const {
    return tables[a][gather(codeword, neighborhoods[a])] != 0;
}

std::vector<double> exact_symbol_errors(const EncoderTable& encoder, const LocalDecoderSpec& dec,
                                        const SourceModel& model) {
    check_symbols(encoder.n);
    if (dec.n != encoder.n || dec.k != encoder.k) throw DomainError("exact_symbol_errors: encoder/decoder shape mismatch");
    dec.validate(dec.k);
    const auto prob = input_probabilities(encoder.n, model);
    std::vector<double> err(encoder.n, 0.0);
    for (std::uint32_t x = 0; x < prob.size(); ++x) {
        for (std::uint32_t a = 0; a < encoder.n; ++a) {
            if (dec.decode(a, encoder.image[x]) != (((x >> a) & 1U) != 0)) err[a] += prob[x];
        }
    }
    return err;
}

double exact_block_error(const EncoderTable& encoder, const LocalDecoderSpec& dec, const SourceModel& model) {
    check_symbols(encoder.n);
    if (dec.n != encoder.n || dec.k != encoder.k) throw DomainError("exact_block_error: encoder/decoder shape mismatch");
    dec.validate(dec.k);
    const auto prob = input_probabilities(encoder.n, model);
    double err = 0.0;
    for (std::uint32_t x = 0; x < prob.size(); ++x) {
        for (std::uint32_t a = 0; a < encoder.n; ++a) {
            if (dec.decode(a, encoder.image[x]) != (((x >> a) & 1U) != 0)) {
                err += prob[x];
                break;
            }
        }
    }
    return err;
}

LocalDecoderSpec optimal_local_decoder(const EncoderTable& encoder,
                                       const std::vector<std::vector<std::uint32_t>>& neighborhoods,
                                       const SourceModel& model) {
    check_symbols(encoder.n);
    if (neighborhoods.size() != encoder.n) throw DomainError("optimal_local_decoder: one neighborhood per symbol");
    LocalDecoderSpec dec{encoder.n, encoder.k, neighborhoods, {}};
    for (const auto& na : neighborhoods) {
        if (na.size() > 20) throw CapacityError("optimal_local_decoder: neighborhood wider than 20 bits");
        dec.tables.emplace_back(std::size_t{1} << na.size(), 0);
    }
    dec.validate(encoder.k);
    const auto prob = input_probabilities(encoder.n, model);
    for (std::uint32_t a = 0; a < encoder.n; ++a) {
        const auto& na = neighborhoods[a];
        std::vector<double> mass0(dec.tables[a].size(), 0.0);
        std::vector<double> mass1(dec.tables[a].size(), 0.0);
        for (std::uint32_t x = 0; x < prob.size(); ++x) {
            const auto pattern = gather(encoder.image[x], na);
            if ((x >> a) & 1U) {
                mass1[pattern] += prob[x];
            } else {
                mass0[pattern] += prob[x];
            }
        }
        for (std::size_t y = 0; y < mass0.size(); ++y) dec.tables[a][y] = mass1[y] > mass0[y] ? 1 : 0;
    }
    return dec;
}

LocalDecoderSpec optimal_local_decoder(const f2::BitMatrix& g,
                                       const std::vector<std::vector<std::uint32_t>>& neighborhoods,
                                       const SourceModel& model) {
    return optimal_local_decoder(encoder_from_matrix(g), neighborhoods, model);
}

namespace {

struct SearchContext {
    std::uint32_t n;
    std::uint32_t k;
    std::uint32_t t;
    std::vector<double> mass;  // probability of each set of inputs (bitmask over x)
    std::vector<std::vector<std::uint32_t>> group;  // y ↦ g(y) for every coded-bit symmetry
    std::vector<std::uint32_t> neighborhoods;       // bitmasks over coded bits
};

std::vector<std::vector<std::uint32_t>> coded_bit_symmetries(std::uint32_t k) {
    std::vector<std::uint32_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0U);
    std::vector<std::vector<std::uint32_t>> group;
    const std::uint32_t values = 1U << k;
    do {
        for (std::uint32_t flip = 0; flip < values; ++flip) {
            std::vector<std::uint32_t> map(values);
            for (std::uint32_t y = 0; y < values; ++y) {
                std::uint32_t z = 0;
                for (std::uint32_t j = 0; j < k; ++j) z |= ((y >> j) & 1U) << perm[j];
                map[y] = z ^ flip;
            }
            group.push_back(std::move(map));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return group;
}

// Lexicographically smallest table in its orbit.
bool is_orbit_representative(const std::vector<std::uint32_t>& enc, const SearchContext& ctx) {
    for (const auto& g : ctx.group) {
        for (std::size_t x = 0; x < enc.size(); ++x) {
            const auto mapped = g[enc[x]];
            if (mapped < enc[x]) return false;
            if (mapped > enc[x]) break;
        }
    }
    return true;
}

double best_success_for(const std::vector<std::uint32_t>& enc, const SearchContext& ctx) {
    const auto inputs = static_cast<std::uint32_t>(enc.size());
    // Every decoder on a smaller neighborhood equals one on a t-subset that
    // contains it, so t-subsets with all their tables cover every decoder.
    std::vector<std::vector<std::uint32_t>> options(ctx.n);
    for (std::uint32_t a = 0; a < ctx.n; ++a) {
        auto& opts = options[a];
        for (auto nb : ctx.neighborhoods) {
            std::vector<std::uint32_t> positions;
            for (std::uint32_t j = 0; j < ctx.k; ++j) {
                if ((nb >> j) & 1U) positions.push_back(j);
            }
            const std::uint32_t patterns = 1U << positions.size();
            for (std::uint64_t table = 0; table < (std::uint64_t{1} << patterns); ++table) {
                std::uint32_t correct = 0;
                for (std::uint32_t x = 0; x < inputs; ++x) {
                    const bool out = ((table >> gather(enc[x], positions)) & 1U) != 0;
                    if (out == (((x >> a) & 1U) != 0)) correct |= 1U << x;
                }
                opts.push_back(correct);
            }
        }
        std::sort(opts.begin(), opts.end());
        opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
    }

    double best = 0.0;
    auto descend = [&](auto&& self, std::uint32_t a, std::uint32_t alive) -> void {
        if (alive == 0) return;
        if (a == ctx.n) {
            best = std::max(best, ctx.mass[alive]);
            return;
        }
        for (auto m : options[a]) self(self, a + 1, alive & m);
    };
    descend(descend, 0, inputs == 32 ? ~0U : (1U << inputs) - 1);
    return best;
}

}  // namespace

TwoLocalSearch search_local_schemes(std::uint32_t n, std::uint32_t k, const SourceModel& model, std::uint32_t t,
                                    unsigned workers) {
    if (n == 0 || k == 0) throw DomainError("search_local_schemes: n and k must be positive");
    if (t == 0) throw DomainError("search_local_schemes: locality must be positive");
    const std::uint64_t table_bits = static_cast<std::uint64_t>(k) << n;
    if (n > 4 || table_bits > 16) {
        throw CapacityError("search_local_schemes: k·2^n = " + std::to_string(table_bits) + " exceeds 16");
    }
    SearchContext ctx{n, k, t, {}, coded_bit_symmetries(k), {}};
    const std::uint32_t inputs = 1U << n;
    const auto prob = input_probabilities(n, model);
    ctx.mass.assign(std::size_t{1} << inputs, 0.0);
    for (std::size_t m = 1; m < ctx.mass.size(); ++m) {
        ctx.mass[m] = ctx.mass[m & (m - 1)] + prob[std::countr_zero(m)];
    }
    const std::uint32_t width = std::min(t, k);
    for (std::uint32_t nb = 0; nb < (1U << k); ++nb) {
        if (static_cast<std::uint32_t>(std::popcount(nb)) == width) ctx.neighborhoods.push_back(nb);
    }

    const std::uint64_t total = std::uint64_t{1} << table_bits;
    const std::uint32_t mask = (1U << k) - 1;
    struct Partial {
        double best = -1.0;
        std::uint64_t witness = 0;
        std::uint64_t searched = 0;
    };
    auto run = [&](std::uint64_t begin, std::uint64_t end, Partial& out) {
        std::vector<std::uint32_t> enc(inputs);
        for (std::uint64_t e = begin; e < end; ++e) {
            for (std::uint32_t x = 0; x < inputs; ++x) enc[x] = static_cast<std::uint32_t>(e >> (k * x)) & mask;
            if (!is_orbit_representative(enc, ctx)) continue;
            ++out.searched;
            const double s = best_success_for(enc, ctx);
            if (s > out.best) {
                out.best = s;
                out.witness = e;
            }
        }
    };

    workers = std::max(1U, workers);
    std::vector<Partial> partials(workers);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = std::min(total, w * chunk);
            const std::uint64_t end = std::min(total, begin + chunk);
            pool.emplace_back(run, begin, end, std::ref(partials[w]));
        }
    }

    TwoLocalSearch result;
    result.n = n;
    result.k = k;
    result.t = t;
    result.encoders_total = total;
    result.bound = 1.0 - std::pow(min_symbol_prob(model), 2);
    std::uint64_t witness = 0;
    result.best_success = -1.0;
    for (const auto& part : partials) {
        result.encoders_searched += part.searched;
        if (part.best > result.best_success) {
            result.best_success = part.best;
            witness = part.witness;
        }
    }
    for (std::uint32_t x = 0; x < inputs; ++x) result.witness.push_back(static_cast<std::uint32_t>(witness >> (k * x)) & mask);
    return result;
}

double best_2local_success(std::uint32_t n, std::uint32_t k, const SourceModel& model, unsigned workers) {
    return search_local_schemes(n, k, model, 2, workers).best_success;
}

bool LinearDecoderCheck::holds() const {
    return error + kTolerance >= bound && error + kTolerance >= bound_from_k &&
           static_cast<double>(k) + 1e-9 >= k_lower_bound;
}

LinearDecoderCheck check_linear_decoder(const std::vector<f2::BitVector>& images, const SourceModel& model) {
    if (images.empty()) throw DomainError("linear_decoder_error: need at least one image");
    if (images.size() > kMaxEnumeratedSymbols) throw CapacityError("linear_decoder_error: k exceeds 20");
    const auto n = static_cast<std::uint32_t>(images.front().size());
    for (const auto& v : images) {
        if (v.size() != n) throw DomainError("linear_decoder_error: images differ in length");
    }
    const auto span = f2::SubspaceBasis::span_of(n, images);
    LinearDecoderCheck check;
    check.n = n;
    check.k = static_cast<std::uint32_t>(images.size());
    check.rank = static_cast<std::uint32_t>(span.dimension());
    check.error = 1.0 - f2::subspace_probability(span, model.p());
    const double top = max_symbol_prob(model);
    check.bound = 1.0 - std::pow(top, n - check.rank);
    check.bound_from_k = check.k >= n ? 0.0 : 1.0 - std::pow(top, n - check.k);
    check.k_lower_bound = check.error >= 1.0 ? static_cast<double>(n) : n - std::log1p(-check.error) / std::log(top);
    return check;
}

double linear_decoder_error(const std::vector<f2::BitVector>& images, const SourceModel& model) {
    const auto check = check_linear_decoder(images, model);
    if (!check.holds()) {
        std::ostringstream msg;
        msg << "linear_decoder_error: error " << check.error << " below span bound " << check.bound;
        throw Error(msg.str());
    }
    return check.error;
}

SubspaceBoundReport verify_subspace_bounds(std::uint32_t n_max, const std::vector<double>& p_list, double tolerance) {
    if (n_max > 5) throw CapacityError("verify_subspace_bounds: n_max above 5");
    SubspaceBoundReport report;
    for (std::uint32_t n = 0; n <= n_max; ++n) {
        for (const auto& u : f2::enumerate_all_subspaces(n)) {
            ++report.subspaces;
            for (double p : p_list) {
                ++report.checks;
                const double mass = f2::subspace_probability(u, p);
                const auto bounds = f2::subspace_mass_bounds(u, p);
                report.min_upper_slack = std::min(report.min_upper_slack, bounds.upper - mass);
                report.min_lower_slack = std::min(report.min_lower_slack, mass - bounds.lower);
                if (mass + tolerance < bounds.lower || mass > bounds.upper + tolerance) {
                    ++report.violations;
                    std::ostringstream inst;
                    inst << "n=" << n << " dim=" << u.dimension() << " p=" << p;
                    report.violating.push_back({"subspace-mass", inst.str(), bounds.lower, mass, false});
                }
            }
        }
    }
    return report;
}

namespace {

std::vector<std::uint32_t> random_subset(std::mt19937_64& rng, std::uint32_t universe, std::uint32_t size) {
    std::vector<std::uint32_t> all(universe);
    std::iota(all.begin(), all.end(), 0U);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(size);
    std::sort(all.begin(), all.end());
    return all;
}

f2::BitVector random_vector(std::mt19937_64& rng, std::uint32_t len) {
    f2::BitVector v(len);
    for (std::uint32_t i = 0; i < len; ++i) {
        if (rng() & 1U) v.set(i, true);
    }
    return v;
}

void record_margin(WitnessSuite& suite, double measured, double bound) {
    ++suite.draws;
    suite.min_margin = std::min(suite.min_margin, measured - bound);
    if (measured + kTolerance < bound) ++suite.failures;
}

}  // namespace

WitnessSuite linear_encoder_suite(std::uint64_t seed, std::uint64_t draws, const SourceModel& model, NeighborhoodKind kind,
                            std::uint32_t n_max) {
    if (n_max < 2 || n_max > kMaxEnumeratedSymbols) throw DomainError("linear_encoder_suite: n_max must lie in [2, 20]");
    std::mt19937_64 rng(seed);
    WitnessSuite suite;
    constexpr std::uint32_t t = 2;
    suite.bound = std::pow(min_symbol_prob(model), t);
    for (std::uint64_t d = 0; d < draws; ++d) {
        const auto n = static_cast<std::uint32_t>(2 + rng() % (n_max - 1));
        const std::uint32_t k = n - 1;
        std::vector<f2::BitVector> rows;
        for (std::uint32_t a = 0; a < n; ++a) rows.push_back(random_vector(rng, k));
        const auto g = f2::BitMatrix::from_rows(std::move(rows));
        const std::uint32_t width = std::min(t, k);
        std::vector<std::vector<std::uint32_t>> nbs;
        for (std::uint32_t a = 0; a < n; ++a) {
            if (kind == NeighborhoodKind::random) {
                nbs.push_back(random_subset(rng, k, width));
            } else {
                std::vector<std::uint32_t> lead(width);
                std::iota(lead.begin(), lead.end(), 0U);
                nbs.push_back(std::move(lead));
            }
        }
        const auto enc = encoder_from_matrix(g);
        const auto dec = optimal_local_decoder(enc, nbs, model);
        record_margin(suite, exact_block_error(enc, dec, model), suite.bound);
    }
    return suite;
}

WitnessSuite linear_decoder_suite(std::uint64_t seed, std::uint64_t draws, const SourceModel& model, std::uint32_t n_max) {
    if (n_max < 2 || n_max > 30) throw DomainError("linear_decoder_suite: n_max must lie in [2, 30]");
    std::mt19937_64 rng(seed);
    WitnessSuite suite;
    suite.bound = 1.0;
    for (std::uint64_t d = 0; d < draws; ++d) {
        const auto n = static_cast<std::uint32_t>(2 + rng() % (n_max - 1));
        const auto k = static_cast<std::uint32_t>(1 + rng() % (n - 1));
        std::vector<f2::BitVector> images;
        for (std::uint32_t j = 0; j < k; ++j) images.push_back(random_vector(rng, n));
        const auto check = check_linear_decoder(images, model);
        record_margin(suite, check.error, check.bound_from_k);
        suite.bound = std::min(suite.bound, check.bound_from_k);
    }
    return suite;
}

}  // namespace ldsc::converse
