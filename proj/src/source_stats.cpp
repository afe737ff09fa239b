#include "ldsc/source_stats.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ldsc/errors.hpp"

namespace ldsc {

namespace {

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw DomainError("Rational::parse: not an unsigned integer: '" + std::string(text) + "'");
    }
    return value;
}

void require_model_distortion(const SourceModel& model, double d, const char* who) {
    const double limit = std::min(model.p(), model.q());
    if (!(d > 0.0 && d < limit)) {
        throw DomainError(std::string(who) + ": distortion must lie in (0, min{p, 1-p})");
    }
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    Rational r;
    if (slash == std::string_view::npos) {
        r.num = parse_u64(text);
        r.den = 1;
    } else {
        r.num = parse_u64(text.substr(0, slash));
        r.den = parse_u64(text.substr(slash + 1));
    }
    if (r.den == 0) throw DomainError("Rational::parse: zero denominator");
    const auto g = std::gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

Rational Rational::approximate(double value, std::uint64_t max_den) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("Rational::approximate: value must be finite and ≥ 0");
    // Convergents h/k of the continued fraction, stopping at the denominator cap
    // or once the convergent reproduces the double.
    std::uint64_t h_prev = 1, h = static_cast<std::uint64_t>(std::floor(value));
    std::uint64_t k_prev = 0, k = 1;
    double frac = value - std::floor(value);
    while (frac > 0.0) {
        if (static_cast<double>(h) / static_cast<double>(k) == value) break;
        const double inv = 1.0 / frac;
        const auto a = static_cast<std::uint64_t>(std::floor(inv));
        if (a > (max_den - k_prev) / k) break;
        const std::uint64_t h_next = a * h + h_prev;
        const std::uint64_t k_next = a * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        frac = inv - std::floor(inv);
    }
    return Rational{h, k};
}

std::string Rational::to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

SourceModel::SourceModel(Rational p) : p_rational_(p), p_(p.value()) {
    if (p.den == 0 || p.num == 0 || p.num >= p.den) throw DomainError("SourceModel: p must lie strictly between 0 and 1");
}

double SourceModel::entropy() const { return binary_entropy(p_); }

double SourceModel::sequence_probability(std::uint64_t weight, std::uint64_t length) const {
    return std::pow(p_, static_cast<double>(weight)) * std::pow(1.0 - p_, static_cast<double>(length - weight));
}

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("binary_entropy: q must lie in [0, 1]");
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

double kl_divergence(double q, double p) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("kl_divergence: q must lie in [0, 1]");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("kl_divergence: p must lie in (0, 1)");
    double d = 0.0;
    if (q > 0.0) d += q * std::log2(q / p);
    if (q < 1.0) d += (1.0 - q) * std::log2((1.0 - q) / (1.0 - p));
    return std::max(d, 0.0);
}

double error_exponent_minimizer(double r, const SourceModel& model) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("error_exponent: r must lie in [0, 1]");
    const double p = model.p();
    if (r <= model.entropy()) return p;
    // h is increasing on [0, ½]; bisect on the side of ½ that p lies on, then mirror.
    double lo = std::min(p, 1.0 - p);
    double hi = 0.5;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < r) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return p <= 0.5 ? hi : 1.0 - hi;
}

double error_exponent(double r, const SourceModel& model) {
    if (r <= model.entropy()) {
        if (r < 0.0) throw DomainError("error_exponent: r must lie in [0, 1]");
        return 0.0;
    }
    return kl_divergence(error_exponent_minimizer(r, model), model.p());
}

double rate_distortion(const SourceModel& model, double d) {
    if (!(d >= 0.0)) throw DomainError("rate_distortion: distortion must be ≥ 0");
    if (d >= std::min(model.p(), model.q())) return 0.0;
    return std::max(0.0, model.entropy() - binary_entropy(d));
}

double ldlsc_rate_bound(const SourceModel& model, double d, double t, double overhead_coefficient) {
    require_model_distortion(model, d, "ldlsc_rate_bound");
    if (!(t >= 2.0)) throw DomainError("ldlsc_rate_bound: locality must be ≥ 2");
    return model.entropy() - binary_entropy(d) + overhead_coefficient * std::log2(t) / t;
}

double succinct_rate_bound(const SourceModel& model, double n, double t) {
    if (!(n >= 4.0) || !(t >= 1.0)) throw DomainError("succinct_rate_bound: need n ≥ 4 and t ≥ 1");
    const double log_n = std::log2(n);
    const double arity = log_n / t;
    if (!(arity > 1.0)) throw DomainError("succinct_rate_bound: need log2(n)/t > 1");
    return model.entropy() + log_n / n + 1.0 / std::pow(arity, t) + std::pow(n, -0.25);
}

std::string_view to_string(Tighter t) {
    switch (t) {
        case Tighter::ours: return "ours";
        case Tighter::theirs: return "theirs";
        case Tighter::tie: return "tie";
    }
    return "tie";
}

double vanishing_distortion_schedule(double n) { return 1.0 / (std::numbers::e * std::log2(n)); }

namespace {

BoundReport evaluate_point(const SourceModel& model, double d, double t, double n) {
    BoundReport r;
    r.n = n;
    r.t = t;
    r.locality = t * std::log2(n);
    r.distortion = d;
    r.succinct_bound = succinct_rate_bound(model, n, t);
    if (!(d > 0.0 && d < std::min(model.p(), model.q()))) {
        r.skipped = true;
        r.note = d <= 0.0 ? "d=0: lossless regime, lossy bound undefined" : "d >= min(p,1-p): rate-distortion is zero";
        r.our_bound = r.succinct_bound;
        r.tighter = Tighter::tie;
        return r;
    }
    r.our_bound = ldlsc_rate_bound(model, d, r.locality, r.constants.ours_overhead_coefficient);
    if (r.our_bound < r.succinct_bound - kBoundTieTolerance) {
        r.tighter = Tighter::ours;
    } else if (r.succinct_bound < r.our_bound - kBoundTieTolerance) {
        r.tighter = Tighter::theirs;
    } else {
        r.tighter = Tighter::tie;
    }
    return r;
}

}  // namespace

std::vector<BoundReport> compare_bounds(const SourceModel& model, double d, double t, const std::vector<double>& n_range) {
    if (n_range.empty()) throw DomainError("compare_bounds: empty n range");
    std::vector<BoundReport> out;
    out.reserve(n_range.size());
    for (double n : n_range) out.push_back(evaluate_point(model, d, t, n));
    return out;
}

std::vector<BoundReport> compare_bounds_vanishing_distortion(const SourceModel& model, double t,
                                                             const std::vector<double>& n_range) {
    if (n_range.empty()) throw DomainError("compare_bounds: empty n range");
    std::vector<BoundReport> out;
    out.reserve(n_range.size());
    for (double n : n_range) {
        auto r = evaluate_point(model, vanishing_distortion_schedule(n), t, n);
        r.note = "d(n)=1/(e*log2 n)";
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ldsc
