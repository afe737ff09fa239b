#include "ldsc/cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "ldsc/container.hpp"
#include "ldsc/converse.hpp"
#include "ldsc/errors.hpp"
#include "ldsc/lossless.hpp"
#include "ldsc/lossy.hpp"
#include "ldsc/source_stats.hpp"

namespace ldsc::cli {

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << v;
    return s.str();
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    if (path.empty()) throw UsageError("missing --input");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    if (path.empty()) throw UsageError("missing --output");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

f2::BitVector read_source(const RunConfig& cfg) {
    const auto bytes = read_file(cfg.input);
    const std::uint64_t available = bytes.size() * 8ULL;
    const std::uint64_t n = cfg.bits == 0 ? available : cfg.bits;
    if (n > available) {
        throw UsageError("--bits " + std::to_string(n) + " exceeds the " + std::to_string(available) + " bits in " +
                         cfg.input);
    }
    return unpack_bits(bytes, n);
}

CompressedContainer read_container(const std::string& path) {
    const auto bytes = read_file(path);
    return deserialize(bytes);
}

SourceModel parse_model(const std::string& p) {
    try {
        return SourceModel(Rational::parse(p));
    } catch (const DomainError& e) {
        throw UsageError(std::string("--p: ") + e.what());
    }
}

// CSV goes to --csv when given, else to stdout.
class CsvSink {
public:
    CsvSink(const RunConfig& cfg, std::ostream& fallback) : path_(cfg.csv), out_(&fallback) {
        if (!path_.empty()) {
            file_ = std::make_unique<std::ofstream>(path_, std::ios::trunc);
            if (!*file_) throw IoError("cannot open " + path_ + " for writing");
            out_ = file_.get();
        }
        *out_ << "# ldsc-csv v" << kCsvSchemaVersion << "\n# config: " << cfg.describe() << "\n";
    }
    std::ostream& stream() { return *out_; }
    void close() {
        if (file_) {
            file_->flush();
            if (!*file_) throw IoError("write failed: " + path_);
        }
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

std::vector<std::uint64_t> n_sweep(const RunConfig& cfg) {
    if (cfg.n_step_log == 0 || cfg.n_min_log > cfg.n_max_log || cfg.n_max_log > 62) {
        throw UsageError("sweep needs n-min-log <= n-max-log <= 62 and n-step-log > 0");
    }
    std::vector<std::uint64_t> ns;
    for (std::uint32_t e = cfg.n_min_log; e <= cfg.n_max_log; e += cfg.n_step_log) ns.push_back(std::uint64_t{1} << e);
    return ns;
}

// Evaluates rows[i] = work(i) on a fixed pool; output order never depends on scheduling.
std::vector<std::string> parallel_rows(std::size_t count, unsigned workers,
                                       const std::function<std::string(std::size_t)>& work) {
    std::vector<std::string> rows(count);
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::exception_ptr> errors(count);
    auto task = [&](unsigned w) {
        for (std::size_t i = w; i < count; i += workers) {
            try {
                rows[i] = work(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(task, w);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

int cmd_compress(const RunConfig& cfg, std::ostream& out) {
    const auto model = parse_model(cfg.p);
    const auto x = read_source(cfg);
    if (x.size() == 0) throw UsageError("input holds no bits");
    std::optional<CompressedContainer> container;
    out << "# config: " << cfg.describe() << "\n";
    if (cfg.mode == "lossless") {
        if (!(cfg.rate > 0.0)) throw UsageError("lossless mode needs --rate");
        const auto plan = plan_lossless(x.size(), cfg.rate, cfg.epsilon, model, cfg.max_block_len);
        CompressStats stats;
        container.emplace(compress(x, plan, &stats, cfg.workers));
        out << "mode=lossless n=" << plan.n << " b=" << plan.block_len << " k_b=" << plan.code_bits
            << " rate=" << fixed4(plan.rate()) << " locality=" << plan.locality()
            << " exact_error=" << num(exact_error(plan)) << " uncovered_blocks=" << stats.uncovered_blocks << "\n";
    } else if (cfg.mode == "lossy") {
        if (!(cfg.distortion > 0.0)) throw UsageError("lossy mode needs --d");
        const auto plan = plan_lossy(x.size(), cfg.distortion, cfg.t, model);
        container.emplace(compress_lossy(x, plan, cfg.workers));
        out << "mode=lossy n=" << plan.n << " b=" << plan.block_len << " k_b=" << plan.code_bits
            << " rate=" << fixed4(plan.rate()) << " locality=" << plan.locality()
            << " exact_distortion=" << num(expected_distortion(plan)) << " block_distortion=" << num(plan.d_achieved)
            << "\n";
    } else {
        throw UsageError("--mode must be lossless or lossy");
    }
    const auto bytes = serialize(*container);
    write_file(cfg.output, bytes);
    out << "payload_bits=" << container->payload_bits() << " container_bytes=" << bytes.size() << "\n";
    return kOk;
}

int cmd_decompress(const RunConfig& cfg, std::ostream& out) {
    const auto c = read_container(cfg.input);
    const auto x = c.header().mode == Mode::lossless ? LosslessDecoder(c).decompress_all()
                                                     : LossyDecoder(c).decompress_all();
    write_file(cfg.output, pack_bits(x));
    out << "bits=" << x.size() << "\n";
    return kOk;
}

int cmd_query(const RunConfig& cfg, std::ostream& out) {
    const auto c = read_container(cfg.input);
    std::function<DecodeResult(std::uint64_t, QueryLedger&)> decode;
    std::optional<LosslessDecoder> lossless;
    std::optional<LossyDecoder> lossy;
    if (c.header().mode == Mode::lossless) {
        lossless.emplace(c);
        decode = [&](std::uint64_t i, QueryLedger& l) { return lossless->decode_symbol(i, l); };
    } else {
        lossy.emplace(c);
        decode = [&](std::uint64_t i, QueryLedger& l) { return lossy->decode_symbol(i, l); };
    }
    QueryLedger ledger(cfg.strict);
    if (cfg.all) {
        for (std::uint64_t i = 0; i < c.header().n; ++i) (void)decode(i, ledger);
        out << "calls=" << ledger.calls() << " max_queries=" << ledger.max() << " k_b=" << c.header().code_bits << "\n";
        return kOk;
    }
    const auto r = decode(cfg.index, ledger);
    out << "index=" << cfg.index << " bit=" << (r.bit ? 1 : 0) << " queries=" << r.queries << "\n";
    return kOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    const auto model = parse_model(cfg.p);
    CsvSink sink(cfg, out);
    auto& csv = sink.stream();
    bool infeasible = false;
    if (cfg.mode == "lossless") {
        if (!(cfg.rate > 0.0)) throw UsageError("lossless sweep needs --rate");
        const auto ns = n_sweep(cfg);
        csv << "n,b,k_b,rate,exact_error,locality,implied_c,status\n";
        const auto rows = parallel_rows(ns.size(), cfg.workers, [&](std::size_t i) {
            std::ostringstream row;
            try {
                const auto plan = plan_lossless(ns[i], cfg.rate, cfg.epsilon, model, cfg.max_block_len);
                row << plan.n << ',' << plan.block_len << ',' << plan.code_bits << ',' << num(plan.rate()) << ','
                    << num(exact_error(plan)) << ',' << plan.locality() << ',' << num(plan.implied_c()) << ",ok";
            } catch (const PlanningError&) {
                row << ns[i] << ",,,,,,,infeasible";
            }
            return row.str();
        });
        for (const auto& r : rows) {
            if (r.ends_with("infeasible")) infeasible = true;
            csv << r << "\n";
        }
    } else if (cfg.mode == "lossy") {
        if (!(cfg.distortion > 0.0)) throw UsageError("lossy sweep needs --d");
        if (cfg.t_min > cfg.t_max) throw UsageError("--t-min exceeds --t-max");
        csv << "n,t,b,k_b,rate,exact_distortion,locality,rate_distortion,status\n";
        const std::size_t count = cfg.t_max - cfg.t_min + 1;
        const auto rows = parallel_rows(count, cfg.workers, [&](std::size_t i) {
            const auto t = static_cast<std::uint32_t>(cfg.t_min + i);
            std::ostringstream row;
            try {
                const auto plan = plan_lossy(cfg.n, cfg.distortion, t, model);
                row << plan.n << ',' << t << ',' << plan.block_len << ',' << plan.code_bits << ',' << num(plan.rate())
                    << ',' << num(expected_distortion(plan)) << ',' << plan.locality() << ','
                    << num(rate_distortion(model, plan.d_achieved)) << ",ok";
            } catch (const PlanningError&) {
                row << cfg.n << ',' << t << ",,,,,,,infeasible";
            }
            return row.str();
        });
        for (const auto& r : rows) {
            if (r.ends_with("infeasible")) infeasible = true;
            csv << r << "\n";
        }
    } else {
        throw UsageError("--mode must be lossless or lossy");
    }
    sink.close();
    return infeasible ? kInfeasible : kOk;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
    const auto model = parse_model(cfg.p);
    std::vector<double> ns;
    for (auto n : n_sweep(cfg)) ns.push_back(static_cast<double>(n));
    std::vector<BoundReport> reports;
    if (cfg.schedule == "fixed") {
        reports = compare_bounds(model, cfg.distortion, cfg.t, ns);
    } else if (cfg.schedule == "vanishing") {
        reports = compare_bounds_vanishing_distortion(model, cfg.t, ns);
    } else {
        throw UsageError("--schedule must be fixed or vanishing");
    }
    CsvSink sink(cfg, out);
    auto& csv = sink.stream();
    if (!reports.empty()) {
        const auto& k = reports.front().constants;
        csv << "# constants: ours_overhead_coefficient=" << num(k.ours_overhead_coefficient)
            << " succinct_log_coefficient=" << num(k.succinct_log_coefficient)
            << " succinct_tail_exponent=" << num(k.succinct_tail_exponent) << "\n";
    }
    csv << "n,t,locality,distortion,our_bound,succinct_bound,tighter,skipped,note\n";
    for (const auto& r : reports) {
        csv << num(r.n) << ',' << num(r.t) << ',' << num(r.locality) << ',' << num(r.distortion) << ','
            << (r.skipped ? "" : num(r.our_bound)) << ',' << num(r.succinct_bound) << ','
            << (r.skipped ? "" : std::string(to_string(r.tighter))) << ',' << (r.skipped ? 1 : 0) << ',' << r.note
            << "\n";
    }
    sink.close();
    return kOk;
}

std::vector<SourceModel> verify_models(const RunConfig& cfg, const std::vector<std::string>& defaults) {
    const auto& list = cfg.p_list.empty() ? defaults : cfg.p_list;
    std::vector<SourceModel> models;
    for (const auto& p : list) models.push_back(parse_model(p));
    return models;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const std::vector<std::string> checks = {"subspace", "two-local", "linear-encoder", "linear-decoder"};
    if (cfg.check != "all" && std::find(checks.begin(), checks.end(), cfg.check) == checks.end()) {
        throw UsageError("--check must be all, subspace, two-local, linear-encoder or linear-decoder");
    }
    auto wants = [&](const std::string& c) { return cfg.check == "all" || cfg.check == c; };
    CsvSink sink(cfg, out);
    auto& csv = sink.stream();
    csv << "claim,instance,bound,measured,pass\n";
    std::vector<std::string> summary;
    bool failed = false;
    auto emit = [&](const converse::CheckRecord& r) {
        csv << r.claim << ',' << r.instance << ',' << num(r.bound) << ',' << num(r.measured) << ','
            << (r.pass ? "PASS" : "FAIL") << "\n";
        failed = failed || !r.pass;
    };

    if (wants("subspace")) {
        const auto models = verify_models(cfg, {"1/10", "3/10", "1/2"});
        std::vector<double> ps;
        std::string plist;
        for (const auto& m : models) {
            ps.push_back(m.p());
            plist += (plist.empty() ? "" : " ") + m.p_rational().to_string();
        }
        const auto rep = converse::verify_subspace_bounds(4, ps);
        for (const auto& v : rep.violating) emit(v);
        emit({"subspace-mass", "n<=4 p=" + plist, 0.0, static_cast<double>(rep.violations), rep.violations == 0});
        summary.push_back("subspace: " + std::to_string(rep.subspaces) + " subspaces, " + std::to_string(rep.checks) +
                          " checks, " + std::to_string(rep.violations) + " violations");
    }
    if (wants("two-local")) {
        for (const auto& m : verify_models(cfg, {"3/10", "1/2"})) {
            for (auto [n, k] : {std::pair{2U, 1U}, std::pair{3U, 2U}}) {
                const auto s = converse::search_local_schemes(n, k, m, 2, cfg.workers);
                const std::string inst =
                    "n=" + std::to_string(n) + " k=" + std::to_string(k) + " p=" + m.p_rational().to_string();
                emit({"two-local-success", inst, s.bound, s.best_success, s.holds()});
                summary.push_back("two-local " + inst + ": " + num(s.best_success) + " <= " + num(s.bound) + " " +
                                  (s.holds() ? "PASS" : "FAIL") + " (" + std::to_string(s.encoders_searched) +
                                  " of " + std::to_string(s.encoders_total) + " encoders searched)");
            }
        }
    }
    if (wants("linear-encoder")) {
        for (const auto& m : verify_models(cfg, {"3/10", "1/2"})) {
            for (auto kind : {converse::NeighborhoodKind::random, converse::NeighborhoodKind::leading}) {
                const auto s = converse::linear_encoder_suite(cfg.seed, cfg.draws, m, kind);
                const std::string inst = std::string(kind == converse::NeighborhoodKind::random ? "random" : "leading") +
                                         " draws=" + std::to_string(s.draws) + " p=" + m.p_rational().to_string();
                emit({"linear-encoder-error", inst, s.bound, s.bound + s.min_margin, s.failures == 0});
            }
        }
    }
    if (wants("linear-decoder")) {
        for (const auto& m : verify_models(cfg, {"3/10", "1/2"})) {
            const auto s = converse::linear_decoder_suite(cfg.seed, cfg.draws, m);
            const std::string inst = "draws=" + std::to_string(s.draws) + " p=" + m.p_rational().to_string();
            emit({"linear-decoder-error-margin", inst, 0.0, s.min_margin, s.failures == 0});
        }
    }
    for (const auto& line : summary) csv << "# " << line << "\n";
    sink.close();
    return failed ? kConverseFailure : kOk;
}

}  // namespace

std::string RunConfig::describe() const {
    std::ostringstream s;
    s << "subcommand=" << subcommand << " mode=" << mode << " p=" << p;
    if (!p_list.empty()) {
        s << " p_list=";
        for (std::size_t i = 0; i < p_list.size(); ++i) s << (i ? "," : "") << p_list[i];
    }
    s << " rate=" << num(rate) << " epsilon=" << num(epsilon) << " d=" << num(distortion) << " t=" << t
      << " n_log=" << n_min_log << ".." << n_max_log << "/" << n_step_log << " n=" << n << " t_range=" << t_min << ".."
      << t_max << " max_block_len=" << max_block_len << " schedule=" << schedule << " check=" << check
      << " seed=" << seed << " draws=" << draws;
    return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Locally decodable compression of Bernoulli bit streams", "ldsc"};
    app.require_subcommand(1);

    auto add_model = [&](CLI::App* sub) { sub->add_option("--p", cfg.p, "Bernoulli parameter as num/den"); };
    auto add_sweep = [&](CLI::App* sub) {
        sub->add_option("--n-min-log", cfg.n_min_log, "Smallest log2 n");
        sub->add_option("--n-max-log", cfg.n_max_log, "Largest log2 n");
        sub->add_option("--n-step-log", cfg.n_step_log, "Step in log2 n");
    };

    auto* compress_cmd = app.add_subcommand("compress", "Compress a raw bit file into a container");
    compress_cmd->add_option("--input,-i", cfg.input, "Raw source file (bits packed MSB-first)")->required();
    compress_cmd->add_option("--output,-o", cfg.output, "Container file")->required();
    compress_cmd->add_option("--bits", cfg.bits, "Source length in bits (default: whole file)");
    compress_cmd->add_option("--mode", cfg.mode, "lossless or lossy");
    add_model(compress_cmd);
    compress_cmd->add_option("--rate", cfg.rate, "Target rate (lossless)");
    compress_cmd->add_option("--epsilon", cfg.epsilon, "Block error budget (lossless)");
    compress_cmd->add_option("--max-block-len", cfg.max_block_len, "Planner block length cap (lossless)");
    compress_cmd->add_option("--d", cfg.distortion, "Target distortion (lossy)");
    compress_cmd->add_option("--t", cfg.t, "Locality cap (lossy)");
    compress_cmd->add_option("--workers", cfg.workers, "Encoder threads");

    auto* decompress_cmd = app.add_subcommand("decompress", "Decode a whole container to a raw bit file");
    decompress_cmd->add_option("--input,-i", cfg.input, "Container file")->required();
    decompress_cmd->add_option("--output,-o", cfg.output, "Raw output file")->required();

    auto* query_cmd = app.add_subcommand("query", "Decode one symbol and report payload bits read");
    query_cmd->add_option("--input,-i", cfg.input, "Container file")->required();
    query_cmd->add_option("--index", cfg.index, "Symbol index (0-based)");
    query_cmd->add_flag("--all", cfg.all, "Query every index and report the maximum");
    query_cmd->add_flag("--strict", cfg.strict, "Count header bits as read on every call");

    auto* analyze_cmd = app.add_subcommand("analyze", "Planner sweep as CSV");
    analyze_cmd->add_option("--mode", cfg.mode, "lossless (sweep n) or lossy (sweep t)");
    add_model(analyze_cmd);
    analyze_cmd->add_option("--rate", cfg.rate, "Target rate (lossless)");
    analyze_cmd->add_option("--epsilon", cfg.epsilon, "Block error budget (lossless)");
    analyze_cmd->add_option("--max-block-len", cfg.max_block_len, "Planner block length cap (lossless)");
    analyze_cmd->add_option("--d", cfg.distortion, "Target distortion (lossy)");
    analyze_cmd->add_option("--n", cfg.n, "Source length (lossy)");
    analyze_cmd->add_option("--t-min", cfg.t_min, "Smallest locality (lossy)");
    analyze_cmd->add_option("--t-max", cfg.t_max, "Largest locality (lossy)");
    add_sweep(analyze_cmd);
    analyze_cmd->add_option("--csv", cfg.csv, "Write CSV here instead of stdout");
    analyze_cmd->add_option("--workers", cfg.workers, "Grid points evaluated in parallel");

    auto* bounds_cmd = app.add_subcommand("bounds", "Compare the local lossy bound with the succinct-structure rate");
    add_model(bounds_cmd);
    bounds_cmd->add_option("--d", cfg.distortion, "Distortion (fixed schedule)");
    bounds_cmd->add_option("--t", cfg.t, "Queries per log2 n");
    bounds_cmd->add_option("--schedule", cfg.schedule, "fixed or vanishing");
    add_sweep(bounds_cmd);
    bounds_cmd->add_option("--csv", cfg.csv, "Write CSV here instead of stdout");

    auto* verify_cmd = app.add_subcommand("verify", "Exact converse checks on small instances");
    verify_cmd->add_option("--check", cfg.check, "all, subspace, two-local, linear-encoder, linear-decoder");
    verify_cmd->add_option("--p", cfg.p_list, "Bernoulli parameters as num/den (repeatable)");
    verify_cmd->add_option("--seed", cfg.seed, "Seed for the random-draw suites");
    verify_cmd->add_option("--draws", cfg.draws, "Draws per random suite");
    verify_cmd->add_option("--workers", cfg.workers, "Search threads");
    verify_cmd->add_option("--csv", cfg.csv, "Write the report here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
    try {
        if (cfg.subcommand == "compress") return cmd_compress(cfg, out);
        if (cfg.subcommand == "decompress") return cmd_decompress(cfg, out);
        if (cfg.subcommand == "query") return cmd_query(cfg, out);
        if (cfg.subcommand == "analyze") return cmd_analyze(cfg, out);
        if (cfg.subcommand == "bounds") return cmd_bounds(cfg, out);
        if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return kIo;
    } catch (const PlanningError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    err << "error: unknown subcommand\n";
    return kUsage;
}

}  // namespace ldsc::cli
