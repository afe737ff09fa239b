#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "ldsc/container.hpp"
#include "ldsc/converse.hpp"
#include "ldsc/errors.hpp"
#include "ldsc/lossless.hpp"
#include "ldsc/lossy.hpp"
#include "ldsc/source_stats.hpp"

namespace py = pybind11;
using namespace ldsc;

namespace {

// p arrives as "num/den" or a float.
SourceModel model_from(const py::object& p) {
    if (py::isinstance<py::str>(p)) return SourceModel(Rational::parse(p.cast<std::string>()));
    return SourceModel(p.cast<double>());
}

f2::BitVector bits_from(const std::string& s) { return f2::BitVector::from_string(s); }

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
    return {reinterpret_cast<const char*>(v.data()), v.size()};
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

// Owns the container so decoders built on it stay valid.
struct Container {
    CompressedContainer c;

    [[nodiscard]] bool lossless() const { return c.header().mode == Mode::lossless; }

    [[nodiscard]] py::tuple decode_symbol(std::uint64_t i, bool strict) const {
        QueryLedger ledger(strict);
        const auto r = lossless() ? LosslessDecoder(c).decode_symbol(i, ledger) : LossyDecoder(c).decode_symbol(i, ledger);
        return py::make_tuple(static_cast<int>(r.bit), r.queries);
    }

    [[nodiscard]] std::string decompress() const {
        return (lossless() ? LosslessDecoder(c).decompress_all() : LossyDecoder(c).decompress_all()).to_string();
    }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Locally decodable compression of Bernoulli bit strings";

    auto base = py::register_exception<Error>(m, "LdscError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<PlanningError>(m, "PlanningError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());

    m.def("binary_entropy", &binary_entropy, py::arg("q"));
    m.def("kl_divergence", &kl_divergence, py::arg("q"), py::arg("p"));
    m.def(
        "error_exponent", [](double r, const py::object& p) { return error_exponent(r, model_from(p)); },
        py::arg("r"), py::arg("p"));
    m.def(
        "rate_distortion", [](const py::object& p, double d) { return rate_distortion(model_from(p), d); },
        py::arg("p"), py::arg("d"));
    m.def(
        "ldlsc_rate_bound",
        [](const py::object& p, double d, double t) { return ldlsc_rate_bound(model_from(p), d, t); }, py::arg("p"),
        py::arg("d"), py::arg("t"));
    m.def(
        "succinct_rate_bound",
        [](const py::object& p, double n, double t) { return succinct_rate_bound(model_from(p), n, t); },
        py::arg("p"), py::arg("n"), py::arg("t"));

    py::class_<LosslessPlan>(m, "LosslessPlan")
        .def_readonly("n", &LosslessPlan::n)
        .def_readonly("block_len", &LosslessPlan::block_len)
        .def_readonly("code_bits", &LosslessPlan::code_bits)
        .def_property_readonly("rate", &LosslessPlan::rate)
        .def_property_readonly("locality", &LosslessPlan::locality)
        .def_property_readonly("implied_c", &LosslessPlan::implied_c)
        .def_property_readonly("exact_error", [](const LosslessPlan& p) { return exact_error(p); })
        .def("__repr__", [](const LosslessPlan& p) {
            return "LosslessPlan(n=" + std::to_string(p.n) + ", b=" + std::to_string(p.block_len) +
                   ", k_b=" + std::to_string(p.code_bits) + ")";
        });

    m.def(
        "plan_lossless",
        [](std::uint64_t n, double r, double epsilon, const py::object& p, std::uint32_t max_block_len) {
            return plan_lossless(n, r, epsilon, model_from(p), max_block_len);
        },
        py::arg("n"), py::arg("r"), py::arg("epsilon"), py::arg("p"), py::arg("max_block_len") = kMaxTopSetBlockLen);
    m.def(
        "make_lossless_plan",
        [](std::uint64_t n, std::uint32_t b, std::uint32_t k, const py::object& p) {
            return make_lossless_plan(n, b, k, model_from(p));
        },
        py::arg("n"), py::arg("block_len"), py::arg("code_bits"), py::arg("p"));

    py::class_<LossyPlan>(m, "LossyPlan")
        .def_readonly("n", &LossyPlan::n)
        .def_readonly("block_len", &LossyPlan::block_len)
        .def_readonly("code_bits", &LossyPlan::code_bits)
        .def_readonly("d_achieved", &LossyPlan::d_achieved)
        .def_readonly("codewords", &LossyPlan::codewords)
        .def_property_readonly("rate", &LossyPlan::rate)
        .def_property_readonly("locality", &LossyPlan::locality)
        .def_property_readonly("expected_distortion", [](const LossyPlan& p) { return expected_distortion(p); });

    m.def(
        "plan_lossy",
        [](std::uint64_t n, double d, std::uint32_t t, const py::object& p) {
            return plan_lossy(n, d, t, model_from(p));
        },
        py::arg("n"), py::arg("d"), py::arg("t"), py::arg("p"));

    py::class_<Container>(m, "Container")
        .def_property_readonly("n", [](const Container& c) { return c.c.header().n; })
        .def_property_readonly("block_len", [](const Container& c) { return c.c.header().block_len; })
        .def_property_readonly("code_bits", [](const Container& c) { return c.c.header().code_bits; })
        .def_property_readonly("mode", [](const Container& c) { return c.lossless() ? "lossless" : "lossy"; })
        .def_property_readonly("payload_bits", [](const Container& c) { return c.c.payload_bits(); })
        .def("decode_symbol", &Container::decode_symbol, py::arg("index"), py::arg("strict") = false,
             "Returns (bit, payload bits read).")
        .def("decompress", &Container::decompress)
        .def("to_bytes", [](const Container& c) { return to_bytes(serialize(c.c)); })
        .def_static("from_bytes", [](const py::bytes& b) { return Container{deserialize(from_bytes(b))}; });

    m.def(
        "compress",
        [](const std::string& bits, const LosslessPlan& plan, unsigned workers) {
            CompressStats stats;
            auto c = compress(bits_from(bits), plan, &stats, workers);
            return py::make_tuple(Container{std::move(c)}, stats.uncovered_blocks);
        },
        py::arg("bits"), py::arg("plan"), py::arg("workers") = 1,
        "Returns (container, uncovered block count).");
    m.def(
        "compress_lossy",
        [](const std::string& bits, const LossyPlan& plan, unsigned workers) {
            return Container{compress_lossy(bits_from(bits), plan, workers)};
        },
        py::arg("bits"), py::arg("plan"), py::arg("workers") = 1);

    m.def(
        "best_2local_success",
        [](std::uint32_t n, std::uint32_t k, const py::object& p, unsigned workers) {
            return converse::best_2local_success(n, k, model_from(p), workers);
        },
        py::arg("n"), py::arg("k"), py::arg("p"), py::arg("workers") = 1);
    m.def(
        "verify_subspace_bounds",
        [](std::uint32_t n_max, const std::vector<double>& ps) {
            const auto r = converse::verify_subspace_bounds(n_max, ps);
            py::dict d;
            d["subspaces"] = r.subspaces;
            d["checks"] = r.checks;
            d["violations"] = r.violations;
            d["min_upper_slack"] = r.min_upper_slack;
            d["min_lower_slack"] = r.min_lower_slack;
            return d;
        },
        py::arg("n_max"), py::arg("p_list"));
    m.def(
        "linear_decoder_error",
        [](const std::vector<std::string>& images, const py::object& p) {
            std::vector<f2::BitVector> v;
            for (const auto& s : images) v.push_back(bits_from(s));
            return converse::linear_decoder_error(v, model_from(p));
        },
        py::arg("images"), py::arg("p"));
}
