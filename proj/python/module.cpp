#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "anpc/error.hpp"
#include "anpc/pipeline.hpp"
#include "anpc/sieve.hpp"

namespace py = pybind11;
using namespace anpc;

namespace {

RunConfig config_from(const std::map<std::string, std::string>& entries)
{
    RunConfig cfg;
    for (const auto& [k, v] : entries) {
        set_config_value(cfg, k, v);
    }
    return cfg;
}

std::string pi_report(const std::map<std::string, std::string>& entries)
{
    const RunConfig cfg = config_from(entries);
    py::gil_scoped_release release;
    const PiResult r = run_pi(cfg);
    return report_json(r, cfg);
}

std::string bounds_report(const std::map<std::string, std::string>& entries)
{
    const RunConfig cfg = config_from(entries);
    py::gil_scoped_release release;
    PrecisionScope scope(static_cast<mpfr_prec_t>(cfg.precision_bits));
    return bounds_json(plan_run(cfg), cfg);
}

py::dict verify_zeros(const std::string& path)
{
    ZeroFileCheck c;
    {
        py::gil_scoped_release release;
        c = verify_zero_file(path);
    }
    py::dict d;
    d["count"] = c.count;
    d["max_height"] = c.max_height;
    d["heights_checked"] = c.heights_checked;
    d["problems"] = c.problems;
    return d;
}

std::pair<std::string, std::string> scan(double t1, double t2, unsigned threads, double target_width, int bits)
{
    py::gil_scoped_release release;
    PrecisionScope scope(static_cast<mpfr_prec_t>(bits));
    const ScanResult s = scan_zeros(t1, t2, threads, target_width);
    std::ostringstream zs;
    store_zeros(zs, scan_to_zero_file(s, target_width));
    return {scan_json(s), zs.str()};
}

std::string correction(std::int64_t x)
{
    return prime_power_correction(x).get_str();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Rigorous prime counting from zeta zeros";

    // The module attribute keeps the type alive for the translator.
    static PyObject* error_type = py::exception<Error>(m, "AnpcError").ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("code") = std::string(errc_name(e.code()));
            PyErr_SetObject(error_type, inst.ptr());
        }
    });

    m.def("pi_report", &pi_report, py::arg("config"),
          "Run the full computation for a {key: value} configuration; returns the JSON report.");
    m.def("bounds_report", &bounds_report, py::arg("config"),
          "Parameter choice and predicted truncation bounds as JSON, without the heavy work.");
    m.def("verify_zeros", &verify_zeros, py::arg("path"));
    m.def("scan_zeros", &scan, py::arg("t1"), py::arg("t2"), py::arg("threads") = 1, py::arg("target_width") = 1e-6,
          py::arg("precision_bits") = 128, "Returns (report JSON, zero file text).");
    m.def("prime_count", [](std::uint64_t n) { return prime_count(n); }, py::arg("n"));
    m.def("prime_power_correction", &correction, py::arg("x"), "pi*(x) - pi(x) as a rational 'p/q' string.");
}
