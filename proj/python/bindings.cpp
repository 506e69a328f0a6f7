#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgdg/harness.hpp"

namespace py = pybind11;
using namespace qgdg;

namespace {

std::vector<std::vector<Index>> columns_of(const SparseBitMatrix& m) {
    std::vector<std::vector<Index>> out(m.n_cols());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        for (Index c : m.row(r)) {
            out[c].push_back(static_cast<Index>(r));
        }
    }
    return out;
}

SparseBitMatrix from_py_columns(std::size_t n_rows, const std::vector<std::vector<Index>>& columns) {
    return SparseBitMatrix::from_columns(n_rows, columns);
}

py::dict inner_result(const InnerResult& r) {
    py::dict d;
    d["success"] = r.success;
    d["estimate"] = r.estimate;
    d["path_metric"] = r.pm.value();
    d["iterations"] = r.iterations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qgdg, m) {
    m.doc() = "Guided decimation guessing decoder for quantum LDPC codes";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<DemParseError>(m, "DemParseError", PyExc_ValueError);

    py::class_<CssCode>(m, "CssCode")
        .def_readonly("n", &CssCode::n)
        .def_readonly("k", &CssCode::k)
        .def_property_readonly("hx_columns", [](const CssCode& c) { return columns_of(c.hx); })
        .def_property_readonly("hx_rows", [](const CssCode& c) { return c.hx.n_rows(); });

    m.def("load_code", &load_code, py::arg("path"));

    py::class_<DetectorModel>(m, "DetectorModel")
        .def_property_readonly("n_detectors", &DetectorModel::n_detectors)
        .def_property_readonly("n_faults", &DetectorModel::n_faults)
        .def_property_readonly("n_observables", &DetectorModel::n_observables)
        .def_property_readonly("n_blocks", &DetectorModel::n_blocks)
        .def_property_readonly("priors", &DetectorModel::priors)
        .def_property_readonly("columns", [](const DetectorModel& d) { return columns_of(d.h()); })
        .def("to_dem", [](const DetectorModel& d) { return write_dem(d); });

    m.def("parse_dem", [](const std::string& text) { return parse_dem(text); }, py::arg("text"));
    m.def("data_qubit_model", &build_data_qubit_model, py::arg("code"), py::arg("p_d"));
    m.def("single_shot_model", &build_single_shot_model, py::arg("code"), py::arg("p_d"), py::arg("p_s"),
          py::arg("syndrome_observables") = true);
    m.def("phenomenological_model", &build_phenomenological_model, py::arg("code"), py::arg("rounds"),
          py::arg("p_d"), py::arg("p_s"));

    m.def("preset_names", &preset_names);

    m.def(
        "decode",
        [](std::size_t n_rows, const std::vector<std::vector<Index>>& columns, const std::vector<double>& llrs,
           const std::vector<std::uint8_t>& syndrome, const std::string& decoder, const std::string& preset) {
            InnerDecoder d;
            d.kind = parse_decoder_kind(decoder);
            d.gdg = preset_config(preset);
            return inner_result(decode_inner(from_py_columns(n_rows, columns), llrs, syndrome, d));
        },
        py::arg("n_rows"), py::arg("columns"), py::arg("llrs"), py::arg("syndrome"), py::arg("decoder") = "gdg",
        py::arg("preset") = "n144-circuit",
        "Decode one syndrome of a parity-check matrix given as column supports.");

    m.def(
        "sample",
        [](const DetectorModel& model, std::uint64_t seed) {
            const auto s = sample(model, seed);
            py::dict d;
            d["errors"] = s.errors.to_dense();
            d["detectors"] = s.detectors.to_dense();
            d["observables"] = s.observables.to_dense();
            return d;
        },
        py::arg("model"), py::arg("seed"));

    m.def(
        "simulate",
        [](const DetectorModel& model, std::size_t rounds, std::size_t window, std::size_t step,
           const std::string& decoder, const std::string& preset, std::uint64_t trials, std::uint64_t seed,
           std::size_t threads) {
            WindowPlan plan;
            plan.window = window;
            plan.step = step;
            plan.inner.kind = parse_decoder_kind(decoder);
            plan.inner.gdg = preset_config(preset);
            const auto r = run_point(model, plan, {}, rounds, trials, seed, threads);
            py::dict d;
            d["trials"] = r.trials;
            d["failures"] = r.failures();
            d["syndrome_failures"] = r.syndrome_failures;
            d["logical_failures"] = r.logical_failures;
            d["ler"] = r.ler;
            d["wilson"] = py::make_tuple(r.wilson.low, r.wilson.high);
            d["per_round"] = r.per_round;
            return d;
        },
        py::arg("model"), py::arg("rounds") = 1, py::arg("window") = 1, py::arg("step") = 1,
        py::arg("decoder") = "gdg", py::arg("preset") = "n144-circuit", py::arg("trials") = 100,
        py::arg("seed") = 1, py::arg("threads") = 1);

    m.def("wilson_interval", [](std::uint64_t f, std::uint64_t t) {
        const auto i = wilson_interval(f, t);
        return py::make_tuple(i.low, i.high);
    });
}
