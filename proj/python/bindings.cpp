// Python bindings for the main library operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "whitlyap/harness.hpp"

namespace py = pybind11;
using namespace whitlyap;

PYBIND11_MODULE(pywhitlyap, m) {
    m.doc() = "Lyapunov functions from size functions on hyperspaces";

    py::class_<FinitePointSet>(m, "FinitePointSet")
        .def(py::init<std::vector<Point>, double>(), py::arg("points"), py::arg("mesh") = 0.0)
        .def_readwrite("points", &FinitePointSet::points)
        .def_readwrite("mesh", &FinitePointSet::mesh)
        .def("__len__", &FinitePointSet::size);

    // The C++ side hands out shared_ptr<const AmbientSpace>; pybind11 holders
    // must be non-const, so factories shed the const qualifier here.
    auto unconst = [](SpacePtr p) { return std::const_pointer_cast<AmbientSpace>(std::move(p)); };
    py::class_<AmbientSpace, std::shared_ptr<AmbientSpace>>(m, "AmbientSpace")
        .def_static("euclidean_box",
                    [unconst](std::vector<double> lo, std::vector<double> hi) {
                        return unconst(AmbientSpace::euclidean_box(std::move(lo), std::move(hi)));
                    })
        .def_static("flat_torus",
                    [unconst](std::vector<double> periods) {
                        return unconst(AmbientSpace::flat_torus(std::move(periods)));
                    })
        .def_static("circle",
                    [unconst](double c) { return unconst(AmbientSpace::circle(c)); })
        .def_static("quotient_collapse",
                    [unconst](SpacePtr base, FinitePointSet lambda) {
                        return unconst(
                            AmbientSpace::quotient_collapse(std::move(base), std::move(lambda)));
                    })
        .def_property_readonly("dim", &AmbientSpace::dim)
        .def_property_readonly("diameter_upper", &AmbientSpace::diameter_upper)
        .def("distance", &AmbientSpace::distance)
        .def("contains", &AmbientSpace::contains, py::arg("x"), py::arg("tol") = 1e-9);

    py::class_<DenseSequence, DenseSeqPtr>(m, "DenseSequence")
        .def(py::init<SpacePtr>())
        .def("point", &DenseSequence::point)
        .def("level_prefix_size", &DenseSequence::level_prefix_size);

    py::class_<SizeConfig>(m, "SizeConfig")
        .def(py::init([](int depth, DenseSeqPtr seq) {
                 SizeConfig cfg;
                 cfg.depth = depth;
                 cfg.seq = std::move(seq);
                 return cfg;
             }),
             py::arg("depth"), py::arg("seq"))
        .def_readwrite("depth", &SizeConfig::depth)
        .def("tail_bound", &SizeConfig::tail_bound);

    py::class_<SizeValue>(m, "SizeValue")
        .def_readonly("value", &SizeValue::value)
        .def_readonly("tail_bound", &SizeValue::tail_bound);

    m.def("hausdorff_distance", &hausdorff_distance);
    m.def("size_component", &size_component);
    m.def("whitney_size", &whitney_size);
    m.def("diameter", &diameter);

    py::enum_<SystemKind>(m, "SystemKind").value("Flow", SystemKind::Flow).value("Map", SystemKind::Map);

    py::class_<SystemSpec>(m, "SystemSpec")
        .def_static("from_catalog_id", &SystemSpec::from_catalog_id, py::arg("id"),
                    py::arg("params") = std::vector<double>{}, py::arg("h") = 0.01)
        .def_property_readonly("kind", &SystemSpec::kind)
        .def_property_readonly("catalog_id", &SystemSpec::catalog_id)
        .def("default_space",
             [unconst](const SystemSpec& s) { return unconst(s.default_space()); })
        .def("flow_exact", &SystemSpec::flow_exact)
        .def("map_forward", &SystemSpec::map_forward)
        .def("map_inverse", &SystemSpec::map_inverse);

    m.def("induced_image", &induced_image);

    py::class_<LyapunovReport>(m, "LyapunovReport")
        .def_readonly("params", &LyapunovReport::params)
        .def_readonly("V", &LyapunovReport::V)
        .def_readonly("mu_plus", &LyapunovReport::mu_plus)
        .def_readonly("mu_minus", &LyapunovReport::mu_minus)
        .def_readonly("violations", &LyapunovReport::violations)
        .def_readonly("max_step_delta", &LyapunovReport::max_step_delta)
        .def_readonly("tol", &LyapunovReport::tol)
        .def_readonly("mesh", &LyapunovReport::mesh)
        .def_readonly("depth", &LyapunovReport::depth);

    py::class_<IntegrateOpts>(m, "IntegrateOpts")
        .def(py::init<>())
        .def_readwrite("eps_stop", &IntegrateOpts::eps_stop)
        .def_readwrite("T_max", &IntegrateOpts::T_max);

    py::class_<IsolatedOpts>(m, "IsolatedOpts")
        .def(py::init<>())
        .def_readwrite("r", &IsolatedOpts::r)
        .def_readwrite("rho", &IsolatedOpts::rho)
        .def_readwrite("grid_density", &IsolatedOpts::grid_density)
        .def_readwrite("horizon", &IsolatedOpts::horizon);

    m.def("lyap_asymptotic", &lyap_asymptotic, py::arg("sys"), py::arg("space"), py::arg("p"),
          py::arg("cfg"), py::arg("x"), py::arg("opts") = IntegrateOpts{});
    m.def("lyap_asymptotic_series", &lyap_asymptotic_series, py::arg("sys"), py::arg("space"),
          py::arg("p"), py::arg("cfg"), py::arg("x"), py::arg("opts") = IntegrateOpts{});
    m.def("lyap_isolated_set", &lyap_isolated_set, py::arg("sys"), py::arg("space"),
          py::arg("lambda_set"), py::arg("cfg"), py::arg("x"), py::arg("opts") = IsolatedOpts{});
    m.def("lyap_discrete", &lyap_discrete, py::arg("map"), py::arg("space"), py::arg("lambda_set"),
          py::arg("cfg"), py::arg("x"), py::arg("opts") = IsolatedOpts{});

    py::class_<PairState>(m, "PairState")
        .def(py::init<Point, Point>())
        .def_readwrite("x", &PairState::x)
        .def_readwrite("y", &PairState::y)
        .def("diam", &PairState::diam);

    py::class_<Chain>(m, "Chain")
        .def_readonly("points", &Chain::points)
        .def_readonly("eps_chain", &Chain::eps_chain);

    py::enum_<Direction>(m, "Direction")
        .value("Forward", Direction::Forward)
        .value("Backward", Direction::Backward);

    m.def("make_segment_chain", &make_segment_chain);
    m.def("make_arc_chain", &make_arc_chain);
    m.def("chain_diameter", &chain_diameter);
    m.def("advance_chain", &advance_chain, py::arg("map"), py::arg("space"), py::arg("chain"),
          py::arg("direction") = Direction::Forward, py::arg("point_budget") = 1'000'000);

    py::class_<ExpansivityReport>(m, "ExpansivityReport")
        .def_readonly("verdict", &ExpansivityReport::verdict)
        .def_readonly("delta", &ExpansivityReport::delta)
        .def_readonly("horizon", &ExpansivityReport::horizon)
        .def_readonly("first_separation", &ExpansivityReport::first_separation)
        .def_readonly("witness", &ExpansivityReport::witness)
        .def_readonly("witness_diameters", &ExpansivityReport::witness_diameters);

    m.def("check_expansive_pairs", &check_expansive_pairs);
    m.def("check_cw_expansive", &check_cw_expansive);

    m.def("monotonicity_audit", &monotonicity_audit);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("mode", &RunConfig::mode)
        .def_readwrite("system_id", &RunConfig::system_id)
        .def_readwrite("system_params", &RunConfig::system_params)
        .def_readwrite("mu_depth", &RunConfig::mu_depth)
        .def_readwrite("audit_tol", &RunConfig::audit_tol)
        .def_readwrite("audit_horizon", &RunConfig::audit_horizon)
        .def_readwrite("delta", &RunConfig::delta)
        .def_readwrite("samples", &RunConfig::samples)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("inputs", &RunConfig::inputs)
        .def_readwrite("outputs", &RunConfig::outputs);

    m.def("parse_run_config", &parse_run_config);
    m.def("parse_run_config_json", &parse_run_config_json, py::arg("text"),
          py::arg("origin") = "config");
    m.def("run_config", &run_config, py::arg("cfg"), py::arg("out_dir") = ".",
          py::arg("quiet") = false);
}
