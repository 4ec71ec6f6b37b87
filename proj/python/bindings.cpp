#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rydsim/dynamics.hpp"
#include "rydsim/effective.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/measures.hpp"
#include "rydsim/model.hpp"
#include "rydsim/scenario.hpp"

namespace py = pybind11;
using namespace rydsim;

namespace {

DensityMatrix as_state(const ComplexMatrix& rho, const std::vector<int>& dims) {
  return DensityMatrix(rho, SubsystemDims(dims.empty() ? std::vector<int>{static_cast<int>(rho.rows())} : dims));
}

scenario::ScenarioConfig resolve_json(const std::string& text) {
  return scenario::resolve(scenario::merge_with_defaults(scenario::Json::parse(text)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lindblad dynamics of dissipatively prepared two-atom Rydberg entanglement";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<AtomParams>(m, "AtomParams")
      .def(py::init<>())
      .def(py::init([](double o1, double o2, double delta, double mw, double gp, double gr) {
             return AtomParams{o1, o2, delta, mw, gp, gr};
           }),
           py::arg("omega1"), py::arg("omega2"), py::arg("delta") = 0.0, py::arg("omega_mw") = 0.0,
           py::arg("gamma_p"), py::arg("gamma_r"))
      .def_readwrite("omega1", &AtomParams::omega1)
      .def_readwrite("omega2", &AtomParams::omega2)
      .def_readwrite("delta", &AtomParams::delta)
      .def_readwrite("omega_mw", &AtomParams::omega_mw)
      .def_readwrite("gamma_p", &AtomParams::gamma_p)
      .def_readwrite("gamma_r", &AtomParams::gamma_r);

  py::class_<RRIMatrix>(m, "RRIMatrix")
      .def(py::init<>())
      .def(py::init([](double v00, double v10, double v02, double v12) { return RRIMatrix{v00, v10, v02, v12}; }),
           py::arg("v00"), py::arg("v10"), py::arg("v02"), py::arg("v12"))
      .def_readwrite("v00", &RRIMatrix::v00)
      .def_readwrite("v10", &RRIMatrix::v10)
      .def_readwrite("v02", &RRIMatrix::v02)
      .def_readwrite("v12", &RRIMatrix::v12);

  py::class_<ModelSystem>(m, "ModelSystem")
      .def_readonly("hamiltonian", &ModelSystem::hamiltonian)
      .def_readonly("collapse_ops", &ModelSystem::collapse_ops)
      .def_readonly("basis_labels", &ModelSystem::basis_labels)
      .def_property_readonly("dims", [](const ModelSystem& s) { return s.dims.values(); })
      .def_property_readonly("dim", &ModelSystem::dim);

  m.def("build_single_atom", &build_single_atom, py::arg("params"));
  m.def("build_two_atom", &build_two_atom, py::arg("params"), py::arg("rri"));
  m.def("expm", &expm, py::arg("a"));
  m.def("partial_transpose", [](const ComplexMatrix& rho, const std::vector<int>& dims, std::size_t k) {
    return partial_transpose(rho, SubsystemDims(dims), k);
  });
  m.def("dark_state", [](double o1, double o2, int j) { return dark_state(o1, o2, j).amplitudes(); });
  m.def("target_state", [](double o1, double o2) { return target_state(o1, o2).amplitudes(); });
  m.def("ground_entangled_state", [] { return ground_entangled_state().amplitudes(); });
  m.def("initial_mixed_state", [] { return initial_mixed_state().matrix(); });

  m.def("fidelity", [](const ComplexMatrix& rho, const ComplexVector& psi, const std::vector<int>& dims) {
    return fidelity(as_state(rho, dims), StateVector::normalize(psi));
  }, py::arg("rho"), py::arg("target"), py::arg("dims") = std::vector<int>{});
  m.def("purity", [](const ComplexMatrix& rho) { return purity(as_state(rho, {})); });
  m.def("negativity", [](const ComplexMatrix& rho, const std::vector<int>& dims) {
    return negativity(as_state(rho, dims));
  });
  m.def("log_negativity", [](const ComplexMatrix& rho, const std::vector<int>& dims) {
    return log_negativity(as_state(rho, dims));
  });

  m.def("lindblad_rhs", [](const ModelSystem& model, const ComplexMatrix& rho) { return lindblad_rhs(model, rho); });
  m.def("liouvillian", [](const ModelSystem& model) { return build_liouvillian(model).superop; });
  m.def("evolve_final", [](const ModelSystem& model, const ComplexMatrix& rho0, double t_final, double sample_dt) {
    const TimeSeries s = evolve(model, DensityMatrix(rho0, model.dims), t_final, sample_dt, {});
    return s.final_state->matrix();
  }, py::arg("model"), py::arg("rho0"), py::arg("t_final"), py::arg("sample_dt"));
  m.def("steady_state", [](const ModelSystem& model) -> py::object {
    const SteadyStateResult r = steady_state(model);
    if (!r.unique()) return py::none();
    return py::cast(r.state->matrix());
  });
  m.def("effective_couplings", [](const AtomParams& p, const RRIMatrix& v) {
    const EffectiveCouplingReport r = effective_couplings(p, v);
    py::dict d;
    d["omega_eff"] = r.omega_eff;
    py::dict pairs;
    for (const PairCoupling& c : r.pairs) {
      py::dict e;
      e["v_eff"] = c.v_eff;
      e["omega_eff"] = c.omega_eff;
      e["omega_eff_printed"] = c.omega_eff_printed;
      pairs[py::str(std::to_string(c.m) + "_" + std::to_string(c.n))] = e;
    }
    d["pairs"] = pairs;
    d["asymmetry_ratio"] = r.asymmetry_ratio;
    d["printed_formula_discrepancy"] = r.printed_formula_discrepancy;
    d["microwave_dark_multiplicity"] = r.microwave_dark_multiplicity;
    return d;
  });

  m.def("scenario_names", &scenario::scenario_names);
  m.def("default_config", [](const std::string& name) { return scenario::default_config(name).dump(); });
  m.def("run_scenario_json", [](const std::string& config, const std::string& out) {
    const auto cfg = resolve_json(config);
    py::gil_scoped_release release;
    const auto r = out.empty() ? scenario::run_scenario(cfg) : scenario::run_scenario(cfg, std::filesystem::path(out));
    return r.run.dump();
  }, py::arg("config"), py::arg("out") = "");
  m.def("run_sweep_json", [](const std::string& config, const std::string& out) {
    const auto cfg = resolve_json(config);
    py::gil_scoped_release release;
    const auto g = out.empty() ? scenario::run_sweep(cfg) : scenario::run_sweep(cfg, std::filesystem::path(out));
    return g.run.dump();
  }, py::arg("config"), py::arg("out") = "");
  m.attr("__version__") = scenario::code_version();
}
