#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcausal/causal_model.hpp"
#include "qcausal/errors.hpp"
#include "qcausal/sweep.hpp"
#include "qcausal/tomography.hpp"
#include "qcausal/witnesses.hpp"

namespace py = pybind11;
using namespace qcausal;

namespace {

py::array_t<std::complex<double>> to_numpy(const ComplexMatrix& m) {
  py::array_t<std::complex<double>> out({m.dim(), m.dim()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) view(r, c) = m(r, c);
  return out;
}

ComplexMatrix from_numpy(const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ArgumentError("expected a square matrix");
  const auto view = a.unchecked<2>();
  ComplexMatrix m(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = view(r, c);
  return m;
}

DephasingAxes axes_from(const std::string& name) {
  if (name == "xyz") return DephasingAxes::xyz();
  if (name == "zzz") return DephasingAxes::zzz();
  throw ArgumentError("axes: expected 'xyz' or 'zzz'");
}

py::dict report_dict(const WitnessReport& r) {
  py::dict d;
  d["c_cd"] = r.c_cd;
  d["neg_bd"] = py::make_tuple(r.neg_bd[0], r.neg_bd[1]);
  d["neg_cb"] = py::make_tuple(r.neg_cb[0], r.neg_cb[1]);
  d["neg_cd"] = py::make_tuple(r.neg_cd[0], r.neg_cd[1]);
  d["search_cc"] = r.search_cc.min_negativity;
  d["search_ce"] = r.search_ce.min_negativity;
  d["search_berkson"] = r.search_berkson.min_negativity;
  py::dict flags;
  flags["physical_mixture"] = r.flags.physical_mixture;
  flags["cc_quantum"] = r.flags.cc_quantum;
  flags["ce_quantum"] = r.flags.ce_quantum;
  flags["berkson"] = r.flags.berkson;
  flags["cc_entanglement_breaking"] = r.flags.cc_entanglement_breaking;
  flags["ce_entanglement_breaking"] = r.flags.ce_entanglement_breaking;
  d["flags"] = flags;
  d["class"] = to_string(r.class_label);
  return d;
}

}  // namespace

PYBIND11_MODULE(_qcausal, m) {
  m.doc() = "Causal maps between two time-ordered qubits: witnesses, sweeps and simulated tomography";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ArithmeticError);

  py::class_<CausalMap>(m, "CausalMap")
      .def_property_readonly("choi", [](const CausalMap& c) { return to_numpy(c.choi()); })
      .def_property_readonly("is_reconstructed", &CausalMap::is_reconstructed)
      .def("apply", [](const CausalMap& c, const py::array_t<std::complex<double>>& rho) {
        return to_numpy(apply_map(c, from_numpy(rho)));
      })
      .def("to_json", &causal_map_to_json)
      .def_static("from_json", &causal_map_from_json)
      .def_static("from_choi", [](const py::array_t<std::complex<double>>& tau) { return CausalMap::from_choi(from_numpy(tau)); });

  m.def(
      "family_map",
      [](double theta, double q, double p, std::optional<double> eta, const std::string& axes) {
        return family_map({theta, q, p, eta ? eta_axes(*eta) : axes_from(axes)});
      },
      py::arg("theta") = 1.5707963267948966, py::arg("q") = 1.0, py::arg("p") = 0.0, py::arg("eta") = py::none(),
      py::arg("axes") = "xyz");
  m.def("q_from_delay", &q_from_delay, py::arg("tau"), py::arg("tau_coh"));

  m.def(
      "classify",
      [](const CausalMap& map, double epsilon) { return report_dict(classify(map, epsilon)); }, py::arg("map"),
      py::arg("epsilon") = kDefaultEpsilon);
  m.def("c_cd", &c_cd_witness);
  m.def("negativity", [](const py::array_t<std::complex<double>>& rho) {
    return negativity(from_numpy(rho), SubsystemLayout{"A", "B"}, "B");
  });

  m.def(
      "sweep_csv",
      [](const std::map<std::string, std::string>& options) {
        const auto config = sweep_config_from_options(options);
        return sweep_to_csv(run_sweep(config));
      },
      py::arg("options"));

  m.def(
      "simulate_counts_csv",
      [](const CausalMap& map, std::optional<std::uint64_t> shots, std::uint64_t seed) {
        return counts_to_csv(shots ? simulate_counts(map, *shots, seed) : pseudo_counts(map, 1.0));
      },
      py::arg("map"), py::arg("shots") = py::none(), py::arg("seed") = 0);
  m.def("reconstruct_csv", [](const std::string& csv) { return reconstruct(counts_from_csv(csv)); });
  m.def(
      "fit_theta_csv",
      [](const std::string& csv, double q, double p, const std::string& axes) {
        const FitResult f = fit_theta(counts_from_csv(csv), ThetaFamily{q, p, axes_from(axes)});
        return py::make_tuple(f.theta_hat, f.covariance_est);
      },
      py::arg("csv"), py::arg("q") = 1.0, py::arg("p") = 0.0, py::arg("axes") = "xyz");
}
