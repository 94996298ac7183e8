#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "kantolab/analysis.hpp"
#include "kantolab/corpus.hpp"
#include "kantolab/errors.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/operators.hpp"
#include "kantolab/orlicz.hpp"

namespace py = pybind11;
using namespace kantolab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kantorovich neural network operators in Orlicz spaces";

  auto& hypothesis = py::register_exception<HypothesisNotMet>(m, "HypothesisNotMet", PyExc_ValueError);
  py::register_exception<NotInOrliczSpace>(m, "NotInOrliczSpace", PyExc_ValueError);
  py::register_exception<NotInWeakClass>(m, "NotInWeakClass", PyExc_ValueError);
  py::register_exception<PotentiallyInfinite>(m, "PotentiallyInfinite", hypothesis.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::class_<PhiFunction>(m, "Phi")
      .def(py::init(&parse_phi), py::arg("spec"))
      .def("__call__", &PhiFunction::operator(), py::arg("u"))
      .def_property_readonly("id", &PhiFunction::id)
      .def_readonly("convex", &PhiFunction::convex)
      .def("__repr__", [](const PhiFunction& p) { return "Phi('" + p.id() + "')"; });

  py::class_<DensityKernel>(m, "Kernel")
      .def(py::init(&make_kernel), py::arg("spec"))
      .def("__call__", [](const DensityKernel& k, double x) { return k(x); }, py::arg("x"))
      .def_property_readonly("id", &DensityKernel::id)
      .def_property_readonly("compact", &DensityKernel::compact)
      .def_readonly("phi_at_2", &DensityKernel::phi_at_2)
      .def("__repr__", [](const DensityKernel& k) { return "Kernel('" + k.id() + "')"; });

  py::class_<IntervalFunction>(m, "Function")
      .def(py::init(&parse_corpus), py::arg("spec"))
      .def("__call__", &IntervalFunction::operator(), py::arg("x"))
      .def_property_readonly("name", &IntervalFunction::name)
      .def("__repr__", [](const IntervalFunction& f) { return "Function('" + f.name() + "')"; });

  m.def("phi_catalog", &phi_catalog);
  m.def("kernel_catalog", &kernel_catalog);
  m.def("corpus_catalog", &corpus_catalog);

  m.def(
      "modular",
      [](const PhiFunction& phi, const IntervalFunction& f, double lambda) {
        const auto v = modular(phi, f, lambda);
        return v.infinite ? INFINITY : v.value;
      },
      py::arg("phi"), py::arg("f"), py::arg("lam") = 1.0);
  m.def(
      "luxemburg_norm", [](const PhiFunction& phi, const IntervalFunction& f) { return luxemburg_norm(phi, f); },
      py::arg("phi"), py::arg("f"));
  m.def(
      "moment", [](const DensityKernel& k, double nu) { return moment(k, nu).value; }, py::arg("kernel"),
      py::arg("nu"));
  m.def(
      "apply",
      [](const DensityKernel& k, const IntervalFunction& f, int n, const std::vector<double>& xs) {
        const KantorovichOperator op(k, f, n);
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(op(x));
        return out;
      },
      py::arg("kernel"), py::arg("f"), py::arg("n"), py::arg("xs"));
  m.def(
      "error_curve",
      [](const IntervalFunction& f, const PhiFunction& phi, const DensityKernel& k, const std::vector<int>& ns) {
        const auto c = error_curve(f, phi, k, ns);
        py::dict d;
        d["ns"] = c.ns;
        d["errors"] = c.lux_errors;
        d["slope"] = c.fit.slope;
        d["r2"] = c.fit.r2;
        return d;
      },
      py::arg("f"), py::arg("phi"), py::arg("kernel"), py::arg("ns"));
}
