// Python access to the core: pair coefficients, field sampling, configuration
// and the staged pipeline. Arrays are returned as numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tbscat/fresnel.hpp"
#include "tbscat/pipeline.hpp"

namespace py = pybind11;
using namespace tbscat;

namespace {

py::dict sample_points(const FieldModel& m, py::array_t<double, py::array::c_style | py::array::forcecast> xy) {
  if (xy.ndim() != 2 || xy.shape(1) != 2) throw ConfigInvalid("points must have shape (n, 2)");
  const auto n = static_cast<std::size_t>(xy.shape(0));
  py::array_t<double> v(n);
  py::array_t<cplx> ray(n), psi0(n), psi1(n), q(n);
  auto a = xy.unchecked<2>();
  auto pv = v.mutable_unchecked<1>();
  auto pr = ray.mutable_unchecked<1>();
  auto p0 = psi0.mutable_unchecked<1>();
  auto p1 = psi1.mutable_unchecked<1>();
  auto pq = q.mutable_unchecked<1>();
  for (std::size_t i = 0; i < n; ++i) {
    const FieldSample s = m.sample({a(i, 0), a(i, 1)});
    pv(i) = s.potential;
    pr(i) = s.psi_ray;
    p0(i) = s.psi_zero;
    p1(i) = s.psi_one;
    pq(i) = s.discrepancy;
  }
  py::dict d;
  d["v"] = v;
  d["psi_ray"] = ray;
  d["psi0"] = psi0;
  d["psi1"] = psi1;
  d["q"] = q;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Three-body scattering core";

  py::register_exception<ConfigInvalid>(mod, "ConfigInvalid", PyExc_ValueError);
  py::register_exception<NumericalFailure>(mod, "NumericalFailure", PyExc_RuntimeError);

  mod.def("parse_number", &parse_number);
  mod.def("fresnel_phi", [](double a) { return fresnel_phi(a); });
  mod.def("set_thread_count", &set_thread_count);

  mod.def(
      "pair_coefficients",
      [](const std::string& shape, double amplitude, double halfwidth, double k) {
        RunConfig c;
        c.potential_shape = shape;
        c.potential_amplitude = amplitude;
        c.potential_halfwidth = halfwidth;
        const PairScattering p = solve_pair(c.potential(), k);
        return py::make_tuple(p.s(), p.r());
      },
      py::arg("shape") = "bump", py::arg("amplitude") = 2.0, py::arg("halfwidth") = 0.25, py::arg("k"));

  py::class_<RunConfig>(mod, "RunConfig")
      .def(py::init<>())
      .def_static("parse", &RunConfig::parse)
      .def_static("load", &RunConfig::load)
      .def("set", [](RunConfig& c, const std::string& k, py::object v) { c.set(k, py::str(v).cast<std::string>()); })
      .def("validate", &RunConfig::validate)
      .def("canonical", &RunConfig::canonical)
      .def("hash", &RunConfig::hash)
      .def_readwrite("energy", &RunConfig::energy)
      .def_readwrite("k1", &RunConfig::k1)
      .def_readwrite("p1", &RunConfig::p1)
      .def_readwrite("r1", &RunConfig::r1)
      .def_readwrite("r2", &RunConfig::r2)
      .def_readwrite("mesh_radius", &RunConfig::mesh_radius)
      .def_readwrite("mesh_h", &RunConfig::mesh_h)
      .def_readwrite("potential_shape", &RunConfig::potential_shape)
      .def_readwrite("probe_radii", &RunConfig::probe_radii);

  py::class_<WindowAngles>(mod, "WindowAngles")
      .def_readonly("center", &WindowAngles::center)
      .def_readonly("outer_lo", &WindowAngles::outer_lo)
      .def_readonly("inner_lo", &WindowAngles::inner_lo)
      .def_readonly("inner_hi", &WindowAngles::inner_hi)
      .def_readonly("outer_hi", &WindowAngles::outer_hi);

  py::class_<FieldModel>(mod, "FieldModel")
      .def(py::init([](const RunConfig& c) { return FieldModel(c.field_params()); }))
      .def_property_readonly("energy", &FieldModel::energy)
      .def("window_angles", &FieldModel::window_angles)
      .def("sample", &sample_points, "Fields at an (n, 2) array of chart points");

  py::class_<RadialAudit>(mod, "RadialAudit")
      .def_readonly("radii", &RadialAudit::radii)
      .def_readonly("n", &RadialAudit::n)
      .def_readonly("m", &RadialAudit::m);

  py::class_<PeakCheck>(mod, "PeakCheck")
      .def_readonly("angle", &PeakCheck::angle)
      .def_readonly("value", &PeakCheck::value)
      .def_readonly("window", &PeakCheck::window)
      .def_readonly("passed", &PeakCheck::pass);

  py::class_<Pipeline>(mod, "Pipeline")
      .def(py::init<RunConfig, std::filesystem::path>(), py::arg("config"), py::arg("out_dir"))
      .def(
          "run", [](Pipeline& p, const std::string& stage) { p.run(parse_stage(stage)); },
          py::arg("stage") = "all", py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("hash", &Pipeline::hash)
      .def_property_readonly("out_dir", &Pipeline::out_dir)
      .def("describe", &Pipeline::describe)
      .def_property_readonly("residual",
                             [](const Pipeline& p) -> std::optional<double> {
                               if (!p.results().solve) return std::nullopt;
                               return p.results().solve->residual;
                             })
      .def_property_readonly("audit", [](const Pipeline& p) { return p.results().audit; })
      .def_property_readonly("peaks", [](const Pipeline& p) { return p.results().peaks; })
      .def_property_readonly("symmetry_defect", [](const Pipeline& p) { return p.results().symmetry_defect; })
      .def(
          "solution_at",
          [](Pipeline& p, py::array_t<double, py::array::c_style | py::array::forcecast> xy) {
            if (xy.ndim() != 2 || xy.shape(1) != 2) throw ConfigInvalid("points must have shape (n, 2)");
            const FemField& f = p.solution();
            auto a = xy.unchecked<2>();
            py::array_t<cplx> out(xy.shape(0));
            auto o = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < xy.shape(0); ++i) o(i) = f.value({a(i, 0), a(i, 1)});
            return out;
          },
          "Correction xi at an (n, 2) array of chart points");
}
