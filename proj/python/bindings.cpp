// Python bindings for the main operations: profile solving, field
// placement and norms, the linearized operator, split-step evolution,
// the two-soliton ansatz, modulation fitting and collision experiments.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlslab/ansatz.hpp"
#include "nlslab/experiments.hpp"

namespace py = pybind11;
using namespace nlslab;

namespace {

py::array_t<std::complex<double>> to_numpy(const ComplexField& f) {
  py::array_t<std::complex<double>> out(f.v.size());
  std::copy(f.v.begin(), f.v.end(), out.mutable_data());
  return out;
}

// Opaque grid handle: the C++ side shares immutable grids, which pybind11
// holders cannot express directly.
struct PyGrid {
  GridPtr ptr;
};

ComplexField from_numpy(const GridPtr& grid, py::array_t<std::complex<double>> a) {
  auto buf = a.request();
  if (buf.ndim != 1 || buf.shape[0] != grid->n())
    throw ConfigError("array length must equal grid n");
  ComplexField f(grid);
  const auto* src = static_cast<std::complex<double>*>(buf.ptr);
  std::copy(src, src + grid->n(), f.v.begin());
  return f;
}

}  // namespace

PYBIND11_MODULE(_nlslab, m) {
  m.doc() = "Soliton-collision laboratory for 1d NLS with polynomial nonlinearity";

  py::class_<PolynomialNonlinearity>(m, "PolynomialNonlinearity")
      .def(py::init<const std::vector<std::pair<int, double>>&>(), py::arg("terms"))
      .def_static("cubic", &PolynomialNonlinearity::cubic)
      .def_static("cubic_quintic", &PolynomialNonlinearity::cubic_quintic, py::arg("a"),
                  py::arg("b"))
      .def("eval", &PolynomialNonlinearity::eval, py::arg("s"), py::arg("order") = 0)
      .def("__repr__", &PolynomialNonlinearity::describe);

  py::class_<ExistenceCheck>(m, "ExistenceCheck")
      .def_readonly("omega", &ExistenceCheck::omega)
      .def_readonly("y0", &ExistenceCheck::y0)
      .def_readonly("satisfied", &ExistenceCheck::satisfied)
      .def_readonly("reason", &ExistenceCheck::reason);
  m.def("check_existence", &check_existence, py::arg("F"), py::arg("omega"),
        py::arg("y_max") = 0.0);

  py::class_<SolitonProfile>(m, "SolitonProfile")
      .def_property_readonly("omega", &SolitonProfile::omega)
      .def_property_readonly("y0", &SolitonProfile::y0)
      .def_property_readonly("a_inf", &SolitonProfile::a_inf)
      .def_property_readonly("mass", &SolitonProfile::mass)
      .def("x", [](const SolitonProfile& p) { return p.x(); })
      .def("phi", [](const SolitonProfile& p) { return p.phi(); })
      .def("value", &SolitonProfile::value)
      .def("slope", &SolitonProfile::slope)
      .def("domega_value", &SolitonProfile::domega_value);
  m.def("solve_profile", &solve_profile_full, py::arg("F"), py::arg("omega"),
        py::arg("half_length"), py::arg("n"), py::arg("h_omega") = 0.0);
  m.def("stability_margin", [](const PolynomialNonlinearity& F, double omega) {
    auto mgn = stability_margin(F, omega);
    return py::make_tuple(mgn.dQ_domega, mgn.richardson_error, mgn.step_ok);
  });

  py::class_<PyGrid>(m, "SpectralGrid")
      .def_property_readonly("n", [](const PyGrid& g) { return g.ptr->n(); })
      .def_property_readonly("length", [](const PyGrid& g) { return g.ptr->length(); })
      .def_property_readonly("dx", [](const PyGrid& g) { return g.ptr->dx(); })
      .def("x", [](const PyGrid& g) { return g.ptr->x(); });
  m.def("make_grid",
        [](int n, double length) { return PyGrid{make_grid(n, length)}; },
        py::arg("n"), py::arg("length"));

  py::class_<SolitonParams>(m, "SolitonParams")
      .def(py::init<>())
      .def_readwrite("zeta", &SolitonParams::zeta)
      .def_readwrite("v", &SolitonParams::v)
      .def_readwrite("gamma", &SolitonParams::gamma)
      .def_readwrite("omega", &SolitonParams::omega)
      .def_readwrite("f_omega", &SolitonParams::f_omega);

  py::class_<ComplexField>(m, "ComplexField")
      .def_property_readonly("grid", [](const ComplexField& f) { return PyGrid{f.grid}; })
      .def("values", &to_numpy)
      .def("norm", &norm, py::arg("sobolev_order") = 0, py::arg("weight_power") = 0);
  m.def("field_from_values",
        [](const PyGrid& g, py::array_t<std::complex<double>> a) { return from_numpy(g.ptr, a); },
        py::arg("grid"), py::arg("values"));
  m.def("place",
        [](const SolitonProfile& p, const SolitonParams& sp, const PyGrid& g) {
          return place([&p](double x) { return p.value(x); }, sp, g.ptr);
        },
        py::arg("profile"), py::arg("params"), py::arg("grid"));
  m.def("sym", &sym);
  m.def("odd_part", &odd_part);
  m.def("oddness_residual", &oddness_residual);
  m.def("galilean", &galilean, py::arg("u"), py::arg("v"), py::arg("t"));
  m.def("norm", &norm, py::arg("u"), py::arg("sobolev_order") = 0, py::arg("weight_power") = 0);
  m.def("inner", &inner);
  m.def("derivative", &derivative, py::arg("u"), py::arg("order") = 1);
  m.def("spectral_shift", &spectral_shift);

  py::class_<LinearizedOperator, std::shared_ptr<LinearizedOperator>>(m, "LinearizedOperator")
      .def(py::init([](const SolitonProfile& p, const PolynomialNonlinearity& F, const PyGrid& g) {
        return std::make_shared<LinearizedOperator>(p, F, g.ptr);
      }))
      .def("apply", &LinearizedOperator::apply)
      .def("kernel_translation", &LinearizedOperator::kernel_translation)
      .def("kernel_phase", &LinearizedOperator::kernel_phase);
  m.def("invert_projected",
        [](const LinearizedOperator& S, const ComplexField& f, double tol) {
          return invert_projected(S, f, tol);
        },
        py::arg("S"), py::arg("f"), py::arg("tol") = 1e-8);
  m.def("coercivity_floor", &coercivity_floor, py::arg("S"), py::arg("constraints"),
        py::arg("max_iterations") = 260);

  py::enum_<Scheme>(m, "Scheme")
      .value("Strang", Scheme::Strang)
      .value("Yoshida4", Scheme::Yoshida4);

  py::class_<ConservedQuantities>(m, "ConservedQuantities")
      .def_readonly("H", &ConservedQuantities::H)
      .def_readonly("Q", &ConservedQuantities::Q)
      .def_readonly("M", &ConservedQuantities::M);
  m.def("conserved", &conserved);

  py::class_<HalfLineQuantities>(m, "HalfLineQuantities")
      .def_readonly("Q_plus", &HalfLineQuantities::Q_plus)
      .def_readonly("H_plus", &HalfLineQuantities::H_plus)
      .def_readonly("M_plus", &HalfLineQuantities::M_plus)
      .def_readonly("boundary_flux", &HalfLineQuantities::boundary_flux);
  m.def("half_quantities", &half_quantities);

  m.def("step", &step, py::arg("u"), py::arg("dt"), py::arg("F"),
        py::arg("scheme") = Scheme::Strang);
  m.def("evolve",
        [](const ComplexField& u0, const PolynomialNonlinearity& F, double dt, double t_begin,
           double t_end, Scheme scheme) {
          EvolutionConfig cfg;
          cfg.dt = dt;
          cfg.t_begin = t_begin;
          cfg.t_end = t_end;
          cfg.scheme = scheme;
          cfg.snapshot_stride = 1 << 30;  // endpoints only
          auto traj = run(u0, cfg, F, {}, true);
          return traj.snapshots.back().u;
        },
        py::arg("u0"), py::arg("F"), py::arg("dt"), py::arg("t_begin"), py::arg("t_end"),
        py::arg("scheme") = Scheme::Strang);

  py::class_<InteractionDynamics>(m, "InteractionDynamics")
      .def_readonly("C", &InteractionDynamics::C)
      .def_readonly("omega", &InteractionDynamics::omega)
      .def_readonly("v", &InteractionDynamics::v)
      .def("d", &InteractionDynamics::d)
      .def("d_dot", &InteractionDynamics::d_dot)
      .def("d_ddot", &InteractionDynamics::d_ddot);
  m.def("make_dynamics", &make_dynamics);
  m.def("interaction_constant", [](const SolitonProfile& p, const PolynomialNonlinearity& F) {
    auto c = interaction_constant(p, F);
    return py::make_tuple(c.value, c.route_balance, c.route_tail,
                          c.integral_identity_residual);
  });

  py::enum_<SourceVariant>(m, "SourceVariant")
      .value("Displayed", SourceVariant::Displayed)
      .value("Uniform", SourceVariant::Uniform);

  py::class_<ApproximateSolution>(m, "ApproximateSolution")
      .def_static("order0",
                  [](const SolitonProfile& p, const InteractionDynamics& dyn, const PyGrid& g) {
                    return ApproximateSolution::order0(p, dyn, g.ptr);
                  })
      .def_static("order1", &ApproximateSolution::order1, py::arg("profile"), py::arg("F"),
                  py::arg("dynamics"), py::arg("S"),
                  py::arg("variant") = SourceVariant::Uniform)
      .def("field", &ApproximateSolution::field)
      .def("dt_field", &ApproximateSolution::dt_field)
      .def("residual", &ApproximateSolution::residual)
      .def_property_readonly("order", &ApproximateSolution::order);

  py::class_<ModulationState>(m, "ModulationState")
      .def_readonly("t", &ModulationState::t)
      .def_readonly("shifts", &ModulationState::shifts)
      .def_readonly("residual_norm", &ModulationState::residual_norm)
      .def("fitted", &ModulationState::fitted);
  m.def("fit_modulation",
        [](const ComplexField& u, const SolitonParams& guess, const SolitonProfile& p,
           double basin) {
          ModulationModel model{&p, nullptr, 0.0};
          return fit(u, guess, model, basin);
        },
        py::arg("u"), py::arg("guess"), py::arg("profile"), py::arg("basin") = 0.1);

  py::class_<CollisionConfig>(m, "CollisionConfig")
      .def(py::init<>())
      .def_readwrite("nonlinearity", &CollisionConfig::nonlinearity)
      .def_readwrite("omega", &CollisionConfig::omega)
      .def_readwrite("v", &CollisionConfig::v)
      .def_readwrite("ansatz_order", &CollisionConfig::ansatz_order)
      .def_readwrite("grid_n", &CollisionConfig::grid_n)
      .def_readwrite("grid_length", &CollisionConfig::grid_length)
      .def_readwrite("dt", &CollisionConfig::dt)
      .def_readwrite("scheme", &CollisionConfig::scheme);

  py::class_<CollisionReport>(m, "CollisionReport")
      .def_readonly("v_in", &CollisionReport::v_in)
      .def_readonly("v_out", &CollisionReport::v_out)
      .def_readonly("inelasticity", &CollisionReport::inelasticity)
      .def_readonly("remainder_H1_final", &CollisionReport::remainder_H1_final)
      .def_readonly("mass_drift", &CollisionReport::mass_drift)
      .def_readonly("energy_drift", &CollisionReport::energy_drift)
      .def_readonly("min_separation", &CollisionReport::min_separation)
      .def_readonly("mplus_monotone_defect", &CollisionReport::mplus_monotone_defect)
      .def_readonly("flux_match_rel_error", &CollisionReport::flux_match_rel_error);
  m.def("run_collision", &run_collision, py::call_guard<py::gil_scoped_release>());
}
