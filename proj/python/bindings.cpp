#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "magnls/classify.hpp"
#include "magnls/dynamics.hpp"
#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/ground_states.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/parallel.hpp"
#include "magnls/scenario.hpp"
#include "magnls/soliton.hpp"

namespace py = pybind11;
using namespace magnls;

namespace {

using ComplexArray = py::array_t<complex, py::array::c_style | py::array::forcecast>;

Field to_field(const ComplexArray& a, const Grid& g) {
  if (a.ndim() != 3 || a.shape(0) != g.n(0) || a.shape(1) != g.n(1) || a.shape(2) != g.n(2))
    throw InvalidArgument("field: array shape does not match the grid");
  return Field(g, std::vector<complex>(a.data(), a.data() + a.size()));
}

ComplexArray to_array(const Field& f) {
  const Grid& g = f.grid();
  ComplexArray a({g.n(0), g.n(1), g.n(2)});
  std::copy(f.values().begin(), f.values().end(), a.mutable_data());
  return a;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::dict constants_dict(const QConstants& c) {
  py::dict d;
  d["alpha"] = c.alpha;
  d["mass_Q"] = c.mass_Q;
  d["grad_Q_sq"] = c.grad_Q_sq;
  d["lp_Q"] = c.lp_Q;
  d["rho_Q_sq"] = c.rho_Q_sq;
  d["sigma_c"] = c.sigma_c;
  d["c_opt"] = c.c_opt;
  d["e0_mq"] = c.e0_mq;
  d["grad_mass_product"] = c.grad_mass_product;
  d["pohozaev_residual_grad"] = c.pohozaev_residual_grad;
  d["pohozaev_residual_lp"] = c.pohozaev_residual_lp;
  return d;
}

py::dict series_dict(const EvolveOutcome& o) {
  std::vector<double> t, m, e, r, g, f;
  for (const auto& rec : o.series) {
    t.push_back(rec.t);
    m.push_back(rec.mass);
    e.push_back(rec.energy_E);
    r.push_back(rec.angular_R);
    g.push_back(rec.grad_norm_sq);
    f.push_back(rec.virial_F);
  }
  py::dict d;
  d["status"] = to_string(o.status);
  d["t_end"] = o.t_end;
  d["steps"] = o.steps;
  d["blowup_time_estimate"] = o.blowup_time_estimate ? py::object(py::float_(*o.blowup_time_estimate)) : py::none();
  d["t"] = py::array(py::cast(t));
  d["mass"] = py::array(py::cast(m));
  d["energy"] = py::array(py::cast(e));
  d["angular_momentum"] = py::array(py::cast(r));
  d["grad_sq"] = py::array(py::cast(g));
  d["virial_F"] = py::array(py::cast(f));
  d["final_state"] = to_array(o.final_state);
  return d;
}

}  // namespace

PYBIND11_MODULE(_magnls, m) {
  m.doc() = "Magnetic nonlinear Schrodinger toolkit";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<PreconditionRefused>(m, "PreconditionRefused", PyExc_RuntimeError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::class_<Params>(m, "Params")
      .def(py::init([](double b, double alpha) {
             Params p{b, normalize_alpha(alpha)};
             p.validate();
             return p;
           }),
           py::arg("b") = 1.0, py::arg("alpha") = 2.0)
      .def_readonly("b", &Params::b)
      .def_readonly("alpha", &Params::alpha)
      .def("__repr__", [](const Params& p) {
        return "Params(b=" + std::to_string(p.b) + ", alpha=" + std::to_string(p.alpha) + ")";
      });

  py::class_<Grid>(m, "Grid")
      .def(py::init<std::array<int, 3>, std::array<double, 3>>(), py::arg("dims"), py::arg("half_widths"))
      .def_property_readonly("dims", &Grid::dims)
      .def_property_readonly("half_widths", &Grid::half_widths)
      .def("spacing", &Grid::spacing)
      .def("coords", &Grid::coords);

  m.def("set_threads", &set_thread_count, py::arg("n"));
  m.def("threads", &thread_count);

  m.def(
      "solve_q",
      [](double alpha, double tol) {
        const RadialProfile q = solve_q(normalize_alpha(alpha), tol);
        py::dict d = constants_dict(q_constants(q));
        d["r"] = py::array(py::cast(q.r_nodes));
        d["q"] = py::array(py::cast(q.q_values));
        return d;
      },
      py::arg("alpha"), py::arg("tol") = 1e-10);

  m.def(
      "gaussian",
      [](const Grid& g, double amplitude, std::array<double, 3> widths, double chirp, std::array<double, 3> center) {
        return to_array(gaussian(g, {amplitude, widths, chirp, center}));
      },
      py::arg("grid"), py::arg("amplitude") = 1.0, py::arg("widths") = std::array<double, 3>{1.0, 1.0, 1.0},
      py::arg("chirp") = 0.0, py::arg("center") = std::array<double, 3>{0.0, 0.0, 0.0});

  m.def(
      "scaled_soliton",
      [](const Grid& g, double alpha, double a, double lambda) {
        return to_array(scaled_soliton(solve_q(normalize_alpha(alpha), 1e-10), g, {a, lambda, {0.0, 0.0, 0.0}}));
      },
      py::arg("grid"), py::arg("alpha"), py::arg("a") = 1.0, py::arg("lam") = 1.0);

  m.def(
      "functionals",
      [](const ComplexArray& u, const Grid& g, const Params& p) {
        const Field f = to_field(u, g);
        const Integrals in = compute_integrals(f, p);
        py::dict d;
        d["mass"] = in.mass;
        d["grad_sq"] = in.grad_sq;
        d["magkin"] = in.magkin;
        d["angular_momentum"] = in.R;
        d["rho_sq"] = in.rho_sq;
        d["lp"] = in.lp;
        d["virial_F"] = in.x_sq;
        d["virial_Fprime"] = 4.0 * in.x_dot_grad_im;
        d["energy"] = energy_E(f, p);
        d["energy_reduced"] = energy_E0(f, p);
        d["pohozaev_H"] = pohozaev_H(f, p);
        d["virial_Fsecond"] = virial_Fsecond(f, p);
        return d;
      },
      py::arg("u"), py::arg("grid"), py::arg("params"));

  m.def(
      "classify",
      [](const ComplexArray& u, const Grid& g, const Params& p) {
        const QConstants qc = q_constants(solve_q(p.alpha < 4.0 / 3.0 ? 2.0 : p.alpha, 1e-10));
        return parse_json(classify(to_field(u, g), p, qc).to_json());
      },
      py::arg("u"), py::arg("grid"), py::arg("params"));

  m.def(
      "evolve",
      [](const ComplexArray& u, const Grid& g, const Params& p, double dt, double t_final, bool adapt,
         int record_stride, int order) {
        EvolveConfig cfg;
        cfg.dt_initial = dt;
        cfg.t_final = t_final;
        cfg.adapt = adapt;
        cfg.record_stride = record_stride;
        cfg.order = order;
        const Field f = to_field(u, g);
        EvolveOutcome o = [&] {
          py::gil_scoped_release release;
          return evolve(f, p, cfg);
        }();
        return series_dict(o);
      },
      py::arg("u"), py::arg("grid"), py::arg("params"), py::arg("dt") = 1e-3, py::arg("t_final") = 1.0,
      py::arg("adapt") = false, py::arg("record_stride") = 10, py::arg("order") = 2);

  m.def(
      "ground_state",
      [](const Grid& g, const Params& p, double omega, double tol) {
        const GroundStateResult gs = [&] {
          py::gil_scoped_release release;
          return minimize_action(omega, p, g, tol);
        }();
        py::dict d = parse_json(gs.to_json(p));
        d["phi"] = to_array(gs.phi);
        return d;
      },
      py::arg("grid"), py::arg("params"), py::arg("omega"), py::arg("tol") = 1e-8);

  m.def(
      "verify",
      [](std::uint64_t seed, int samples, double alpha) {
        const Grid g({32, 32, 32}, {8.0, 8.0, 8.0});
        return parse_json(verify_suite(seed, samples, normalize_alpha(alpha), g).to_json());
      },
      py::arg("seed"), py::arg("samples") = 100, py::arg("alpha") = 2.0);

  m.def(
      "run",
      [](const std::string& config_json) {
        py::gil_scoped_release release;
        return run(ScenarioConfig::from_json(config_json));
      },
      py::arg("config_json"));
}
