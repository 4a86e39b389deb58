#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <memory>

#include "spsim/dynamics.hpp"
#include "spsim/kernels.hpp"
#include "spsim/observables.hpp"
#include "spsim/potential.hpp"
#include "spsim/scenario.hpp"

namespace py = pybind11;
using namespace spsim;

namespace {

using carray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

struct PyGrid {
  GridPtr ptr;
};

Field to_field(const PyGrid& g, const carray& a) {
  Field u(g.ptr);
  if (static_cast<std::size_t>(a.size()) != g.ptr->size())
    throw std::invalid_argument("array size does not match the grid");
  const auto* data = a.data();
  std::copy(data, data + a.size(), u.values.begin());
  return u;
}

py::array from_field(const Field& u) {
  const int n = u.grid->points_per_axis;
  std::vector<py::ssize_t> shape =
      u.grid->dimension == 2 ? std::vector<py::ssize_t>{n, n} : std::vector<py::ssize_t>{n};
  py::array_t<std::complex<double>> out(shape);
  std::copy(u.values.begin(), u.values.end(), out.mutable_data());
  return out;
}

py::array_t<double> axis_array(const std::vector<double>& v) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  py::array_t<double> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> real_array(const PyGrid& g, const std::vector<double>& v) {
  const int n = g.ptr->points_per_axis;
  std::vector<py::ssize_t> shape =
      g.ptr->dimension == 2 ? std::vector<py::ssize_t>{n, n} : std::vector<py::ssize_t>{n};
  py::array_t<double> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ModelParams params_for(const PyGrid& g, const Field& u, double lambda, double eta, double p) {
  return ModelParams::make(g.ptr->dimension, lambda, eta, p, l2_norm_squared(u));
}

Formulation formulation_from(const std::string& s) {
  if (s == "oSP") return Formulation::oSP;
  if (s == "SP") return Formulation::SP;
  if (s == "SPp") return Formulation::SPp;
  throw std::invalid_argument("formulation must be one of 'oSP', 'SP', 'SPp'");
}

py::dict record_dict(const ObservableRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["mass"] = r.mass;
  d["kinetic"] = r.kinetic;
  d["hartree"] = r.hartree;
  d["power"] = r.power;
  d["total_energy"] = r.total_energy;
  d["log_moment"] = r.log_moment;
  d["h12_moment"] = r.h12_moment;
  d["sigma_moment"] = r.sigma_moment;
  d["sigma2_moment"] = r.sigma2_moment;
  d["grad_norm"] = r.grad_norm;
  return d;
}

class PySimulation {
 public:
  PySimulation(const PyGrid& g, const carray& u0, double lambda, double eta, double p)
      : grid_(g.ptr) {
    Field init = to_field(g, u0);
    params_ = params_for(g, init, lambda, eta, p);
    if (lambda != 0.0) engine_ = std::make_shared<const ConvolutionEngine>(grid_);
    integ_ = std::make_unique<StrangIntegrator>(std::move(init), params_, engine_);
  }

  void step(double dt, int n) {
    py::gil_scoped_release release;
    for (int i = 0; i < n; ++i) integ_->step(dt);
  }

  py::array state() const { return from_field(integ_->state()); }
  double time() const { return integ_->time(); }
  py::dict observables() const {
    return record_dict(record_observables(integ_->time(), integ_->state(), params_, engine_.get()));
  }

 private:
  GridPtr grid_;
  ModelParams params_;
  std::shared_ptr<const ConvolutionEngine> engine_;
  std::unique_ptr<StrangIntegrator> integ_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-spectral Schrodinger-Poisson simulator core";

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int dimension, double half_width, int points_per_axis) {
             return PyGrid{make_grid(dimension, half_width, points_per_axis)};
           }),
           py::arg("dimension"), py::arg("half_width"), py::arg("points_per_axis"))
      .def_property_readonly("dimension", [](const PyGrid& g) { return g.ptr->dimension; })
      .def_property_readonly("half_width", [](const PyGrid& g) { return g.ptr->half_width; })
      .def_property_readonly("points_per_axis",
                             [](const PyGrid& g) { return g.ptr->points_per_axis; })
      .def_property_readonly("spacing", [](const PyGrid& g) { return g.ptr->spacing; })
      .def_property_readonly("coordinates", [](const PyGrid& g) { return axis_array(g.ptr->coordinates); })
      .def_property_readonly("wavenumbers", [](const PyGrid& g) { return axis_array(g.ptr->wavenumbers); });

  m.def(
      "make_grid",
      [](int dimension, double half_width, int points_per_axis) {
        return PyGrid{make_grid(dimension, half_width, points_per_axis)};
      },
      py::arg("dimension"), py::arg("half_width"), py::arg("points_per_axis"));

  m.def(
      "l2_norm_squared",
      [](const PyGrid& g, const carray& u) { return l2_norm_squared(to_field(g, u)); },
      py::arg("grid"), py::arg("u"));
  m.def(
      "grad_norm_squared",
      [](const PyGrid& g, const carray& u) { return grad_norm_squared(to_field(g, u)); },
      py::arg("grid"), py::arg("u"));
  m.def(
      "spectral_gradient",
      [](const PyGrid& g, const carray& u) {
        py::list out;
        for (const Field& du : spectral_gradient(to_field(g, u))) out.append(from_field(du));
        return out;
      },
      py::arg("grid"), py::arg("u"));

  m.def("k_function", &k_function, py::arg("x"), py::arg("y"),
        "log(|x-y|/<x>) / (1 + log<y>) for 2D points x != y");
  m.def(
      "check_k_bound",
      [](double eta, double p) {
        const KernelBoundReport r = check_k_bound(eta, p);
        py::dict d;
        d["eta"] = r.eta;
        d["C0"] = r.C0;
        d["sampled_sup_far"] = r.sampled_sup_far;
        d["Lp_norm_near"] = r.Lp_norm_near;
        d["p"] = r.p;
        d["far_bound_ok"] = r.far_bound_ok();
        return d;
      },
      py::arg("eta") = 1.0, py::arg("p") = 2.0);
  m.def(
      "check_1d_bound", []() { return check_1d_bound(); },
      "sup of ||x-y| - |x|| / (1 + |y|) over the sampled square; always <= 1");

  m.def(
      "full_newtonian",
      [](const PyGrid& g, const carray& u) {
        const Field f = to_field(g, u);
        ConvolutionEngine engine(g.ptr);
        return real_array(g, full_newtonian(f, engine));
      },
      py::arg("grid"), py::arg("u"), "-(1/2pi) (log|x| * |u|^2); 2D only");
  m.def(
      "decomposed_potential",
      [](const PyGrid& g, const carray& u, double lambda, double eta, double p) {
        const Field f = to_field(g, u);
        const ModelParams params = params_for(g, f, lambda, eta, p);
        ConvolutionEngine engine(g.ptr);
        const PotentialSplit split = decomposed_potential(f, params, engine);
        return py::make_tuple(real_array(g, split.linear), real_array(g, split.remainder));
      },
      py::arg("grid"), py::arg("u"), py::arg("lambda_"), py::arg("eta") = 0.0, py::arg("p") = 2.0);

  m.def(
      "energy_breakdown",
      [](const PyGrid& g, const carray& u, double lambda, double eta, double p) {
        const Field f = to_field(g, u);
        const ModelParams params = params_for(g, f, lambda, eta, p);
        std::shared_ptr<const ConvolutionEngine> engine;
        if (lambda != 0.0) engine = std::make_shared<const ConvolutionEngine>(g.ptr);
        const EnergyBreakdown b = energy_breakdown(f, params, engine.get());
        py::dict d;
        d["kinetic"] = b.kinetic;
        d["hartree"] = b.hartree;
        d["power"] = b.power;
        d["total"] = b.total();
        return d;
      },
      py::arg("grid"), py::arg("u"), py::arg("lambda_"), py::arg("eta") = 0.0, py::arg("p") = 2.0);

  m.def(
      "linear_propagator_step",
      [](const PyGrid& g, const carray& u, double m_coeff, double dt) {
        return from_field(linear_propagator_step(to_field(g, u), m_coeff, dt));
      },
      py::arg("grid"), py::arg("u"), py::arg("m"), py::arg("dt"));

  m.def(
      "picard_iterate",
      [](const PyGrid& g, const carray& u0, double lambda, double eta, double p, double t_short,
         int n_iter, int n_substeps) {
        const Field f = to_field(g, u0);
        const ModelParams params = params_for(g, f, lambda, eta, p);
        std::shared_ptr<const ConvolutionEngine> engine;
        if (lambda != 0.0) engine = std::make_shared<const ConvolutionEngine>(g.ptr);
        PicardResult r;
        {
          py::gil_scoped_release release;
          r = picard_iterate_detailed(f, params, engine.get(), t_short, n_iter, n_substeps);
        }
        return py::make_tuple(from_field(r.final_state), r.iterate_distances);
      },
      py::arg("grid"), py::arg("u0"), py::arg("lambda_"), py::arg("eta"), py::arg("p"),
      py::arg("t_short"), py::arg("n_iter") = 4, py::arg("n_substeps") = 50);

  m.def(
      "pde_residual",
      [](const PyGrid& g, const carray& prev, const carray& mid, const carray& next, double dt,
         double lambda, double eta, double p, const std::string& formulation) {
        const Field fm = to_field(g, mid);
        const ModelParams params = params_for(g, fm, lambda, eta, p);
        std::shared_ptr<const ConvolutionEngine> engine;
        if (lambda != 0.0) engine = std::make_shared<const ConvolutionEngine>(g.ptr);
        return pde_residual(to_field(g, prev), fm, to_field(g, next), dt, params, engine.get(),
                            formulation_from(formulation));
      },
      py::arg("grid"), py::arg("u_prev"), py::arg("u_mid"), py::arg("u_next"), py::arg("dt"),
      py::arg("lambda_"), py::arg("eta"), py::arg("p"), py::arg("formulation"));

  m.def(
      "make_datum",
      [](const PyGrid& g, const std::string& kind, double width, double amplitude, double center,
         double separation, double k0) {
        DatumSpec spec;
        if (kind == "gaussian")
          spec.kind = DatumKind::gaussian;
        else if (kind == "double_bump")
          spec.kind = DatumKind::double_bump;
        else if (kind == "plane_modulated")
          spec.kind = DatumKind::plane_modulated;
        else
          throw std::invalid_argument("unknown datum kind: " + kind);
        spec.width = width;
        spec.amplitude = amplitude;
        spec.center = center;
        spec.separation = separation;
        spec.k0 = k0;
        return from_field(make_datum(g.ptr, spec));
      },
      py::arg("grid"), py::arg("kind") = "gaussian", py::arg("width") = 1.0,
      py::arg("amplitude") = 1.0, py::arg("center") = 0.0, py::arg("separation") = 4.0,
      py::arg("k0") = 1.0);

  py::class_<PySimulation>(m, "Simulation")
      .def(py::init<const PyGrid&, const carray&, double, double, double>(), py::arg("grid"),
           py::arg("u0"), py::arg("lambda_"), py::arg("eta") = 0.0, py::arg("p") = 2.0)
      .def("step", &PySimulation::step, py::arg("dt"), py::arg("n") = 1)
      .def_property_readonly("t", &PySimulation::time)
      .def("state", &PySimulation::state)
      .def("observables", &PySimulation::observables);

  m.def("run_scenario_json", [](const std::string& text) {
    const Scenario sc = scenario_from_json_text(text);
    RunResult res;
    {
      py::gil_scoped_release release;
      res = run_scenario(sc);
    }
    py::dict d;
    d["name"] = sc.name;
    d["outcome"] = res.outcome == Outcome::suspected_blowup ? "suspected_blowup" : "bounded";
    d["error"] = res.error;
    if (res.error) d["error_message"] = res.error_message;
    d["exit_code"] = res.exit_code();
    py::list records;
    for (const auto& r : res.records) records.append(record_dict(r));
    d["records"] = records;
    py::list checks;
    for (const auto& c : res.checks) {
      py::dict cd;
      cd["name"] = c.name;
      cd["passed"] = c.passed;
      cd["value"] = c.value;
      cd["detail"] = c.detail;
      checks.append(cd);
    }
    d["checks"] = checks;
    d["final_state"] = res.records.empty() ? py::object(py::none()) : py::object(from_field(res.final_state));
    return d;
  });

  m.def("preset_names", []() {
    std::vector<std::string> names;
    for (const auto& sc : builtin_presets()) names.push_back(sc.name);
    return names;
  });
  m.def("preset_json", [](const std::string& name) {
    for (const auto& sc : builtin_presets())
      if (sc.name == name) return scenario_to_json_text(sc);
    throw std::invalid_argument("unknown preset: " + name);
  });
  m.def("sweep_preset_names", []() {
    std::vector<std::string> names;
    for (const auto& cfg : builtin_sweeps()) names.push_back(cfg.name);
    return names;
  });
  m.def("sweep_preset_json", [](const std::string& name) {
    for (const auto& cfg : builtin_sweeps())
      if (cfg.name == name) return sweep_to_json_text(cfg);
    throw std::invalid_argument("unknown sweep preset: " + name);
  });
}
