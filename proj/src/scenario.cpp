#include "spsim/scenario.hpp"

#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace spsim {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "field snapshots are written in the host byte order and documented little-endian");

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

const json& member(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

double num_at(const json& j, const char* key, const char* where) {
  const json& v = member(j, key, where);
  if (!v.is_number()) fail(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(std::string(where) + "." + key + " must be a number");
  return it->get<double>();
}

long long int_at(const json& j, const char* key, const char* where) {
  const json& v = member(j, key, where);
  if (!v.is_number_integer()) fail(std::string(where) + "." + key + " must be an integer");
  return v.get<long long>();
}

std::string str_at(const json& j, const char* key, const char* where) {
  const json& v = member(j, key, where);
  if (!v.is_string()) fail(std::string(where) + "." + key + " must be a string");
  return v.get<std::string>();
}

void check_name(const std::string& name) {
  if (name.empty()) fail("name must be nonempty");
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      fail("name may contain only letters, digits, '.', '-' and '_'");
  }
  if (name.front() == '.') fail("name must not start with '.'");
}

std::string datum_kind_name(DatumKind kind) {
  switch (kind) {
    case DatumKind::gaussian: return "gaussian";
    case DatumKind::double_bump: return "double_bump";
    case DatumKind::plane_modulated: return "plane_modulated";
  }
  return "gaussian";
}

DatumKind datum_kind_from(const std::string& s) {
  if (s == "gaussian") return DatumKind::gaussian;
  if (s == "double_bump") return DatumKind::double_bump;
  if (s == "plane_modulated") return DatumKind::plane_modulated;
  fail("datum.kind must be one of gaussian, double_bump, plane_modulated");
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  Scenario sc;
  if (int_at(j, "schema_version", "config") != 1) fail("unsupported schema_version (expected 1)");
  sc.schema_version = 1;
  sc.name = str_at(j, "name", "config");
  check_name(sc.name);

  const json& model = member(j, "model", "config");
  const long long dim = int_at(model, "dimension", "model");
  if (dim != 1 && dim != 2) fail("model.dimension must be 1 or 2");
  sc.grid.dimension = static_cast<int>(dim);
  sc.lambda = num_at(model, "lambda", "model");
  sc.eta = num_at(model, "eta", "model");
  sc.p = num_at(model, "p", "model");
  if (!(sc.p >= 1.0)) fail("model.p must be >= 1");

  const json& grid = member(j, "grid", "config");
  sc.grid.half_width = num_at(grid, "half_width", "grid");
  const long long n = int_at(grid, "points_per_axis", "grid");
  if (!(sc.grid.half_width > 0.0)) fail("grid.half_width must be positive");
  if (n < 8 || n % 2 != 0 || n > (1 << 20)) fail("grid.points_per_axis must be even, >= 8");
  sc.grid.points_per_axis = static_cast<int>(n);

  const json& datum = member(j, "datum", "config");
  sc.datum.kind = datum_kind_from(str_at(datum, "kind", "datum"));
  sc.datum.width = num_or(datum, "width", 1.0, "datum");
  sc.datum.amplitude = num_or(datum, "amplitude", 1.0, "datum");
  sc.datum.center = num_or(datum, "center", 0.0, "datum");
  sc.datum.separation = num_or(datum, "separation", 4.0, "datum");
  sc.datum.k0 = num_or(datum, "k0", 1.0, "datum");
  if (!(sc.datum.width > 0.0)) fail("datum.width must be positive");
  if (!std::isfinite(sc.datum.amplitude)) fail("datum.amplitude must be finite");
  if (sc.datum.kind == DatumKind::double_bump && !(sc.datum.separation >= 0.0))
    fail("datum.separation must be nonnegative");

  const json& sim = member(j, "sim", "config");
  sc.sim.dt = num_at(sim, "dt", "sim");
  sc.sim.t_end = num_at(sim, "t_end", "sim");
  const long long stride = int_at(sim, "output_stride", "sim");
  sc.sim.blowup_threshold = num_at(sim, "blowup_threshold", "sim");
  const std::string integ = str_at(sim, "integrator", "sim");
  const long long iters =
      sim.contains("picard_iterations") ? int_at(sim, "picard_iterations", "sim") : 4;
  if (!(sc.sim.dt > 0.0)) fail("sim.dt must be positive");
  if (!(sc.sim.t_end >= sc.sim.dt)) fail("sim.t_end must be at least sim.dt");
  if (stride < 1) fail("sim.output_stride must be >= 1");
  sc.sim.output_stride = static_cast<int>(stride);
  if (!(sc.sim.blowup_threshold > 0.0)) fail("sim.blowup_threshold must be positive");
  if (integ == "strang")
    sc.sim.integrator = IntegratorKind::strang;
  else if (integ == "picard")
    sc.sim.integrator = IntegratorKind::picard;
  else
    fail("sim.integrator must be 'strang' or 'picard'");
  if (iters < 1) fail("sim.picard_iterations must be >= 1");
  sc.sim.picard_iterations = static_cast<int>(iters);

  sc.checks.clear();
  if (j.contains("checks")) {
    const json& checks = j["checks"];
    if (!checks.is_array()) fail("checks must be an array of names");
    for (const auto& c : checks) {
      if (!c.is_string()) fail("checks entries must be strings");
      const std::string name = c.get<std::string>();
      if (name != "mass" && name != "energy" && name != "growth" && name != "apriori" &&
          name != "concentration")
        fail("unknown check '" + name + "'");
      sc.checks.push_back(name);
    }
  }

  if (j.contains("output")) {
    const json& output = j["output"];
    const long long snap =
        output.contains("snapshot_stride") ? int_at(output, "snapshot_stride", "output") : 0;
    if (snap < 0) fail("output.snapshot_stride must be >= 0");
    sc.output.snapshot_stride = static_cast<int>(snap);
  }
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = sc.schema_version;
  j["name"] = sc.name;
  j["model"] = {{"dimension", sc.grid.dimension},
                {"lambda", sc.lambda},
                {"eta", sc.eta},
                {"p", sc.p}};
  j["grid"] = {{"half_width", sc.grid.half_width},
               {"points_per_axis", sc.grid.points_per_axis}};
  json d;
  d["kind"] = datum_kind_name(sc.datum.kind);
  d["width"] = sc.datum.width;
  d["amplitude"] = sc.datum.amplitude;
  switch (sc.datum.kind) {
    case DatumKind::gaussian:
      d["center"] = sc.datum.center;
      break;
    case DatumKind::double_bump:
      d["center"] = sc.datum.center;
      d["separation"] = sc.datum.separation;
      break;
    case DatumKind::plane_modulated:
      d["center"] = sc.datum.center;
      d["k0"] = sc.datum.k0;
      break;
  }
  j["datum"] = d;
  j["sim"] = {{"dt", sc.sim.dt},
              {"t_end", sc.sim.t_end},
              {"output_stride", sc.sim.output_stride},
              {"blowup_threshold", sc.sim.blowup_threshold},
              {"integrator", sc.sim.integrator == IntegratorKind::picard ? "picard" : "strang"},
              {"picard_iterations", sc.sim.picard_iterations}};
  j["checks"] = sc.checks;
  j["output"] = {{"snapshot_stride", sc.output.snapshot_stride}};
  return j;
}

SweepConfig sweep_from_json(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  SweepConfig cfg;
  if (int_at(j, "schema_version", "sweep") != 1) fail("unsupported schema_version (expected 1)");
  cfg.name = str_at(j, "name", "sweep");
  check_name(cfg.name);
  cfg.base = scenario_from_json(member(j, "base", "sweep"));
  if (j.contains("axes")) {
    const json& axes = j["axes"];
    if (!axes.is_object()) fail("axes must be an object");
    auto axis = [&](const char* key, std::vector<double>& out) {
      if (!axes.contains(key)) return;
      const json& a = axes[key];
      if (!a.is_array()) fail(std::string("axes.") + key + " must be an array");
      for (const auto& v : a) {
        if (!v.is_number()) fail(std::string("axes.") + key + " entries must be numbers");
        out.push_back(v.get<double>());
      }
    };
    axis("lambda", cfg.lambdas);
    axis("eta", cfg.etas);
    axis("p", cfg.ps);
    axis("amplitude", cfg.amplitudes);
    for (double pv : cfg.ps)
      if (!(pv >= 1.0)) fail("axes.p entries must be >= 1");
  }
  return cfg;
}

json sweep_to_json(const SweepConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["base"] = scenario_to_json(cfg.base);
  json axes = json::object();
  axes["lambda"] = cfg.lambdas;
  axes["eta"] = cfg.etas;
  axes["p"] = cfg.ps;
  axes["amplitude"] = cfg.amplitudes;
  j["axes"] = axes;
  return j;
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_csv_cell(double v) { return std::isnan(v) ? std::string() : fmt_g17(v); }

json record_to_json(const ObservableRecord& r) {
  json j;
  j["t"] = r.t;
  j["mass"] = r.mass;
  j["kinetic"] = r.kinetic;
  j["hartree"] = r.hartree;
  j["power"] = r.power;
  j["total_energy"] = r.total_energy;
  j["log_moment"] = r.log_moment;
  j["h12_moment"] = r.h12_moment;
  j["sigma_moment"] = r.sigma_moment;
  j["sigma2_moment"] = r.sigma2_moment;
  j["grad_norm"] = r.grad_norm;
  return j;
}

double max_mass_drift(const std::vector<ObservableRecord>& records) {
  if (records.empty()) return 0.0;
  const double m0 = records.front().mass;
  if (m0 == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.mass - m0) / m0);
  return worst;
}

double max_energy_drift(const std::vector<ObservableRecord>& records) {
  if (records.empty()) return 0.0;
  const double e0 = records.front().total_energy;
  const double scale = std::max(1.0, std::abs(e0));
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.total_energy - e0) / scale);
  return worst;
}

constexpr double kMassDriftTol = 1e-10;
constexpr double kEnergyDriftTol = 1e-6;
constexpr double kGrowthTol = 1e-8;

void evaluate_checks(const Scenario& sc, const ModelParams& params, RunResult& res) {
  for (const std::string& name : sc.checks) {
    CheckResult cr;
    cr.name = name;
    if (res.records.empty()) {
      cr.passed = false;
      cr.detail = "no records";
      res.checks.push_back(cr);
      continue;
    }
    if (name == "mass") {
      cr.value = max_mass_drift(res.records);
      cr.passed = cr.value <= kMassDriftTol;
      cr.detail = "max relative mass drift (tolerance 1e-10)";
    } else if (name == "energy") {
      cr.value = max_energy_drift(res.records);
      cr.passed = cr.value <= kEnergyDriftTol;
      cr.detail = "max relative energy drift (tolerance 1e-6)";
    } else if (name == "growth") {
      if (res.records.size() < 2) {
        cr.passed = true;
        cr.detail = "not applicable (single record)";
      } else {
        double grad_sup = 0.0;
        for (const auto& r : res.records) grad_sup = std::max(grad_sup, r.grad_norm);
        cr.value = log_moment_growth_check(res.records, grad_sup);
        cr.passed = cr.value >= -kGrowthTol;
        cr.detail = "worst log-moment growth slack (tolerance -1e-8)";
      }
    } else if (name == "apriori") {
      if (params.lambda == 0.0) {
        cr.passed = true;
        cr.detail = "not applicable (lambda = 0)";
      } else {
        const AprioriBoundReport rep = apriori_bound_check(
            res.records, params, res.records.front().total_energy, sc.sim.blowup_threshold);
        cr.passed = rep.satisfied;
        if (params.lambda < 0.0) {
          cr.value = rep.fitted_C;
          cr.detail = "fitted C; bound root " + fmt_g17(rep.bound_root) + ", sup grad " +
                      fmt_g17(rep.sup_grad);
        } else {
          cr.value = rep.sup_grad;
          cr.detail = "sup grad norm (must stay below the blow-up threshold)";
        }
      }
    } else if (name == "concentration") {
      if (params.dimension != 2) {
        cr.passed = true;
        cr.detail = "not applicable (1D)";
      } else {
        const ConcentrationReport rep = concentration_check(res.final_state);
        if (!rep.conclusive) {
          cr.passed = true;
          cr.detail = "inconclusive (radius below grid spacing)";
        } else {
          cr.passed = rep.upper_ok && rep.lower_ok;
          cr.value = rep.restricted_norm;
          cr.detail = "restricted norm in [" + fmt_g17(rep.lower_bound) + ", " +
                      fmt_g17(rep.upper_bound) + "], r = " + fmt_g17(rep.r);
        }
      }
    }
    res.checks.push_back(cr);
  }
}

using SnapshotSink = std::function<void(const Field&, double)>;

RunResult run_scenario_impl(const Scenario& sc, const SnapshotSink* on_record) {
  const auto t_start = std::chrono::steady_clock::now();
  RunResult res;
  try {
    GridPtr grid = make_grid(sc.grid.dimension, sc.grid.half_width, sc.grid.points_per_axis);
    Field u0 = make_datum(grid, sc.datum);
    res.final_state = u0;
    const double mass0 = l2_norm_squared(u0);
    const ModelParams params =
        ModelParams::make(sc.grid.dimension, sc.lambda, sc.eta, sc.p, mass0);
    std::shared_ptr<const ConvolutionEngine> engine;
    if (sc.lambda != 0.0) engine = std::make_shared<const ConvolutionEngine>(grid);

    const bool track_gauge = sc.grid.dimension == 2 && sc.lambda != 0.0;
    std::vector<double> gauge_w;
    if (track_gauge) gauge_w = gauge_log_weight(*grid);
    auto record = [&](double t, const Field& u) {
      res.records.push_back(record_observables(t, u, params, engine.get()));
      if (track_gauge) {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
          acc += gauge_w[i] * std::norm(u.values[i]);
        res.gauge_times.push_back(t);
        res.gauge_moments.push_back(acc * grid->cell_volume());
      }
      if (on_record) (*on_record)(u, t);
    };

    record(0.0, u0);
    if (!(res.records.front().grad_norm < sc.sim.blowup_threshold))
      throw std::invalid_argument("blowup_threshold must exceed the initial gradient norm");

    if (sc.sim.integrator == IntegratorKind::picard) {
      const int n_sub = static_cast<int>(std::llround(sc.sim.t_end / sc.sim.dt));
      const PicardResult pr = picard_iterate_detailed(u0, params, engine.get(), sc.sim.t_end,
                                                      sc.sim.picard_iterations, std::max(1, n_sub));
      res.final_state = pr.final_state;
      res.picard_distances = pr.iterate_distances;
      record(sc.sim.t_end, res.final_state);
    } else {
      StrangIntegrator integ(u0, params, engine);
      const long long n_steps = std::llround(sc.sim.t_end / sc.sim.dt);
      if (n_steps < 1) throw std::invalid_argument("t_end shorter than one step");
      for (long long step = 1; step <= n_steps; ++step) {
        integ.step(sc.sim.dt);
        if (step % sc.sim.output_stride == 0 || step == n_steps) {
          record(integ.time(), integ.state());
          if (!(res.records.back().grad_norm <= sc.sim.blowup_threshold)) break;  // blow-up: stop
        }
      }
      res.final_state = integ.state();
    }
    res.outcome = blow_up_monitor(res.records, sc.sim.blowup_threshold);
    evaluate_checks(sc, params, res);
  } catch (const std::exception& e) {
    res.error = true;
    res.error_message = e.what();
  }
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

json run_summary_json(const Scenario& sc, const RunResult& res) {
  json s;
  s["name"] = sc.name;
  s["schema_version"] = 1;
  s["outcome"] = res.outcome == Outcome::suspected_blowup ? "suspected_blowup" : "bounded";
  s["error"] = res.error;
  if (res.error) s["error_message"] = res.error_message;
  s["exit_code"] = res.exit_code();
  s["records"] = res.records.size();
  if (!res.records.empty()) {
    s["initial"] = record_to_json(res.records.front());
    s["final"] = record_to_json(res.records.back());
    s["mass_drift"] = max_mass_drift(res.records);
    s["energy_drift"] = max_energy_drift(res.records);
  }
  json checks = json::array();
  for (const auto& c : res.checks)
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  s["checks"] = checks;
  if (!res.gauge_times.empty())
    s["gauge_phase"] = phase_accumulator(res.gauge_times, res.gauge_moments, sc.lambda);
  if (!res.picard_distances.empty()) s["picard_iterate_distances"] = res.picard_distances;
  s["config"] = scenario_to_json(sc);
  s["timing"] = {{"elapsed_seconds", res.elapsed_seconds}};
  return s;
}

const char* kRunPlotScript = R"PY(#!/usr/bin/env python3
"""Plot the observables.csv next to this script (mass/energy drift, gradient norm)."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "observables.csv"))))
t = [float(r["t"]) for r in rows]
mass = [float(r["mass"]) for r in rows]
energy = [float(r["total_energy"]) for r in rows]
grad = [float(r["grad_norm"]) for r in rows]

fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
axes[0].plot(t, [abs(m - mass[0]) / mass[0] if mass[0] else 0.0 for m in mass])
axes[0].set_yscale("log")
axes[0].set_ylabel("relative mass drift")
axes[1].plot(t, [abs(e - energy[0]) / max(1.0, abs(energy[0])) for e in energy])
axes[1].set_yscale("log")
axes[1].set_ylabel("relative energy drift")
axes[2].plot(t, grad)
axes[2].set_ylabel("gradient norm")
axes[2].set_xlabel("t")
fig.tight_layout()
out = os.path.join(here, "observables.png")
fig.savefig(out, dpi=150)
print(out)
)PY";

const char* kPhasePlotScript = R"PY(#!/usr/bin/env python3
"""Plot the phase.csv next to this script: outcome markers over the (p, amplitude) plane,
one panel per (lambda, eta) pair."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "phase.csv"))))
pairs = sorted({(float(r["lambda"]), float(r["eta"])) for r in rows})
fig, axes = plt.subplots(1, max(1, len(pairs)), figsize=(4 * max(1, len(pairs)), 4), squeeze=False)
style = {"bounded": ("o", "tab:blue"), "suspected_blowup": ("x", "tab:red"), "error": ("s", "gray")}
for ax, (lam, eta) in zip(axes[0], pairs):
    for r in rows:
        if (float(r["lambda"]), float(r["eta"])) != (lam, eta):
            continue
        marker, color = style.get(r["outcome"], ("d", "black"))
        ax.scatter(float(r["p"]), float(r["amplitude"]), marker=marker, c=color, s=80)
    ax.set_title(f"lambda={lam:g}, eta={eta:g}")
    ax.set_xlabel("p")
    ax.set_ylabel("amplitude")
fig.tight_layout()
out = os.path.join(here, "phase.png")
fig.savefig(out, dpi=150)
print(out)
)PY";

std::string snapshot_name(double t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "field_%.6g.bin", t);
  return buf;
}

int resolve_workers(int requested, std::size_t cells) {
  int w = requested;
  if (w <= 0) {
    if (const char* env = std::getenv("SPSIM_WORKERS")) w = std::atoi(env);
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
  }
  return std::max(1, std::min<int>(w, static_cast<int>(cells)));
}

std::vector<SweepCell> sweep_impl(const SweepConfig& cfg, int worker_count,
                                  const std::string* cells_dir) {
  auto axis = [](const std::vector<double>& ax, double base) {
    return ax.empty() ? std::vector<double>{base} : ax;
  };
  const std::vector<double> lambdas = axis(cfg.lambdas, cfg.base.lambda);
  const std::vector<double> etas = axis(cfg.etas, cfg.base.eta);
  const std::vector<double> ps = axis(cfg.ps, cfg.base.p);
  const std::vector<double> amps = axis(cfg.amplitudes, cfg.base.datum.amplitude);

  std::vector<SweepCell> cells;
  for (double lam : lambdas)
    for (double eta : etas)
      for (double p : ps)
        for (double amp : amps) {
          SweepCell c;
          c.lambda = lam;
          c.eta = eta;
          c.p = p;
          c.amplitude = amp;
          cells.push_back(c);
        }

  const int workers = resolve_workers(worker_count, cells.size());
  std::atomic<std::size_t> next{0};
  auto run_cell = [&](std::size_t idx) {
    SweepCell& cell = cells[idx];
    Scenario sc = cfg.base;
    char label[32];
    std::snprintf(label, sizeof(label), "cell_%03zu", idx);
    sc.name = label;
    sc.lambda = cell.lambda;
    sc.eta = cell.eta;
    sc.p = cell.p;
    sc.datum.amplitude = cell.amplitude;
    sc.output.snapshot_stride = 0;
    const RunResult res = run_scenario(sc);
    if (res.error) {
      cell.outcome = "error";
      cell.error_message = res.error_message;
    } else {
      cell.outcome = res.outcome == Outcome::suspected_blowup ? "suspected_blowup" : "bounded";
    }
    for (const auto& r : res.records) cell.max_grad_norm = std::max(cell.max_grad_norm, r.grad_norm);
    cell.final_energy_drift =
        res.records.empty()
            ? 0.0
            : std::abs(res.records.back().total_energy - res.records.front().total_energy) /
                  std::max(1.0, std::abs(res.records.front().total_energy));
    if (cells_dir != nullptr) {
      const std::string dir = *cells_dir + "/" + label;
      fs::create_directories(dir);
      write_text_file(dir + "/observables.csv", observables_to_csv(res.records));
      write_text_file(dir + "/summary.json", run_summary_json(sc, res).dump(2) + "\n");
    }
  };

  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (std::size_t idx = next.fetch_add(1); idx < cells.size(); idx = next.fetch_add(1))
          run_cell(idx);
      });
    for (auto& th : pool) th.join();
  }
  return cells;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

std::string scenario_to_json_text(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

SweepConfig sweep_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return sweep_from_json(j);
}

std::string sweep_to_json_text(const SweepConfig& config) {
  return sweep_to_json(config).dump(2) + "\n";
}

Field make_datum(GridPtr grid, const DatumSpec& datum) {
  if (!grid) throw std::invalid_argument("make_datum: null grid");
  if (!(datum.width > 0.0)) throw std::invalid_argument("make_datum: width must be positive");
  if (!std::isfinite(datum.amplitude))
    throw std::invalid_argument("make_datum: amplitude must be finite");
  const Grid& g = *grid;
  const double w2 = datum.width * datum.width;
  const double sqrt_pi = std::sqrt(std::numbers::pi);

  auto value_1d = [&](double x) -> std::complex<double> {
    switch (datum.kind) {
      case DatumKind::gaussian: {
        const double dx = x - datum.center;
        return datum.amplitude * std::exp(-dx * dx / (2.0 * w2));
      }
      case DatumKind::double_bump: {
        // Two half-mass bumps at center +/- separation/2 (before amplitude scaling).
        const double a = 1.0 / std::sqrt(2.0 * datum.width * sqrt_pi);
        const double dl = x - (datum.center - 0.5 * datum.separation);
        const double dr = x - (datum.center + 0.5 * datum.separation);
        return datum.amplitude * a *
               (std::exp(-dl * dl / (2.0 * w2)) + std::exp(-dr * dr / (2.0 * w2)));
      }
      case DatumKind::plane_modulated: {
        const double dx = x - datum.center;
        const double env = std::exp(-dx * dx / (2.0 * w2));
        return datum.amplitude * env *
               std::complex<double>(std::cos(datum.k0 * x), std::sin(datum.k0 * x));
      }
    }
    return 0.0;
  };
  auto value_2d = [&](double x, double y) -> std::complex<double> {
    switch (datum.kind) {
      case DatumKind::gaussian: {
        const double dx = x - datum.center;
        return datum.amplitude * std::exp(-(dx * dx + y * y) / (2.0 * w2));
      }
      case DatumKind::double_bump: {
        const double a = 1.0 / std::sqrt(2.0 * std::numbers::pi * w2);
        const double dl = x - (datum.center - 0.5 * datum.separation);
        const double dr = x - (datum.center + 0.5 * datum.separation);
        return datum.amplitude * a *
               (std::exp(-(dl * dl + y * y) / (2.0 * w2)) +
                std::exp(-(dr * dr + y * y) / (2.0 * w2)));
      }
      case DatumKind::plane_modulated: {
        const double dx = x - datum.center;
        const double env = std::exp(-(dx * dx + y * y) / (2.0 * w2));
        return datum.amplitude * env *
               std::complex<double>(std::cos(datum.k0 * x), std::sin(datum.k0 * x));
      }
    }
    return 0.0;
  };

  Field u(grid);
  double boundary_max = 0.0;
  if (g.dimension == 1) {
    for (int i = 0; i < g.points_per_axis; ++i) {
      u.values[i] = value_1d(g.coordinates[i]);
      if (i == 0 || i == g.points_per_axis - 1)
        boundary_max = std::max(boundary_max, std::abs(u.values[i]));
    }
  } else {
    for (int i = 0; i < g.points_per_axis; ++i) {
      for (int j = 0; j < g.points_per_axis; ++j) {
        const std::complex<double> v = value_2d(g.coordinates[i], g.coordinates[j]);
        u.values[g.index(i, j)] = v;
        if (i == 0 || j == 0 || i == g.points_per_axis - 1 || j == g.points_per_axis - 1)
          boundary_max = std::max(boundary_max, std::abs(v));
      }
    }
  }
  if (!(boundary_max < 1e-10))
    throw std::invalid_argument(
        "make_datum: initial datum does not decay at the domain boundary (|u0| >= 1e-10); "
        "enlarge half_width or shrink the datum");
  return u;
}

bool RunResult::checks_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

int RunResult::exit_code() const {
  if (error) return 1;
  if (outcome == Outcome::suspected_blowup) return 2;
  return checks_passed() ? 0 : 1;
}

RunResult run_scenario(const Scenario& scenario) { return run_scenario_impl(scenario, nullptr); }

int run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir,
                        RunResult* result_out) {
  fs::create_directories(out_dir);
  SnapshotSink sink;
  std::size_t record_index = 0;
  if (scenario.output.snapshot_stride > 0) {
    sink = [&](const Field& u, double t) {
      if (record_index % static_cast<std::size_t>(scenario.output.snapshot_stride) == 0)
        write_field_snapshot(out_dir + "/" + snapshot_name(t), u, t);
      ++record_index;
    };
  }
  const RunResult res = run_scenario_impl(scenario, sink ? &sink : nullptr);
  if (scenario.output.snapshot_stride > 0 && !res.error && !res.records.empty())
    write_field_snapshot(out_dir + "/" + snapshot_name(res.records.back().t), res.final_state,
                         res.records.back().t);
  write_text_file(out_dir + "/observables.csv", observables_to_csv(res.records));
  write_text_file(out_dir + "/summary.json", run_summary_json(scenario, res).dump(2) + "\n");
  write_text_file(out_dir + "/plot.py", kRunPlotScript);
  if (res.error) std::fprintf(stderr, "error: %s\n", res.error_message.c_str());
  const int code = res.exit_code();
  if (result_out) *result_out = std::move(res);
  return code;
}

std::vector<SweepCell> run_sweep(const SweepConfig& config, int worker_count) {
  return sweep_impl(config, worker_count, nullptr);
}

int run_sweep_to_dir(const SweepConfig& config, const std::string& out_dir, int worker_count,
                     std::vector<SweepCell>* cells_out) {
  fs::create_directories(out_dir);
  const std::string cells_dir = out_dir + "/cells";
  fs::create_directories(cells_dir);
  const auto t_start = std::chrono::steady_clock::now();
  const std::vector<SweepCell> cells = sweep_impl(config, worker_count, &cells_dir);
  write_text_file(out_dir + "/phase.csv", phase_table_to_csv(cells));
  write_text_file(out_dir + "/plot_phase.py", kPhasePlotScript);
  json s;
  s["name"] = config.name;
  s["schema_version"] = 1;
  s["cells"] = cells.size();
  int errors = 0, flagged = 0;
  for (const auto& c : cells) {
    if (c.outcome == "error") ++errors;
    if (c.outcome == "suspected_blowup") ++flagged;
  }
  s["errors"] = errors;
  s["suspected_blowup_cells"] = flagged;
  s["config"] = sweep_to_json(config);
  s["timing"] = {{"elapsed_seconds",
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()}};
  write_text_file(out_dir + "/summary.json", s.dump(2) + "\n");
  if (cells_out) *cells_out = cells;
  return errors == 0 ? 0 : 1;
}

std::string observables_to_csv(const std::vector<ObservableRecord>& records) {
  std::string out =
      "t,mass,kinetic,hartree,power,total_energy,log_moment,h12_moment,sigma_moment,grad_norm\n";
  for (const auto& r : records) {
    out += fmt_g17(r.t);
    out += ',';
    out += fmt_g17(r.mass);
    out += ',';
    out += fmt_g17(r.kinetic);
    out += ',';
    out += fmt_g17(r.hartree);
    out += ',';
    out += fmt_g17(r.power);
    out += ',';
    out += fmt_g17(r.total_energy);
    out += ',';
    out += fmt_g17(r.log_moment);
    out += ',';
    out += fmt_g17(r.h12_moment);
    out += ',';
    out += fmt_csv_cell(r.sigma_moment);
    out += ',';
    out += fmt_g17(r.grad_norm);
    out += '\n';
  }
  return out;
}

std::string phase_table_to_csv(const std::vector<SweepCell>& cells) {
  std::string out = "lambda,eta,p,amplitude,outcome,max_grad_norm,final_energy_drift\n";
  for (const auto& c : cells) {
    out += fmt_g17(c.lambda);
    out += ',';
    out += fmt_g17(c.eta);
    out += ',';
    out += fmt_g17(c.p);
    out += ',';
    out += fmt_g17(c.amplitude);
    out += ',';
    out += c.outcome;
    out += ',';
    out += fmt_g17(c.max_grad_norm);
    out += ',';
    out += fmt_g17(c.final_energy_drift);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

namespace {
constexpr char kSnapshotMagic[8] = {'S', 'P', 'S', 'I', 'M', 'F', '0', '1'};
}

void write_field_snapshot(const std::string& path, const Field& u, double t) {
  u.check_valid();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    const std::uint32_t dim = static_cast<std::uint32_t>(u.grid->dimension);
    const std::uint32_t n = static_cast<std::uint32_t>(u.grid->points_per_axis);
    const double half_width = u.grid->half_width;
    f.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    f.write(reinterpret_cast<const char*>(&n), sizeof(n));
    f.write(reinterpret_cast<const char*>(&half_width), sizeof(half_width));
    f.write(reinterpret_cast<const char*>(&t), sizeof(t));
    f.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(std::complex<double>)));
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

Field read_field_snapshot(const std::string& path, double* t_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a field snapshot: " + path);
  std::uint32_t dim = 0, n = 0;
  double half_width = 0.0, t = 0.0;
  f.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  f.read(reinterpret_cast<char*>(&half_width), sizeof(half_width));
  f.read(reinterpret_cast<char*>(&t), sizeof(t));
  if (!f) throw std::runtime_error("truncated field snapshot: " + path);
  GridPtr grid = make_grid(static_cast<int>(dim), half_width, static_cast<int>(n));
  Field u(grid);
  f.read(reinterpret_cast<char*>(u.values.data()),
         static_cast<std::streamsize>(u.values.size() * sizeof(std::complex<double>)));
  if (!f) throw std::runtime_error("truncated field snapshot: " + path);
  if (t_out) *t_out = t;
  return u;
}

std::vector<Scenario> builtin_presets() {
  std::vector<Scenario> out;

  Scenario sc;  // 2D defocusing Hartree-only run: the conservation workhorse
  sc.name = "defocusing-2d";
  sc.lambda = -1.0;
  sc.eta = 0.0;
  sc.p = 2.0;
  sc.grid = {2, 16.0, 256};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 1.0, 4.0, 1.0};
  sc.sim = {1e-3, 5.0, 10, 40.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth", "apriori", "concentration"};
  out.push_back(sc);

  sc = Scenario();  // free evolution, matches the analytic spreading Gaussian
  sc.name = "free-2d";
  sc.lambda = 0.0;
  sc.eta = 0.0;
  sc.p = 2.0;
  sc.grid = {2, 16.0, 256};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 1.0, 4.0, 1.0};
  sc.sim = {1e-3, 0.1, 10, 40.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth"};
  out.push_back(sc);

  sc = Scenario();  // 2D focusing-Hartree side (lambda > 0), moderate datum
  sc.name = "gauge-2d";
  sc.lambda = 1.0;
  sc.eta = 0.0;
  sc.p = 2.0;
  sc.grid = {2, 12.0, 128};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 0.5, 4.0, 1.0};
  sc.sim = {1e-3, 0.5, 10, 40.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth", "apriori"};
  out.push_back(sc);

  sc = Scenario();  // 1D confining run
  sc.name = "defocusing-1d";
  sc.lambda = -1.0;
  sc.eta = 0.0;
  sc.p = 2.0;
  sc.grid = {1, 16.0, 1024};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 1.0, 4.0, 1.0};
  sc.sim = {2e-4, 1.0, 50, 80.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth", "apriori"};
  out.push_back(sc);

  sc = Scenario();  // 1D subcritical focusing power, small datum: stays bounded
  sc.name = "focusing-1d-small";
  sc.lambda = 1.0;
  sc.eta = -1.0;
  sc.p = 4.0;
  sc.grid = {1, 16.0, 1024};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 0.5, 4.0, 1.0};
  sc.sim = {2e-4, 1.0, 50, 80.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth", "apriori"};
  out.push_back(sc);

  sc = Scenario();  // supercritical focusing power with a large datum: expected to blow up
  sc.name = "focusing-1d-supercritical-large";
  sc.lambda = 0.0;
  sc.eta = -1.0;
  sc.p = 6.0;
  sc.grid = {1, 16.0, 2048};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 3.0, 4.0, 1.0};
  sc.sim = {1e-4, 1.0, 10, 225.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "growth"};
  out.push_back(sc);

  sc = Scenario();  // short 1D run with every term active; Picard cross-check target
  sc.name = "smoke-1d";
  sc.lambda = -1.0;
  sc.eta = -1.0;
  sc.p = 3.0;
  sc.grid = {1, 16.0, 1024};
  sc.datum = {DatumKind::gaussian, 0.0, 1.0, 1.0, 4.0, 1.0};
  sc.sim = {1e-3, 0.05, 5, 80.0, IntegratorKind::strang, 4};
  sc.checks = {"mass", "energy", "growth"};
  out.push_back(sc);

  return out;
}

std::vector<SweepConfig> builtin_sweeps() {
  std::vector<SweepConfig> out;

  SweepConfig cfg;
  cfg.name = "sweep-1d";
  cfg.base = Scenario();
  cfg.base.name = "sweep-1d-base";
  cfg.base.lambda = 0.0;
  cfg.base.eta = -1.0;
  cfg.base.p = 5.0;
  cfg.base.grid = {1, 16.0, 2048};
  cfg.base.datum = {DatumKind::gaussian, 0.0, 1.0, 0.1, 4.0, 1.0};
  cfg.base.sim = {1e-4, 1.0, 10, 225.0, IntegratorKind::strang, 4};
  cfg.base.checks = {};
  cfg.lambdas = {0.0};
  cfg.etas = {1.0, -1.0};
  cfg.ps = {4.0, 5.0, 6.0};
  cfg.amplitudes = {0.1, 3.0};
  out.push_back(cfg);

  cfg = SweepConfig();
  cfg.name = "sweep-2d";
  cfg.base = Scenario();
  cfg.base.name = "sweep-2d-base";
  cfg.base.lambda = -1.0;
  cfg.base.eta = 1.0;
  cfg.base.p = 2.0;
  cfg.base.grid = {2, 12.0, 128};
  cfg.base.datum = {DatumKind::gaussian, 0.0, 1.0, 0.5, 4.0, 1.0};
  cfg.base.sim = {1e-3, 2.0, 20, 40.0, IntegratorKind::strang, 4};
  cfg.base.checks = {};
  cfg.lambdas = {-1.0, 1.0};
  cfg.etas = {1.0, -1.0};
  cfg.ps = {2.0, 2.5, 3.0};
  cfg.amplitudes = {0.5};
  out.push_back(cfg);

  return out;
}

}  // namespace spsim
