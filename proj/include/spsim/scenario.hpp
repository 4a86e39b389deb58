#pragma once

#include <string>
#include <vector>

#include "spsim/dynamics.hpp"
#include "spsim/observables.hpp"

namespace spsim {

enum class DatumKind { gaussian, double_bump, plane_modulated };

// Initial datum descriptor. amplitude scales every kind (double_bump and
// plane_modulated profiles are mass-normalized / unit-envelope before
// scaling); center shifts along the x axis; separation is the bump distance;
// k0 the modulation wavenumber.
struct DatumSpec {
  DatumKind kind = DatumKind::gaussian;
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
  double separation = 4.0;
  double k0 = 1.0;
};

struct GridSpec {
  int dimension = 2;
  double half_width = 16.0;
  int points_per_axis = 256;
};

struct OutputSpec {
  // > 0: write a field snapshot every snapshot_stride-th observable record
  // (plus the final state); 0 disables snapshots.
  int snapshot_stride = 0;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  double lambda = 0.0;
  double eta = 0.0;
  double p = 2.0;
  GridSpec grid;
  DatumSpec datum;
  SimConfig sim;
  std::vector<std::string> checks;  // subset of {mass, energy, growth, apriori, concentration}
  OutputSpec output;
};

struct SweepConfig {
  int schema_version = 1;
  std::string name;
  Scenario base;
  // Empty axis = keep the base value (empty everywhere degenerates to one
  // baseline run). Cells iterate lambda, eta, p, amplitude, outermost first.
  std::vector<double> lambdas;
  std::vector<double> etas;
  std::vector<double> ps;
  std::vector<double> amplitudes;
};

// JSON text <-> config structs. Parsing validates field types and ranges and
// throws std::invalid_argument with a description on malformed input.
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& scenario);
SweepConfig sweep_from_json_text(const std::string& text);
std::string sweep_to_json_text(const SweepConfig& config);

// Built-in configurations (also reachable by name from the CLI).
std::vector<Scenario> builtin_presets();
std::vector<SweepConfig> builtin_sweeps();

// Samples the datum on the grid and enforces the boundary-decay rule
// (|u0| < 1e-10 on the outermost grid frame).
Field make_datum(GridPtr grid, const DatumSpec& datum);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // the check's headline number (drift, slack, ...)
  std::string detail;
};

struct RunResult {
  Outcome outcome = Outcome::bounded;
  bool error = false;
  std::string error_message;
  std::vector<ObservableRecord> records;
  Field final_state;
  std::vector<CheckResult> checks;
  std::vector<double> gauge_times;    // 2D, lambda != 0: log|x| moment series
  std::vector<double> gauge_moments;
  std::vector<double> picard_distances;  // picard integrator only
  double elapsed_seconds = 0.0;

  bool checks_passed() const;
  int exit_code() const;  // 1 error/check failure, 2 suspected blow-up, 0 otherwise
};

RunResult run_scenario(const Scenario& scenario);

// Runs and writes <out_dir>/observables.csv, summary.json, plot.py and
// optional field_<t>.bin snapshots; returns the exit code.
int run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir,
                        RunResult* result_out = nullptr);

struct SweepCell {
  double lambda = 0.0;
  double eta = 0.0;
  double p = 2.0;
  double amplitude = 1.0;
  std::string outcome;  // bounded | suspected_blowup | error
  double max_grad_norm = 0.0;
  double final_energy_drift = 0.0;
  std::string error_message;
};

// worker_count <= 0: use SPSIM_WORKERS, else hardware concurrency.
std::vector<SweepCell> run_sweep(const SweepConfig& config, int worker_count = 0);
int run_sweep_to_dir(const SweepConfig& config, const std::string& out_dir, int worker_count = 0,
                     std::vector<SweepCell>* cells_out = nullptr);

// Observable CSV serialization (columns pinned; NaN serialized as an empty
// cell). write_* functions write atomically (temp file + rename).
std::string observables_to_csv(const std::vector<ObservableRecord>& records);
std::string phase_table_to_csv(const std::vector<SweepCell>& cells);
void write_text_file(const std::string& path, const std::string& content);

// Field snapshot binary format: magic "SPSIMF01", u32 dimension, u32
// points_per_axis, f64 half_width, f64 time, then row-major interleaved
// re/im f64 pairs, all little-endian.
void write_field_snapshot(const std::string& path, const Field& u, double t);
Field read_field_snapshot(const std::string& path, double* t_out = nullptr);

}  // namespace spsim
