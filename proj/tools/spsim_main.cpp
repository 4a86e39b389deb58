#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "spsim/kernels.hpp"
#include "spsim/scenario.hpp"

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<spsim::Scenario> find_preset(const std::string& name) {
  for (const auto& sc : spsim::builtin_presets())
    if (sc.name == name) return sc;
  return std::nullopt;
}

std::optional<spsim::SweepConfig> find_sweep_preset(const std::string& name) {
  for (const auto& cfg : spsim::builtin_sweeps())
    if (cfg.name == name) return cfg;
  return std::nullopt;
}

int cmd_run(const std::string& config, const std::string& out_override) {
  spsim::Scenario sc;
  try {
    if (auto preset = find_preset(config)) {
      sc = *preset;
    } else if (auto text = read_file(config)) {
      sc = spsim::scenario_from_json_text(*text);
    } else {
      std::fprintf(stderr, "error: '%s' is neither a preset name nor a readable config file\n",
                   config.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const std::string out_dir = out_override.empty() ? sc.name : out_override;
  spsim::RunResult res;
  const int code = spsim::run_scenario_to_dir(sc, out_dir, &res);
  std::printf("scenario %s: %s\n", sc.name.c_str(),
              res.error ? "error"
                        : (res.outcome == spsim::Outcome::suspected_blowup ? "suspected_blowup"
                                                                           : "bounded"));
  for (const auto& c : res.checks)
    std::printf("  check %-13s %s  (%.3g; %s)\n", (c.name + ":").c_str(),
                c.passed ? "pass" : "FAIL", c.value, c.detail.c_str());
  std::printf("artifacts: %s\n", out_dir.c_str());
  std::fprintf(stderr, "elapsed: %.2fs\n", res.elapsed_seconds);
  return code;
}

int cmd_sweep(const std::string& config, const std::string& out_override, int workers) {
  spsim::SweepConfig cfg;
  try {
    if (auto preset = find_sweep_preset(config)) {
      cfg = *preset;
    } else if (auto text = read_file(config)) {
      cfg = spsim::sweep_from_json_text(*text);
    } else {
      std::fprintf(stderr, "error: '%s' is neither a sweep preset nor a readable config file\n",
                   config.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const std::string out_dir = out_override.empty() ? cfg.name : out_override;
  std::vector<spsim::SweepCell> cells;
  const int code = spsim::run_sweep_to_dir(cfg, out_dir, workers, &cells);
  std::printf("%-8s %-8s %-6s %-9s %s\n", "lambda", "eta", "p", "amplitude", "outcome");
  for (const auto& c : cells)
    std::printf("%-8g %-8g %-6g %-9g %s\n", c.lambda, c.eta, c.p, c.amplitude, c.outcome.c_str());
  std::printf("artifacts: %s\n", out_dir.c_str());
  return code;
}

int cmd_verify_kernels(double eta, double p) {
  try {
    const spsim::KernelBoundReport report = spsim::check_k_bound(eta, p);
    const double one_d_sup = spsim::check_1d_bound();
    const bool one_d_ok = one_d_sup <= 1.0 + 1e-12;
    const bool ok = report.far_bound_ok() && std::isfinite(report.Lp_norm_near) && one_d_ok;
    std::printf(
        "{\n  \"k_bound\": %s,\n  \"one_d_sup\": %.17g,\n  \"one_d_bound_ok\": %s,\n"
        "  \"bounds_hold\": %s\n}\n",
        report.to_json().c_str(), one_d_sup, one_d_ok ? "true" : "false", ok ? "true" : "false");
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_presets_list() {
  std::printf("scenarios:\n");
  for (const auto& sc : spsim::builtin_presets()) std::printf("  %s\n", sc.name.c_str());
  std::printf("sweeps:\n");
  for (const auto& cfg : spsim::builtin_sweeps()) std::printf("  %s\n", cfg.name.c_str());
  return 0;
}

int cmd_presets_show(const std::string& name) {
  if (auto preset = find_preset(name)) {
    std::fputs(spsim::scenario_to_json_text(*preset).c_str(), stdout);
    return 0;
  }
  if (auto sweep = find_sweep_preset(name)) {
    std::fputs(spsim::sweep_to_json_text(*sweep).c_str(), stdout);
    return 0;
  }
  std::fprintf(stderr, "error: unknown preset '%s'\n", name.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-step simulator for Schrodinger-Poisson systems with unbounded kernels"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  CLI::App* run = app.add_subcommand("run", "Run one scenario (preset name or JSON config path)");
  run->add_option("config", run_config, "Preset name or config file")->required();
  run->add_option("--out", run_out, "Output directory (default: scenario name)");

  std::string sweep_config, sweep_out;
  int sweep_workers = 0;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a parameter sweep (preset name or JSON config path)");
  sweep->add_option("config", sweep_config, "Sweep preset name or config file")->required();
  sweep->add_option("--out", sweep_out, "Output directory (default: sweep name)");
  sweep->add_option("--workers", sweep_workers,
                    "Worker threads (default: SPSIM_WORKERS or hardware concurrency)");

  double vk_eta = 1.0, vk_p = 2.0;
  CLI::App* verify =
      app.add_subcommand("verify-kernels", "Check the remainder-kernel bounds by sampling");
  verify->add_option("--eta", vk_eta, "Far/near split radius (0 < eta <= 1)");
  verify->add_option("--p", vk_p, "Near-region Lp exponent (p >= 1)");

  CLI::App* presets = app.add_subcommand("presets", "Built-in configurations");
  presets->require_subcommand(1);
  CLI::App* presets_list = presets->add_subcommand("list", "List preset names");
  std::string show_name;
  CLI::App* presets_show = presets->add_subcommand("show", "Print a preset's JSON config");
  presets_show->add_option("name", show_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_config, run_out);
  if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_workers);
  if (verify->parsed()) return cmd_verify_kernels(vk_eta, vk_p);
  if (presets->parsed()) {
    if (presets_list->parsed()) return cmd_presets_list();
    if (presets_show->parsed()) return cmd_presets_show(show_name);
  }
  return 1;
}
