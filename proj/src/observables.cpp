#include "spsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spsim/kernels.hpp"

namespace spsim {

namespace {

std::vector<double> density(const Field& u) {
  std::vector<double> rho(u.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(u.values[i]);
  return rho;
}

double lp_power_integral(const Field& u, double p) {
  // h^d sum |u|^{p+1}
  const double expo = 0.5 * (p + 1.0);
  double acc = 0.0;
  for (const auto& v : u.values) acc += std::pow(std::norm(v), expo);
  return acc * u.grid->cell_volume();
}

}  // namespace

std::vector<double> log_bracket_weights(const Grid& grid) {
  std::vector<double> w(grid.size());
  if (grid.dimension == 1) {
    for (int i = 0; i < grid.points_per_axis; ++i)
      w[i] = log_bracket_1d(grid.coordinates[i]);
  } else {
    const int n = grid.points_per_axis;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w[grid.index(i, j)] = log_bracket_2d(grid.coordinates[i], grid.coordinates[j]);
  }
  return w;
}

std::vector<double> log_bracket_sq_weights(const Grid& grid) {
  std::vector<double> w = log_bracket_weights(grid);
  for (auto& x : w) x *= x;
  return w;
}

std::vector<double> abs_weights(const Grid& grid) {
  if (grid.dimension != 1) throw std::invalid_argument("abs_weights: 1D grids only");
  std::vector<double> w(grid.size());
  for (int i = 0; i < grid.points_per_axis; ++i) w[i] = std::abs(grid.coordinates[i]);
  return w;
}

std::vector<double> abs_sq_weights(const Grid& grid) {
  std::vector<double> w = abs_weights(grid);
  for (auto& x : w) x *= x;
  return w;
}

std::vector<double> gauge_log_weight(const Grid& grid) {
  if (grid.dimension != 2) throw std::invalid_argument("gauge_log_weight: 2D grids only");
  const int n = grid.points_per_axis;
  std::vector<double> w(grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = grid.coordinates[i];
      const double y = grid.coordinates[j];
      const double r2 = x * x + y * y;
      w[grid.index(i, j)] = (r2 == 0.0)
                                ? ConvolutionEngine::diagonal_cell_average(2, grid.spacing)
                                : 0.5 * std::log(r2);
    }
  }
  return w;
}

EnergyBreakdown energy_breakdown(const Field& u, const ModelParams& params,
                                 const ConvolutionEngine* engine) {
  u.check_valid();
  if (u.grid->dimension != params.dimension)
    throw std::invalid_argument("energy_breakdown: dimension mismatch");
  EnergyBreakdown out;
  out.kinetic = 0.5 * grad_norm_squared(u);
  if (params.lambda != 0.0) {
    if (engine == nullptr)
      throw std::invalid_argument("energy_breakdown: convolution engine required when lambda != 0");
    const std::vector<double> rho = density(u);
    const std::vector<double> conv = engine->convolve(rho);
    double quad = 0.0;  // h^d sum (K * rho) rho
    for (std::size_t i = 0; i < rho.size(); ++i) quad += conv[i] * rho[i];
    quad *= u.grid->cell_volume();
    const double coeff = (params.dimension == 2) ? -params.lambda / (4.0 * std::numbers::pi)
                                                 : -params.lambda / 4.0;
    out.hartree = coeff * quad;
  }
  if (params.eta != 0.0)
    out.power = 2.0 * params.eta / (params.p + 1.0) * lp_power_integral(u, params.p);
  return out;
}

double energy_2d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine) {
  if (params.dimension != 2) throw std::invalid_argument("energy_2d: params must be 2D");
  const EnergyBreakdown b = energy_breakdown(u, params, engine);
  return b.kinetic + b.hartree;
}

double energy_p_2d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine) {
  if (params.dimension != 2) throw std::invalid_argument("energy_p_2d: params must be 2D");
  return energy_breakdown(u, params, engine).total();
}

double energy_1d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine) {
  if (params.dimension != 1) throw std::invalid_argument("energy_1d: params must be 1D");
  return energy_breakdown(u, params, engine).total();
}

ObservableRecord record_observables(double t, const Field& u, const ModelParams& params,
                                    const ConvolutionEngine* engine) {
  ObservableRecord rec;
  rec.t = t;
  rec.mass = l2_norm_squared(u);
  const EnergyBreakdown b = energy_breakdown(u, params, engine);
  rec.kinetic = b.kinetic;
  rec.hartree = b.hartree;
  rec.power = b.power;
  rec.total_energy = b.total();
  rec.log_moment = weighted_l2(u, log_bracket_weights(*u.grid));
  rec.h12_moment = weighted_l2(u, log_bracket_sq_weights(*u.grid));
  if (u.grid->dimension == 1) {
    rec.sigma_moment = weighted_l2(u, abs_weights(*u.grid));
    rec.sigma2_moment = weighted_l2(u, abs_sq_weights(*u.grid));
  } else {
    rec.sigma_moment = std::numeric_limits<double>::quiet_NaN();
    rec.sigma2_moment = std::numeric_limits<double>::quiet_NaN();
  }
  rec.grad_norm = std::sqrt(2.0 * rec.kinetic);
  return rec;
}

Outcome blow_up_monitor(const std::vector<ObservableRecord>& records, double threshold) {
  if (records.empty()) throw std::invalid_argument("blow_up_monitor: no records");
  if (!(threshold > 0.0)) throw std::invalid_argument("blow_up_monitor: threshold must be positive");
  for (std::size_t i = 1; i < records.size(); ++i)
    if (!(records[i].t > records[i - 1].t))
      throw std::invalid_argument("blow_up_monitor: time stamps must increase");
  for (const auto& rec : records) {
    if (!std::isfinite(rec.grad_norm) || rec.grad_norm > threshold)
      return Outcome::suspected_blowup;
  }
  return Outcome::bounded;
}

double log_moment_growth_check(const std::vector<ObservableRecord>& records, double grad_sup) {
  if (records.size() < 2)
    throw std::invalid_argument("log_moment_growth_check: need at least two records");
  const double rate = grad_sup * std::sqrt(records.front().mass);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const double slack = records[i].log_moment - records[j].log_moment +
                           rate * (records[j].t - records[i].t);
      worst = std::min(worst, slack);
    }
  }
  return worst;
}

AprioriBoundReport apriori_bound_check(const std::vector<ObservableRecord>& records,
                                       const ModelParams& params, double E0,
                                       double blowup_threshold) {
  if (records.empty()) throw std::invalid_argument("apriori_bound_check: no records");
  if (params.lambda == 0.0)
    throw std::invalid_argument("apriori_bound_check: lambda must be nonzero");
  AprioriBoundReport rep;
  for (const auto& rec : records) rep.sup_grad = std::max(rep.sup_grad, rec.grad_norm);
  if (params.lambda < 0.0) {
    // Confining case: fit the smallest C with g^2 <= 2 E0 + C g along the run.
    double c = 0.0;
    for (const auto& rec : records) {
      const double g = rec.grad_norm;
      if (g > 0.0) c = std::max(c, (g * g - 2.0 * E0) / g);
    }
    rep.fitted_C = c;
    const double disc = c * c + 8.0 * E0;
    rep.bound_root = (disc >= 0.0) ? 0.5 * (c + std::sqrt(disc)) : 0.0;
    rep.satisfied = rep.sup_grad <= rep.bound_root * (1.0 + 1e-12) + 1e-12;
  } else {
    rep.satisfied = std::isfinite(rep.sup_grad) && rep.sup_grad < blowup_threshold;
  }
  return rep;
}

ConcentrationReport concentration_check(const Field& u) {
  u.check_valid();
  if (u.grid->dimension != 2)
    throw std::invalid_argument("concentration_check: 2D fields only");
  ConcentrationReport rep;
  const Grid& g = *u.grid;
  const double mass = l2_norm_squared(u);
  const double log_moment = weighted_l2(u, log_bracket_weights(g));
  rep.r = std::sqrt(log_moment);
  if (!(rep.r >= g.spacing)) return rep;  // radius unresolved: inconclusive

  const double r2 = rep.r * rep.r;
  double restricted_sq = 0.0;
  double l4_quartic = 0.0;
  for (int i = 0; i < g.points_per_axis; ++i) {
    const double x = g.coordinates[i];
    for (int j = 0; j < g.points_per_axis; ++j) {
      const double y = g.coordinates[j];
      const double rho = std::norm(u.values[g.index(i, j)]);
      if (x * x + y * y < r2) restricted_sq += rho;
      l4_quartic += rho * rho;
    }
  }
  const double h2 = g.cell_volume();
  restricted_sq *= h2;
  l4_quartic *= h2;
  rep.restricted_norm = std::sqrt(restricted_sq);

  const double grad = std::sqrt(grad_norm_squared(u));
  const double l2 = std::sqrt(mass);
  if (grad == 0.0 || l2 == 0.0) return rep;
  rep.measured_gn_constant = std::sqrt(l4_quartic) / (l2 * grad);
  rep.upper_bound = std::pow(std::numbers::pi * r2, 0.25) *
                    std::sqrt(rep.measured_gn_constant * l2 * grad);
  const double logbr = log_bracket_1d(rep.r);
  rep.lower_bound = l2 - std::sqrt(log_moment / logbr);

  rep.conclusive = true;
  rep.upper_ok = rep.restricted_norm <= rep.upper_bound * (1.0 + 1e-12);
  rep.lower_ok = rep.restricted_norm >= rep.lower_bound - 1e-12;
  return rep;
}

}  // namespace spsim
