#include "spsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spsim/fft.hpp"
#include "spsim/observables.hpp"

namespace spsim {

namespace {

using cplx = std::complex<double>;

bool same_grid(const Grid& a, const Grid& b) {
  return a.dimension == b.dimension && a.points_per_axis == b.points_per_axis &&
         a.half_width == b.half_width;
}

void check_engine(const Field& u, const ModelParams& params, const ConvolutionEngine* engine) {
  if (u.grid->dimension != params.dimension)
    throw std::invalid_argument("dynamics: field/params dimension mismatch");
  if (params.lambda != 0.0) {
    if (engine == nullptr)
      throw std::invalid_argument("dynamics: convolution engine required when lambda != 0");
    if (!same_grid(*engine->grid(), *u.grid))
      throw std::invalid_argument("dynamics: engine grid does not match field grid");
  }
}

// exp(-i dt |k|^2 / 2) / N^d, the full kinetic sweep for one unnormalized
// forward+backward transform pair.
std::vector<cplx> kinetic_sweep(const Grid& grid, double dt) {
  const int n = grid.points_per_axis;
  const double norm = 1.0 / static_cast<double>(grid.size());
  std::vector<cplx> factor(grid.size());
  if (grid.dimension == 1) {
    for (int i = 0; i < n; ++i) {
      const double k = grid.wavenumbers[i];
      const double a = 0.5 * dt * k * k;
      factor[i] = cplx(std::cos(a), -std::sin(a)) * norm;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double kx2 = grid.wavenumbers[i] * grid.wavenumbers[i];
      for (int j = 0; j < n; ++j) {
        const double ky = grid.wavenumbers[j];
        const double a = 0.5 * dt * (kx2 + ky * ky);
        factor[grid.index(i, j)] = cplx(std::cos(a), -std::sin(a)) * norm;
      }
    }
  }
  return factor;
}

void multiply_phase(std::vector<cplx>& values, const std::vector<double>& phi, double tau) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = tau * phi[i];
    values[i] *= cplx(std::cos(a), -std::sin(a));
  }
}

void add_power_term(std::vector<double>& phi, const Field& u, const ModelParams& params) {
  if (params.eta == 0.0) return;
  const double expo = 0.5 * (params.p - 1.0);
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] += params.eta * std::pow(std::norm(u.values[i]), expo);
}

double hartree_coefficient(int dimension, double lambda) {
  return dimension == 2 ? -lambda / (2.0 * std::numbers::pi) : -lambda / 2.0;
}

std::vector<double> density_of(const Field& u) {
  std::vector<double> rho(u.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(u.values[i]);
  return rho;
}

}  // namespace

StrangIntegrator::StrangIntegrator(Field initial, const ModelParams& params,
                                   std::shared_ptr<const ConvolutionEngine> engine)
    : u_(std::move(initial)), params_(params), engine_(std::move(engine)) {
  u_.check_valid();
  check_engine(u_, params_, engine_.get());
  linear_ = linear_confining_potential(*u_.grid, params_);
  phi_.resize(u_.grid->size());
}

void StrangIntegrator::compute_phase() {
  if (params_.lambda != 0.0) {
    const PotentialSplit split = decomposed_potential(u_, params_, *engine_);
    for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] = linear_[i] + split.remainder[i];
  } else {
    std::copy(linear_.begin(), linear_.end(), phi_.begin());
  }
  add_power_term(phi_, u_, params_);
}

void StrangIntegrator::apply_phase(double tau) { multiply_phase(u_.values, phi_, tau); }

void StrangIntegrator::apply_kinetic(double dt) {
  if (kinetic_factor_.empty() || kinetic_dt_ != dt) {
    kinetic_factor_ = kinetic_sweep(*u_.grid, dt);
    kinetic_dt_ = dt;
  }
  const int n = u_.grid->points_per_axis;
  const int shape[2] = {n, n};
  fft::forward(u_.values.data(), u_.grid->dimension, shape);
  for (std::size_t i = 0; i < u_.values.size(); ++i) u_.values[i] *= kinetic_factor_[i];
  fft::backward(u_.values.data(), u_.grid->dimension, shape);
}

void StrangIntegrator::step(double dt) {
  if (dt == 0.0) throw std::invalid_argument("StrangIntegrator::step: dt must be nonzero");
  backup_ = u_.values;
  if (!phi_valid_) compute_phase();
  apply_phase(0.5 * dt);
  apply_kinetic(dt);
  compute_phase();
  apply_phase(0.5 * dt);
  if (!u_.finite()) {
    u_.values = backup_;
    phi_valid_ = false;
    throw IntegrationError("StrangIntegrator::step: non-finite state detected", t_);
  }
  // |u| was untouched after the last compute_phase, so phi_ stays valid for
  // the next step's leading half-phase.
  phi_valid_ = true;
  t_ += dt;
}

double StrangIntegrator::gauge_moment() const {
  if (u_.grid->dimension != 2)
    throw std::invalid_argument("StrangIntegrator::gauge_moment: 2D runs only");
  if (gauge_weight_.empty()) gauge_weight_ = gauge_log_weight(*u_.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < u_.values.size(); ++i)
    acc += gauge_weight_[i] * std::norm(u_.values[i]);
  return acc * u_.grid->cell_volume();
}

void StrangIntegrator::set_state(const Field& u) {
  u.check_valid();
  if (!same_grid(*u.grid, *u_.grid))
    throw std::invalid_argument("StrangIntegrator::set_state: grid mismatch");
  u_.values = u.values;
  phi_valid_ = false;
}

Field linear_propagator_step(const Field& u, double m, double dt) {
  u.check_valid();
  if (dt == 0.0) throw std::invalid_argument("linear_propagator_step: dt must be nonzero");
  ModelParams params;
  params.dimension = u.grid->dimension;
  params.m = m;
  const std::vector<double> conf = linear_confining_potential(*u.grid, params);
  Field out = u;
  multiply_phase(out.values, conf, 0.5 * dt);
  const std::vector<cplx> factor = kinetic_sweep(*u.grid, dt);
  const int n = u.grid->points_per_axis;
  const int shape[2] = {n, n};
  fft::forward(out.values.data(), u.grid->dimension, shape);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= factor[i];
  fft::backward(out.values.data(), u.grid->dimension, shape);
  multiply_phase(out.values, conf, 0.5 * dt);
  return out;
}

PicardResult picard_iterate_detailed(const Field& u0, const ModelParams& params,
                                     const ConvolutionEngine* engine, double t_short,
                                     int n_iter, int n_substeps) {
  u0.check_valid();
  check_engine(u0, params, engine);
  if (!(t_short > 0.0) || t_short > 0.1)
    throw std::invalid_argument("picard_iterate: t_short must lie in (0, 0.1]");
  if (n_iter < 1) throw std::invalid_argument("picard_iterate: n_iter must be >= 1");
  if (n_substeps < 1) throw std::invalid_argument("picard_iterate: n_substeps must be >= 1");

  const double ds = t_short / n_substeps;
  const std::size_t sz = u0.values.size();
  const double norm0 = std::sqrt(l2_norm_squared(u0));

  // N[u] = (remainder + eta |u|^{p-1}) u; the confining part lives in U.
  auto nonlinearity = [&](const Field& f) {
    std::vector<double> w(sz, 0.0);
    if (params.lambda != 0.0) {
      const PotentialSplit split = decomposed_potential(f, params, *engine);
      w = split.remainder;
    }
    add_power_term(w, f, params);
    std::vector<cplx> out(sz);
    for (std::size_t i = 0; i < sz; ++i) out[i] = w[i] * f.values[i];
    return out;
  };

  // Linear trajectory w_j = U(j ds) u0, the zeroth iterate.
  std::vector<Field> base;
  base.reserve(n_substeps + 1);
  base.push_back(u0);
  for (int j = 1; j <= n_substeps; ++j)
    base.push_back(linear_propagator_step(base.back(), params.m, ds));

  std::vector<Field> traj = base;
  PicardResult result{u0, {}};
  Field scratch(u0.grid);

  for (int k = 1; k <= n_iter; ++k) {
    std::vector<std::vector<cplx>> forces(n_substeps + 1);
    for (int j = 0; j <= n_substeps; ++j) forces[j] = nonlinearity(traj[j]);

    std::vector<Field> next;
    next.reserve(n_substeps + 1);
    next.push_back(u0);
    // Running trapezoid of U(t_j - s) N[u(s)]: propagate the partial sum with
    // every substep so each force value is applied with the correct delay.
    Field integral(u0.grid);
    double dist = 0.0;
    for (int j = 1; j <= n_substeps; ++j) {
      for (std::size_t i = 0; i < sz; ++i)
        scratch.values[i] = integral.values[i] + 0.5 * ds * forces[j - 1][i];
      integral = linear_propagator_step(scratch, params.m, ds);
      for (std::size_t i = 0; i < sz; ++i) integral.values[i] += 0.5 * ds * forces[j][i];
      Field iterate(u0.grid);
      const cplx minus_i(0.0, -1.0);
      for (std::size_t i = 0; i < sz; ++i)
        iterate.values[i] = base[j].values[i] + minus_i * integral.values[i];
      double diff = 0.0;
      for (std::size_t i = 0; i < sz; ++i) diff += std::norm(iterate.values[i] - traj[j].values[i]);
      dist = std::max(dist, std::sqrt(diff * u0.grid->cell_volume()));
      const double norm_j = std::sqrt(l2_norm_squared(iterate));
      if (!std::isfinite(norm_j) || norm_j > 10.0 * norm0)
        throw ContractionFailure("picard_iterate: iterates diverged (norm grew beyond 10x initial)");
      next.push_back(std::move(iterate));
    }
    result.iterate_distances.push_back(dist);
    traj = std::move(next);
  }
  result.final_state = traj.back();
  return result;
}

Field picard_iterate(const Field& u0, const ModelParams& params, const ConvolutionEngine* engine,
                     double t_short, int n_iter, int n_substeps) {
  return picard_iterate_detailed(u0, params, engine, t_short, n_iter, n_substeps).final_state;
}

Field gauge_transform(const Field& u, double accumulated_phase) {
  u.check_valid();
  Field v = u;
  const cplx factor(std::cos(accumulated_phase), -std::sin(accumulated_phase));
  for (auto& x : v.values) x *= factor;
  return v;
}

double phase_accumulator(const std::vector<double>& times, const std::vector<double>& gauge_moments,
                         double lambda) {
  if (times.size() != gauge_moments.size())
    throw std::invalid_argument("phase_accumulator: series length mismatch");
  if (times.empty()) throw std::invalid_argument("phase_accumulator: empty series");
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    if (!(dt > 0.0)) throw std::invalid_argument("phase_accumulator: times must increase");
    integral += 0.5 * dt * (gauge_moments[i] + gauge_moments[i - 1]);
  }
  return lambda / (2.0 * std::numbers::pi) * integral;
}

std::vector<double> effective_potential(const Field& u, const ModelParams& params,
                                        const ConvolutionEngine* engine, Formulation form) {
  u.check_valid();
  check_engine(u, params, engine);
  if (form == Formulation::SPp && u.grid->dimension != 2)
    throw std::invalid_argument("effective_potential: SPp form is 2D only");
  std::vector<double> w(u.grid->size(), 0.0);
  if (params.lambda != 0.0) {
    switch (form) {
      case Formulation::oSP: {
        const std::vector<double> conv = engine->convolve(density_of(u));
        const double coeff = hartree_coefficient(params.dimension, params.lambda);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = coeff * conv[i];
        break;
      }
      case Formulation::SP: {
        const PotentialSplit split = decomposed_potential(u, params, *engine);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = split.linear[i] + split.remainder[i];
        break;
      }
      case Formulation::SPp: {
        const std::vector<double> conv = engine->convolve(density_of(u));
        const double coeff = hartree_coefficient(params.dimension, params.lambda);
        const std::vector<double> gauge = gauge_log_weight(*u.grid);
        double moment = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) moment += gauge[i] * std::norm(u.values[i]);
        moment *= u.grid->cell_volume();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = coeff * (conv[i] - moment);
        break;
      }
    }
  }
  add_power_term(w, u, params);
  return w;
}

double pde_residual(const Field& u_prev, const Field& u_mid, const Field& u_next, double dt,
                    const ModelParams& params, const ConvolutionEngine* engine, Formulation form) {
  u_prev.check_valid();
  u_mid.check_valid();
  u_next.check_valid();
  if (!same_grid(*u_prev.grid, *u_mid.grid) || !same_grid(*u_mid.grid, *u_next.grid))
    throw std::invalid_argument("pde_residual: grids differ");
  if (!(dt > 0.0)) throw std::invalid_argument("pde_residual: dt must be positive");

  const Grid& grid = *u_mid.grid;
  const std::vector<double> w = effective_potential(u_mid, params, engine, form);

  // (1/2) Lap u_mid by spectral multiplier.
  std::vector<cplx> lap = u_mid.values;
  const int n = grid.points_per_axis;
  const int shape[2] = {n, n};
  fft::forward(lap.data(), grid.dimension, shape);
  const double norm = 1.0 / static_cast<double>(grid.size());
  if (grid.dimension == 1) {
    for (int i = 0; i < n; ++i) {
      const double k = grid.wavenumbers[i];
      lap[i] *= -0.5 * k * k * norm;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double kx2 = grid.wavenumbers[i] * grid.wavenumbers[i];
      for (int j = 0; j < n; ++j) {
        const double ky = grid.wavenumbers[j];
        lap[grid.index(i, j)] *= -0.5 * (kx2 + ky * ky) * norm;
      }
    }
  }
  fft::backward(lap.data(), grid.dimension, shape);

  const cplx iunit(0.0, 1.0);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < lap.size(); ++idx) {
    const cplx r = iunit * (u_next.values[idx] - u_prev.values[idx]) / (2.0 * dt) + lap[idx] -
                   w[idx] * u_mid.values[idx];
    acc += std::norm(r);
  }
  const double res = std::sqrt(acc * grid.cell_volume());
  const double ref = std::sqrt(l2_norm_squared(u_mid));
  if (ref == 0.0) throw std::invalid_argument("pde_residual: zero reference state");
  return res / ref;
}

}  // namespace spsim
