#include "spsim/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spsim/fft.hpp"

namespace spsim {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_displacement(int index, int padded, double h) {
  return (index <= padded / 2 ? index : index - padded) * h;
}
}  // namespace

ModelParams ModelParams::make(int dimension, double lambda, double eta, double p,
                              double initial_mass) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("ModelParams: dimension must be 1 or 2");
  if (!(p >= 1.0)) throw std::invalid_argument("ModelParams: require p >= 1");
  if (!(initial_mass >= 0.0)) throw std::invalid_argument("ModelParams: negative mass");
  ModelParams mp;
  mp.dimension = dimension;
  mp.lambda = lambda;
  mp.eta = eta;
  mp.p = p;
  mp.m = dimension == 2 ? -lambda * initial_mass / (2.0 * kPi) : -lambda * initial_mass / 2.0;
  return mp;
}

double ConvolutionEngine::diagonal_cell_average(int dimension, double h) {
  if (dimension == 1) return h / 4.0;
  return std::log(h / 2.0) + 0.5 * std::log(2.0) + kPi / 4.0 - 1.5;
}

ConvolutionEngine::ConvolutionEngine(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("ConvolutionEngine: null grid");
  const int N = grid_->points_per_axis;
  const int M = 2 * N;
  padded_ = M;
  const double h = grid_->spacing;

  if (grid_->dimension == 2) {
    kernel_hat_.assign(static_cast<std::size_t>(M) * M, {});
    for (int a = 0; a < M; ++a) {
      const double dx = wrap_displacement(a, M, h);
      for (int b = 0; b < M; ++b) {
        const double dy = wrap_displacement(b, M, h);
        const double r = std::hypot(dx, dy);
        kernel_hat_[static_cast<std::size_t>(a) * M + b] =
            r > 0.0 ? std::log(r) : diagonal_cell_average(2, h);
      }
    }
    const int shape[2] = {M, M};
    fft::forward(kernel_hat_.data(), 2, shape);
  } else {
    kernel_hat_.assign(M, {});
    for (int a = 0; a < M; ++a) {
      const double d = wrap_displacement(a, M, h);
      kernel_hat_[a] = d != 0.0 ? std::abs(d) : diagonal_cell_average(1, h);
    }
    const int shape[1] = {M};
    fft::forward(kernel_hat_.data(), 1, shape);
  }
}

std::vector<double> ConvolutionEngine::convolve(const std::vector<double>& density) const {
  const int N = grid_->points_per_axis;
  const int M = padded_;
  if (density.size() != grid_->size())
    throw std::invalid_argument("convolve: density shape mismatch");

  if (grid_->dimension == 2) {
    std::vector<std::complex<double>> work(static_cast<std::size_t>(M) * M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        work[static_cast<std::size_t>(i) * M + j] = density[static_cast<std::size_t>(i) * N + j];
    const int shape[2] = {M, M};
    fft::forward(work.data(), 2, shape);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= kernel_hat_[i];
    fft::backward_normalized(work.data(), 2, shape);
    std::vector<double> out(grid_->size());
    const double scale = grid_->cell_volume();
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        out[static_cast<std::size_t>(i) * N + j] =
            work[static_cast<std::size_t>(i) * M + j].real() * scale;
    return out;
  }

  std::vector<std::complex<double>> work(M);
  for (int j = 0; j < N; ++j) work[j] = density[j];
  const int shape[1] = {M};
  fft::forward(work.data(), 1, shape);
  for (int j = 0; j < M; ++j) work[j] *= kernel_hat_[j];
  fft::backward_normalized(work.data(), 1, shape);
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) out[j] = work[j].real() * grid_->spacing;
  return out;
}

std::vector<double> full_newtonian(const Field& u, const ConvolutionEngine& engine) {
  if (!u.grid || u.grid->dimension != 2)
    throw std::invalid_argument("full_newtonian: 2D field required");
  if (u.grid.get() != engine.grid().get() &&
      (u.grid->dimension != engine.grid()->dimension ||
       u.grid->points_per_axis != engine.grid()->points_per_axis ||
       u.grid->half_width != engine.grid()->half_width))
    throw std::invalid_argument("full_newtonian: engine built for a different grid");
  std::vector<double> density(u.values.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::norm(u.values[i]);
  std::vector<double> out = engine.convolve(density);
  for (double& v : out) v *= -1.0 / (2.0 * kPi);
  return out;
}

std::vector<double> linear_confining_potential(const Grid& grid, const ModelParams& params) {
  std::vector<double> w(grid.size());
  const int N = grid.points_per_axis;
  if (grid.dimension == 2) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        w[grid.index(i, j)] = params.m * log_bracket_2d(grid.coordinates[i], grid.coordinates[j]);
  } else {
    for (int j = 0; j < N; ++j) w[j] = params.m * std::abs(grid.coordinates[j]);
  }
  return w;
}

PotentialSplit decomposed_potential(const Field& u, const ModelParams& params,
                                    const ConvolutionEngine& engine) {
  if (!u.grid || u.grid->dimension != params.dimension)
    throw std::invalid_argument("decomposed_potential: dimension mismatch");
  const Grid& grid = *u.grid;
  const int N = grid.points_per_axis;

  PotentialSplit split;
  split.linear = linear_confining_potential(grid, params);
  const double coeff = params.dimension == 2 ? -params.lambda / (2.0 * kPi) : -params.lambda / 2.0;
  // mass m was frozen at t = 0: recover ||u_0||^2 from it (coeff 0 when
  // lambda = 0, in which case the frozen mass is irrelevant).
  split.mass_at_init = params.lambda != 0.0 ? params.m / coeff : l2_norm_squared(u);

  std::vector<double> density(u.values.size());
  double mass_now = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    density[i] = std::norm(u.values[i]);
    mass_now += density[i];
  }
  mass_now *= grid.cell_volume();

  if (params.lambda == 0.0) {
    split.remainder.assign(grid.size(), 0.0);
    return split;
  }

  std::vector<double> conv = engine.convolve(density);
  split.remainder.resize(grid.size());
  if (params.dimension == 2) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const std::size_t idx = grid.index(i, j);
        const double lb = log_bracket_2d(grid.coordinates[i], grid.coordinates[j]);
        split.remainder[idx] = coeff * (conv[idx] - mass_now * lb);
      }
  } else {
    for (int j = 0; j < N; ++j)
      split.remainder[j] = coeff * (conv[j] - mass_now * std::abs(grid.coordinates[j]));
  }
  return split;
}

std::vector<double> direct_convolution_oracle(const Field& u, const KernelSpec& kernel) {
  if (!u.grid) throw std::invalid_argument("direct_convolution_oracle: null grid");
  if (kernel.kind != KernelKind::full)
    throw std::invalid_argument("direct_convolution_oracle: only the full difference kernel is a convolution");
  const Grid& grid = *u.grid;
  if (grid.dimension != kernel.dimension)
    throw std::invalid_argument("direct_convolution_oracle: dimension mismatch");
  const int N = grid.points_per_axis;
  if (N > 64) throw std::invalid_argument("direct_convolution_oracle: N > 64 (cost guard)");
  const double h = grid.spacing;
  const double diag = ConvolutionEngine::diagonal_cell_average(grid.dimension, h);

  std::vector<double> density(u.values.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::norm(u.values[i]);

  std::vector<double> out(grid.size(), 0.0);
  if (grid.dimension == 2) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double acc = 0.0;
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b) {
            const double r = std::hypot((i - a) * h, (j - b) * h);
            acc += (r > 0.0 ? std::log(r) : diag) * density[grid.index(a, b)];
          }
        out[grid.index(i, j)] = kernel.normalization * acc * h * h;
      }
  } else {
    for (int i = 0; i < N; ++i) {
      double acc = 0.0;
      for (int a = 0; a < N; ++a) {
        const double r = std::abs((i - a) * h);
        acc += (r > 0.0 ? r : diag) * density[a];
      }
      out[i] = kernel.normalization * acc * h;
    }
  }
  return out;
}

}  // namespace spsim
