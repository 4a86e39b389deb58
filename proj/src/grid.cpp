#include "spsim/grid.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spsim/fft.hpp"

namespace spsim {

std::size_t Grid::size() const {
  std::size_t n = static_cast<std::size_t>(points_per_axis);
  return dimension == 2 ? n * n : n;
}

double Grid::cell_volume() const {
  return dimension == 2 ? spacing * spacing : spacing;
}

GridPtr make_grid(int dimension, double half_width, int points_per_axis) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("make_grid: dimension must be 1 or 2");
  if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half_width must be positive");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw std::invalid_argument("make_grid: points_per_axis must be even and >= 8");

  auto grid = std::make_shared<Grid>();
  grid->dimension = dimension;
  grid->half_width = half_width;
  grid->points_per_axis = points_per_axis;
  grid->spacing = 2.0 * half_width / points_per_axis;
  grid->coordinates.resize(points_per_axis);
  grid->wavenumbers.resize(points_per_axis);
  const double dk = std::numbers::pi / half_width;
  for (int j = 0; j < points_per_axis; ++j) {
    grid->coordinates[j] = -half_width + j * grid->spacing;
    grid->wavenumbers[j] = dk * (j <= points_per_axis / 2 ? j : j - points_per_axis);
  }
  return grid;
}

Field::Field(GridPtr g) : grid(std::move(g)) {
  if (!grid) throw std::invalid_argument("Field: null grid");
  values.assign(grid->size(), {});
}

bool Field::finite() const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void Field::check_valid() const {
  if (!grid) throw std::invalid_argument("field has no grid");
  if (values.size() != grid->size()) throw std::invalid_argument("field/grid shape mismatch");
}

namespace {

std::array<int, 2> shape_of(const Grid& g) {
  return {g.points_per_axis, g.points_per_axis};
}

}  // namespace

double l2_norm_squared(const Field& u) {
  u.check_valid();
  double acc = 0.0;
  for (const auto& v : u.values) acc += std::norm(v);
  return acc * u.grid->cell_volume();
}

double weighted_l2(const Field& u, const std::vector<double>& w) {
  u.check_valid();
  if (w.size() != u.values.size()) throw std::invalid_argument("weighted_l2: weight shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::norm(u.values[i]);
  return acc * u.grid->cell_volume();
}

void fft_forward(Field& u) {
  u.check_valid();
  auto shape = shape_of(*u.grid);
  fft::forward(u.values.data(), u.grid->dimension, shape.data());
}

void fft_backward_normalized(Field& u) {
  u.check_valid();
  auto shape = shape_of(*u.grid);
  fft::backward_normalized(u.values.data(), u.grid->dimension, shape.data());
}

std::vector<Field> spectral_gradient(const Field& u) {
  u.check_valid();
  const Grid& g = *u.grid;
  const int N = g.points_per_axis;
  Field hat = u;
  fft_forward(hat);

  std::vector<Field> out;
  for (int axis = 0; axis < g.dimension; ++axis) {
    Field du(u.grid);
    if (g.dimension == 1) {
      for (int j = 0; j < N; ++j)
        du.values[j] = std::complex<double>(0.0, g.wavenumbers[j]) * hat.values[j];
    } else {
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          const double k = axis == 0 ? g.wavenumbers[i] : g.wavenumbers[j];
          du.values[g.index(i, j)] = std::complex<double>(0.0, k) * hat.values[g.index(i, j)];
        }
      }
    }
    fft_backward_normalized(du);
    out.push_back(std::move(du));
  }
  return out;
}

double grad_norm_squared(const Field& u) {
  u.check_valid();
  const Grid& g = *u.grid;
  const int N = g.points_per_axis;
  Field hat = u;
  fft_forward(hat);
  double acc = 0.0;
  if (g.dimension == 1) {
    for (int j = 0; j < N; ++j) acc += g.wavenumbers[j] * g.wavenumbers[j] * std::norm(hat.values[j]);
  } else {
    for (int i = 0; i < N; ++i) {
      const double ki2 = g.wavenumbers[i] * g.wavenumbers[i];
      for (int j = 0; j < N; ++j) {
        const double k2 = ki2 + g.wavenumbers[j] * g.wavenumbers[j];
        acc += k2 * std::norm(hat.values[g.index(i, j)]);
      }
    }
  }
  // Parseval: sum_x |u|^2 = (1/N^d) sum_k |u_hat|^2.
  return acc * g.cell_volume() / static_cast<double>(g.size());
}

}  // namespace spsim
