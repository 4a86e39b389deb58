#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace spsim {

// Uniform tensor grid on the truncated box [-L, L)^d with spectral wavenumbers.
// x_j = -L + j*h with h = 2L/N; k_j = (pi/L)*j for j <= N/2 and (pi/L)*(j-N)
// above, so k_{N-j} = -k_j for 0 < j < N/2.
struct Grid {
  int dimension = 0;
  double half_width = 0.0;
  int points_per_axis = 0;
  double spacing = 0.0;
  std::vector<double> coordinates;  // per-axis sample positions, size N
  std::vector<double> wavenumbers;  // per-axis frequencies in FFT order, size N

  std::size_t size() const;              // N^d
  double cell_volume() const;            // h^d
  std::size_t index(int i, int j) const  // row-major, 2D
  {
    return static_cast<std::size_t>(i) * points_per_axis + j;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dimension, double half_width, int points_per_axis);

struct Field {
  GridPtr grid;
  std::vector<std::complex<double>> values;

  Field() = default;
  explicit Field(GridPtr g);
  bool finite() const;       // no NaN/Inf entries
  void check_valid() const;  // throws unless grid is set and sizes agree
};

// Rectangle-rule quadrature h^d * sum |u_j|^2 (spectrally accurate for smooth
// decaying data on a periodic box).
double l2_norm_squared(const Field& u);

// h^d * sum w_j |u_j|^2; w must have one entry per grid node.
double weighted_l2(const Field& u, const std::vector<double>& w);

// Per-axis derivatives via multiplication by i*k in frequency space.
std::vector<Field> spectral_gradient(const Field& u);

// ||grad u||_2^2 evaluated in frequency space (Parseval), without forming
// gradient fields.
double grad_norm_squared(const Field& u);

// In-place transforms of a field's values.
void fft_forward(Field& u);
void fft_backward_normalized(Field& u);

}  // namespace spsim
