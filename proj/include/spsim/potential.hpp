#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "spsim/grid.hpp"
#include "spsim/kernels.hpp"

namespace spsim {

// The equation being solved: dimension, Hartree coupling lambda, power
// coupling eta and exponent p, and the frozen linear-potential coefficient
// m derived from the initial mass (2D: m = -lambda*mass/2pi; the 1D analog
// uses -lambda*mass/2 for the |x| confinement).
struct ModelParams {
  int dimension = 2;
  double lambda = 0.0;
  double eta = 0.0;
  double p = 2.0;
  double m = 0.0;

  static ModelParams make(int dimension, double lambda, double eta, double p,
                          double initial_mass);
};

// Free-space (aperiodic) convolution with the dimension's Newtonian kernel
// (log|x| in 2D, |x| in 1D): the kernel is tabulated once on the doubled
// domain [-2L, 2L)^d with the exact cell average on the diagonal cell, the
// density is zero-padded to the doubled domain, products are taken in
// frequency space and the result restricted back to the base grid. With 2x
// padding every displacement the base grid can produce lies inside the table,
// so the circular convolution equals the aperiodic sum exactly.
class ConvolutionEngine {
 public:
  explicit ConvolutionEngine(GridPtr grid);

  // (K * density)(x_j) * h^d on the base grid; thread-safe.
  std::vector<double> convolve(const std::vector<double>& density) const;

  const GridPtr& grid() const { return grid_; }

  // (1/h^d) * integral of the kernel over the cell [-h/2, h/2]^d:
  // 2D: log(h/2) + log(2)/2 + pi/4 - 3/2; 1D: h/4.
  static double diagonal_cell_average(int dimension, double h);

 private:
  GridPtr grid_;
  int padded_ = 0;
  std::vector<std::complex<double>> kernel_hat_;
};

// -(1/2pi) (log|x| * |u|^2) on the grid; 2D only.
std::vector<double> full_newtonian(const Field& u, const ConvolutionEngine& engine);

struct PotentialSplit {
  // Hamiltonian potential pieces: linear = m*log<x> (2D) or m*|x| (1D),
  // independent of the current u; remainder = -(lambda/2pi) * integral of
  // log(|x-y|/<x>) |u(y)|^2 dy (1D: -(lambda/2) with kernel |x-y| - |x|).
  std::vector<double> linear;
  std::vector<double> remainder;
  double mass_at_init = 0.0;
};

// The u-independent confining part m*log<x> / m*|x| alone.
std::vector<double> linear_confining_potential(const Grid& grid, const ModelParams& params);

// Remainder computed as (full convolution) - (current mass)*log<x>, which is
// algebraically identical to convolving the non-difference remainder kernel.
PotentialSplit decomposed_potential(const Field& u, const ModelParams& params,
                                    const ConvolutionEngine& engine);

// O(N^{2d}) double sum with the same diagonal-cell-averaged kernel values as
// the FFT path; guard N <= 64. kind must be `full`.
std::vector<double> direct_convolution_oracle(const Field& u, const KernelSpec& kernel);

}  // namespace spsim
