#pragma once

#include <array>
#include <cmath>
#include <string>

namespace spsim {

// <x> = (1 + |x|^2)^{1/2}
inline double bracket_1d(double x) { return std::sqrt(1.0 + x * x); }
inline double log_bracket_1d(double x) { return 0.5 * std::log1p(x * x); }
inline double log_bracket_2d(double x, double y) { return 0.5 * std::log1p(x * x + y * y); }

enum class KernelKind { full, remainder, linear };

struct KernelSpec {
  int dimension = 2;
  KernelKind kind = KernelKind::full;
  // Overall constant applied to the tabulated kernel (e.g. -1/2pi for the 2D
  // Newtonian potential; the 1D model folds -lambda/2 in at the model level).
  double normalization = 1.0;
};

// Pointwise kernel pieces. The 2D decomposition identity is
//   log|x-y| = log(|x-y|/<x>) + log<x>,
// and in 1D |x-y| = (|x-y| - |x|) + |x|.
double full_kernel_2d(const std::array<double, 2>& x, const std::array<double, 2>& y);
double remainder_kernel_2d(const std::array<double, 2>& x, const std::array<double, 2>& y);
double remainder_kernel_1d(double x, double y);

// K(x, y) = log(|x-y|/<x>) / (1 + log<y>); rejects coincident points.
double k_function(const std::array<double, 2>& x, const std::array<double, 2>& y);

struct KernelBoundReport {
  double eta = 1.0;
  double C0 = 0.0;                // 1 + log(sqrt(3)/eta)
  double sampled_sup_far = 0.0;   // sup |K| over sampled pairs with |x-y| >= eta
  double Lp_norm_near = 0.0;      // max over sampled y of ||K 1_{|x-y|<=eta}(., y)||_{L^p}
  double p = 2.0;

  bool far_bound_ok() const { return sampled_sup_far <= C0; }
  std::string to_json() const;
};

struct KernelSampleSpec {
  int far_displacement_points = 200;  // log-spaced |x-y| in [eta, 3*max_radius]
  int far_angle_points = 33;
  int far_center_points = 60;         // log-spaced |y| up to max_radius, plus y = 0
  double max_radius = 1e6;
  int near_panels = 48;               // geometric radial panels down to ~1e-12
  int near_panel_gauss = 8;
  int near_angle_points = 32;
};

KernelBoundReport check_k_bound(double eta, double p, const KernelSampleSpec& spec = {});

struct Sample1DSpec {
  double extent = 50.0;
  int points_per_axis = 2001;
};

// sup over sampled (x, y) of ||x-y| - |x|| / (1 + |y|); always <= 1.
double check_1d_bound(const Sample1DSpec& spec = {});

}  // namespace spsim
