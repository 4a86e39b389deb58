#include "spsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace spsim {
namespace {

double dist(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  return std::hypot(x[0] - y[0], x[1] - y[1]);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

double full_kernel_2d(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  const double r = dist(x, y);
  if (r == 0.0) throw std::invalid_argument("full_kernel_2d: coincident points");
  return std::log(r);
}

double remainder_kernel_2d(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  const double r = dist(x, y);
  if (r == 0.0) throw std::invalid_argument("remainder_kernel_2d: coincident points");
  return std::log(r) - log_bracket_2d(x[0], x[1]);
}

double remainder_kernel_1d(double x, double y) { return std::abs(x - y) - std::abs(x); }

double k_function(const std::array<double, 2>& x, const std::array<double, 2>& y) {
  const double r = dist(x, y);
  if (r == 0.0) throw std::invalid_argument("k_function: coincident points");
  return (std::log(r) - log_bracket_2d(x[0], x[1])) / (1.0 + log_bracket_2d(y[0], y[1]));
}

std::string KernelBoundReport::to_json() const {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "{\"eta\": %.17g, \"C0\": %.17g, \"sampled_sup_far\": %.17g, "
                "\"Lp_norm_near\": %.17g, \"p\": %.17g}",
                eta, C0, sampled_sup_far, Lp_norm_near, p);
  return buf;
}

KernelBoundReport check_k_bound(double eta, double p, const KernelSampleSpec& spec) {
  if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("check_k_bound: require 0 < eta <= 1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("check_k_bound: require 1 <= p < inf");

  KernelBoundReport report;
  report.eta = eta;
  report.p = p;
  report.C0 = 1.0 + std::log(std::sqrt(3.0) / eta);

  // K is invariant under joint rotation of (x, y), so y can sit on the
  // positive first axis; the extremes live on rays |x-y| comparable to
  // max(<x>, <y>), which log-spaced radii cover.
  std::vector<double> centers{0.0};
  for (int i = 0; i < spec.far_center_points; ++i) {
    const double t = static_cast<double>(i) / std::max(1, spec.far_center_points - 1);
    centers.push_back(1e-3 * std::pow(spec.max_radius / 1e-3, t));
  }
  const double pi = 3.14159265358979323846;
  double sup_far = 0.0;
  for (double s : centers) {
    const std::array<double, 2> y{s, 0.0};
    for (int i = 0; i < spec.far_displacement_points; ++i) {
      const double t = static_cast<double>(i) / std::max(1, spec.far_displacement_points - 1);
      const double r = eta * std::pow(3.0 * spec.max_radius / eta, t);
      for (int a = 0; a < spec.far_angle_points; ++a) {
        const double th = pi * a / std::max(1, spec.far_angle_points - 1);
        const std::array<double, 2> x{s + r * std::cos(th), r * std::sin(th)};
        sup_far = std::max(sup_far, std::abs(k_function(x, y)));
      }
    }
  }
  report.sampled_sup_far = sup_far;

  // Near region: || |K(., y)| 1_{|x-y| <= eta} ||_{L^p} by polar quadrature
  // around y. The radial integrand r*|log(r/<x>)|^p is integrable; geometric
  // panels resolve the logarithmic singularity at r = 0.
  double worst = 0.0;
  for (double s : {0.0, 0.5, 1.0, 10.0, 1e3, spec.max_radius}) {
    const std::array<double, 2> y{s, 0.0};
    double integral = 0.0;
    double hi = eta;
    for (int panel = 0; panel < spec.near_panels; ++panel) {
      const double lo = hi * 0.5;
      for (int g = 0; g < spec.near_panel_gauss; ++g) {
        const double r = 0.5 * (hi + lo) + 0.5 * (hi - lo) * kGlNodes[g];
        const double wr = 0.5 * (hi - lo) * kGlWeights[g];
        double angular = 0.0;
        for (int a = 0; a < spec.near_angle_points; ++a) {
          const double th = 2.0 * pi * (a + 0.5) / spec.near_angle_points;
          const std::array<double, 2> x{s + r * std::cos(th), r * std::sin(th)};
          angular += std::pow(std::abs(k_function(x, y)), p);
        }
        angular *= 2.0 * pi / spec.near_angle_points;
        integral += wr * r * angular;
      }
      hi = lo;
    }
    worst = std::max(worst, std::pow(integral, 1.0 / p));
  }
  report.Lp_norm_near = worst;
  return report;
}

double check_1d_bound(const Sample1DSpec& spec) {
  if (spec.points_per_axis < 2 || !(spec.extent > 0.0))
    throw std::invalid_argument("check_1d_bound: bad sample spec");
  const int n = spec.points_per_axis;
  const double step = 2.0 * spec.extent / (n - 1);
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -spec.extent + i * step;
    for (int j = 0; j < n; ++j) {
      const double y = -spec.extent + j * step;
      sup = std::max(sup, std::abs(remainder_kernel_1d(x, y)) / (1.0 + std::abs(y)));
    }
  }
  return sup;
}

}  // namespace spsim
