#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "spsim/grid.hpp"
#include "spsim/potential.hpp"

namespace spsim {

enum class IntegratorKind { strang, picard };

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int output_stride = 10;        // record observables every this many steps
  double blowup_threshold = 40.0;
  IntegratorKind integrator = IntegratorKind::strang;
  int picard_iterations = 4;
};

// Thrown when the state stops being finite; carries the time of the last
// valid state (which the integrator restores before throwing).
struct IntegrationError : std::runtime_error {
  double t_last_valid;
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_last_valid(t) {}
};

// Thrown when fixed-point iterates grow beyond 10x the initial norm.
struct ContractionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Equation form used on the right-hand side of residual checks:
//   oSP: single nonlocal kernel, -(lambda/2pi) log * rho  (1D: -(lambda/2) |x| * rho)
//   SP:  frozen confining part m*log<x> plus mass-weighted remainder
//   SPp: zero-reference kernel log(|x-y|/|y|), i.e. oSP shifted by the scalar
//        log-moment; the form the gauge-transformed field satisfies (2D only)
enum class Formulation { oSP, SP, SPp };

// V(dt/2) T(dt) V(dt/2) splitting for i u_t + (1/2) Lap u = Phi u with
// Phi = m*w_conf + remainder + eta |u|^{p-1}. The potential phase is frozen
// over each V substep, which is exact because |u| is invariant under V; the
// phase computed for the trailing half-step is therefore still valid for the
// next step's leading half-step, so each step costs one potential evaluation.
class StrangIntegrator {
 public:
  // engine may be null iff params.lambda == 0.
  StrangIntegrator(Field initial, const ModelParams& params,
                   std::shared_ptr<const ConvolutionEngine> engine);

  void step(double dt);  // throws IntegrationError on non-finite state
  const Field& state() const { return u_; }
  double time() const { return t_; }
  const ModelParams& params() const { return params_; }
  // Scalar log|x| moment of the current density (gauge-phase integrand); 2D only.
  double gauge_moment() const;
  // Replace the state (e.g. tests); drops the cached potential phase.
  void set_state(const Field& u);

 private:
  void compute_phase();
  void apply_phase(double tau);
  void apply_kinetic(double dt);

  Field u_;
  ModelParams params_;
  std::shared_ptr<const ConvolutionEngine> engine_;
  std::vector<double> linear_;
  mutable std::vector<double> gauge_weight_;  // 2D only, lazily built
  std::vector<double> phi_;
  bool phi_valid_ = false;
  std::vector<std::complex<double>> kinetic_factor_;  // exp(-i dt k^2 / 2) / N^d
  double kinetic_dt_ = 0.0;
  std::vector<std::complex<double>> backup_;
  double t_ = 0.0;
};

// One Strang-split application of exp(i dt A), A = (1/2) Lap - m * w_conf
// (w_conf = log<x> in 2D, |x| in 1D).
Field linear_propagator_step(const Field& u, double m, double dt);

struct PicardResult {
  Field final_state;
  // sup over substep nodes of ||u^{(k)} - u^{(k-1)}||_2, one entry per iteration.
  std::vector<double> iterate_distances;
};

// Fixed-point (Duhamel) iteration u^{(k+1)}(t) = U(t)u0 - i int_0^t U(t-s)
// N[u^{(k)}(s)] ds with U the linear confining propagator above and
// N[u] = (remainder + eta |u|^{p-1}) u, the integral by the trapezoid rule
// over n_substeps. Returns the n_iter-th iterate at t_short.
PicardResult picard_iterate_detailed(const Field& u0, const ModelParams& params,
                                     const ConvolutionEngine* engine, double t_short,
                                     int n_iter, int n_substeps);
Field picard_iterate(const Field& u0, const ModelParams& params, const ConvolutionEngine* engine,
                     double t_short, int n_iter, int n_substeps);

// v = u * exp(-i * accumulated_phase); |v| = |u| pointwise.
Field gauge_transform(const Field& u, double accumulated_phase);

// Trapezoid integral of the recorded log|x| moment series times lambda/(2*pi):
// the accumulated gauge phase. times must be strictly increasing.
double phase_accumulator(const std::vector<double>& times, const std::vector<double>& gauge_moments,
                         double lambda);

// Pointwise multiplier of the chosen formulation's right-hand side at u.
std::vector<double> effective_potential(const Field& u, const ModelParams& params,
                                        const ConvolutionEngine* engine, Formulation form);

// || i (u_next - u_prev)/(2 dt) + (1/2) Lap u_mid - W(u_mid) u_mid ||_2 / ||u_mid||_2
// with the three fields taken from consecutive uniform-dt states.
double pde_residual(const Field& u_prev, const Field& u_mid, const Field& u_next, double dt,
                    const ModelParams& params, const ConvolutionEngine* engine, Formulation form);

}  // namespace spsim
