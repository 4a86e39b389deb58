#pragma once

#include <vector>

#include "spsim/grid.hpp"
#include "spsim/potential.hpp"

namespace spsim {

// One diagnostic row. Energies are recorded in the form the splitting flow
// actually conserves: hartree is -(lambda/4pi) iint log|x-y| rho rho in 2D and
// -(lambda/4) iint |x-y| rho rho in 1D, power is 2*eta/(p+1) ||u||_{p+1}^{p+1};
// these are the functionals whose density-derivative reproduces the equations'
// potential terms. sigma moments apply to 1D only (NaN in 2D, serialized as
// empty CSV cells).
struct ObservableRecord {
  double t = 0.0;
  double mass = 0.0;          // ||u||_2^2
  double kinetic = 0.0;       // (1/2)||grad u||_2^2
  double hartree = 0.0;
  double power = 0.0;
  double total_energy = 0.0;  // kinetic + hartree + power
  double log_moment = 0.0;    // ||sqrt(log<x>) u||_2^2
  double h12_moment = 0.0;    // ||log<x> u||_2^2
  double sigma_moment = 0.0;  // 1D: || |x|^{1/2} u ||_2^2
  double sigma2_moment = 0.0; // 1D: || |x| u ||_2^2
  double grad_norm = 0.0;     // ||grad u||_2
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double hartree = 0.0;
  double power = 0.0;
  double total() const { return kinetic + hartree + power; }
};

// engine may be null when lambda == 0 (no Hartree term to evaluate).
EnergyBreakdown energy_breakdown(const Field& u, const ModelParams& params,
                                 const ConvolutionEngine* engine);

// Kinetic plus log-interaction energy (2D), without the power term.
double energy_2d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine);
// Adds the conserved power term to energy_2d.
double energy_p_2d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine);
// 1D total with the |x-y| interaction and power term.
double energy_1d(const Field& u, const ModelParams& params, const ConvolutionEngine* engine);

ObservableRecord record_observables(double t, const Field& u, const ModelParams& params,
                                    const ConvolutionEngine* engine);

enum class Outcome { bounded, suspected_blowup };

// Flags suspected_blowup the first time grad_norm exceeds the threshold.
Outcome blow_up_monitor(const std::vector<ObservableRecord>& records, double threshold);

// Checks log_moment(t2) <= log_moment(t1) + (t2-t1)*grad_sup*sqrt(mass_0) for
// every recorded pair t1 < t2; returns the worst margin (positive: satisfied).
double log_moment_growth_check(const std::vector<ObservableRecord>& records, double grad_sup);

struct AprioriBoundReport {
  double fitted_C = 0.0;   // smallest C with g^2 <= 2 E0 + C g across the run (lambda < 0)
  double bound_root = 0.0; // larger root of g^2 - C g - 2 E0 = 0
  double sup_grad = 0.0;
  bool satisfied = false;
};

AprioriBoundReport apriori_bound_check(const std::vector<ObservableRecord>& records,
                                       const ModelParams& params, double E0,
                                       double blowup_threshold);

struct ConcentrationReport {
  bool conclusive = false;
  double r = 0.0;                  // ||sqrt(log<x>) u||_2
  double restricted_norm = 0.0;    // ||u||_{L^2(|x| < r)}
  double upper_bound = 0.0;        // (pi r^2)^{1/4} sqrt(C_gn ||u||_2 ||grad u||_2)
  double lower_bound = 0.0;        // ||u||_2 - sqrt(log_moment / log<r>)
  double measured_gn_constant = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
};

ConcentrationReport concentration_check(const Field& u);

// Moment weight tables on the grid nodes.
std::vector<double> log_bracket_weights(const Grid& grid);      // log<x>
std::vector<double> log_bracket_sq_weights(const Grid& grid);   // (log<x>)^2
std::vector<double> abs_weights(const Grid& grid);              // |x| (1D)
std::vector<double> abs_sq_weights(const Grid& grid);           // |x|^2 (1D)
// log|x| with the exact cell average at the origin node (gauge-phase weight).
std::vector<double> gauge_log_weight(const Grid& grid);

}  // namespace spsim
