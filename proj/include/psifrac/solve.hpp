#pragma once

#include <cstdint>
#include <vector>

#include "psifrac/energy.hpp"

namespace psifrac {

enum class StepRule { armijo_backtracking, fixed };

struct SolveOptions {
  int max_iter = 20000;
  // Stop when the gradient norm, in the Euclidean norm scaled by the square
  // root of the mean psi-spacing, drops to this value.
  double grad_tol = 1e-8;
  StepRule step_rule = StepRule::armijo_backtracking;
  double initial_step = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  int max_backtracks = 60;
  std::uint64_t seed = 0;
  // Optional diagonal preconditioner assembled from the kinetic term's
  // second-difference diagonal.
  bool diagonal_preconditioner = false;

  void validate() const;
};

struct SolveReport {
  std::vector<double> solution;        // nodal values, exact zeros at the ends
  bool converged = false;
  int iterations = 0;
  double critical_level = 0.0;         // energy at the final iterate
  EnergyBreakdown final_energy;
  double final_grad_norm = 0.0;
  std::string stop_reason;

  // One entry per visited iterate (so length iterations + 1).
  std::vector<double> energy_trace;
  std::vector<double> grad_norm_trace;
  std::vector<double> rho_trace;        // space-norm surrogate of the iterate
  std::vector<double> theta_avg_trace;  // int psi' theta(xi, phi) / rho
  std::vector<double> step_trace;       // accepted step sizes (length iterations)
};

// Monotone descent on the energy: trial steps from a Barzilai-Borwein
// estimate, backtracking until the Armijo inequality
//   E(next) <= E(cur) - armijo_c * s * |grad|^2
// holds in the scaled norm. Stops at grad_tol (converged), on a stalled line
// search, or at max_iter. NaN energy raises NumericError naming the iteration.
SolveReport find_critical_point(const SpaceParams& sp, const Nonlinearity& nl,
                                const GridFunction& init, const SolveOptions& opts);

struct PsDiagnostics {
  std::vector<double> energies;
  std::vector<double> grad_norms;
  std::vector<double> rho;
  std::vector<double> theta_avg;
  bool theta_trend_to_zero = false;
  bool rho_bounded = false;
  // E - <E'(phi), phi>/p and E - <E'(phi), phi>/p^2 at the final iterate;
  // the two normalizations of the compactness functional in circulation.
  double ps_gap_p = 0.0;
  double ps_gap_p2 = 0.0;
};

PsDiagnostics ps_diagnostics(const SolveReport& report, const SpaceParams& sp,
                             const Nonlinearity& nl, const GridPtr& grid);

// Default and randomized starting guesses: a boundary-zero parabola shape in
// the psi-coordinate, and seeded combinations of the first few sine modes.
GridFunction parabola_init(const GridPtr& grid, double amplitude = 1.0);
GridFunction fourier_init(const GridPtr& grid, std::uint64_t seed, int modes = 6);

}  // namespace psifrac
