#pragma once

#include <vector>

#include "psifrac/solve.hpp"
#include "psifrac/spaces.hpp"

namespace psifrac {

struct EigenEstimate {
  double lambda = 0.0;
  std::vector<double> eigenfunction;  // nodal, boundary-zero, Lp-normalized
  int level = 1;
  double residual = 0.0;              // max-norm discrete Euler residual
  int iterations = 0;
  bool converged = false;
  // True when the value is only a variational bound from above (the
  // two-function minimax family used away from p = 2); false when the
  // estimate closed its residual as a genuine discrete eigenpair.
  bool upper_bound = false;
};

// R(phi) = sum_cells h |D phi|^p / sum_nodes tau |phi|^p with D the
// variational cell derivative. Zero-homogeneous; boundary-zero input.
double rayleigh_quotient(const GridFunction& phi, const SpaceParams& sp);

// Max over interior nodal hat functions v of the weak defect
// | sum h kappa(D phi) D v - lambda sum tau kappa(phi) v |.
double eigen_residual(const GridFunction& phi, double lambda, const SpaceParams& sp);

// Smallest Rayleigh value by normalized descent: gradient step on the
// quotient followed by projection back to the unit Lp sphere. Stops when the
// residual reaches opts.grad_tol.
EigenEstimate lambda_1(const SpaceParams& sp, const GridPtr& grid,
                       const SolveOptions& opts);

// Second value. For p = 2 an inverse subspace iteration on the assembled
// interior pencil (exact up to discretization, residual-closed). Otherwise a
// minimax over odd circles theta -> cos(theta) w1 + sin(theta) w2 seeded with
// half-interval bumps and polished by subgradient steps; an upper bound.
EigenEstimate lambda_2_estimate(const SpaceParams& sp, const GridPtr& grid,
                                const SolveOptions& opts);

}  // namespace psifrac
