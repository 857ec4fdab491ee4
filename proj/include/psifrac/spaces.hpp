#pragma once

#include "psifrac/frac_ops.hpp"
#include "psifrac/grid_function.hpp"

namespace psifrac {

// Parameters of the weighted fractional space and of the energy: growth
// exponent p, derivative order pair, and the optional epsilon-regularization
// of |x|^{p-2} x used by the descent machinery (0 = exact power law; for
// p < 2 the map is continued by 0 at x = 0).
struct SpaceParams {
  double p;
  FractionalOrder ord;
  double eps = 0.0;

  SpaceParams(double p_, FractionalOrder ord_, double eps_ = 0.0);

  // |x|^{p-2} x, with the regularized variant (x^2 + eps^2)^{(p-2)/2} x.
  double power_map(double x) const;
};

// Relative tolerance for "vanishes at the boundary": |phi(end)| must not
// exceed kBoundaryTol * max|phi|.
inline constexpr double kBoundaryTol = 1e-8;

// Weighted p-norm (integral of psi' |f|^p over [0, T])^{1/p}, trapezoid
// quadrature in the psi-coordinate. Requires p >= 1.
double lp_norm(const GridFunction& f, double p);

// Norm of the solution space: lp_norm(phi) + lp_norm(left derivative of phi),
// the sum form. The derivative is the nodal operator.
double hspace_norm(const GridFunction& phi, const SpaceParams& sp);
double hspace_seminorm(const GridFunction& phi, const SpaceParams& sp);

bool is_boundary_zero(const GridFunction& phi);
// Throws BoundaryError (naming the offending end values) unless phi vanishes
// at both ends within tolerance.
void require_boundary_zero(const GridFunction& phi, const char* where);
// Returns a copy with the end values set to exactly zero; the input must
// already satisfy the tolerance.
GridFunction project_boundary(const GridFunction& phi);

}  // namespace psifrac
