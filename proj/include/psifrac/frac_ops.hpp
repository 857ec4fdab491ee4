#pragma once

#include <memory>
#include <vector>

#include "psifrac/grid_function.hpp"

namespace psifrac {

// Order pair (alpha, beta) of the two-parameter derivative. alpha = 1 selects
// the classical branch: the operator is then plain d/dpsi and never touches a
// fractional kernel. The derived exponents split 1 - alpha between the inner
// and outer integral of the composition:
//   gamma1 = (1 - beta)(1 - alpha)   (inner order, left-variant)
//   gamma2 = beta (1 - alpha)        (outer order, left-variant)
struct FractionalOrder {
  double alpha;
  double beta;

  FractionalOrder(double a, double b);

  double gamma1() const { return (1.0 - beta) * (1.0 - alpha); }
  double gamma2() const { return beta * (1.0 - alpha); }
  bool classical() const { return alpha == 1.0; }
};

// Quadrature weight table for a fractional integral on a fixed grid: the
// kernel is integrated exactly against a piecewise-linear (node tables) or
// piecewise-constant (cell tables) interpolant in the psi-coordinate, so the
// weak kernel singularity never meets a pointwise slope evaluation. Tables
// are built once per (grid, order, kind) and shared immutably.
struct WeightTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> w;  // row-major, rows*cols

  double at(int i, int k) const { return w[static_cast<std::size_t>(i) * cols + k]; }
};

enum class WeightKind {
  node_left,   // nodal values -> nodal values, kernel (u_i - u)^{mu-1}
  node_right,  // nodal values -> nodal values, kernel (u - u_i)^{mu-1}
  cell_left,   // cell values -> cell midpoints, left kernel
  cell_right,  // cell values -> cell midpoints, right kernel
};

std::shared_ptr<const WeightTable> integral_weights(const Grid& grid, double mu,
                                                    WeightKind kind);
void clear_weight_cache();

// Fractional integrals of order alpha > 0 in the psi-coordinate, evaluated
// at the grid nodes. Exact for integrands that are piecewise linear in psi.
GridFunction frac_integral_left(double alpha, const GridFunction& f);
GridFunction frac_integral_right(double alpha, const GridFunction& f);

// Nodal derivative d/dpsi with three-point second-order stencils (one-sided
// at the endpoints), valid on non-uniform psi spacing.
GridFunction derivative_in_psi(const GridFunction& f);

// Two-parameter derivatives, evaluated nodally by composing the pieces
// above. The value of f at the expansion endpoint is split off and handled
// in closed form, which keeps constants exact and removes the worst kernel
// singularity from the numerical path. When the closed-form part is singular
// at the expansion endpoint itself, that single node is filled by quadratic
// extrapolation (reports call this out).
GridFunction hilfer_deriv_left(const FractionalOrder& ord, const GridFunction& f);
GridFunction hilfer_deriv_right(const FractionalOrder& ord, const GridFunction& f);

// Right-sided variant with the integral orders commuted (the form produced
// by integration by parts): inner order gamma2, outer order gamma1. Equals
// hilfer_deriv_right with beta replaced by 1 - beta.
GridFunction caputo_hilfer_right(const FractionalOrder& ord, const GridFunction& g);

// Defect of the integral transposition identity
//   int (I_left phi2) phi psi' dxi  =  int phi2 (I_right phi) psi' dxi ,
// both sides by trapezoid quadrature in psi. Should shrink under refinement.
double ibp_integral_defect(double alpha, const GridFunction& phi,
                           const GridFunction& phi2);

// Defect of the derivative transposition identity, including its two
// boundary products  P(x) = (I_left^{gamma1} phi2)(x) * (I_right^{gamma2} phi)(x):
//   int (D_right_commuted phi) phi2 psi'  =  -P(b) + P(a) + int phi (D_left phi2) psi'.
struct HilferIbpBreakdown {
  double lhs = 0.0;            // int (commuted right derivative of phi) phi2
  double rhs_integral = 0.0;   // int phi (left derivative of phi2)
  double boundary_a = 0.0;     // P at the left endpoint
  double boundary_b = 0.0;     // P at the right endpoint
  double defect = 0.0;         // lhs + P(b) - P(a) - rhs_integral
};

HilferIbpBreakdown ibp_hilfer_parts(const FractionalOrder& ord,
                                    const GridFunction& phi,
                                    const GridFunction& phi2);
double ibp_hilfer_defect(const FractionalOrder& ord, const GridFunction& phi,
                         const GridFunction& phi2);

}  // namespace psifrac
