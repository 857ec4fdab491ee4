#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "psifrac/frac_ops.hpp"
#include "psifrac/grid_function.hpp"

namespace psifrac {

// Discrete form of the left two-parameter derivative used inside the energy,
// the weak residual and the Rayleigh quotient. It is evaluated on the n-1
// psi-cells rather than at the nodes:
//
//   nodal  --inner left integral-->  nodal  --cell difference-->  cells
//          --outer left integral (midpoint product rule)-->       cells
//
// The staggered difference stage is what makes the discrete energy safe to
// minimize: a nodal central difference annihilates the alternating grid mode,
// which would hand the optimizer spurious flat directions; the cell
// difference prices that mode at O(1/h). On the classical branch both
// integral stages are the identity and this reduces to the standard
// piecewise-linear first-derivative operator.
//
// Inputs are expected to vanish at the domain boundary (the variational
// setting), so no endpoint-value splitting is needed here and the operator
// is strictly linear: apply/apply_transpose are exact adjoints of each other.
class WeakDerivative {
 public:
  WeakDerivative(GridPtr grid, FractionalOrder ord);

  int nodes() const { return n_; }
  int cells() const { return n_ - 1; }
  const std::vector<double>& cell_widths() const { return hcell_; }  // in psi
  const std::vector<double>& node_weights() const { return tau_; }   // trapezoid
  const FractionalOrder& order() const { return ord_; }
  const GridPtr& grid() const { return grid_; }

  // nodal (n) -> cells (n-1)
  std::vector<double> apply(const std::vector<double>& nodal) const;
  // cells (n-1) -> nodal (n); adjoint of apply under the plain dot product
  std::vector<double> apply_transpose(const std::vector<double>& cell) const;

  // Dense matrix of apply(), built on first use (p = 2 eigen solves).
  const std::vector<double>& dense() const;  // row-major, cells() x nodes()

 private:
  GridPtr grid_;
  FractionalOrder ord_;
  int n_;
  std::vector<double> hcell_;
  std::vector<double> tau_;
  std::shared_ptr<const WeightTable> inner_;  // nodal left, order gamma1
  std::shared_ptr<const WeightTable> outer_;  // cell left, order gamma2
  mutable std::vector<double> dense_;
  mutable std::once_flag dense_once_;
};

}  // namespace psifrac
