#pragma once

#include <vector>

#include "psifrac/nonlinearity.hpp"
#include "psifrac/spaces.hpp"
#include "psifrac/weak_derivative.hpp"

namespace psifrac {

struct EnergyBreakdown {
  double kinetic = 0.0;    // (1/p) int psi' |D phi|^p
  double potential = 0.0;  // int psi' F(xi, phi)
  double total = 0.0;      // kinetic - potential
};

// All three evaluators share one discretization (the cell form of the
// derivative, midpoint quadrature for the kinetic term, trapezoid for the
// reaction term), so the gradient is the exact Frechet derivative of the
// discrete energy and its entries coincide with weak_residual against the
// nodal basis to rounding. Inputs must vanish at the boundary.

EnergyBreakdown energy(const GridFunction& phi, const SpaceParams& sp,
                       const Nonlinearity& nl);

// int psi' |D phi|^{p-2} (D phi)(D v) - int psi' f(xi, phi) v
double weak_residual(const GridFunction& phi, const GridFunction& v,
                     const SpaceParams& sp, const Nonlinearity& nl);

// Nodal gradient of the discrete energy; boundary entries are zero (the
// admissible variations vanish there).
GridFunction energy_gradient(const GridFunction& phi, const SpaceParams& sp,
                             const Nonlinearity& nl);

// Shared low-level forms on a prebuilt operator (the solver's hot loop).
double energy_value(const WeakDerivative& D, const std::vector<double>& phi,
                    const SpaceParams& sp, const Nonlinearity& nl,
                    double* kinetic = nullptr, double* potential = nullptr);
void energy_gradient_into(const WeakDerivative& D, const std::vector<double>& phi,
                          const SpaceParams& sp, const Nonlinearity& nl,
                          std::vector<double>& grad);

}  // namespace psifrac
