#include "psifrac/energy.hpp"

#include <cmath>

#include "psifrac/errors.hpp"

namespace psifrac {

namespace {

double pow_p(double x, double p) { return std::pow(std::abs(x), p); }

// |x|^p with the same epsilon-regularization as the power map, so that the
// gradient of the regularized kinetic term stays the exact derivative of the
// regularized energy.
double kinetic_density(double x, const SpaceParams& sp) {
  if (sp.eps > 0.0)
    return std::pow(x * x + sp.eps * sp.eps, 0.5 * sp.p) -
           std::pow(sp.eps * sp.eps, 0.5 * sp.p);
  return pow_p(x, sp.p);
}

}  // namespace

double energy_value(const WeakDerivative& D, const std::vector<double>& phi,
                    const SpaceParams& sp, const Nonlinearity& nl,
                    double* kinetic, double* potential) {
  const auto d = D.apply(phi);
  const auto& h = D.cell_widths();
  const auto& tau = D.node_weights();
  const auto& xi = D.grid()->nodes();
  double kin = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j)
    kin += h[j] * kinetic_density(d[j], sp);
  kin /= sp.p;
  double pot = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    pot += tau[i] * nl.primitive_F(xi[i], phi[i]);
  if (kinetic) *kinetic = kin;
  if (potential) *potential = pot;
  return kin - pot;
}

void energy_gradient_into(const WeakDerivative& D, const std::vector<double>& phi,
                          const SpaceParams& sp, const Nonlinearity& nl,
                          std::vector<double>& grad) {
  const auto d = D.apply(phi);
  const auto& h = D.cell_widths();
  const auto& tau = D.node_weights();
  const auto& xi = D.grid()->nodes();
  std::vector<double> w(d.size());
  for (std::size_t j = 0; j < d.size(); ++j)
    w[j] = h[j] * sp.power_map(d[j]);
  grad = D.apply_transpose(w);
  const int n = static_cast<int>(phi.size());
  for (int i = 0; i < n; ++i) grad[i] -= tau[i] * nl.f(xi[i], phi[i]);
  grad.front() = 0.0;
  grad.back() = 0.0;
}

EnergyBreakdown energy(const GridFunction& phi, const SpaceParams& sp,
                       const Nonlinearity& nl) {
  require_boundary_zero(phi, "energy");
  WeakDerivative D(phi.grid(), sp.ord);
  EnergyBreakdown out;
  out.total = energy_value(D, phi.values(), sp, nl, &out.kinetic, &out.potential);
  return out;
}

double weak_residual(const GridFunction& phi, const GridFunction& v,
                     const SpaceParams& sp, const Nonlinearity& nl) {
  require_same_grid(phi, v, "weak_residual");
  require_boundary_zero(phi, "weak_residual");
  require_boundary_zero(v, "weak_residual (test function)");
  WeakDerivative D(phi.grid(), sp.ord);
  const auto dphi = D.apply(phi.values());
  const auto dv = D.apply(v.values());
  const auto& h = D.cell_widths();
  const auto& tau = D.node_weights();
  const auto& xi = D.grid()->nodes();
  double acc = 0.0;
  for (std::size_t j = 0; j < dphi.size(); ++j)
    acc += h[j] * sp.power_map(dphi[j]) * dv[j];
  for (int i = 0; i < phi.size(); ++i)
    acc -= tau[i] * nl.f(xi[i], phi[i]) * v[i];
  return acc;
}

GridFunction energy_gradient(const GridFunction& phi, const SpaceParams& sp,
                             const Nonlinearity& nl) {
  require_boundary_zero(phi, "energy_gradient");
  WeakDerivative D(phi.grid(), sp.ord);
  std::vector<double> g;
  energy_gradient_into(D, phi.values(), sp, nl, g);
  return GridFunction(phi.grid(), std::move(g));
}

}  // namespace psifrac
