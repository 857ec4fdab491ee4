#include "psifrac/spaces.hpp"

#include <cmath>
#include <string>

#include "psifrac/errors.hpp"

namespace psifrac {

SpaceParams::SpaceParams(double p_, FractionalOrder ord_, double eps_)
    : p(p_), ord(ord_), eps(eps_) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw ParamError("SpaceParams: exponent p must satisfy 1 < p < inf, got " +
                     std::to_string(p));
  if (!std::isfinite(eps) || eps < 0.0)
    throw ParamError("SpaceParams: regularization eps must be >= 0");
  if (!ord.classical() && !(ord.alpha > 1.0 / p))
    throw ParamError("SpaceParams: order constraint alpha > 1/p violated "
                     "(alpha = " + std::to_string(ord.alpha) +
                     ", p = " + std::to_string(p) + ")");
}

double SpaceParams::power_map(double x) const {
  if (eps > 0.0) return std::pow(x * x + eps * eps, 0.5 * (p - 2.0)) * x;
  if (x == 0.0) return 0.0;  // continuation by 0, needed for p < 2
  return std::pow(std::abs(x), p - 2.0) * x;
}

double lp_norm(const GridFunction& f, double p) {
  if (!std::isfinite(p) || !(p >= 1.0))
    throw ParamError("lp_norm: exponent must satisfy p >= 1");
  const auto tau = psi_trapezoid_weights(*f.grid());
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i)
    acc += tau[i] * std::pow(std::abs(f[i]), p);
  return std::pow(acc, 1.0 / p);
}

double hspace_seminorm(const GridFunction& phi, const SpaceParams& sp) {
  require_boundary_zero(phi, "hspace_seminorm");
  return lp_norm(hilfer_deriv_left(sp.ord, phi), sp.p);
}

double hspace_norm(const GridFunction& phi, const SpaceParams& sp) {
  require_boundary_zero(phi, "hspace_norm");
  return lp_norm(phi, sp.p) + lp_norm(hilfer_deriv_left(sp.ord, phi), sp.p);
}

bool is_boundary_zero(const GridFunction& phi) {
  const double scale = phi.max_abs();
  const double tol = kBoundaryTol * scale;
  return std::abs(phi[0]) <= tol && std::abs(phi[phi.size() - 1]) <= tol;
}

void require_boundary_zero(const GridFunction& phi, const char* where) {
  if (!is_boundary_zero(phi))
    throw BoundaryError(std::string(where) + ": function must vanish at the " +
                        "interval ends; got phi(0) = " + std::to_string(phi[0]) +
                        ", phi(T) = " + std::to_string(phi[phi.size() - 1]) +
                        " against max|phi| = " + std::to_string(phi.max_abs()));
}

GridFunction project_boundary(const GridFunction& phi) {
  require_boundary_zero(phi, "project_boundary");
  GridFunction out = phi;
  out[0] = 0.0;
  out[out.size() - 1] = 0.0;
  return out;
}

}  // namespace psifrac
