#include "psifrac/psi_map.hpp"

#include <cmath>

#include "psifrac/errors.hpp"

namespace psifrac {

PsiMap::PsiMap(PsiKind kind, double rho, Fn psi, Fn dpsi, Fn inverse, double a,
               double b)
    : kind_(kind),
      rho_(rho),
      psi_(std::move(psi)),
      dpsi_(std::move(dpsi)),
      inverse_(std::move(inverse)),
      a_(a),
      b_(b) {
  validate();
}

PsiMap PsiMap::identity(double a, double b) {
  return PsiMap(
      PsiKind::identity, 1.0, [](double xi) { return xi; },
      [](double) { return 1.0; }, [](double u) { return u; }, a, b);
}

PsiMap PsiMap::power(double rho, double a, double b) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw InvalidMapError("PsiMap::power: exponent rho must be positive, got " +
                          std::to_string(rho));
  if (a < 0.0)
    throw InvalidMapError("PsiMap::power: left endpoint must be >= 0 for xi^rho");
  return PsiMap(
      PsiKind::power, rho, [rho](double xi) { return std::pow(xi, rho); },
      [rho](double xi) { return rho * std::pow(xi, rho - 1.0); },
      [rho](double u) { return std::pow(u, 1.0 / rho); }, a, b);
}

PsiMap PsiMap::custom(Fn psi, Fn dpsi, Fn inverse, double a, double b) {
  if (!psi || !dpsi)
    throw InvalidMapError("PsiMap::custom: psi and dpsi callables are required");
  return PsiMap(PsiKind::custom, 0.0, std::move(psi), std::move(dpsi),
                std::move(inverse), a, b);
}

void PsiMap::validate() const {
  if (!(a_ < b_) || !std::isfinite(a_) || !std::isfinite(b_))
    throw InvalidMapError("PsiMap: domain endpoints must be finite with a < b");
  // Endpoint values must be finite: this is what excludes psi = ln(xi) on an
  // interval touching 0 (the weighted space degenerates, psi(0) = -inf).
  const double pa = psi_(a_), pb = psi_(b_);
  if (!std::isfinite(pa) || !std::isfinite(pb))
    throw InvalidMapError(
        "PsiMap: psi must be finite at the interval endpoints; maps that "
        "diverge there (e.g. ln at 0) are outside the supported weighted "
        "spaces");
  if (!(pa < pb))
    throw InvalidMapError("PsiMap: psi(a) < psi(b) required (strictly increasing)");
  // Sample strict monotonicity and a positive finite slope away from the
  // endpoints. Endpoint slopes may be singular (power maps with rho < 1);
  // nothing downstream evaluates the slope there.
  const int m = 33;
  double prev = pa;
  for (int i = 1; i <= m; ++i) {
    const double xi = a_ + (b_ - a_) * static_cast<double>(i) / (m + 1);
    const double v = psi_(xi);
    if (!std::isfinite(v) || !(v > prev))
      throw InvalidMapError("PsiMap: psi must be finite and strictly increasing "
                            "(violated near xi = " + std::to_string(xi) + ")");
    const double s = dpsi_(xi);
    if (!std::isfinite(s) || !(s > 0.0))
      throw InvalidMapError("PsiMap: psi' must be positive and finite on the "
                            "interior (violated near xi = " + std::to_string(xi) +
                            ")");
    prev = v;
  }
}

void PsiMap::check_domain(double xi) const {
  if (!(xi >= a_ && xi <= b_))
    throw DomainError("PsiMap: evaluation point " + std::to_string(xi) +
                      " outside [" + std::to_string(a_) + ", " +
                      std::to_string(b_) + "]");
}

double PsiMap::eval(double xi) const {
  check_domain(xi);
  const double v = psi_(xi);
  if (!std::isfinite(v))
    throw InvalidMapError("PsiMap: psi(" + std::to_string(xi) + ") is not finite");
  return v;
}

double PsiMap::slope(double xi) const {
  check_domain(xi);
  const double s = dpsi_(xi);
  if (!std::isfinite(s) || !(s > 0.0))
    throw InvalidMapError("PsiMap: psi'(" + std::to_string(xi) +
                          ") is not positive and finite (singular endpoint "
                          "slopes are not evaluable pointwise)");
  return s;
}

double PsiMap::invert(double u) const {
  const double pa = psi_(a_), pb = psi_(b_);
  const double tol = 1e-14 * (1.0 + std::abs(pb - pa));
  if (u < pa - tol || u > pb + tol)
    throw DomainError("PsiMap::invert: value " + std::to_string(u) +
                      " outside [psi(a), psi(b)]");
  if (inverse_) {
    double xi = inverse_(u);
    // Clamp rounding spill at the ends so grid nodes stay inside [a, b].
    if (xi < a_) xi = a_;
    if (xi > b_) xi = b_;
    return xi;
  }
  // Monotone bisection fallback.
  double lo = a_, hi = b_;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi_(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string PsiMap::describe() const {
  switch (kind_) {
    case PsiKind::identity:
      return "identity";
    case PsiKind::power:
      return "power(rho=" + std::to_string(rho_) + ")";
    default:
      return "custom";
  }
}

}  // namespace psifrac
