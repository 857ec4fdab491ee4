#pragma once

#include <functional>
#include <memory>
#include <string>

namespace psifrac {

enum class PsiKind { identity, power, custom };

// Strictly increasing C^1 coordinate map psi on a closed interval [a, b].
// All weighted integrals and derivatives in this library are taken in the
// psi-coordinate, so the map is validated once here and then only its
// values (not its pointwise slope) are needed on grids: quadrature weights
// are built from psi-differences, which keeps maps with a singular slope
// at an endpoint (power maps with rho < 1) usable.
class PsiMap {
 public:
  using Fn = std::function<double(double)>;

  static PsiMap identity(double a, double b);
  static PsiMap power(double rho, double a, double b);  // psi(xi) = xi^rho, a >= 0
  // inverse may be empty; invert() then falls back to monotone bisection.
  static PsiMap custom(Fn psi, Fn dpsi, Fn inverse, double a, double b);

  double eval(double xi) const;   // psi(xi)
  double slope(double xi) const;  // psi'(xi); throws if non-finite at xi
  double invert(double u) const;  // psi^{-1}(u) for u in [psi(a), psi(b)]

  double a() const { return a_; }
  double b() const { return b_; }
  PsiKind kind() const { return kind_; }
  double rho() const { return rho_; }  // meaningful for PsiKind::power only
  std::string describe() const;

 private:
  PsiMap(PsiKind kind, double rho, Fn psi, Fn dpsi, Fn inverse, double a, double b);
  void validate() const;
  void check_domain(double xi) const;

  PsiKind kind_;
  double rho_ = 0.0;
  Fn psi_, dpsi_, inverse_;
  double a_, b_;
};

}  // namespace psifrac
