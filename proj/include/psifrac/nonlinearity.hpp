#pragma once

#include <functional>
#include <memory>
#include <string>

namespace psifrac {

// Reaction term f(xi, t) together with its primitive F(xi, t) = int_0^t f.
// Catalog constructors carry closed-form primitives; a custom f without one
// falls back to adaptive Simpson quadrature (tolerance 1e-10, memoized).
//
// theta(xi, t) = F(xi, t) - t f(xi, t) is the defect that the resonance
// conditions of the hypothesis checker constrain: for the pure power entry
// it equals (1/p - 1) lambda |t|^p, strictly negative growth, while the
// log_resonant entry is built to give theta ~ +|t|.
class Nonlinearity {
 public:
  using Fn = std::function<double(double, double)>;

  // f = lambda |t|^{p-2} t, F = lambda |t|^p / p
  static Nonlinearity power(double lambda, double p);
  // f = lambda t, F = lambda t^2 / 2
  static Nonlinearity linear(double lambda);
  // f = c, F = c t
  static Nonlinearity affine(double c);
  // f = a sin(t): oscillating theta, fails both one-sided resonance checks
  static Nonlinearity sine(double amplitude);
  // F = -c |t| log(1+|t|): theta = c t^2/(1+|t|) ~ +c|t|, the constructed
  // positive-drift entry for the resonance checks
  static Nonlinearity log_resonant(double c);
  // t-independent load f(xi, t) = a sin(pi xi / T), F = t f
  static Nonlinearity sine_load(double amplitude, double T);
  static Nonlinearity custom(Fn f, Fn primitive = nullptr);

  double f(double xi, double t) const;
  double primitive_F(double xi, double t) const;
  double theta(double xi, double t) const;

  const std::string& id() const { return id_; }
  bool has_closed_primitive() const { return static_cast<bool>(F_); }

 private:
  Nonlinearity(std::string id, Fn f, Fn F);

  std::string id_;
  Fn f_;
  Fn F_;  // empty => quadrature fallback
  struct QuadCache;
  std::shared_ptr<QuadCache> cache_;
};

// Thin evaluable view of the resonance defect of a nonlinearity.
struct ThetaFunction {
  const Nonlinearity* nl;
  double operator()(double xi, double t) const { return nl->theta(xi, t); }
};

}  // namespace psifrac
