#include "psifrac/nonlinearity.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <utility>

#include "psifrac/errors.hpp"

namespace psifrac {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuadTol = 1e-10;

double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0)
    throw NumericError("primitive quadrature: adaptive refinement did not "
                       "converge to the requested tolerance");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_0_to_t(const std::function<double(double)>& g, double t) {
  if (t == 0.0) return 0.0;
  const double a = 0.0, b = t;
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(g, a, b, fa, fm, fb, whole,
                          kQuadTol * (1.0 + std::abs(whole)), 48);
}

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

}  // namespace

struct Nonlinearity::QuadCache {
  std::mutex mu;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> values;  // (xi, t) bits
};

Nonlinearity::Nonlinearity(std::string id, Fn f, Fn F)
    : id_(std::move(id)), f_(std::move(f)), F_(std::move(F)) {
  if (!f_) throw ParamError("Nonlinearity: reaction term callable is required");
  if (!F_) cache_ = std::make_shared<QuadCache>();
}

Nonlinearity Nonlinearity::power(double lambda, double p) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw ParamError("Nonlinearity::power: exponent must satisfy p > 1");
  return Nonlinearity(
      "power",
      [lambda, p](double, double t) {
        return t == 0.0 ? 0.0 : lambda * std::pow(std::abs(t), p - 2.0) * t;
      },
      [lambda, p](double, double t) {
        return lambda / p * std::pow(std::abs(t), p);
      });
}

Nonlinearity Nonlinearity::linear(double lambda) {
  return Nonlinearity(
      "linear", [lambda](double, double t) { return lambda * t; },
      [lambda](double, double t) { return 0.5 * lambda * t * t; });
}

Nonlinearity Nonlinearity::affine(double c) {
  return Nonlinearity(
      "affine", [c](double, double) { return c; },
      [c](double, double t) { return c * t; });
}

Nonlinearity Nonlinearity::sine(double amplitude) {
  return Nonlinearity(
      "sine", [amplitude](double, double t) { return amplitude * std::sin(t); },
      [amplitude](double, double t) { return amplitude * (1.0 - std::cos(t)); });
}

Nonlinearity Nonlinearity::log_resonant(double c) {
  return Nonlinearity(
      "log_resonant",
      [c](double, double t) {
        if (t == 0.0) return 0.0;
        const double at = std::abs(t), s = t > 0.0 ? 1.0 : -1.0;
        return -c * s * (std::log1p(at) + at / (1.0 + at));
      },
      [c](double, double t) {
        const double at = std::abs(t);
        return -c * at * std::log1p(at);
      });
}

Nonlinearity Nonlinearity::sine_load(double amplitude, double T) {
  if (!(T > 0.0))
    throw ParamError("Nonlinearity::sine_load: horizon T must be positive");
  return Nonlinearity(
      "sine_load",
      [amplitude, T](double xi, double) {
        return amplitude * std::sin(kPi * xi / T);
      },
      [amplitude, T](double xi, double t) {
        return amplitude * std::sin(kPi * xi / T) * t;
      });
}

Nonlinearity Nonlinearity::custom(Fn f, Fn primitive) {
  return Nonlinearity("custom", std::move(f), std::move(primitive));
}

double Nonlinearity::f(double xi, double t) const {
  const double v = f_(xi, t);
  if (!std::isfinite(v))
    throw NumericError("Nonlinearity '" + id_ + "': f(" + std::to_string(xi) +
                       ", " + std::to_string(t) + ") is not finite");
  return v;
}

double Nonlinearity::primitive_F(double xi, double t) const {
  if (F_) {
    const double v = F_(xi, t);
    if (!std::isfinite(v))
      throw NumericError("Nonlinearity '" + id_ + "': F(" + std::to_string(xi) +
                         ", " + std::to_string(t) + ") is not finite");
    return v;
  }
  // Memoize on the exact argument pair; line searches re-evaluate the same
  // nodal values many times.
  const std::pair<std::uint64_t, std::uint64_t> key{bits_of(xi), bits_of(t)};
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
  }
  const double v =
      integrate_0_to_t([this, xi](double s) { return f_(xi, s); }, t);
  if (!std::isfinite(v))
    throw NumericError("Nonlinearity '" + id_ + "': primitive not finite at t = " +
                       std::to_string(t));
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->values.size() > (1u << 20)) cache_->values.clear();
  cache_->values.emplace(key, v);
  return v;
}

double Nonlinearity::theta(double xi, double t) const {
  return primitive_F(xi, t) - t * f(xi, t);
}

}  // namespace psifrac
