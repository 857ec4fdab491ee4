#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "psifrac/energy.hpp"
#include "psifrac/errors.hpp"
#include "psifrac/nonlinearity.hpp"
#include "psifrac/spaces.hpp"

using namespace psifrac;

namespace {

GridPtr unit_grid(int n) {
  return build_grid(1.0, n, PsiMap::identity(0.0, 1.0), SpacingRule::uniform_in_psi);
}

GridFunction interior_noise(const GridPtr& g, std::uint64_t seed, double amp) {
  oracle::Rng rng(seed);
  std::vector<double> v(g->size(), 0.0);
  for (int i = 1; i + 1 < g->size(); ++i) v[i] = rng.uniform(-amp, amp);
  return GridFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("catalog entries satisfy F' = f and theta = F - t f") {
  const std::vector<Nonlinearity> cat = {
      Nonlinearity::power(1.3, 2.5), Nonlinearity::linear(0.7),
      Nonlinearity::affine(2.0),      Nonlinearity::sine(1.1),
      Nonlinearity::log_resonant(0.9), Nonlinearity::sine_load(1.5, 2.0)};
  oracle::Rng rng(42);
  for (const Nonlinearity& nl : cat) {
    CAPTURE(nl.id());
    for (int k = 0; k < 20; ++k) {
      const double xi = rng.uniform(0.0, 2.0);
      const double t = rng.uniform(-3.0, 3.0);
      // derivative of the primitive recovers f (central difference)
      const double h = 1e-5;
      const double fd =
          (nl.primitive_F(xi, t + h) - nl.primitive_F(xi, t - h)) / (2.0 * h);
      CHECK(fd == doctest::Approx(nl.f(xi, t)).epsilon(1e-5).scale(1.0));
      CHECK(nl.theta(xi, t) ==
            doctest::Approx(nl.primitive_F(xi, t) - t * nl.f(xi, t))
                .epsilon(1e-12)
                .scale(1.0));
      // F(., 0) = 0 by construction
      CHECK(nl.primitive_F(xi, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("power entry has the closed-form resonance defect") {
  const double lambda = 1.7, p = 2.5;
  const Nonlinearity nl = Nonlinearity::power(lambda, p);
  CHECK(nl.has_closed_primitive());
  oracle::Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const double t = rng.uniform(-4.0, 4.0);
    const double want = (1.0 / p - 1.0) * lambda * std::pow(std::fabs(t), p);
    CHECK(nl.theta(0.3, t) == doctest::Approx(want).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("log_resonant defect grows like +c|t|") {
  const Nonlinearity nl = Nonlinearity::log_resonant(0.8);
  for (double t : {1e3, -1e3, 1e5, -1e5}) {
    const double est = nl.theta(0.0, t) / std::fabs(t);
    CHECK(est == doctest::Approx(0.8).epsilon(1e-2));
  }
}

TEST_CASE("custom entry integrates its primitive numerically") {
  // f = 3 t^2  =>  F = t^3
  const Nonlinearity nl =
      Nonlinearity::custom([](double, double t) { return 3.0 * t * t; });
  CHECK_FALSE(nl.has_closed_primitive());
  for (double t : {0.0, 0.5, -0.5, 1.0, -2.0, 3.0}) {
    CHECK(nl.primitive_F(0.0, t) ==
          doctest::Approx(t * t * t).epsilon(1e-9).scale(1.0));
  }
  // memoized: repeated evaluation is bit-identical
  const double first = nl.primitive_F(0.0, 1.75);
  CHECK(nl.primitive_F(0.0, 1.75) == first);
  // supplying the primitive switches off the quadrature
  const Nonlinearity closed = Nonlinearity::custom(
      [](double, double t) { return 3.0 * t * t; },
      [](double, double t) { return t * t * t; });
  CHECK(closed.has_closed_primitive());
  CHECK(closed.primitive_F(0.0, -2.0) == -8.0);
}

TEST_CASE("classical kinetic energy of a sine profile") {
  // p = 2, alpha = 1: E_kin = (1/2) int_0^1 (pi cos(pi x))^2 = pi^2/4
  const GridPtr g = unit_grid(513);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const GridFunction phi =
      GridFunction::sample(g, [](double x) { return std::sin(oracle::kPi * x); });
  const Nonlinearity zero = Nonlinearity::custom(
      [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  const EnergyBreakdown e = energy(phi, sp, zero);
  CHECK(e.kinetic ==
        doctest::Approx(oracle::kPi * oracle::kPi / 4.0).epsilon(1e-4));
  CHECK(e.potential == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(e.total == doctest::Approx(e.kinetic - e.potential).epsilon(1e-14));
}

TEST_CASE("potential term integrates the primitive along the profile") {
  // f = c constant: potential = c int_0^1 phi. For phi = x(1-x): c/6.
  const GridPtr g = unit_grid(257);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const GridFunction phi =
      GridFunction::sample(g, [](double x) { return x * (1.0 - x); });
  const EnergyBreakdown e = energy(phi, sp, Nonlinearity::affine(3.0));
  CHECK(e.potential == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("gradient is the exact derivative of the discrete energy") {
  const GridPtr g = unit_grid(65);
  for (double p : {2.0, 3.0}) {
    for (double alpha : {0.75, 1.0}) {
      const SpaceParams sp(p, FractionalOrder(alpha, 0.5), 0.0);
      const Nonlinearity nl = Nonlinearity::linear(1.2);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const GridFunction phi = interior_noise(g, seed, 0.8);
        const GridFunction dir = interior_noise(g, seed + 50, 1.0);
        const GridFunction grad = energy_gradient(phi, sp, nl);
        double gdot = 0.0;
        for (int i = 0; i < g->size(); ++i) gdot += grad[i] * dir[i];
        // central difference of the scalar map  s -> E(phi + s dir)
        const double h = 1e-6;
        GridFunction up = phi, dn = phi;
        for (int i = 0; i < g->size(); ++i) {
          up[i] += h * dir[i];
          dn[i] -= h * dir[i];
        }
        const double fd =
            (energy(up, sp, nl).total - energy(dn, sp, nl).total) / (2.0 * h);
        CHECK(gdot == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("gradient entries equal the weak residual against nodal hats") {
  const GridPtr g = unit_grid(33);
  const SpaceParams sp(2.5, FractionalOrder(0.8, 0.5), 0.0);
  const Nonlinearity nl = Nonlinearity::power(1.5, 2.5);
  const GridFunction phi = interior_noise(g, 3, 0.5);
  const GridFunction grad = energy_gradient(phi, sp, nl);
  CHECK(grad[0] == 0.0);
  CHECK(grad[g->size() - 1] == 0.0);
  for (int j = 1; j + 1 < g->size(); j += 5) {
    GridFunction hat = GridFunction::zeros(g);
    hat[j] = 1.0;
    CHECK(grad[j] ==
          doctest::Approx(weak_residual(phi, hat, sp, nl)).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("energy rejects profiles that do not vanish at the boundary") {
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(0.75, 0.5), 0.0);
  GridFunction bad = GridFunction::zeros(g);
  bad[0] = 1.0;
  CHECK_THROWS_AS((void)energy(bad, sp, Nonlinearity::affine(1.0)), BoundaryError);
}

TEST_CASE("prebuilt operator forms agree with the grid-function forms") {
  const GridPtr g = unit_grid(49);
  const SpaceParams sp(3.0, FractionalOrder(0.7, 0.5), 0.0);
  const Nonlinearity nl = Nonlinearity::affine(0.9);
  const WeakDerivative D(g, sp.ord);
  const GridFunction phi = interior_noise(g, 11, 0.6);
  double kin = 0.0, pot = 0.0;
  const double val = energy_value(D, phi.values(), sp, nl, &kin, &pot);
  const EnergyBreakdown e = energy(phi, sp, nl);
  CHECK(val == doctest::Approx(e.total).epsilon(1e-14).scale(1.0));
  CHECK(kin == doctest::Approx(e.kinetic).epsilon(1e-14).scale(1.0));
  CHECK(pot == doctest::Approx(e.potential).epsilon(1e-14).scale(1.0));
  std::vector<double> gr;
  energy_gradient_into(D, phi.values(), sp, nl, gr);
  const GridFunction grad = energy_gradient(phi, sp, nl);
  for (int i = 0; i < g->size(); ++i)
    CHECK(gr[i] == doctest::Approx(grad[i]).epsilon(1e-14).scale(1.0));
}
