#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "psifrac/eigen.hpp"
#include "psifrac/errors.hpp"

using namespace psifrac;

namespace {

GridPtr line_grid(double T, int n) {
  return build_grid(T, n, PsiMap::identity(0.0, T), SpacingRule::uniform_in_psi);
}

SolveOptions eig_opts() {
  SolveOptions o;
  o.max_iter = 60000;
  o.grad_tol = 1e-10;
  return o;
}

constexpr double kClassicalOrd = 1.0;

}  // namespace

TEST_CASE("classical first eigenvalue on (0, pi)") {
  // -u'' = lambda u: lambda_1 = 1, eigenfunction sin(x)
  const GridPtr g = line_grid(oracle::kPi, 129);
  const SpaceParams sp(2.0, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const EigenEstimate e = lambda_1(sp, g, eig_opts());
  CHECK(e.converged);
  CHECK(e.lambda == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(e.level == 1);
  CHECK_FALSE(e.upper_bound);
  // eigenfunction is one-signed in the interior and Lp-normalized
  const GridFunction phi(g, std::vector<double>(e.eigenfunction));
  CHECK(oracle::one_signed(e.eigenfunction));
  CHECK(lp_norm(phi, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  // profile matches sin up to sign and the normalization constant
  const double c = std::sqrt(2.0 / oracle::kPi);  // ||sin||_2 on (0, pi)
  double err = 0.0;
  const double sgn = e.eigenfunction[g->size() / 2] > 0 ? 1.0 : -1.0;
  for (int i = 0; i < g->size(); ++i)
    err = std::max(err, std::fabs(sgn * e.eigenfunction[i] -
                                  c * std::sin(g->nodes()[i])));
  CHECK(err < 1e-3);
}

TEST_CASE("classical second eigenvalue on (0, pi)") {
  // lambda_2 = 4, eigenfunction sin(2x) with exactly one interior sign change
  const GridPtr g = line_grid(oracle::kPi, 129);
  const SpaceParams sp(2.0, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const EigenEstimate e = lambda_2_estimate(sp, g, eig_opts());
  CHECK(e.converged);
  CHECK(e.lambda == doctest::Approx(4.0).epsilon(2e-3));
  CHECK(e.level == 2);
  CHECK_FALSE(e.upper_bound);  // quadratic path closes its residual
  CHECK(oracle::sign_changes(e.eigenfunction) == 1);
}

TEST_CASE("p = 3 first eigenvalue against the one-dimensional closed form") {
  const double p = 3.0, T = 1.0;
  const GridPtr g = line_grid(T, 257);
  const SpaceParams sp(p, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const EigenEstimate e = lambda_1(sp, g, eig_opts());
  CHECK(e.converged);
  CHECK(e.lambda ==
        doctest::Approx(oracle::lambda1_classical(p, T)).epsilon(1e-2));
  CHECK(oracle::one_signed(e.eigenfunction));
}

TEST_CASE("first eigenvalue scales like T^{-p} under dilation") {
  const double p = 3.0;
  const SpaceParams sp(p, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const EigenEstimate a = lambda_1(sp, line_grid(1.0, 129), eig_opts());
  const EigenEstimate b = lambda_1(sp, line_grid(2.0, 129), eig_opts());
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(b.lambda == doctest::Approx(a.lambda * std::pow(2.0, -p)).epsilon(1e-3));
}

TEST_CASE("Rayleigh quotient is scale invariant and minimized by the ground state") {
  const GridPtr g = line_grid(oracle::kPi, 129);
  const SpaceParams sp(2.0, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const GridFunction s1 =
      GridFunction::sample(g, [](double x) { return std::sin(x); });
  const double r1 = rayleigh_quotient(s1, sp);
  GridFunction scaled = s1;
  for (double& v : scaled.values()) v *= -7.25;
  CHECK(rayleigh_quotient(scaled, sp) == doctest::Approx(r1).epsilon(1e-12));
  // any admissible competitor sits at or above the minimum
  const GridFunction s2 =
      GridFunction::sample(g, [](double x) { return std::sin(2.0 * x); });
  const GridFunction bump = GridFunction::sample(
      g, [](double x) { return x * (oracle::kPi - x) * (1.0 + 0.3 * x); });
  CHECK(rayleigh_quotient(s2, sp) > r1);
  CHECK(rayleigh_quotient(bump, sp) >= r1 * (1.0 - 1e-12));
  CHECK_THROWS_AS((void)rayleigh_quotient(GridFunction::zeros(g), sp),
                  DegenerateError);
}

TEST_CASE("residual of a converged estimate closes below ten gradient tolerances") {
  const GridPtr g = line_grid(oracle::kPi, 129);
  const SpaceParams sp(2.0, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  SolveOptions o = eig_opts();
  o.grad_tol = 1e-9;
  const EigenEstimate e1 = lambda_1(sp, g, o);
  REQUIRE(e1.converged);
  CHECK(e1.residual <= 10.0 * o.grad_tol);
  const GridFunction phi(g, std::vector<double>(e1.eigenfunction));
  CHECK(eigen_residual(phi, e1.lambda, sp) ==
        doctest::Approx(e1.residual).epsilon(1e-10).scale(1.0));
  const EigenEstimate e2 = lambda_2_estimate(sp, g, o);
  REQUIRE(e2.converged);
  CHECK(e2.residual <= 10.0 * o.grad_tol);
}

TEST_CASE("fractional orders give an ordered, converged pair") {
  const GridPtr g = line_grid(1.0, 129);
  const SpaceParams sp(2.0, FractionalOrder(0.7, 0.5), 0.0);
  const EigenEstimate e1 = lambda_1(sp, g, eig_opts());
  const EigenEstimate e2 = lambda_2_estimate(sp, g, eig_opts());
  CHECK(e1.converged);
  CHECK(e2.converged);
  CHECK(e1.lambda > 0.0);
  CHECK(e1.lambda < e2.lambda);
  CHECK(oracle::one_signed(e1.eigenfunction));
}

TEST_CASE("away from p = 2 the second value is flagged as an upper bound") {
  const GridPtr g = line_grid(1.0, 65);
  const SpaceParams sp(3.0, FractionalOrder(kClassicalOrd, 1.0), 0.0);
  const EigenEstimate e2 = lambda_2_estimate(sp, g, eig_opts());
  CHECK(e2.upper_bound);
  CHECK(e2.level == 2);
  const EigenEstimate e1 = lambda_1(sp, g, eig_opts());
  CHECK(e1.lambda < e2.lambda);
}
