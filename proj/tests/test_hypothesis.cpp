#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "psifrac/errors.hpp"
#include "psifrac/hypothesis.hpp"

using namespace psifrac;

namespace {

GridPtr unit_grid(int n) {
  return build_grid(1.0, n, PsiMap::identity(0.0, 1.0), SpacingRule::uniform_in_psi);
}

HypothesisConfig base_cfg(double eps) {
  HypothesisConfig c;
  c.epsilon = eps;
  return c;
}

constexpr double kSlack = 1e-10;

}  // namespace

TEST_CASE("midpoint power primitive passes both bracket placements") {
  // F = 3 t^2 sits strictly between (2 + 1) t^2 and 4 t^2 (equality below)
  const GridPtr g = unit_grid(33);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::power(6.0, 2.0);  // F = 3 t^2
  const HypothesisReport lo =
      check_bracket_lower(nl, sp, 2.0, 4.0, g, base_cfg(1.0));
  CHECK(lo.holds_on_samples);
  CHECK(lo.worst_violation <= kSlack);
  const HypothesisReport up =
      check_bracket_upper(nl, sp, 2.0, 4.0, g, base_cfg(1.0));
  CHECK(up.holds_on_samples);
}

TEST_CASE("equality at the bracket edge passes through the relative slack") {
  // F = (lambda_l + eps) |t|^p exactly: lower side is tight everywhere
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::power(6.0, 2.0);  // F = 3 t^2
  const HypothesisReport lo =
      check_bracket_lower(nl, sp, 2.0, 3.0, g, base_cfg(1.0));
  CHECK(lo.holds_on_samples);  // 3 t^2 >= (2 + 1) t^2 with equality
  CHECK(std::fabs(lo.worst_violation) <= kSlack);
}

TEST_CASE("a primitive below the gapped line fails with a witness") {
  // F = 1.25 t^2 < (2 + 1) t^2: fails, and the witness pins the worst sample
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::linear(2.5);  // F = 1.25 t^2
  const HypothesisReport lo =
      check_bracket_lower(nl, sp, 2.0, 4.0, g, base_cfg(1.0));
  CHECK_FALSE(lo.holds_on_samples);
  CHECK(lo.worst_violation > 0.1);
  // recompute the relative defect at the reported witness
  const double t = lo.witness_t, xi = lo.witness_xi;
  const double need = 3.0 * t * t;  // (lambda_l + eps) |t|^p, V = 0
  const double have = nl.primitive_F(xi, t);
  const double den = std::max(1.0, std::fabs(need) + std::fabs(have));
  CHECK((need - have) / den ==
        doctest::Approx(lo.worst_violation).epsilon(1e-12));
}

TEST_CASE("the allowance term absorbs a bounded offset") {
  // F = 3 t^2 - 0.4: fails the pure lower bracket near t = 0, passes with
  // a constant allowance V = 0.5
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::custom(
      [](double, double t) { return 6.0 * t; },
      [](double, double t) { return 3.0 * t * t - 0.4; });
  HypothesisConfig cfg = base_cfg(1.0);
  const HypothesisReport bare = check_bracket_lower(nl, sp, 2.0, 4.0, g, cfg);
  CHECK_FALSE(bare.holds_on_samples);
  cfg.V = [](double) { return 0.5; };
  const HypothesisReport padded = check_bracket_lower(nl, sp, 2.0, 4.0, g, cfg);
  CHECK(padded.holds_on_samples);
}

TEST_CASE("power primitive has strictly negative theta drift") {
  const GridPtr g = unit_grid(17);
  HypothesisConfig cfg = base_cfg(1.0);
  const Nonlinearity nl = Nonlinearity::power(6.0, 2.0);
  const HypothesisReport rep = check_theta_negative(nl, g, cfg);
  CHECK(rep.holds_on_samples);
  CHECK(rep.asymptotic_ok);
  // theta = -3 t^2, so theta/|t| -> -inf; the window estimate is very negative
  CHECK(rep.asymptotic_estimate < -1.0);
  CHECK(static_cast<int>(rep.node_estimates.size()) == g->size());
  for (double v : rep.node_estimates) CHECK(v < 0.0);
}

TEST_CASE("constructed positive-drift entry passes the positive theta check") {
  const GridPtr g = unit_grid(17);
  HypothesisConfig cfg = base_cfg(1.0);
  cfg.growth_constant = 2.0;
  const Nonlinearity nl = Nonlinearity::log_resonant(1.0);  // theta ~ +|t|
  const HypothesisReport rep = check_theta_positive(nl, g, cfg);
  CHECK(rep.holds_on_samples);
  CHECK(rep.asymptotic_ok);
  CHECK(rep.asymptotic_estimate == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("linear reaction fails the positive drift with a reproducible witness") {
  // f = t: theta = -t^2/2, so |theta| breaks the C(|t|+1) growth bound
  const GridPtr g = unit_grid(17);
  HypothesisConfig cfg = base_cfg(0.5);
  const Nonlinearity nl = Nonlinearity::linear(1.0);
  const HypothesisReport a = check_theta_positive(nl, g, cfg);
  const HypothesisReport b = check_theta_positive(nl, g, cfg);
  CHECK_FALSE(a.holds_on_samples);
  CHECK(a.worst_violation > 0.1);
  // bitwise reproducible witness
  CHECK(a.witness_t == b.witness_t);
  CHECK(a.witness_xi == b.witness_xi);
  CHECK(a.worst_violation == b.worst_violation);
  // the worst sample sits at the edge of the lattice where t^2 dominates
  CHECK(std::fabs(a.witness_t) == doctest::Approx(cfg.t_max).epsilon(1e-12));
}

TEST_CASE("growth can hold while the asymptotic sign fails") {
  // theta = +|t| passes growth but has the wrong sign for the negative check
  const GridPtr g = unit_grid(17);
  HypothesisConfig cfg = base_cfg(1.0);
  cfg.growth_constant = 2.0;
  const Nonlinearity nl = Nonlinearity::log_resonant(1.0);
  const HypothesisReport rep = check_theta_negative(nl, g, cfg);
  CHECK_FALSE(rep.holds_on_samples);
  CHECK_FALSE(rep.asymptotic_ok);
  CHECK(rep.asymptotic_estimate > 0.0);
}

TEST_CASE("composite audit wires the matching pair and conclusion") {
  const GridPtr g = unit_grid(33);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::power(6.0, 2.0);
  HypothesisConfig cfg = base_cfg(1.0);
  const AuditReport rep =
      run_audit(nl, sp, AuditKind::negative_theta, 2.0, 4.0, g, cfg);
  CHECK(rep.hypotheses_pass);
  CHECK(rep.bracket.condition == ConditionId::bracket_lower);
  CHECK(rep.theta.condition == ConditionId::theta_negative);
  CHECK(rep.lambda_l == 2.0);
  CHECK(rep.lambda_next == 4.0);
  CHECK_FALSE(rep.conclusion.empty());

  const AuditReport neg =
      run_audit(Nonlinearity::linear(1.0), sp, AuditKind::positive_theta,
                    2.0, 4.0, g, cfg);
  CHECK_FALSE(neg.hypotheses_pass);
  CHECK(neg.bracket.condition == ConditionId::bracket_upper);
  CHECK(neg.theta.condition == ConditionId::theta_positive);
}

TEST_CASE("the epsilon gap must leave room inside the eigenvalue pair") {
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const Nonlinearity nl = Nonlinearity::power(6.0, 2.0);
  HypothesisConfig cfg = base_cfg(2.0);  // 2 + 2 = 4, no room
  CHECK_THROWS_AS(
      (void)run_audit(nl, sp, AuditKind::negative_theta, 2.0, 4.0, g, cfg),
      ConfigError);
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = base_cfg(1.0);
  cfg.t_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("sample verdict matches the reported worst violation") {
  const GridPtr g = unit_grid(17);
  const SpaceParams sp(2.0, FractionalOrder(1.0, 1.0), 0.0);
  const HypothesisConfig cfg = base_cfg(1.0);
  const std::vector<Nonlinearity> cat = {
      Nonlinearity::power(6.0, 2.0), Nonlinearity::linear(2.5),
      Nonlinearity::sine(1.0), Nonlinearity::affine(1.0)};
  for (const Nonlinearity& nl : cat) {
    CAPTURE(nl.id());
    const HypothesisReport lo = check_bracket_lower(nl, sp, 2.0, 4.0, g, cfg);
    CHECK(lo.holds_on_samples == (lo.worst_violation <= kSlack));
    const HypothesisReport th = check_theta_negative(nl, g, cfg);
    CHECK(th.holds_on_samples ==
          ((th.worst_violation <= kSlack) && th.asymptotic_ok));
  }
}
