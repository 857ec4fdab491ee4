#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psifrac/grid.hpp"
#include "psifrac/nonlinearity.hpp"
#include "psifrac/spaces.hpp"

namespace psifrac {

// The four audited inequalities: a two-sided bracket on the primitive F
// against the eigenvalue pair (with the epsilon gap placed below or above),
// and a linear growth bound on theta = F - t f together with a strict
// asymptotic sign of theta/|t|.
enum class ConditionId { bracket_lower, bracket_upper, theta_negative, theta_positive };

// The two composite audits: gap-below bracket paired with theta negative at
// infinity, or gap-above bracket paired with theta positive at infinity.
enum class AuditKind { negative_theta, positive_theta };

const char* condition_name(ConditionId id);
const char* audit_name(AuditKind kind);

struct HypothesisConfig {
  int level = 1;            // index of the lower eigenvalue in the bracket
  double epsilon = 0.0;     // gap width, required positive
  std::function<double(double)> V;  // xi -> nonnegative allowance; empty = 0
  double growth_constant = 1.0;     // C of the |t|+1 growth bounds
  double t_max = 1e6;
  int t_samples = 201;      // uniform lattice over [-t_max, t_max]
  double t_lo = 1e2;        // lower edge of the asymptotic window
  int window_per_decade = 25;

  void validate() const;
};

struct HypothesisReport {
  ConditionId condition = ConditionId::bracket_lower;
  // Largest signed RELATIVE defect over the sample lattice (each defect is
  // divided by the magnitude of the terms entering it, floored at 1, so an
  // equality case passes at every |t| scale); <= 1e-10 counts as holding.
  // For the theta conditions the strict asymptotic sign is tracked separately
  // in asymptotic_ok, and holds_on_samples requires both.
  bool holds_on_samples = false;
  double worst_violation = 0.0;
  double witness_xi = 0.0;
  double witness_t = 0.0;
  // Worst-node estimate of lim theta/|t|: max over the window for the
  // negative condition, min for the positive one.
  double asymptotic_estimate = 0.0;
  bool asymptotic_ok = true;
  // Bracket checks: per-side worsts (violation positive).
  double lower_side_worst = 0.0;
  double upper_side_worst = 0.0;
  // Theta checks: per-node asymptotic estimate of theta/|t| (empty for
  // bracket checks), aligned with the grid nodes.
  std::vector<double> node_estimates;
};

HypothesisReport check_bracket_lower(const Nonlinearity& nl, const SpaceParams& sp,
                                     double lambda_l, double lambda_next,
                                     const GridPtr& grid, const HypothesisConfig& cfg);
HypothesisReport check_bracket_upper(const Nonlinearity& nl, const SpaceParams& sp,
                                     double lambda_l, double lambda_next,
                                     const GridPtr& grid, const HypothesisConfig& cfg);
HypothesisReport check_theta_negative(const Nonlinearity& nl, const GridPtr& grid,
                                      const HypothesisConfig& cfg);
HypothesisReport check_theta_positive(const Nonlinearity& nl, const GridPtr& grid,
                                      const HypothesisConfig& cfg);

struct AuditReport {
  AuditKind kind = AuditKind::negative_theta;
  HypothesisReport bracket;
  HypothesisReport theta;
  bool hypotheses_pass = false;
  double lambda_l = 0.0;
  double lambda_next = 0.0;
  std::string conclusion;  // what a pass licenses the caller to test next
};

// Runs the matching bracket + theta pair. Requires lambda_l + epsilon <
// lambda_next before any sampling (ConfigError otherwise).
AuditReport run_audit(const Nonlinearity& nl, const SpaceParams& sp, AuditKind kind,
                          double lambda_l, double lambda_next, const GridPtr& grid,
                          const HypothesisConfig& cfg);

}  // namespace psifrac
