#include "psifrac/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <thread>
#include <vector>

#include "psifrac/errors.hpp"

namespace psifrac {

const char* condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::bracket_lower: return "bracket_lower";
    case ConditionId::bracket_upper: return "bracket_upper";
    case ConditionId::theta_negative: return "theta_negative";
    case ConditionId::theta_positive: return "theta_positive";
  }
  return "unknown";
}

const char* audit_name(AuditKind kind) {
  return kind == AuditKind::negative_theta ? "negative_theta" : "positive_theta";
}

void HypothesisConfig::validate() const {
  if (level < 1) throw ParamError("hypothesis config: level must be at least 1");
  if (!(epsilon > 0.0)) throw ParamError("hypothesis config: epsilon must be positive");
  if (!(t_lo > 0.0) || !(t_max > t_lo))
    throw ParamError("hypothesis config: need 0 < t_lo < t_max");
  if (t_samples < 3) throw ParamError("hypothesis config: t_samples must be at least 3");
  if (window_per_decade < 1)
    throw ParamError("hypothesis config: window_per_decade must be at least 1");
}

namespace {

constexpr double kSlack = 1e-10;

double allowance_at(const HypothesisConfig& cfg, double xi) {
  if (!cfg.V) return 0.0;
  const double v = cfg.V(xi);
  if (!std::isfinite(v) || v < 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "hypothesis config: V must be finite and nonnegative (V(%g) = %g)", xi, v);
    throw ParamError(buf);
  }
  return v;
}

void require_integrable_V(const HypothesisConfig& cfg, const GridPtr& grid) {
  if (!cfg.V) return;
  const std::vector<double> tau = psi_trapezoid_weights(*grid);
  const std::vector<double>& xi = grid->nodes();
  double s = 0.0;
  for (int i = 0; i < grid->size(); ++i) s += tau[i] * allowance_at(cfg, xi[i]);
  if (!std::isfinite(s))
    throw ParamError("hypothesis config: quadrature of V diverged");
}

std::vector<double> t_lattice(const HypothesisConfig& cfg) {
  std::vector<double> ts(cfg.t_samples);
  for (int k = 0; k < cfg.t_samples; ++k)
    ts[k] = -cfg.t_max + 2.0 * cfg.t_max * k / (cfg.t_samples - 1);
  return ts;
}

// Positive magnitudes, geometric from t_lo to t_max.
std::vector<double> window_magnitudes(const HypothesisConfig& cfg) {
  const double decades = std::log10(cfg.t_max / cfg.t_lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * cfg.window_per_decade)) + 1);
  std::vector<double> ts(count);
  for (int k = 0; k < count; ++k)
    ts[k] = cfg.t_lo * std::pow(cfg.t_max / cfg.t_lo, static_cast<double>(k) / (count - 1));
  return ts;
}

// Runs fn(i) for every node index, fanning out over a few threads; fn must
// write only to slots owned by node i so the result is order-independent.
template <class PerNode>
void for_nodes(int n, PerNode fn) {
  unsigned hw = std::thread::hardware_concurrency();
  int workers = static_cast<int>(hw == 0 ? 1 : hw);
  workers = std::min(workers, 8);
  if (workers <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> parts;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    parts.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& p : parts) p.get();
}

struct NodeWorst {
  double lower = -1e300;
  double upper = -1e300;
  double lower_t = 0.0;
  double upper_t = 0.0;
};

HypothesisReport bracket_check(const Nonlinearity& nl, const SpaceParams& sp,
                               double coef_lower, double coef_upper, const GridPtr& grid,
                               const HypothesisConfig& cfg, ConditionId id) {
  cfg.validate();
  require_integrable_V(cfg, grid);
  const std::vector<double>& xi = grid->nodes();
  const std::vector<double> ts = t_lattice(cfg);
  const int n = grid->size();

  std::vector<NodeWorst> per(n);
  for_nodes(n, [&](int i) {
    const double x = xi[i];
    const double v = allowance_at(cfg, x);
    NodeWorst w;
    for (double t : ts) {
      const double F = nl.primitive_F(x, t);
      const double amp = std::pow(std::fabs(t), sp.p);
      // Relative defects: |t|^p spans many orders of magnitude over the
      // lattice, and an equality case must pass at every scale.
      const double den_lo = std::max(1.0, coef_lower * amp + v + std::fabs(F));
      const double den_up = std::max(1.0, coef_upper * amp + v + std::fabs(F));
      const double lo_defect = (coef_lower * amp - v - F) / den_lo;
      const double up_defect = (F - coef_upper * amp - v) / den_up;
      if (lo_defect > w.lower) {
        w.lower = lo_defect;
        w.lower_t = t;
      }
      if (up_defect > w.upper) {
        w.upper = up_defect;
        w.upper_t = t;
      }
    }
    per[i] = w;
  });

  HypothesisReport rep;
  rep.condition = id;
  rep.lower_side_worst = -1e300;
  rep.upper_side_worst = -1e300;
  double lower_xi = xi[0], lower_t = 0.0, upper_xi = xi[0], upper_t = 0.0;
  for (int i = 0; i < n; ++i) {
    if (per[i].lower > rep.lower_side_worst) {
      rep.lower_side_worst = per[i].lower;
      lower_xi = xi[i];
      lower_t = per[i].lower_t;
    }
    if (per[i].upper > rep.upper_side_worst) {
      rep.upper_side_worst = per[i].upper;
      upper_xi = xi[i];
      upper_t = per[i].upper_t;
    }
  }
  if (rep.lower_side_worst >= rep.upper_side_worst) {
    rep.worst_violation = rep.lower_side_worst;
    rep.witness_xi = lower_xi;
    rep.witness_t = lower_t;
  } else {
    rep.worst_violation = rep.upper_side_worst;
    rep.witness_xi = upper_xi;
    rep.witness_t = upper_t;
  }
  rep.holds_on_samples = rep.worst_violation <= kSlack;
  rep.asymptotic_ok = true;
  return rep;
}

struct ThetaNodeWorst {
  double growth = -1e300;
  double growth_t = 0.0;
  double estimate = 0.0;
  double estimate_t = 0.0;
};

HypothesisReport theta_check(const Nonlinearity& nl, const GridPtr& grid,
                             const HypothesisConfig& cfg, bool negative_limit) {
  cfg.validate();
  const std::vector<double>& xi = grid->nodes();
  const std::vector<double> ts = t_lattice(cfg);
  const std::vector<double> win = window_magnitudes(cfg);
  const double C = cfg.growth_constant;
  const int n = grid->size();

  std::vector<ThetaNodeWorst> per(n);
  for_nodes(n, [&](int i) {
    const double x = xi[i];
    ThetaNodeWorst w;
    auto growth_defect = [&](double t) {
      const double th = nl.theta(x, t);
      const double bound = C * (std::fabs(t) + 1.0);
      const double den = std::max(1.0, bound + std::fabs(th));
      const double defect = (negative_limit ? th - bound : -bound - th) / den;
      if (defect > w.growth) {
        w.growth = defect;
        w.growth_t = t;
      }
    };
    for (double t : ts) growth_defect(t);
    // Asymptotic estimate of theta/|t| over the sign-symmetric window.
    double est = negative_limit ? -1e300 : 1e300;
    double est_t = 0.0;
    for (double m : win) {
      for (double t : {m, -m}) {
        growth_defect(t);
        const double q = nl.theta(x, t) / m;
        const bool worse = negative_limit ? q > est : q < est;
        if (worse) {
          est = q;
          est_t = t;
        }
      }
    }
    w.estimate = est;
    w.estimate_t = est_t;
    per[i] = w;
  });

  HypothesisReport rep;
  rep.condition = negative_limit ? ConditionId::theta_negative : ConditionId::theta_positive;
  rep.worst_violation = -1e300;
  rep.asymptotic_estimate = negative_limit ? -1e300 : 1e300;
  rep.node_estimates.resize(n);
  for (int i = 0; i < n; ++i) rep.node_estimates[i] = per[i].estimate;
  double est_xi = xi[0], est_t = 0.0;
  for (int i = 0; i < n; ++i) {
    if (per[i].growth > rep.worst_violation) {
      rep.worst_violation = per[i].growth;
      rep.witness_xi = xi[i];
      rep.witness_t = per[i].growth_t;
    }
    const bool worse = negative_limit ? per[i].estimate > rep.asymptotic_estimate
                                      : per[i].estimate < rep.asymptotic_estimate;
    if (worse) {
      rep.asymptotic_estimate = per[i].estimate;
      est_xi = xi[i];
      est_t = per[i].estimate_t;
    }
  }
  rep.asymptotic_ok =
      negative_limit ? rep.asymptotic_estimate < 0.0 : rep.asymptotic_estimate > 0.0;
  // When the growth bound holds but the limit has the wrong sign, the useful
  // witness is the window sample realizing the offending estimate.
  if (rep.worst_violation <= kSlack && !rep.asymptotic_ok) {
    rep.witness_xi = est_xi;
    rep.witness_t = est_t;
  }
  rep.holds_on_samples = rep.worst_violation <= kSlack && rep.asymptotic_ok;
  return rep;
}

}  // namespace

HypothesisReport check_bracket_lower(const Nonlinearity& nl, const SpaceParams& sp,
                                     double lambda_l, double lambda_next,
                                     const GridPtr& grid, const HypothesisConfig& cfg) {
  return bracket_check(nl, sp, lambda_l + cfg.epsilon, lambda_next, grid,
                       cfg, ConditionId::bracket_lower);
}

HypothesisReport check_bracket_upper(const Nonlinearity& nl, const SpaceParams& sp,
                                     double lambda_l, double lambda_next,
                                     const GridPtr& grid, const HypothesisConfig& cfg) {
  return bracket_check(nl, sp, lambda_l, lambda_next - cfg.epsilon, grid,
                       cfg, ConditionId::bracket_upper);
}

HypothesisReport check_theta_negative(const Nonlinearity& nl, const GridPtr& grid,
                                      const HypothesisConfig& cfg) {
  return theta_check(nl, grid, cfg, true);
}

HypothesisReport check_theta_positive(const Nonlinearity& nl, const GridPtr& grid,
                                      const HypothesisConfig& cfg) {
  return theta_check(nl, grid, cfg, false);
}

AuditReport run_audit(const Nonlinearity& nl, const SpaceParams& sp, AuditKind kind,
                          double lambda_l, double lambda_next, const GridPtr& grid,
                          const HypothesisConfig& cfg) {
  cfg.validate();
  if (!(lambda_l + cfg.epsilon < lambda_next)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "hypothesis audit: need lambda_l + epsilon < lambda_next "
                  "(got %.6g + %.6g vs %.6g)",
                  lambda_l, cfg.epsilon, lambda_next);
    throw ConfigError(buf);
  }

  AuditReport out;
  out.kind = kind;
  out.lambda_l = lambda_l;
  out.lambda_next = lambda_next;
  if (kind == AuditKind::negative_theta) {
    out.bracket = check_bracket_lower(nl, sp, lambda_l, lambda_next, grid, cfg);
    out.theta = check_theta_negative(nl, grid, cfg);
  } else {
    out.bracket = check_bracket_upper(nl, sp, lambda_l, lambda_next, grid, cfg);
    out.theta = check_theta_positive(nl, grid, cfg);
  }
  out.hypotheses_pass = out.bracket.holds_on_samples && out.theta.holds_on_samples;
  out.conclusion = out.hypotheses_pass
                       ? "hypotheses hold on every sample: a critical point is expected; "
                         "run a solve to search for it"
                       : "hypotheses fail on the sample set: see the recorded witness";
  return out;
}

}  // namespace psifrac
