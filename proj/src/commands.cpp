#include "psifrac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "psifrac/config.hpp"
#include "psifrac/eigen.hpp"
#include "psifrac/energy.hpp"
#include "psifrac/errors.hpp"
#include "psifrac/frac_ops.hpp"
#include "psifrac/gamma.hpp"
#include "psifrac/hypothesis.hpp"
#include "psifrac/io.hpp"
#include "psifrac/solve.hpp"

namespace psifrac {

namespace {

const double kPi = 3.14159265358979323846;

// Anything thrown while turning config values into objects is an invalid
// configuration as far as the exit-code contract is concerned.
template <class F>
auto config_phase(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

PsiMap build_map(const Config& cfg, double T) {
  const std::string kind = cfg.get_string("psi.kind", "identity");
  const double rho = cfg.get_real("psi.rho", 2.0);
  if (kind == "identity") return PsiMap::identity(0.0, T);
  if (kind == "power") return PsiMap::power(rho, 0.0, T);
  throw ConfigError("psi.kind: expected identity or power, got `" + kind + "`");
}

SpacingRule build_rule(const Config& cfg) {
  const std::string s = cfg.get_string("grid.rule", "psi");
  if (s == "xi") return SpacingRule::uniform_in_xi;
  if (s == "psi") return SpacingRule::uniform_in_psi;
  throw ConfigError("grid.rule: expected xi or psi, got `" + s + "`");
}

SpaceParams build_space(const Config& cfg) {
  const double alpha = cfg.get_real("problem.alpha", 1.0);
  const double beta = cfg.get_real("problem.beta", 1.0);
  const double p = cfg.get_real("problem.p", 2.0);
  const double eps = cfg.get_real("solver.regularization_eps", 0.0);
  return SpaceParams(p, FractionalOrder(alpha, beta), eps);
}

Nonlinearity build_nl(const Config& cfg, double p) {
  const std::string id = cfg.get_string("nonlinearity.id", "affine");
  const double lambda = cfg.get_real("nonlinearity.lambda", 1.0);
  const double c = cfg.get_real("nonlinearity.c", 1.0);
  if (id == "affine") return Nonlinearity::affine(c);
  if (id == "linear") return Nonlinearity::linear(lambda);
  if (id == "power") return Nonlinearity::power(lambda, p);
  if (id == "custom")
    throw ConfigError("nonlinearity.id: custom entries are built through the library API, "
                      "not the config file");
  throw ConfigError("nonlinearity.id: expected power, linear, affine, or custom, got `" +
                    id + "`");
}

SolveOptions build_opts(const Config& cfg) {
  SolveOptions o;
  o.max_iter = cfg.get_int("solver.max_iter", 200000);
  o.grad_tol = cfg.get_real("solver.grad_tol", 1e-8);
  const std::string rule = cfg.get_string("solver.step_rule", "armijo");
  if (rule == "armijo")
    o.step_rule = StepRule::armijo_backtracking;
  else if (rule == "fixed")
    o.step_rule = StepRule::fixed;
  else
    throw ConfigError("solver.step_rule: expected armijo or fixed, got `" + rule + "`");
  o.initial_step = cfg.get_real("solver.initial_step", 1.0);
  o.armijo_c = cfg.get_real("solver.armijo_c", 1e-4);
  o.armijo_shrink = cfg.get_real("solver.armijo_shrink", 0.5);
  o.max_backtracks = cfg.get_int("solver.max_backtracks", 60);
  o.diagonal_preconditioner = cfg.get_bool("solver.precondition", false);
  o.validate();
  return o;
}

GridFunction build_init(const Config& cfg, const GridPtr& grid, std::uint64_t seed) {
  const std::string kind = cfg.get_string("solver.init", "parabola");
  const double amp = cfg.get_real("solver.init_amplitude", 1.0);
  const int modes = cfg.get_int("solver.init_modes", 6);
  const int mode = cfg.get_int("solver.init_mode", 1);
  if (kind == "parabola") return parabola_init(grid, amp);
  if (kind == "fourier") {
    GridFunction g = fourier_init(grid, seed, modes);
    for (double& v : g.values()) v *= amp;
    return g;
  }
  if (kind == "sine") {
    if (mode < 1) throw ConfigError("solver.init_mode: must be at least 1");
    const std::vector<double>& u = grid->psi_nodes();
    const double ua = u.front(), span = u.back() - u.front();
    std::vector<double> v(grid->size(), 0.0);
    for (int i = 1; i + 1 < grid->size(); ++i)
      v[i] = amp * std::sin(mode * kPi * (u[i] - ua) / span);
    return GridFunction(grid, std::move(v));
  }
  throw ConfigError("solver.init: expected parabola, fourier, or sine, got `" + kind + "`");
}

std::string strip_suffix(std::string s, const std::string& suf) {
  if (s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
    s.erase(s.size() - suf.size());
  return s;
}

std::string out_base(const Config& cfg, const CliOptions& cli, const char* def_label) {
  const std::string dir = cfg.get_string("run.out_dir", ".");
  const std::string label = cfg.get_string("run.label", def_label);
  std::string path = cli.out_path.empty() ? dir + "/" + label : cli.out_path;
  path = strip_suffix(path, ".csv");
  path = strip_suffix(path, ".report");
  return path;
}

std::uint64_t pick_seed(const Config& cfg, const CliOptions& cli) {
  const std::uint64_t cfg_seed = cfg.get_u64("run.seed", 0);
  return cli.has_seed ? cli.seed : cfg_seed;
}

void describe_problem(ReportWriter& rep, const Config& cfg, const GridPtr& grid,
                      const SpaceParams& sp, std::uint64_t seed) {
  rep.add("n", grid->size());
  rep.add("T", grid->nodes().back());
  rep.add("psi", cfg.get_string("psi.kind", "identity"));
  rep.add("rule", cfg.get_string("grid.rule", "psi"));
  rep.add("alpha", sp.ord.alpha);
  rep.add("beta", sp.ord.beta);
  rep.add("p", sp.p);
  rep.add("eps", sp.eps);
  rep.add("seed", static_cast<long long>(seed));
}

// Piecewise-linear evaluation of (xs, ys) at x; xs strictly increasing.
double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  std::size_t lo = 0, hi = xs.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (xs[mid] <= x ? lo : hi) = mid;
  }
  const double w = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
  return ys[lo] + w * (ys[lo + 1] - ys[lo]);
}

// Transplant a solution onto a finer grid as a warm start.
GridFunction interp_to(const GridPtr& to, const std::vector<double>& from_x,
                       const std::vector<double>& from_v) {
  std::vector<double> v(to->size());
  for (int i = 0; i < to->size(); ++i) v[i] = interp_linear(from_x, from_v, to->nodes()[i]);
  v.front() = 0.0;
  v.back() = 0.0;
  return GridFunction(to, std::move(v));
}

}  // namespace

// ---------------------------------------------------------------------------

int run_solve(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  double T = 1.0;
  GridPtr grid;
  std::optional<SpaceParams> sp;
  std::optional<Nonlinearity> nl;
  SolveOptions opts;
  std::uint64_t seed = 0;
  int starts = 1;
  std::string base;
  std::optional<GridFunction> init0;

  config_phase([&] {
    T = cfg.get_real("grid.T", 1.0);
    const int n = cfg.get_int("grid.n", 257);
    const PsiMap map = build_map(cfg, T);
    grid = build_grid(T, n, map, build_rule(cfg));
    sp = build_space(cfg);
    nl.emplace(build_nl(cfg, sp->p));
    opts = build_opts(cfg);
    seed = pick_seed(cfg, cli);
    starts = cli.multistart > 0 ? cli.multistart : cfg.get_int("solver.multistart", 1);
    if (starts < 1 || starts > 64)
      throw ConfigError("solver.multistart: expected a count in [1, 64]");
    init0.emplace(build_init(cfg, grid, seed));
    base = out_base(cfg, cli, "solve");
    cfg.finish();
    return 0;
  });

  std::vector<GridFunction> inits;
  inits.reserve(starts);
  inits.push_back(*init0);
  for (int j = 1; j < starts; ++j) inits.push_back(fourier_init(grid, seed + j));

  std::vector<SolveReport> reports(starts);
  if (starts == 1) {
    reports[0] = find_critical_point(*sp, *nl, inits[0], opts);
  } else {
    std::vector<std::future<SolveReport>> futs;
    futs.reserve(starts);
    for (int j = 0; j < starts; ++j)
      futs.push_back(std::async(std::launch::async, [&, j] {
        return find_critical_point(*sp, *nl, inits[j], opts);
      }));
    for (int j = 0; j < starts; ++j) reports[j] = futs[j].get();
  }

  int sel = 0;
  for (int j = 1; j < starts; ++j) {
    const SolveReport& a = reports[j];
    const SolveReport& b = reports[sel];
    const bool better = a.converged != b.converged
                            ? a.converged
                            : (a.converged ? a.critical_level < b.critical_level
                                           : a.final_grad_norm < b.final_grad_norm);
    if (better) sel = j;
  }
  const SolveReport& best = reports[sel];

  CsvWriter sol({"xi", "psi_xi", "phi"});
  for (int i = 0; i < grid->size(); ++i)
    sol.add_row(std::vector<double>{grid->nodes()[i], grid->psi_nodes()[i], best.solution[i]});
  write_text_file(base + ".csv", sol.text());

  CsvWriter trace({"iter", "energy", "grad_norm", "rho", "theta_avg", "step"});
  for (std::size_t k = 0; k < best.energy_trace.size(); ++k)
    trace.add_row(std::vector<double>{static_cast<double>(k), best.energy_trace[k],
                                      best.grad_norm_trace[k], best.rho_trace[k],
                                      best.theta_avg_trace[k],
                                      k < best.step_trace.size() ? best.step_trace[k] : 0.0});
  write_text_file(base + ".trace.csv", trace.text());

  const PsDiagnostics ps = ps_diagnostics(best, *sp, *nl, grid);

  ReportWriter rep;
  rep.add("command", std::string("solve"));
  describe_problem(rep, cfg, grid, *sp, seed);
  rep.add("nonlinearity", nl->id());
  rep.add("multistart", starts);
  rep.add("selected_start", sel);
  rep.add("converged", best.converged);
  rep.add("iterations", best.iterations);
  rep.add("critical_level_c", best.critical_level);
  rep.add("final_grad_norm", best.final_grad_norm);
  rep.add("stop_reason", best.stop_reason);
  rep.add("energy_kinetic", best.final_energy.kinetic);
  rep.add("energy_potential", best.final_energy.potential);
  rep.add("ps_gap_p", ps.ps_gap_p);
  rep.add("ps_gap_p2", ps.ps_gap_p2);
  rep.add("ps_rho_bounded", ps.rho_bounded);
  rep.add("ps_theta_trend_to_zero", ps.theta_trend_to_zero);
  for (int j = 0; j < starts; ++j) {
    const std::string pre = "start_" + std::to_string(j) + ".";
    rep.add(pre + "converged", reports[j].converged);
    rep.add(pre + "critical_level_c", reports[j].critical_level);
    rep.add(pre + "final_grad_norm", reports[j].final_grad_norm);
    rep.add(pre + "iterations", reports[j].iterations);
  }
  write_text_file(base + ".report", rep.text());

  if (cli.verbose)
    std::printf("solve: converged=%d iterations=%d level=%.17g grad=%.17g -> %s.csv\n",
                best.converged ? 1 : 0, best.iterations, best.critical_level,
                best.final_grad_norm, base.c_str());
  return best.converged ? 0 : 1;
}

// ---------------------------------------------------------------------------

namespace {

struct SweepTuple {
  double alpha, beta, p;
};

std::vector<SweepTuple> parse_sweep(const std::string& text, const SpaceParams& sp) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError("sweep: expected `param=start:end:step`, got `" + text + "`");
  const std::string param = text.substr(0, eq);
  if (param != "alpha" && param != "beta" && param != "p")
    throw ConfigError("sweep: parameter must be alpha, beta, or p, got `" + param + "`");
  double a = 0, b = 0, s = 0;
  if (std::sscanf(text.c_str() + eq + 1, "%lf:%lf:%lf", &a, &b, &s) != 3)
    throw ConfigError("sweep: expected `param=start:end:step`, got `" + text + "`");
  if (!(s > 0.0) || b < a) throw ConfigError("sweep: need start <= end and step > 0");
  if ((b - a) / s > 1000.0) throw ConfigError("sweep: more than 1000 points requested");
  std::vector<SweepTuple> out;
  for (double v = a; v <= b + 1e-12; v += s) {
    SweepTuple t{sp.ord.alpha, sp.ord.beta, sp.p};
    if (param == "alpha") t.alpha = v;
    if (param == "beta") t.beta = v;
    if (param == "p") t.p = v;
    out.push_back(t);
  }
  return out;
}

}  // namespace

int run_eigen(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  double T = 1.0;
  GridPtr grid;
  std::optional<SpaceParams> sp;
  SolveOptions opts;
  std::uint64_t seed = 0;
  int level = 1;
  std::string base, sweep_text;
  std::vector<SweepTuple> tuples;
  std::vector<SpaceParams> sweep_params;

  config_phase([&] {
    T = cfg.get_real("grid.T", 1.0);
    const int n = cfg.get_int("grid.n", 257);
    const PsiMap map = build_map(cfg, T);
    grid = build_grid(T, n, map, build_rule(cfg));
    sp = build_space(cfg);
    opts = build_opts(cfg);
    seed = pick_seed(cfg, cli);
    level = cli.level > 0 ? cli.level : cfg.get_int("eigen.level", 1);
    if (level != 1 && level != 2)
      throw ConfigError("eigen.level: only levels 1 and 2 are supported");
    sweep_text = !cli.sweep.empty() ? cli.sweep : cfg.get_string("eigen.sweep", "");
    if (!sweep_text.empty()) {
      tuples = parse_sweep(sweep_text, *sp);
      for (const SweepTuple& t : tuples)
        sweep_params.emplace_back(t.p, FractionalOrder(t.alpha, t.beta), sp->eps);
    }
    base = out_base(cfg, cli, "eigen");
    cfg.finish();
    return 0;
  });

  if (!tuples.empty()) {
    std::vector<std::future<EigenEstimate>> futs;
    futs.reserve(tuples.size());
    for (std::size_t k = 0; k < tuples.size(); ++k)
      futs.push_back(std::async(std::launch::async, [&, k] {
        return level == 1 ? lambda_1(sweep_params[k], grid, opts)
                          : lambda_2_estimate(sweep_params[k], grid, opts);
      }));
    CsvWriter csv({"alpha", "beta", "p", "lambda", "residual", "converged"});
    bool all_ok = true;
    double prev = 0.0;
    bool monotone = true;
    for (std::size_t k = 0; k < tuples.size(); ++k) {
      const EigenEstimate est = futs[k].get();
      const bool ok = est.converged || est.upper_bound;
      all_ok = all_ok && ok;
      if (k > 0 && est.lambda < prev) monotone = false;
      prev = est.lambda;
      csv.add_row(std::vector<std::string>{fmt_real(tuples[k].alpha), fmt_real(tuples[k].beta),
                                           fmt_real(tuples[k].p), fmt_real(est.lambda),
                                           fmt_real(est.residual),
                                           est.converged ? "true" : "false"});
    }
    write_text_file(base + ".csv", csv.text());
    ReportWriter rep;
    rep.add("command", std::string("eigen"));
    describe_problem(rep, cfg, grid, *sp, seed);
    rep.add("level", level);
    rep.add("sweep", sweep_text);
    rep.add("points", static_cast<long long>(tuples.size()));
    rep.add("all_converged", all_ok);
    rep.add("lambda_monotone_in_sweep", monotone);
    write_text_file(base + ".report", rep.text());
    if (cli.verbose)
      std::printf("eigen sweep: %zu points, all_converged=%d -> %s.csv\n", tuples.size(),
                  all_ok ? 1 : 0, base.c_str());
    return all_ok ? 0 : 1;
  }

  const EigenEstimate est =
      level == 1 ? lambda_1(*sp, grid, opts) : lambda_2_estimate(*sp, grid, opts);

  CsvWriter csv({"xi", "psi_xi", "phi"});
  for (int i = 0; i < grid->size(); ++i)
    csv.add_row(
        std::vector<double>{grid->nodes()[i], grid->psi_nodes()[i], est.eigenfunction[i]});
  write_text_file(base + ".csv", csv.text());

  ReportWriter rep;
  rep.add("command", std::string("eigen"));
  describe_problem(rep, cfg, grid, *sp, seed);
  rep.add("level", est.level);
  rep.add("lambda", est.lambda);
  rep.add("residual", est.residual);
  rep.add("iterations", est.iterations);
  rep.add("converged", est.converged);
  rep.add("upper_bound", est.upper_bound);
  rep.add("grad_tol", opts.grad_tol);
  write_text_file(base + ".report", rep.text());

  if (cli.verbose)
    std::printf("eigen: level=%d lambda=%.17g residual=%.17g converged=%d -> %s.csv\n",
                est.level, est.lambda, est.residual, est.converged ? 1 : 0, base.c_str());
  return (est.converged || est.upper_bound) ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_check(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  double T = 1.0;
  GridPtr grid;
  std::optional<SpaceParams> sp;
  std::optional<Nonlinearity> nl;
  SolveOptions opts;
  std::uint64_t seed = 0;
  HypothesisConfig hcfg;
  AuditKind kind = AuditKind::negative_theta;
  bool external_lambdas = false;
  double lambda_l = 0, lambda_next = 0;
  std::string base;

  config_phase([&] {
    T = cfg.get_real("grid.T", 1.0);
    const int n = cfg.get_int("grid.n", 257);
    const PsiMap map = build_map(cfg, T);
    grid = build_grid(T, n, map, build_rule(cfg));
    sp = build_space(cfg);
    nl.emplace(build_nl(cfg, sp->p));
    opts = build_opts(cfg);
    seed = pick_seed(cfg, cli);

    hcfg.level = cfg.get_int("hypothesis.level", 1);
    hcfg.epsilon = cfg.require_real("hypothesis.epsilon");
    hcfg.growth_constant = cfg.get_real("hypothesis.growth_constant", 1.0);
    hcfg.t_max = cfg.get_real("hypothesis.t_max", 1e6);
    hcfg.t_samples = cfg.get_int("hypothesis.t_samples", 201);
    hcfg.t_lo = cfg.get_real("hypothesis.t_lo", 1e2);
    hcfg.window_per_decade = cfg.get_int("hypothesis.window_per_decade", 25);
    if (cfg.has("hypothesis.v_const")) {
      const double v = cfg.get_real("hypothesis.v_const", 0.0);
      if (!(v >= 0.0)) throw ConfigError("hypothesis.v_const: must be nonnegative");
      hcfg.V = [v](double) { return v; };
    }
    hcfg.validate();

    std::string a = !cli.audit.empty() ? cli.audit
                                       : cfg.get_string("hypothesis.audit", "negative-theta");
    for (char& c : a)
      if (c == '-') c = '_';
    if (a == "negative_theta")
      kind = AuditKind::negative_theta;
    else if (a == "positive_theta")
      kind = AuditKind::positive_theta;
    else
      throw ConfigError("hypothesis.audit: expected negative-theta or positive-theta");

    const bool has_l = cfg.has("hypothesis.lambda_l");
    const bool has_n = cfg.has("hypothesis.lambda_next");
    if (has_l != has_n)
      throw ConfigError(
          "hypothesis.lambda_l and hypothesis.lambda_next must be given together");
    external_lambdas = has_l && has_n;
    if (external_lambdas) {
      lambda_l = cfg.get_real("hypothesis.lambda_l", 0.0);
      lambda_next = cfg.get_real("hypothesis.lambda_next", 0.0);
      if (!(lambda_l > 0.0) || !(lambda_next > lambda_l))
        throw ConfigError("hypothesis: need 0 < lambda_l < lambda_next");
    }
    base = out_base(cfg, cli, "check");
    cfg.finish();
    return 0;
  });

  int eigen_iters_1 = 0, eigen_iters_2 = 0;
  if (!external_lambdas) {
    const EigenEstimate e1 = lambda_1(*sp, grid, opts);
    if (!e1.converged)
      throw NumericError("hypothesis audit: the first eigenvalue estimate did not converge");
    const EigenEstimate e2 = lambda_2_estimate(*sp, grid, opts);
    if (!(e2.converged || e2.upper_bound))
      throw NumericError("hypothesis audit: the second eigenvalue estimate failed");
    lambda_l = e1.lambda;
    lambda_next = e2.lambda;
    eigen_iters_1 = e1.iterations;
    eigen_iters_2 = e2.iterations;
  }

  const AuditReport audit = run_audit(*nl, *sp, kind, lambda_l, lambda_next, grid, hcfg);

  ReportWriter rep;
  rep.add("command", std::string("check"));
  describe_problem(rep, cfg, grid, *sp, seed);
  rep.add("nonlinearity", nl->id());
  rep.add("audit", audit_name(audit.kind));
  rep.add("hypotheses_pass", audit.hypotheses_pass);
  rep.add("lambda_l", audit.lambda_l);
  rep.add("lambda_next", audit.lambda_next);
  rep.add("lambda_source", std::string(external_lambdas ? "external" : "computed"));
  if (!external_lambdas) {
    rep.add("eigen_iterations_1", eigen_iters_1);
    rep.add("eigen_iterations_2", eigen_iters_2);
  }
  rep.add("epsilon", hcfg.epsilon);
  rep.add("growth_constant", hcfg.growth_constant);
  rep.add("t_max", hcfg.t_max);
  rep.add("t_lo", hcfg.t_lo);

  const HypothesisReport* parts[2] = {&audit.bracket, &audit.theta};
  const char* names[2] = {"bracket", "theta"};
  for (int k = 0; k < 2; ++k) {
    const std::string pre = std::string(names[k]) + ".";
    const HypothesisReport& h = *parts[k];
    rep.add(pre + "condition", std::string(condition_name(h.condition)));
    rep.add(pre + "holds_on_samples", h.holds_on_samples);
    rep.add(pre + "worst_violation", h.worst_violation);
    rep.add(pre + "witness_xi", h.witness_xi);
    rep.add(pre + "witness_t", h.witness_t);
    if (h.condition == ConditionId::bracket_lower ||
        h.condition == ConditionId::bracket_upper) {
      rep.add(pre + "lower_side_worst", h.lower_side_worst);
      rep.add(pre + "upper_side_worst", h.upper_side_worst);
    } else {
      rep.add(pre + "asymptotic_estimate", h.asymptotic_estimate);
      rep.add(pre + "asymptotic_ok", h.asymptotic_ok);
    }
  }
  rep.add("conclusion", audit.conclusion);
  write_text_file(base + ".report", rep.text());

  if (!audit.theta.node_estimates.empty()) {
    CsvWriter est({"xi", "theta_over_t_estimate"});
    for (int i = 0; i < grid->size(); ++i)
      est.add_row(std::vector<double>{grid->nodes()[i], audit.theta.node_estimates[i]});
    write_text_file(base + ".csv", est.text());
  }

  if (cli.verbose)
    std::printf("check: %s pass=%d worst_bracket=%.17g worst_theta=%.17g -> %s.report\n",
                audit_name(audit.kind), audit.hypotheses_pass ? 1 : 0,
                audit.bracket.worst_violation, audit.theta.worst_violation, base.c_str());
  return audit.hypotheses_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_converge(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  double T = 1.0;
  std::optional<PsiMap> map;
  SpacingRule rule = SpacingRule::uniform_in_xi;
  std::optional<SpaceParams> sp;
  SolveOptions opts;
  std::string case_name, base;
  double delta = 1.5, target = 0.0, quad_alpha = 0.5;

  config_phase([&] {
    T = cfg.get_real("grid.T", 1.0);
    cfg.get_int("grid.n", 0);  // the study fixes its own sizes
    map = build_map(cfg, T);
    rule = build_rule(cfg);
    case_name = cfg.require_string("converge.case");
    // Default integrand power keeps the study in the smooth regime where the
    // product rule attains its second-order rate; smaller deltas expose the
    // honest endpoint-limited rate h^(delta+alpha-1) instead.
    delta = cfg.get_real("converge.delta", 2.5);
    if (case_name == "power_rule") {
      // Pure quadrature study; no function space is involved.
      quad_alpha = cfg.get_real("problem.alpha", 0.5);
      if (!(quad_alpha > 0.0 && quad_alpha < 1.0))
        throw ConfigError("converge.case power_rule: problem.alpha must lie in (0, 1)");
      target = cfg.get_real("converge.target_order", 1.8);
      if (!(delta > 0.0)) throw ConfigError("converge.delta: must be positive");
    } else if (case_name == "classical_solve") {
      const double p = cfg.get_real("problem.p", 2.0);
      cfg.get_real("problem.alpha", 1.0);
      cfg.get_real("problem.beta", 1.0);
      cfg.get_real("solver.regularization_eps", 0.0);
      if (p != 2.0)
        throw ConfigError("converge.case classical_solve: the oracle requires p = 2");
      sp = SpaceParams(2.0, FractionalOrder(1.0, 1.0), 0.0);
      target = cfg.get_real("converge.target_order", 1.5);
    } else if (case_name == "fractional_self") {
      const double alpha = cfg.get_real("problem.alpha", 0.7);
      const double beta = cfg.get_real("problem.beta", 0.5);
      cfg.get_real("problem.p", 2.0);
      cfg.get_real("solver.regularization_eps", 0.0);
      sp = SpaceParams(2.0, FractionalOrder(alpha, beta), 0.0);
      if (sp->ord.classical())
        throw ConfigError("converge.case fractional_self: needs alpha < 1");
      target = cfg.get_real("converge.target_order", 0.0);
    } else {
      throw ConfigError("converge.case: expected power_rule, classical_solve, or "
                        "fractional_self, got `" + case_name + "`");
    }
    opts = build_opts(cfg);
    base = out_base(cfg, cli, "converge");
    cfg.finish();
    return 0;
  });

  const int levels[4] = {64, 128, 256, 512};
  std::vector<double> errors;

  if (case_name == "power_rule") {
    const double alpha = quad_alpha;
    for (int n : levels) {
      GridPtr g = build_grid(T, n, *map, rule);
      const double u0 = g->psi_nodes().front();
      std::vector<double> fv(n), ref(n);
      for (int i = 0; i < n; ++i) {
        const double u = g->psi_nodes()[i] - u0;
        fv[i] = std::pow(u, delta - 1.0);
        ref[i] = gamma_fn(delta) / gamma_fn(delta + alpha) * std::pow(u, delta + alpha - 1.0);
      }
      if (delta < 1.0) fv[0] = 0.0;  // kernel-weighted limit, measure zero
      const GridFunction num = frac_integral_left(alpha, GridFunction(g, fv));
      double emax = 0.0, rmax = 0.0;
      for (int i = 0; i < n; ++i) {
        emax = std::max(emax, std::fabs(num[i] - ref[i]));
        rmax = std::max(rmax, std::fabs(ref[i]));
      }
      errors.push_back(emax / rmax);
    }
  } else if (case_name == "classical_solve") {
    const Nonlinearity load = Nonlinearity::sine_load(1.0, T);
    const double scale = T * T / (kPi * kPi);
    std::vector<double> prev_x, prev_v;
    for (int n : levels) {
      GridPtr g = build_grid(T, n, *map, rule);
      const GridFunction init =
          prev_v.empty() ? parabola_init(g, scale) : interp_to(g, prev_x, prev_v);
      SolveReport r = find_critical_point(*sp, load, init, opts);
      double emax = 0.0;
      for (int i = 0; i < n; ++i) {
        const double exact = scale * std::sin(kPi * g->nodes()[i] / T);
        emax = std::max(emax, std::fabs(r.solution[i] - exact));
      }
      errors.push_back(emax / scale);
      prev_x = g->nodes();
      prev_v = std::move(r.solution);
    }
  } else {  // fractional_self: coarse solves measured against a fine reference
    const Nonlinearity load = Nonlinearity::affine(1.0);
    std::vector<std::vector<double>> sols;
    std::vector<GridPtr> grids;
    std::vector<double> prev_x, prev_v;
    for (int n : levels) {
      GridPtr g = build_grid(T, n, *map, rule);
      const GridFunction init =
          prev_v.empty() ? parabola_init(g, 0.1) : interp_to(g, prev_x, prev_v);
      SolveReport r = find_critical_point(*sp, load, init, opts);
      grids.push_back(g);
      prev_x = g->nodes();
      prev_v = r.solution;
      sols.push_back(std::move(r.solution));
    }
    const std::vector<double>& ref_x = grids.back()->nodes();
    const std::vector<double>& ref_v = sols.back();
    double ref_max = 0.0;
    for (double v : ref_v) ref_max = std::max(ref_max, std::fabs(v));
    for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
      double emax = 0.0;
      for (int i = 0; i < grids[k]->size(); ++i) {
        const double at = interp_linear(ref_x, ref_v, grids[k]->nodes()[i]);
        emax = std::max(emax, std::fabs(sols[k][i] - at));
      }
      errors.push_back(emax / (ref_max > 0.0 ? ref_max : 1.0));
    }
  }

  CsvWriter csv({"n", "error", "order"});
  std::vector<double> orders;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double order =
        k == 0 ? std::nan("") : std::log2(errors[k - 1] / errors[k]);
    if (k > 0) orders.push_back(order);
    csv.add_row(std::vector<double>{static_cast<double>(levels[k]), errors[k], order});
  }
  write_text_file(base + ".csv", csv.text());

  bool monotone = true;
  for (std::size_t k = 1; k < errors.size(); ++k)
    if (!(errors[k] < errors[k - 1])) monotone = false;
  const double p_obs = orders.empty() ? 0.0 : orders.back();
  // At the machine floor the order estimate is noise; the study has passed.
  const bool at_floor = errors.back() < 1e-12;
  const bool passed = at_floor || (case_name == "fractional_self"
                                       ? monotone
                                       : (p_obs >= target && monotone));

  ReportWriter rep;
  rep.add("command", std::string("converge"));
  rep.add("case", case_name);
  rep.add("T", T);
  rep.add("levels", std::string("64,128,256,512"));
  for (std::size_t k = 0; k < errors.size(); ++k)
    rep.add("error_" + std::to_string(levels[k]), errors[k]);
  rep.add("p_obs", p_obs);
  rep.add("target_order", target);
  rep.add("monotone", monotone);
  rep.add("passed", passed);
  write_text_file(base + ".report", rep.text());

  if (cli.verbose)
    std::printf("converge %s: p_obs=%.17g target=%.17g monotone=%d -> %s.csv\n",
                case_name.c_str(), p_obs, target, monotone ? 1 : 0, base.c_str());
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_ibp_test(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  double T = 1.0;
  std::optional<PsiMap> map;
  SpacingRule rule = SpacingRule::uniform_in_xi;
  double alpha = 0.5, beta = 0.5, tol = 1e-3, tol_deriv = 1e-2;
  std::vector<int> levels;
  std::string base;

  config_phase([&] {
    T = cfg.get_real("grid.T", 1.0);
    map = build_map(cfg, T);
    rule = build_rule(cfg);
    alpha = cfg.get_real("problem.alpha", 0.5);
    beta = cfg.get_real("problem.beta", 0.5);
    if (!(alpha > 0.0 && alpha < 1.0))
      throw ConfigError("ibp test: problem.alpha must lie in (0, 1)");
    FractionalOrder(alpha, beta);  // validates beta
    tol = cfg.get_real("ibp.tol", 1e-3);
    tol_deriv = cfg.get_real("ibp.tol_deriv", 1e-2);
    if (!(tol > 0.0) || !(tol_deriv > 0.0))
      throw ConfigError("ibp test: tolerances must be positive");
    const std::string lv = cfg.get_string("ibp.levels", "64,128,256,512");
    std::size_t pos = 0;
    while (pos < lv.size()) {
      std::size_t next = lv.find(',', pos);
      if (next == std::string::npos) next = lv.size();
      const std::string tok = lv.substr(pos, next - pos);
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0' || v < 8)
        throw ConfigError("ibp.levels: expected a comma list of sizes >= 8");
      levels.push_back(static_cast<int>(v));
      pos = next + 1;
    }
    if (levels.size() > 16) throw ConfigError("ibp.levels: at most 16 sizes");
    base = out_base(cfg, cli, "ibp");
    cfg.finish();
    return 0;
  });

  if (levels.size() < 2) {
    ReportWriter rep;
    rep.add("command", std::string("ibp-test"));
    rep.add("passed", false);
    rep.add("reason", std::string("insufficient refinement levels (need at least 2)"));
    write_text_file(base + ".report", rep.text());
    if (cli.verbose) std::printf("ibp-test: insufficient levels -> exit 1\n");
    return 1;
  }

  const FractionalOrder ord(alpha, beta);
  // Pair 0 vanishes at both ends; pair 1 deliberately does not, so the
  // derivative identity without its boundary products keeps a persistent
  // defect equal to the boundary gap.
  struct PairDef {
    const char* name;
    double (*phi)(double);
    double (*phi2)(double);
  };
  static const PairDef pairs[2] = {
      {"boundary_zero", [](double t) { return std::sin(kPi * t); },
       [](double t) { return t * (1.0 - t); }},
      {"boundary_loaded", [](double t) { return t; }, [](double t) { return 1.0 - t; }},
  };

  CsvWriter csv({"n", "pair", "integral_defect", "deriv_defect", "deriv_defect_no_boundary",
                 "boundary_gap"});
  double d_int[2][16] = {}, d_full[2][16] = {}, d_nb[2][16] = {}, gap[2][16] = {};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    GridPtr g = build_grid(T, levels[k], *map, rule);
    const double u0 = g->psi_nodes().front();
    const double span = g->psi_nodes().back() - u0;
    for (int q = 0; q < 2; ++q) {
      std::vector<double> a(g->size()), b(g->size());
      for (int i = 0; i < g->size(); ++i) {
        const double t = (g->psi_nodes()[i] - u0) / span;
        a[i] = pairs[q].phi(t);
        b[i] = pairs[q].phi2(t);
      }
      GridFunction phi(g, std::move(a)), phi2(g, std::move(b));
      d_int[q][k] = ibp_integral_defect(alpha, phi, phi2);
      const HilferIbpBreakdown parts = ibp_hilfer_parts(ord, phi, phi2);
      d_full[q][k] = parts.defect;
      d_nb[q][k] = parts.lhs - parts.rhs_integral;
      gap[q][k] = parts.boundary_a - parts.boundary_b;
      csv.add_row(std::vector<std::string>{
          fmt_int(levels[k]), pairs[q].name, fmt_real(d_int[q][k]), fmt_real(d_full[q][k]),
          fmt_real(d_nb[q][k]), fmt_real(gap[q][k])});
    }
  }
  write_text_file(base + ".csv", csv.text());

  // An analytic value for the surviving boundary product of the loaded pair:
  // only a zero-order (identity) stage lets an end value through, so the gap
  // vanishes whenever both auxiliary orders are positive.
  const double span = [&] {
    GridPtr g = build_grid(T, levels[0], *map, rule);
    return g->psi_nodes().back() - g->psi_nodes().front();
  }();
  const double g1 = ord.gamma1(), g2 = ord.gamma2();
  double loaded_gap_analytic = 0.0;
  if (g1 == 0.0)
    loaded_gap_analytic = std::pow(span, g2) / (gamma_fn(g2) * (g2 + 1.0));
  else if (g2 == 0.0)
    loaded_gap_analytic = -std::pow(span, g1) / (gamma_fn(g1) * (g1 + 1.0));

  // Monotone decrease, except that anything at rounding level has converged.
  auto mono_or_floor = [&](const double* d) {
    for (std::size_t k = 1; k < levels.size(); ++k)
      if (!(std::fabs(d[k]) < 1e-12) && !(std::fabs(d[k]) < std::fabs(d[k - 1])))
        return false;
    return true;
  };

  const std::size_t last = levels.size() - 1;
  bool passed = true;
  ReportWriter rep;
  rep.add("command", std::string("ibp-test"));
  rep.add("T", T);
  rep.add("alpha", alpha);
  rep.add("beta", beta);
  rep.add("tol", tol);
  rep.add("tol_deriv", tol_deriv);
  for (int q = 0; q < 2; ++q) {
    const bool mono_int = mono_or_floor(d_int[q]);
    const bool mono_full = mono_or_floor(d_full[q]);
    const bool final_int = std::fabs(d_int[q][last]) < tol;
    const bool final_full = std::fabs(d_full[q][last]) < tol_deriv;
    // The defect left after dropping the boundary products must settle on the
    // boundary gap itself (zero for a pair that vanishes at both ends).
    const double gap_mismatch =
        std::fabs(d_nb[q][last] - gap[q][last]) / std::max(1.0, std::fabs(gap[q][last]));
    const bool gap_ok = gap_mismatch < tol_deriv;
    const double gap_exact = q == 1 ? loaded_gap_analytic : 0.0;
    const bool gap_exact_ok =
        std::fabs(gap[q][last] - gap_exact) < tol_deriv * std::max(1.0, std::fabs(gap_exact));
    const std::string pre = std::string(pairs[q].name) + ".";
    rep.add(pre + "integral_defect_final", d_int[q][last]);
    rep.add(pre + "integral_defect_monotone", mono_int);
    rep.add(pre + "deriv_defect_final", d_full[q][last]);
    rep.add(pre + "deriv_defect_monotone", mono_full);
    rep.add(pre + "boundary_gap_final", gap[q][last]);
    rep.add(pre + "boundary_gap_analytic", gap_exact);
    rep.add(pre + "boundary_gap_consistent", gap_ok);
    rep.add(pre + "boundary_gap_matches_analytic", gap_exact_ok);
    passed = passed && mono_int && final_int && mono_full && final_full && gap_ok &&
             gap_exact_ok;
  }
  rep.add("passed", passed);
  write_text_file(base + ".report", rep.text());

  if (cli.verbose) std::printf("ibp-test: passed=%d -> %s.csv\n", passed ? 1 : 0, base.c_str());
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_dump_weights(const CliOptions& cli) {
  Config cfg = Config::parse_file(cli.config_path);

  GridPtr grid;
  double alpha = 0.5;
  config_phase([&] {
    const double T = cfg.get_real("grid.T", 1.0);
    const int n = cfg.get_int("grid.n", 257);
    grid = build_grid(T, n, build_map(cfg, T), build_rule(cfg));
    alpha = cfg.get_real("problem.alpha", 0.5);
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw ConfigError("dump-weights: problem.alpha must lie in (0, 1]");
    // Diagnostic mode reuses whatever config is at hand; unrelated keys are
    // deliberately not treated as errors here.
    return 0;
  });

  const auto table = integral_weights(*grid, alpha, WeightKind::node_left);
  std::vector<std::string> header(table->cols);
  for (int k = 0; k < table->cols; ++k) header[k] = "k" + std::to_string(k);
  CsvWriter csv(header);
  std::vector<double> row(table->cols);
  for (int i = 0; i < table->rows; ++i) {
    for (int k = 0; k < table->cols; ++k) row[k] = table->at(i, k);
    csv.add_row(row);
  }
  write_text_file(cli.dump_weights, csv.text());

  if (cli.verbose)
    std::printf("dump-weights: %dx%d order %.17g -> %s\n", table->rows, table->cols, alpha,
                cli.dump_weights.c_str());
  return 0;
}

}  // namespace psifrac
