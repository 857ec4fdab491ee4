#include "psifrac/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "psifrac/errors.hpp"
#include "psifrac/weak_derivative.hpp"

namespace psifrac {

void SolveOptions::validate() const {
  if (max_iter < 1) throw ParamError("solve options: max_iter must be at least 1");
  if (!(grad_tol > 0.0)) throw ParamError("solve options: grad_tol must be positive");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step))
    throw ParamError("solve options: initial_step must be positive and finite");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw ParamError("solve options: armijo_c must lie in (0,1)");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
    throw ParamError("solve options: armijo_shrink must lie in (0,1)");
  if (max_backtracks < 1)
    throw ParamError("solve options: max_backtracks must be at least 1");
}

namespace {

double scaled_norm(const std::vector<double>& g, double hbar) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(hbar * s);
}

// Space-norm surrogate of an iterate: Lp norm of the values plus Lp norm of
// the cell derivative, both against the psi-weighted measure.
double rho_of(const std::vector<double>& phi, const std::vector<double>& d,
              const std::vector<double>& tau, const std::vector<double>& h, double p) {
  double a = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) a += tau[i] * std::pow(std::fabs(phi[i]), p);
  double b = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) b += h[j] * std::pow(std::fabs(d[j]), p);
  return std::pow(a, 1.0 / p) + std::pow(b, 1.0 / p);
}

double theta_average(const std::vector<double>& phi, const std::vector<double>& tau,
                     const std::vector<double>& xi, const Nonlinearity& nl, double rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += tau[i] * nl.theta(xi[i], phi[i]);
  if (rho <= 0.0) return 0.0;
  return s / rho;
}

}  // namespace

SolveReport find_critical_point(const SpaceParams& sp, const Nonlinearity& nl,
                                const GridFunction& init, const SolveOptions& opts) {
  opts.validate();
  require_boundary_zero(init, "critical point solve");
  const GridPtr& grid = init.grid();
  const int n = grid->size();
  WeakDerivative D(grid, sp.ord);

  const std::vector<double>& tau = D.node_weights();
  const std::vector<double>& h = D.cell_widths();
  const std::vector<double>& xi = grid->nodes();
  const double hbar = grid->mean_psi_spacing();

  std::vector<double> phi = init.values();
  phi[0] = 0.0;
  phi[n - 1] = 0.0;

  // Optional diagonal scaling from the quadratic kinetic surrogate
  // diag_i = sum_j h_j M_ji^2 with M the weak derivative matrix.
  std::vector<double> diag;
  if (opts.diagonal_preconditioner) {
    const std::vector<double>& M = D.dense();
    const int m = n - 1;
    diag.assign(n, 0.0);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) {
        const double mji = M[static_cast<std::size_t>(j) * n + i];
        diag[i] += h[j] * mji * mji;
      }
    double dmax = 0.0;
    for (double v : diag) dmax = std::max(dmax, v);
    if (!(dmax > 0.0)) throw NumericError("critical point solve: degenerate preconditioner");
    for (double& v : diag) v = std::max(v, 1e-12 * dmax);
  }

  SolveReport rep;
  rep.energy_trace.reserve(256);
  rep.grad_norm_trace.reserve(256);

  std::vector<double> g(n), g_new(n), cand(n), dir(n), dphi(n), dg(n), d;

  double kin = 0.0, pot = 0.0;
  double E = energy_value(D, phi, sp, nl, &kin, &pot);
  energy_gradient_into(D, phi, sp, nl, g);
  if (!std::isfinite(E))
    throw NumericError("critical point solve: non-finite energy at iteration 0");

  double step = opts.initial_step;
  double prev_step = opts.initial_step;
  rep.stop_reason = "iteration budget exhausted";

  // The trial steps are accepted against the worst of the last few energies
  // rather than the current one; a strictly monotone rule forces the
  // quasi-Newton step length back toward steepest descent and stalls.
  const std::size_t kWindow = 10;
  std::vector<double> ref_window;
  ref_window.reserve(kWindow);
  ref_window.push_back(E);
  std::size_t ring_pos = 0;

  for (int it = 0; it <= opts.max_iter; ++it) {
    const double gnorm = scaled_norm(g, hbar);
    d = D.apply(phi);
    const double rho = rho_of(phi, d, tau, h, sp.p);
    rep.energy_trace.push_back(E);
    rep.grad_norm_trace.push_back(gnorm);
    rep.rho_trace.push_back(rho);
    rep.theta_avg_trace.push_back(theta_average(phi, tau, xi, nl, rho));

    if (!std::isfinite(gnorm)) {
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "critical point solve: non-finite gradient at iteration %d", it);
      throw NumericError(buf);
    }
    if (gnorm <= opts.grad_tol) {
      rep.converged = true;
      rep.iterations = it;
      rep.stop_reason = "gradient tolerance reached";
      break;
    }
    if (it == opts.max_iter) {
      rep.iterations = it;
      break;
    }

    // Descent direction (minus sign applied at the update).
    double slope = 0.0;  // <g, dir>
    if (diag.empty()) {
      dir = g;
      for (int i = 0; i < n; ++i) slope += g[i] * g[i];
    } else {
      for (int i = 0; i < n; ++i) {
        dir[i] = g[i] / diag[i];
        slope += g[i] * dir[i];
      }
    }

    if (it > 0) {
      // Barzilai-Borwein trial step from the last accepted move.
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < n; ++i) {
        ss += dphi[i] * dphi[i];
        sy += dphi[i] * dg[i];
      }
      step = (sy > 1e-300 * ss && ss > 0.0) ? ss / sy : prev_step / opts.armijo_shrink;
      step = std::clamp(step, 1e-16, 1e16);
    }

    if (opts.step_rule == StepRule::fixed) {
      step = opts.initial_step;
      for (int i = 0; i < n; ++i) cand[i] = phi[i] - step * dir[i];
      cand[0] = 0.0;
      cand[n - 1] = 0.0;
      const double Ec = energy_value(D, cand, sp, nl, &kin, &pot);
      if (!std::isfinite(Ec)) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "critical point solve: non-finite energy at iteration %d", it + 1);
        throw NumericError(buf);
      }
      dphi = cand;
      for (int i = 0; i < n; ++i) dphi[i] -= phi[i];
      phi.swap(cand);
      energy_gradient_into(D, phi, sp, nl, g_new);
      for (int i = 0; i < n; ++i) dg[i] = g_new[i] - g[i];
      g.swap(g_new);
      E = Ec;
      rep.step_trace.push_back(step);
      continue;
    }

    bool accepted = false;
    double Ec = 0.0;
    double Eref = ref_window[0];
    for (double v : ref_window) Eref = std::max(Eref, v);
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (int i = 0; i < n; ++i) cand[i] = phi[i] - step * dir[i];
      cand[0] = 0.0;
      cand[n - 1] = 0.0;
      Ec = energy_value(D, cand, sp, nl, &kin, &pot);
      // Near the floor the decrease is smaller than the rounding error of the
      // energy itself; the relative slack keeps the comparison meaningful.
      const double slack = 1e-14 * (std::fabs(Eref) + std::fabs(Ec));
      if (std::isfinite(Ec) &&
          Ec <= Eref - opts.armijo_c * step * hbar * slope + slack) {
        accepted = true;
        break;
      }
      step *= opts.armijo_shrink;
    }
    if (!accepted) {
      rep.iterations = it;
      rep.stop_reason = "line search stalled";
      break;
    }

    dphi = cand;
    for (int i = 0; i < n; ++i) dphi[i] -= phi[i];
    phi.swap(cand);
    energy_gradient_into(D, phi, sp, nl, g_new);
    for (int i = 0; i < n; ++i) dg[i] = g_new[i] - g[i];
    g.swap(g_new);
    E = Ec;
    prev_step = step;
    rep.step_trace.push_back(step);
    if (ref_window.size() < kWindow) {
      ref_window.push_back(E);
    } else {
      ref_window[ring_pos] = E;
      ring_pos = (ring_pos + 1) % kWindow;
    }
  }

  rep.solution = phi;
  // Recompute the breakdown at the final point: the loop-local kin/pot may
  // hold the last rejected trial when the search stalled.
  rep.final_energy.total = energy_value(D, phi, sp, nl, &rep.final_energy.kinetic,
                                        &rep.final_energy.potential);
  rep.critical_level = rep.final_energy.total;
  rep.final_grad_norm = rep.grad_norm_trace.empty() ? 0.0 : rep.grad_norm_trace.back();
  return rep;
}

PsDiagnostics ps_diagnostics(const SolveReport& report, const SpaceParams& sp,
                             const Nonlinearity& nl, const GridPtr& grid) {
  PsDiagnostics out;
  out.energies = report.energy_trace;
  out.grad_norms = report.grad_norm_trace;
  out.rho = report.rho_trace;
  out.theta_avg = report.theta_avg_trace;

  if (!out.rho.empty()) {
    double peak = 0.0;
    for (double v : out.rho) peak = std::max(peak, v);
    out.rho_bounded = peak <= 10.0 * (1.0 + out.rho.back());
  }
  if (!out.theta_avg.empty()) {
    double peak = 0.0;
    for (double v : out.theta_avg) peak = std::max(peak, std::fabs(v));
    out.theta_trend_to_zero =
        std::fabs(out.theta_avg.back()) <= std::max(1e-7, 0.1 * peak);
  }

  GridFunction phi(grid, report.solution);
  GridFunction g = energy_gradient(phi, sp, nl);
  double pairing = 0.0;
  for (int i = 0; i < grid->size(); ++i) pairing += g[i] * phi[i];
  const double E = report.final_energy.total;
  out.ps_gap_p = E - pairing / sp.p;
  out.ps_gap_p2 = E - pairing / (sp.p * sp.p);
  return out;
}

GridFunction parabola_init(const GridPtr& grid, double amplitude) {
  const int n = grid->size();
  const std::vector<double>& u = grid->psi_nodes();
  const double ua = u.front(), span = u.back() - u.front();
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = (u[i] - ua) / span;
    v[i] = 4.0 * amplitude * t * (1.0 - t);
  }
  v[0] = 0.0;
  v[n - 1] = 0.0;
  return GridFunction(grid, std::move(v));
}

GridFunction fourier_init(const GridPtr& grid, std::uint64_t seed, int modes) {
  if (modes < 1) throw ParamError("fourier_init: modes must be at least 1");
  const int n = grid->size();
  const std::vector<double>& u = grid->psi_nodes();
  const double ua = u.front(), span = u.back() - u.front();
  std::mt19937_64 rng(seed);
  std::vector<double> coef(modes);
  for (int k = 0; k < modes; ++k) {
    // Raw 53-bit uniform in [0,1); independent of library distribution
    // implementations so runs reproduce bit-for-bit everywhere.
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    coef[k] = (2.0 * x - 1.0) / static_cast<double>(k + 1);
  }
  const double pi = 3.14159265358979323846;
  std::vector<double> v(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double t = (u[i] - ua) / span;
    double s = 0.0;
    for (int k = 0; k < modes; ++k) s += coef[k] * std::sin((k + 1) * pi * t);
    v[i] = s;
  }
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  if (m == 0.0) {
    for (int i = 1; i + 1 < n; ++i)
      v[i] = std::sin(pi * (u[i] - ua) / span);
    m = 1.0;
  }
  for (double& x : v) x /= m;
  return GridFunction(grid, std::move(v));
}

}  // namespace psifrac
