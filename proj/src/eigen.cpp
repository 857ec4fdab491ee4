#include "psifrac/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psifrac/errors.hpp"
#include "psifrac/weak_derivative.hpp"

namespace psifrac {

namespace {

const double kPi = 3.14159265358979323846;

double lp_normalize(std::vector<double>& v, const std::vector<double>& tau, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += tau[i] * std::pow(std::fabs(v[i]), p);
  const double nrm = std::pow(s, 1.0 / p);
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw DegenerateError("eigen: cannot normalize a zero or non-finite function");
  for (double& x : v) x /= nrm;
  return nrm;
}

double quotient_parts(const WeakDerivative& D, const std::vector<double>& phi,
                      const SpaceParams& sp, double* num_out, double* den_out) {
  const std::vector<double>& h = D.cell_widths();
  const std::vector<double>& tau = D.node_weights();
  const std::vector<double> d = D.apply(phi);
  double num = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) num += h[j] * std::pow(std::fabs(d[j]), sp.p);
  double den = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    den += tau[i] * std::pow(std::fabs(phi[i]), sp.p);
  if (num_out) *num_out = num;
  if (den_out) *den_out = den;
  if (!(den > 0.0)) throw DegenerateError("rayleigh quotient: zero denominator");
  return num / den;
}

// r = D^T (h kappa(D phi)) - lambda tau kappa(phi), boundary rows zeroed.
void residual_into(const WeakDerivative& D, const std::vector<double>& phi, double lambda,
                   const SpaceParams& sp, std::vector<double>& r) {
  const std::vector<double>& h = D.cell_widths();
  const std::vector<double>& tau = D.node_weights();
  std::vector<double> w = D.apply(phi);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = h[j] * sp.power_map(w[j]);
  r = D.apply_transpose(w);
  const std::size_t n = phi.size();
  for (std::size_t i = 0; i < n; ++i) r[i] -= lambda * tau[i] * sp.power_map(phi[i]);
  r[0] = 0.0;
  r[n - 1] = 0.0;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Make the largest-magnitude node positive.
void sign_normalize(std::vector<double>& v) {
  double m = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) > m) {
      m = std::fabs(v[i]);
      k = i;
    }
  if (m > 0.0 && v[k] < 0.0)
    for (double& x : v) x = -x;
}

// First sine mode in the normalized psi coordinate.
std::vector<double> sine_mode(const GridPtr& grid, int mode) {
  const std::vector<double>& u = grid->psi_nodes();
  const double ua = u.front(), span = u.back() - u.front();
  std::vector<double> v(grid->size(), 0.0);
  for (int i = 1; i + 1 < grid->size(); ++i)
    v[i] = std::sin(mode * kPi * (u[i] - ua) / span);
  return v;
}

// One-signed bump occupying [lo, hi] in the normalized psi coordinate.
std::vector<double> half_bump(const GridPtr& grid, double lo, double hi) {
  const std::vector<double>& u = grid->psi_nodes();
  const double ua = u.front(), span = u.back() - u.front();
  std::vector<double> v(grid->size(), 0.0);
  for (int i = 1; i + 1 < grid->size(); ++i) {
    const double t = (u[i] - ua) / span;
    if (t > lo && t < hi) v[i] = std::sin(kPi * (t - lo) / (hi - lo));
  }
  return v;
}

}  // namespace

double rayleigh_quotient(const GridFunction& phi, const SpaceParams& sp) {
  require_boundary_zero(phi, "rayleigh quotient");
  WeakDerivative D(phi.grid(), sp.ord);
  std::vector<double> v = phi.values();
  v[0] = 0.0;
  v.back() = 0.0;
  return quotient_parts(D, v, sp, nullptr, nullptr);
}

double eigen_residual(const GridFunction& phi, double lambda, const SpaceParams& sp) {
  require_boundary_zero(phi, "eigen residual");
  WeakDerivative D(phi.grid(), sp.ord);
  std::vector<double> v = phi.values();
  v[0] = 0.0;
  v.back() = 0.0;
  std::vector<double> r;
  residual_into(D, v, lambda, sp, r);
  return max_abs(r);
}

EigenEstimate lambda_1(const SpaceParams& sp, const GridPtr& grid,
                       const SolveOptions& opts) {
  opts.validate();
  WeakDerivative D(grid, sp.ord);
  const std::vector<double>& tau = D.node_weights();
  const int n = grid->size();
  const double hbar = grid->mean_psi_spacing();

  std::vector<double> phi = sine_mode(grid, 1);
  lp_normalize(phi, tau, sp.p);

  std::vector<double> r(n), r_new(n), cand(n), dphi(n), dr(n);
  double R = quotient_parts(D, phi, sp, nullptr, nullptr);
  residual_into(D, phi, R, sp, r);

  EigenEstimate est;
  est.level = 1;
  double step = opts.initial_step, prev_step = opts.initial_step;

  // Nonmonotone acceptance window: quasi-Newton trial steps are measured
  // against the worst recent quotient, not the current one.
  const std::size_t kWindow = 10;
  std::vector<double> ref_window;
  ref_window.reserve(kWindow);
  ref_window.push_back(R);
  std::size_t ring_pos = 0;

  for (int it = 0; it <= opts.max_iter; ++it) {
    const double res = max_abs(r);
    if (!std::isfinite(res) || !std::isfinite(R)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "eigen descent: non-finite state at iteration %d", it);
      throw NumericError(buf);
    }
    if (res <= opts.grad_tol) {
      est.converged = true;
      est.iterations = it;
      break;
    }
    if (it == opts.max_iter) {
      est.iterations = it;
      break;
    }

    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += r[i] * r[i];

    if (it > 0) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < n; ++i) {
        ss += dphi[i] * dphi[i];
        sy += dphi[i] * dr[i];
      }
      step = (sy > 1e-300 * ss && ss > 0.0) ? ss / sy : prev_step / opts.armijo_shrink;
      step = std::clamp(step, 1e-16, 1e16);
    }

    bool accepted = false;
    double R_c = R;
    double Rref = ref_window[0];
    for (double v : ref_window) Rref = std::max(Rref, v);
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (int i = 0; i < n; ++i) cand[i] = phi[i] - step * r[i];
      cand[0] = 0.0;
      cand[n - 1] = 0.0;
      bool ok = true;
      try {
        lp_normalize(cand, tau, sp.p);
        R_c = quotient_parts(D, cand, sp, nullptr, nullptr);
      } catch (const DegenerateError&) {
        ok = false;
      }
      const double slack = 1e-14 * (std::fabs(Rref) + std::fabs(R_c));
      if (ok && std::isfinite(R_c) &&
          R_c <= Rref - opts.armijo_c * step * hbar * slope + slack) {
        accepted = true;
        break;
      }
      step *= opts.armijo_shrink;
    }
    if (!accepted) {
      est.iterations = it;
      break;
    }

    dphi = cand;
    for (int i = 0; i < n; ++i) dphi[i] -= phi[i];
    phi.swap(cand);
    R = R_c;
    residual_into(D, phi, R, sp, r_new);
    for (int i = 0; i < n; ++i) dr[i] = r_new[i] - r[i];
    r.swap(r_new);
    prev_step = step;
    if (ref_window.size() < kWindow) {
      ref_window.push_back(R);
    } else {
      ref_window[ring_pos] = R;
      ring_pos = (ring_pos + 1) % kWindow;
    }
  }

  sign_normalize(phi);
  residual_into(D, phi, R, sp, r);
  est.lambda = R;
  est.eigenfunction = std::move(phi);
  est.residual = max_abs(r);
  return est;
}

namespace {

// Dense SPD Cholesky, in place on the lower triangle of a (m x m, row-major).
void cholesky(std::vector<double>& a, int m) {
  for (int k = 0; k < m; ++k) {
    double d = a[static_cast<std::size_t>(k) * m + k];
    for (int j = 0; j < k; ++j) {
      const double v = a[static_cast<std::size_t>(k) * m + j];
      d -= v * v;
    }
    if (!(d > 0.0))
      throw NumericError("eigen subspace iteration: assembled pencil lost definiteness");
    d = std::sqrt(d);
    a[static_cast<std::size_t>(k) * m + k] = d;
    for (int i = k + 1; i < m; ++i) {
      double s = a[static_cast<std::size_t>(i) * m + k];
      for (int j = 0; j < k; ++j)
        s -= a[static_cast<std::size_t>(i) * m + j] * a[static_cast<std::size_t>(k) * m + j];
      a[static_cast<std::size_t>(i) * m + k] = s / d;
    }
  }
}

void chol_solve(const std::vector<double>& L, int m, std::vector<double>& x) {
  for (int i = 0; i < m; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= L[static_cast<std::size_t>(i) * m + j] * x[j];
    x[i] = s / L[static_cast<std::size_t>(i) * m + i];
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < m; ++j) s -= L[static_cast<std::size_t>(j) * m + i] * x[j];
    x[i] = s / L[static_cast<std::size_t>(i) * m + i];
  }
}

// Largest eigenvalue/vector of a symmetric 2x2 [[a,b],[b,c]].
void sym2_top(double a, double b, double c, double* val, double* v0, double* v1) {
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double top = mid + rad;
  double x = b, y = top - a;
  if (std::fabs(x) + std::fabs(y) < 1e-300 * std::fabs(top)) {
    x = (a >= c) ? 1.0 : 0.0;
    y = (a >= c) ? 0.0 : 1.0;
  }
  const double nrm = std::sqrt(x * x + y * y);
  *val = top;
  *v0 = x / nrm;
  *v1 = y / nrm;
}

EigenEstimate lambda_2_quadratic(const SpaceParams& sp, const GridPtr& grid,
                                 const SolveOptions& opts, double lambda1) {
  WeakDerivative D(grid, sp.ord);
  const int n = grid->size();
  const int m = n - 2;
  const int cells = D.cells();
  const std::vector<double>& h = D.cell_widths();
  const std::vector<double>& tau = D.node_weights();
  const std::vector<double>& M = D.dense();

  // Interior stiffness A = Mi^T diag(h) Mi with Mi the interior columns.
  std::vector<double> A(static_cast<std::size_t>(m) * m, 0.0);
  for (int j = 0; j < cells; ++j) {
    const double hj = h[j];
    const double* row = &M[static_cast<std::size_t>(j) * n];
    for (int a = 0; a < m; ++a) {
      const double ra = row[a + 1];
      if (ra == 0.0) continue;
      const double w = hj * ra;
      for (int b = 0; b <= a; ++b)
        A[static_cast<std::size_t>(a) * m + b] += w * row[b + 1];
    }
  }
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      A[static_cast<std::size_t>(a) * m + b] = A[static_cast<std::size_t>(b) * m + a];

  std::vector<double> Acopy = A;
  cholesky(Acopy, m);

  auto apply_A = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &A[static_cast<std::size_t>(i) * m];
      for (int j = 0; j < m; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  };
  auto dot_B = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += tau[i + 1] * x[i] * y[i];
    return s;
  };

  std::vector<double> x1(m), x2(m);
  {
    const std::vector<double> s1 = sine_mode(grid, 1), s2 = sine_mode(grid, 2);
    for (int i = 0; i < m; ++i) {
      x1[i] = s1[i + 1];
      x2[i] = s2[i + 1];
    }
  }

  EigenEstimate est;
  est.level = 2;
  std::vector<double> y1(m), y2(m), Ax(m), rvec(m);
  double theta2 = 0.0;
  const int max_outer = std::max(50, std::min(opts.max_iter, 2000));
  for (int it = 0; it < max_outer; ++it) {
    // y_k = A^{-1} B x_k
    for (int i = 0; i < m; ++i) {
      y1[i] = tau[i + 1] * x1[i];
      y2[i] = tau[i + 1] * x2[i];
    }
    chol_solve(Acopy, m, y1);
    chol_solve(Acopy, m, y2);

    // B-orthonormalize.
    double n1 = std::sqrt(dot_B(y1, y1));
    if (!(n1 > 0.0)) throw NumericError("eigen subspace iteration: collapsed basis");
    for (int i = 0; i < m; ++i) y1[i] /= n1;
    const double c = dot_B(y2, y1);
    for (int i = 0; i < m; ++i) y2[i] -= c * y1[i];
    double n2 = std::sqrt(dot_B(y2, y2));
    if (!(n2 > 0.0)) throw NumericError("eigen subspace iteration: collapsed basis");
    for (int i = 0; i < m; ++i) y2[i] /= n2;

    // Ritz values on the span; rotate to the top pair.
    apply_A(y1, Ax);
    double s11 = 0.0, s12 = 0.0;
    for (int i = 0; i < m; ++i) {
      s11 += y1[i] * Ax[i];
      s12 += y2[i] * Ax[i];
    }
    apply_A(y2, Ax);
    double s22 = 0.0;
    for (int i = 0; i < m; ++i) s22 += y2[i] * Ax[i];

    double v0, v1v;
    sym2_top(s11, s12, s22, &theta2, &v0, &v1v);
    for (int i = 0; i < m; ++i) {
      const double a = y1[i], b = y2[i];
      x2[i] = v0 * a + v1v * b;
      x1[i] = -v1v * a + v0 * b;  // orthogonal complement within the span
    }

    apply_A(x2, Ax);
    double res = 0.0;
    for (int i = 0; i < m; ++i)
      res = std::max(res, std::fabs(Ax[i] - theta2 * tau[i + 1] * x2[i]));
    est.iterations = it + 1;
    if (res <= opts.grad_tol) {
      est.converged = true;
      break;
    }
  }

  std::vector<double> full(n, 0.0);
  for (int i = 0; i < m; ++i) full[i + 1] = x2[i];
  lp_normalize(full, tau, sp.p);
  sign_normalize(full);
  std::vector<double> r;
  residual_into(D, full, theta2, sp, r);
  est.lambda = theta2;
  est.residual = max_abs(r);
  est.eigenfunction = std::move(full);
  est.upper_bound = false;
  if (!(est.lambda > lambda1))
    throw NumericError("eigen subspace iteration: ordering of the first two values failed");
  return est;
}

EigenEstimate lambda_2_minimax(const SpaceParams& sp, const GridPtr& grid,
                               const SolveOptions& opts, double lambda1) {
  WeakDerivative D(grid, sp.ord);
  const std::vector<double>& tau = D.node_weights();
  const int n = grid->size();
  const int n_theta = 48;

  std::vector<double> w1 = half_bump(grid, 0.0, 0.5);
  std::vector<double> w2 = half_bump(grid, 0.5, 1.0);
  lp_normalize(w1, tau, sp.p);
  lp_normalize(w2, tau, sp.p);

  std::vector<double> combo(n), best_phi(n);
  // Max of the quotient along the odd circle through (w1, w2).
  auto circle_max = [&](const std::vector<double>& a, const std::vector<double>& b,
                        double* theta_at, std::vector<double>* arg) {
    double worst = -1.0, th_at = 0.0;
    for (int k = 0; k < n_theta; ++k) {
      const double th = kPi * k / n_theta;
      const double ct = std::cos(th), st = std::sin(th);
      double mass = 0.0;
      for (int i = 0; i < n; ++i) {
        combo[i] = ct * a[i] + st * b[i];
        mass = std::max(mass, std::fabs(combo[i]));
      }
      if (mass < 1e-14) continue;
      const double R = quotient_parts(D, combo, sp, nullptr, nullptr);
      if (R > worst) {
        worst = R;
        th_at = th;
        if (arg) *arg = combo;
      }
    }
    if (worst < 0.0) throw DegenerateError("eigen minimax: degenerate pair");
    if (theta_at) *theta_at = th_at;
    return worst;
  };

  double theta_at = 0.0;
  double J = circle_max(w1, w2, &theta_at, &best_phi);

  EigenEstimate est;
  est.level = 2;
  // Polish the pair by subgradient steps at the active angle.
  std::vector<double> r(n), w1_try(n), w2_try(n), arg_try(n);
  double step = 0.5;
  const int budget = std::max(20, std::min(opts.max_iter, 400));
  int accepted = 0;
  for (int it = 0; it < budget; ++it) {
    std::vector<double> phi = best_phi;
    lp_normalize(phi, tau, sp.p);
    const double R = quotient_parts(D, phi, sp, nullptr, nullptr);
    residual_into(D, phi, R, sp, r);
    const double ct = std::cos(theta_at), st = std::sin(theta_at);
    bool improved = false;
    for (int bt = 0; bt < 8; ++bt) {
      for (int i = 0; i < n; ++i) {
        w1_try[i] = w1[i] - step * ct * r[i];
        w2_try[i] = w2[i] - step * st * r[i];
      }
      w1_try[0] = w1_try[n - 1] = 0.0;
      w2_try[0] = w2_try[n - 1] = 0.0;
      bool ok = true;
      double J_try = 0.0, th_try = 0.0;
      try {
        lp_normalize(w1_try, tau, sp.p);
        lp_normalize(w2_try, tau, sp.p);
        J_try = circle_max(w1_try, w2_try, &th_try, &arg_try);
      } catch (const DegenerateError&) {
        ok = false;
      }
      if (ok && J_try < J) {
        w1 = w1_try;
        w2 = w2_try;
        J = J_try;
        theta_at = th_try;
        best_phi = arg_try;
        improved = true;
        ++accepted;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    step *= 1.5;
  }

  lp_normalize(best_phi, tau, sp.p);
  sign_normalize(best_phi);
  const double R = quotient_parts(D, best_phi, sp, nullptr, nullptr);
  residual_into(D, best_phi, R, sp, r);
  est.lambda = J;
  est.eigenfunction = std::move(best_phi);
  est.residual = max_abs(r);
  est.iterations = accepted;
  est.converged = false;
  est.upper_bound = true;
  if (!(est.lambda > lambda1))
    throw NumericError("eigen minimax: ordering of the first two values failed");
  return est;
}

}  // namespace

EigenEstimate lambda_2_estimate(const SpaceParams& sp, const GridPtr& grid,
                                const SolveOptions& opts) {
  EigenEstimate first = lambda_1(sp, grid, opts);
  if (sp.p == 2.0 && sp.eps == 0.0)
    return lambda_2_quadratic(sp, grid, opts, first.lambda);
  return lambda_2_minimax(sp, grid, opts, first.lambda);
}

}  // namespace psifrac
