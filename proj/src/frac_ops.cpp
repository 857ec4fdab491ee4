#include "psifrac/frac_ops.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <map>
#include <tuple>

#include "psifrac/errors.hpp"
#include "psifrac/gamma.hpp"

namespace psifrac {

FractionalOrder::FractionalOrder(double a, double b) : alpha(a), beta(b) {
  if (!std::isfinite(a) || !(a > 0.0) || a > 1.0)
    throw ParamError("FractionalOrder: alpha must lie in (0, 1]; alpha = 1 "
                     "selects the classical branch");
  if (!std::isfinite(b) || b < 0.0 || b > 1.0)
    throw ParamError("FractionalOrder: beta must lie in [0, 1]");
}

namespace {

std::uint64_t double_bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

using CacheKey = std::tuple<std::uint64_t, std::uint64_t, int>;
std::map<CacheKey, std::shared_ptr<const WeightTable>> g_weight_cache;
std::mutex g_weight_mutex;

// Exact integrals of the kernel against a linear interpolant on one cell.
// For the left kernel (U - u)^{mu-1} on [uj, uj1] with vj = U - uj >= vj1:
//   A = int kernel du, B = int kernel (u - uj) du.
void left_cell_moments(double mu, double vj, double vj1, double& A, double& B) {
  const double pj = std::pow(vj, mu), pj1 = std::pow(vj1, mu);
  A = (pj - pj1) / mu;
  B = vj * A - (pj * vj - pj1 * vj1) / (mu + 1.0);
}

// Right kernel (u - U)^{mu-1} on [uj, uj1] with sj = uj - U <= sj1:
void right_cell_moments(double mu, double sj, double sj1, double& A, double& B) {
  const double pj = std::pow(sj, mu), pj1 = std::pow(sj1, mu);
  A = (pj1 - pj) / mu;
  B = (pj1 * sj1 - pj * sj) / (mu + 1.0) - sj * A;
}

std::shared_ptr<const WeightTable> build_table(const Grid& grid, double mu,
                                               WeightKind kind) {
  const auto& u = grid.psi_nodes();
  const int n = grid.size();
  const double inv_gamma = 1.0 / gamma_fn(mu);
  auto table = std::make_shared<WeightTable>();

  if (kind == WeightKind::node_left || kind == WeightKind::node_right) {
    table->rows = table->cols = n;
    table->w.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto* w = table->w.data();
    if (kind == WeightKind::node_left) {
      for (int i = 1; i < n; ++i) {
        double* row = w + static_cast<std::size_t>(i) * n;
        const double U = u[i];
        for (int j = 0; j < i; ++j) {
          const double h = u[j + 1] - u[j];
          double A, B;
          left_cell_moments(mu, U - u[j], U - u[j + 1], A, B);
          row[j] += (A - B / h) * inv_gamma;
          row[j + 1] += (B / h) * inv_gamma;
        }
      }
    } else {
      for (int i = 0; i + 1 < n; ++i) {
        double* row = w + static_cast<std::size_t>(i) * n;
        const double U = u[i];
        for (int j = i; j + 1 < n; ++j) {
          const double h = u[j + 1] - u[j];
          double A, B;
          right_cell_moments(mu, u[j] - U, u[j + 1] - U, A, B);
          row[j] += (A - B / h) * inv_gamma;
          row[j + 1] += (B / h) * inv_gamma;
        }
      }
    }
  } else {
    // Cell tables: inputs are per-cell constants, outputs at cell midpoints.
    const int m = n - 1;
    table->rows = table->cols = m;
    table->w.assign(static_cast<std::size_t>(m) * m, 0.0);
    auto* w = table->w.data();
    for (int i = 0; i < m; ++i) {
      double* row = w + static_cast<std::size_t>(i) * m;
      const double c = 0.5 * (u[i] + u[i + 1]);
      if (kind == WeightKind::cell_left) {
        for (int j = 0; j < i; ++j)
          row[j] = (std::pow(c - u[j], mu) - std::pow(c - u[j + 1], mu)) / mu *
                   inv_gamma;
        row[i] = std::pow(c - u[i], mu) / mu * inv_gamma;
      } else {
        for (int j = i + 1; j < m; ++j)
          row[j] = (std::pow(u[j + 1] - c, mu) - std::pow(u[j] - c, mu)) / mu *
                   inv_gamma;
        row[i] = std::pow(u[i + 1] - c, mu) / mu * inv_gamma;
      }
    }
  }
  return table;
}

std::vector<double> apply_table(const WeightTable& t, const std::vector<double>& x) {
  std::vector<double> y(t.rows, 0.0);
  for (int i = 0; i < t.rows; ++i) {
    const double* row = t.w.data() + static_cast<std::size_t>(i) * t.cols;
    double acc = 0.0;
    for (int k = 0; k < t.cols; ++k) acc += row[k] * x[k];
    y[i] = acc;
  }
  return y;
}

void check_order(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0))
    throw ParamError("fractional integral: order must be positive, got " +
                     std::to_string(alpha));
}

std::vector<double> dpsi_stencil(const std::vector<double>& g,
                                 const std::vector<double>& u) {
  const int n = static_cast<int>(g.size());
  std::vector<double> d(n);
  // Derivative of the quadratic through (x0,f0),(x1,f1),(x2,f2) at x.
  auto lag3 = [](double x, double x0, double x1, double x2, double f0, double f1,
                 double f2) {
    return f0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
  };
  d[0] = lag3(u[0], u[0], u[1], u[2], g[0], g[1], g[2]);
  for (int i = 1; i + 1 < n; ++i)
    d[i] = lag3(u[i], u[i - 1], u[i], u[i + 1], g[i - 1], g[i], g[i + 1]);
  d[n - 1] = lag3(u[n - 1], u[n - 3], u[n - 2], u[n - 1], g[n - 3], g[n - 2],
                  g[n - 1]);
  return d;
}

double extrapolate_quadratic(double x, double x0, double x1, double x2, double f0,
                             double f1, double f2) {
  const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * l0 + f1 * l1 + f2 * l2;
}

void require_stencil_grid(const GridFunction& f, const char* where) {
  if (f.size() < 5)
    throw GridError(std::string(where) +
                    ": grid too coarse for the derivative stencils (need at "
                    "least 5 nodes, got " + std::to_string(f.size()) + ")");
}

// Shared core of the two right-sided derivatives:
//   I_right^{outer} ( -d/dpsi ( I_right^{inner} f ) )
// with the value f(b) handled in closed form (see hilfer_deriv_left).
GridFunction right_composition(double inner, double outer, const GridFunction& f) {
  require_stencil_grid(f, "right derivative");
  const auto& grid = *f.grid();
  const auto& u = grid.psi_nodes();
  const int n = grid.size();
  const double fb = f[n - 1];

  std::vector<double> rem(f.values());
  for (auto& v : rem) v -= fb;

  std::vector<double> w =
      inner > 0.0
          ? apply_table(*integral_weights(grid, inner, WeightKind::node_right), rem)
          : rem;
  std::vector<double> d = dpsi_stencil(w, u);
  for (auto& v : d) v = -v;
  std::vector<double> out =
      outer > 0.0
          ? apply_table(*integral_weights(grid, outer, WeightKind::node_right), d)
          : d;

  const bool singular_const = inner > 0.0 && fb != 0.0;
  if (singular_const) {
    // Closed form fb * (psi(b) - psi)^{ -alpha } / Gamma(1 - alpha) with
    // alpha = 1 - inner - outer; singular at the right endpoint itself.
    const double expo = inner + outer - 1.0;
    const double c = fb / gamma_fn(inner + outer);
    for (int i = 0; i + 1 < n; ++i) out[i] += c * std::pow(u[n - 1] - u[i], expo);
    out[n - 1] = extrapolate_quadratic(u[n - 1], u[n - 4], u[n - 3], u[n - 2],
                                       out[n - 4], out[n - 3], out[n - 2]);
  }
  return GridFunction(f.grid(), std::move(out));
}

}  // namespace

std::shared_ptr<const WeightTable> integral_weights(const Grid& grid, double mu,
                                                    WeightKind kind) {
  check_order(mu);
  const CacheKey key{grid.id(), double_bits(mu), static_cast<int>(kind)};
  {
    std::lock_guard<std::mutex> lock(g_weight_mutex);
    auto it = g_weight_cache.find(key);
    if (it != g_weight_cache.end()) return it->second;
  }
  auto table = build_table(grid, mu, kind);
  std::lock_guard<std::mutex> lock(g_weight_mutex);
  auto [it, inserted] = g_weight_cache.emplace(key, std::move(table));
  return it->second;
}

void clear_weight_cache() {
  std::lock_guard<std::mutex> lock(g_weight_mutex);
  g_weight_cache.clear();
}

GridFunction frac_integral_left(double alpha, const GridFunction& f) {
  check_order(alpha);
  auto table = integral_weights(*f.grid(), alpha, WeightKind::node_left);
  return GridFunction(f.grid(), apply_table(*table, f.values()));
}

GridFunction frac_integral_right(double alpha, const GridFunction& f) {
  check_order(alpha);
  auto table = integral_weights(*f.grid(), alpha, WeightKind::node_right);
  return GridFunction(f.grid(), apply_table(*table, f.values()));
}

GridFunction derivative_in_psi(const GridFunction& f) {
  require_stencil_grid(f, "derivative_in_psi");
  return GridFunction(f.grid(), dpsi_stencil(f.values(), f.grid()->psi_nodes()));
}

GridFunction hilfer_deriv_left(const FractionalOrder& ord, const GridFunction& f) {
  if (ord.classical()) return derivative_in_psi(f);
  require_stencil_grid(f, "hilfer_deriv_left");
  const auto& grid = *f.grid();
  const auto& u = grid.psi_nodes();
  const int n = grid.size();
  const double g1 = ord.gamma1(), g2 = ord.gamma2();
  const double fa = f[0];

  // Split off the endpoint value: the composition maps a constant c to
  // c (psi - psi(0))^{-alpha} / Gamma(1-alpha) in closed form (or to zero
  // when the inner order vanishes, since the derivative then acts on the
  // constant directly). The remainder vanishes at 0 and stays regular
  // through the numerical pipeline.
  std::vector<double> rem(f.values());
  for (auto& v : rem) v -= fa;

  std::vector<double> w =
      g1 > 0.0
          ? apply_table(*integral_weights(grid, g1, WeightKind::node_left), rem)
          : rem;
  std::vector<double> d = dpsi_stencil(w, u);
  std::vector<double> out =
      g2 > 0.0 ? apply_table(*integral_weights(grid, g2, WeightKind::node_left), d)
               : d;

  if (g1 > 0.0 && fa != 0.0) {
    const double c = fa / gamma_fn(1.0 - ord.alpha);
    for (int i = 1; i < n; ++i) out[i] += c * std::pow(u[i] - u[0], -ord.alpha);
    out[0] =
        extrapolate_quadratic(u[0], u[1], u[2], u[3], out[1], out[2], out[3]);
  }
  return GridFunction(f.grid(), std::move(out));
}

GridFunction hilfer_deriv_right(const FractionalOrder& ord, const GridFunction& f) {
  if (ord.classical()) {
    GridFunction d = derivative_in_psi(f);
    for (auto& v : d.values()) v = -v;
    return d;
  }
  return right_composition(ord.gamma1(), ord.gamma2(), f);
}

GridFunction caputo_hilfer_right(const FractionalOrder& ord, const GridFunction& g) {
  if (ord.classical()) {
    GridFunction d = derivative_in_psi(g);
    for (auto& v : d.values()) v = -v;
    return d;
  }
  return right_composition(ord.gamma2(), ord.gamma1(), g);
}

double ibp_integral_defect(double alpha, const GridFunction& phi,
                           const GridFunction& phi2) {
  require_same_grid(phi, phi2, "ibp_integral_defect");
  const auto tau = psi_trapezoid_weights(*phi.grid());
  GridFunction li = frac_integral_left(alpha, phi2);
  GridFunction ri = frac_integral_right(alpha, phi);
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < phi.size(); ++i) {
    lhs += tau[i] * li[i] * phi[i];
    rhs += tau[i] * phi2[i] * ri[i];
  }
  return lhs - rhs;
}

HilferIbpBreakdown ibp_hilfer_parts(const FractionalOrder& ord,
                                    const GridFunction& phi,
                                    const GridFunction& phi2) {
  require_same_grid(phi, phi2, "ibp_hilfer_parts");
  if (ord.classical())
    throw ParamError("ibp_hilfer_parts: defined for the fractional branch only");
  const auto& grid = *phi.grid();
  const int n = grid.size();
  const auto tau = psi_trapezoid_weights(grid);
  const double g1 = ord.gamma1(), g2 = ord.gamma2();

  GridFunction lhs_fn = caputo_hilfer_right(ord, phi);
  GridFunction rhs_fn = hilfer_deriv_left(ord, phi2);

  HilferIbpBreakdown parts;
  for (int i = 0; i < n; ++i) {
    parts.lhs += tau[i] * lhs_fn[i] * phi2[i];
    parts.rhs_integral += tau[i] * phi[i] * rhs_fn[i];
  }

  // Boundary products P(x) = (I_left^{g1} phi2)(x) * (I_right^{g2} phi)(x),
  // evaluated at the end nodes. Zero-order integrals act as the identity, so
  // a violated boundary limit (nonvanishing end value) shows up here.
  const std::vector<double> p2l =
      g1 > 0.0 ? frac_integral_left(g1, phi2).values() : phi2.values();
  const std::vector<double> p1r =
      g2 > 0.0 ? frac_integral_right(g2, phi).values() : phi.values();
  parts.boundary_a = p2l.front() * p1r.front();
  parts.boundary_b = p2l.back() * p1r.back();

  parts.defect =
      parts.lhs + parts.boundary_b - parts.boundary_a - parts.rhs_integral;
  return parts;
}

double ibp_hilfer_defect(const FractionalOrder& ord, const GridFunction& phi,
                         const GridFunction& phi2) {
  return ibp_hilfer_parts(ord, phi, phi2).defect;
}

}  // namespace psifrac
