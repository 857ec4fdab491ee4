#include "psifrac/weak_derivative.hpp"

#include <mutex>

#include "psifrac/errors.hpp"

namespace psifrac {

WeakDerivative::WeakDerivative(GridPtr grid, FractionalOrder ord)
    : grid_(std::move(grid)), ord_(ord), n_(grid_->size()) {
  if (n_ < 5)
    throw GridError("WeakDerivative: grid too coarse (need at least 5 nodes)");
  const auto& u = grid_->psi_nodes();
  hcell_.resize(n_ - 1);
  for (int j = 0; j + 1 < n_; ++j) hcell_[j] = u[j + 1] - u[j];
  tau_ = psi_trapezoid_weights(*grid_);
  if (!ord_.classical()) {
    if (ord_.gamma1() > 0.0)
      inner_ = integral_weights(*grid_, ord_.gamma1(), WeightKind::node_left);
    if (ord_.gamma2() > 0.0)
      outer_ = integral_weights(*grid_, ord_.gamma2(), WeightKind::cell_left);
  }
}

std::vector<double> WeakDerivative::apply(const std::vector<double>& nodal) const {
  const int m = n_ - 1;
  std::vector<double> g;
  if (inner_) {
    g.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const double* row = inner_->w.data() + static_cast<std::size_t>(i) * n_;
      double acc = 0.0;
      for (int k = 0; k <= i; ++k) acc += row[k] * nodal[k];
      g[i] = acc;
    }
  } else {
    g = nodal;
  }
  std::vector<double> d(m);
  for (int j = 0; j < m; ++j) d[j] = (g[j + 1] - g[j]) / hcell_[j];
  if (!outer_) return d;
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double* row = outer_->w.data() + static_cast<std::size_t>(i) * m;
    double acc = 0.0;
    for (int k = 0; k <= i; ++k) acc += row[k] * d[k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> WeakDerivative::apply_transpose(
    const std::vector<double>& cell) const {
  const int m = n_ - 1;
  std::vector<double> s;
  if (outer_) {
    s.assign(m, 0.0);
    // column access of the lower-triangular cell table
    for (int i = 0; i < m; ++i) {
      const double* row = outer_->w.data() + static_cast<std::size_t>(i) * m;
      const double ci = cell[i];
      for (int k = 0; k <= i; ++k) s[k] += row[k] * ci;
    }
  } else {
    s = cell;
  }
  std::vector<double> t(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    if (i > 0) acc += s[i - 1] / hcell_[i - 1];
    if (i < m) acc -= s[i] / hcell_[i];
    t[i] = acc;
  }
  if (!inner_) return t;
  std::vector<double> out(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const double* row = inner_->w.data() + static_cast<std::size_t>(i) * n_;
    const double ti = t[i];
    for (int k = 0; k <= i; ++k) out[k] += row[k] * ti;
  }
  return out;
}

const std::vector<double>& WeakDerivative::dense() const {
  std::call_once(dense_once_, [this]() {
    const int m = n_ - 1;
    dense_.assign(static_cast<std::size_t>(m) * n_, 0.0);
    std::vector<double> e(n_, 0.0);
    for (int k = 0; k < n_; ++k) {
      e[k] = 1.0;
      const std::vector<double> col = apply(e);
      e[k] = 0.0;
      for (int j = 0; j < m; ++j)
        dense_[static_cast<std::size_t>(j) * n_ + k] = col[j];
    }
  });
  return dense_;
}

}  // namespace psifrac
