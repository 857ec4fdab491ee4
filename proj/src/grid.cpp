#include "psifrac/grid.hpp"

#include <atomic>
#include <cmath>

#include "psifrac/errors.hpp"

namespace psifrac {

namespace {
std::atomic<std::uint64_t> g_next_grid_id{1};
}

Grid::Grid(double T, int n, PsiMap map, SpacingRule rule)
    : T_(T), map_(std::move(map)), rule_(rule), id_(g_next_grid_id.fetch_add(1)) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw GridError("Grid: horizon T must be positive and finite");
  if (n < 2) throw GridError("Grid: need at least 2 nodes, got " + std::to_string(n));
  if (map_.a() != 0.0 || map_.b() < T)
    throw GridError("Grid: coordinate map domain must cover [0, T]");

  nodes_.resize(n);
  psi_nodes_.resize(n);
  if (rule == SpacingRule::uniform_in_xi) {
    for (int i = 0; i < n; ++i)
      nodes_[i] = T * static_cast<double>(i) / (n - 1);
  } else {
    const double pa = map_.eval(0.0), pb = map_.eval(T);
    for (int i = 0; i < n; ++i) {
      const double u = pa + (pb - pa) * static_cast<double>(i) / (n - 1);
      nodes_[i] = map_.invert(u);
    }
  }
  nodes_.front() = 0.0;
  nodes_.back() = T;
  for (int i = 0; i < n; ++i) psi_nodes_[i] = map_.eval(nodes_[i]);
  for (int i = 0; i + 1 < n; ++i) {
    if (!(nodes_[i] < nodes_[i + 1]) || !(psi_nodes_[i] < psi_nodes_[i + 1]))
      throw GridError("Grid: nodes must be strictly increasing in xi and psi "
                      "(map too flat for the requested resolution near xi = " +
                      std::to_string(nodes_[i]) + ")");
  }
}

GridPtr build_grid(double T, int n, const PsiMap& map, SpacingRule rule) {
  return std::make_shared<const Grid>(T, n, map, rule);
}

std::vector<double> psi_trapezoid_weights(const Grid& grid) {
  const auto& u = grid.psi_nodes();
  const int n = grid.size();
  std::vector<double> tau(n, 0.0);
  for (int j = 0; j + 1 < n; ++j) {
    const double h = u[j + 1] - u[j];
    tau[j] += 0.5 * h;
    tau[j + 1] += 0.5 * h;
  }
  return tau;
}

}  // namespace psifrac
