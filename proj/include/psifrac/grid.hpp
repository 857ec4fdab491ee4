#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "psifrac/psi_map.hpp"

namespace psifrac {

enum class SpacingRule { uniform_in_xi, uniform_in_psi };

// Immutable 1-D grid on [0, T] together with its coordinate map. Nodes are
// strictly increasing and include both endpoints; psi values are cached per
// node since every operator in the library works on psi-differences.
// Grids are shared by const pointer and carry a unique id that the operator
// weight cache keys on.
class Grid {
 public:
  Grid(double T, int n, PsiMap map, SpacingRule rule);

  double T() const { return T_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& psi_nodes() const { return psi_nodes_; }
  const PsiMap& map() const { return map_; }
  SpacingRule rule() const { return rule_; }
  std::uint64_t id() const { return id_; }

  // Span and mean spacing in the psi-coordinate; the solver's scaled
  // gradient norms use the mean spacing.
  double psi_span() const { return psi_nodes_.back() - psi_nodes_.front(); }
  double mean_psi_spacing() const { return psi_span() / (size() - 1); }

 private:
  double T_;
  PsiMap map_;
  SpacingRule rule_;
  std::vector<double> nodes_;
  std::vector<double> psi_nodes_;
  std::uint64_t id_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(double T, int n, const PsiMap& map, SpacingRule rule);

// Trapezoid quadrature weights in the psi-coordinate: integrating
// sum_i tau_i g(xi_i) approximates the weighted integral of g over [0, T].
std::vector<double> psi_trapezoid_weights(const Grid& grid);

}  // namespace psifrac
