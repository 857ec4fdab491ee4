#pragma once

#include <functional>
#include <vector>

#include "psifrac/grid.hpp"

namespace psifrac {

// Nodal values of a scalar function on a shared grid. Values are required
// to be finite at construction; operators that would produce a singular
// endpoint value extrapolate it instead and say so in their reports.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);

  static GridFunction zeros(GridPtr grid);
  static GridFunction sample(GridPtr grid, const std::function<double(double)>& f);

  const GridPtr& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double max_abs() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

// Throws GridError unless both functions live on the same grid object.
void require_same_grid(const GridFunction& f, const GridFunction& g,
                       const char* where);

}  // namespace psifrac
