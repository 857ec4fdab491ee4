#include "psifrac/grid_function.hpp"

#include <cmath>

#include "psifrac/errors.hpp"

namespace psifrac {

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw GridError("GridFunction: null grid");
  if (static_cast<int>(values_.size()) != grid_->size())
    throw GridError("GridFunction: value count " + std::to_string(values_.size()) +
                    " does not match grid size " + std::to_string(grid_->size()));
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw NumericError("GridFunction: non-finite value at node " +
                         std::to_string(i));
}

GridFunction GridFunction::zeros(GridPtr grid) {
  const int n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(GridPtr grid,
                                  const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v[i] = f(grid->nodes()[i]);
  return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void require_same_grid(const GridFunction& f, const GridFunction& g,
                       const char* where) {
  if (f.grid()->id() != g.grid()->id())
    throw GridError(std::string(where) + ": arguments live on different grids");
}

}  // namespace psifrac
