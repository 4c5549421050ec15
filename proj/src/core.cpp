#include "garz/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "garz/errors.hpp"

namespace garz {

Grid::Grid(double x_min, double x_max, std::size_t n_cells)
    : x_min_(x_min), x_max_(x_max), n_cells_(n_cells), h_(0.0) {
  if (n_cells < 2) throw InputRangeError("grid needs at least 2 cells");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InputRangeError("grid needs finite x_min < x_max");
  }
  h_ = (x_max - x_min) / static_cast<double>(n_cells);
}

CellField::CellField(const Grid& grid, double value)
    : grid_(grid), values_(grid.n_cells(), value) {}

CellField::CellField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_cells()) {
    throw GridMismatchError("field has " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_.n_cells()) +
                            " cells");
  }
}

double CellField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double CellField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double CellField::sup_norm() const {
  double s = 0.0;
  for (double x : values_) s = std::max(s, std::abs(x));
  return s;
}

double CellField::integral() const {
  double s = 0.0;
  for (double x : values_) s += x;
  return s * grid_.h();
}

void require_same_grid(const CellField& f, const CellField& g) {
  if (!(f.grid() == g.grid())) throw GridMismatchError("fields live on different grids");
}

double total_variation(const CellField& f) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) tv += std::abs(f[i + 1] - f[i]);
  return tv;
}

double l1_distance(const CellField& f, const CellField& g) {
  require_same_grid(f, g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] - g[i]);
  return s * f.grid().h();
}

double c0_distance(const CellField& f, const CellField& g) {
  require_same_grid(f, g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f[i] - g[i]));
  return s;
}

double l1_norm(const CellField& f) {
  double s = 0.0;
  for (double x : f) s += std::abs(x);
  return s * f.grid().h();
}

}  // namespace garz
