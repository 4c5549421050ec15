#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace garz {

/// Uniform 1-D mesh of n_cells cells on [x_min, x_max].
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_cells);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t n_cells() const { return n_cells_; }
  double h() const { return h_; }
  double left_edge(std::size_t i) const { return x_min_ + h_ * static_cast<double>(i); }
  double right_edge(std::size_t i) const { return x_min_ + h_ * static_cast<double>(i + 1); }
  double center(std::size_t i) const { return x_min_ + h_ * (static_cast<double>(i) + 0.5); }
  /// Same domain, twice the cells.
  Grid refined() const { return Grid(x_min_, x_max_, 2 * n_cells_); }

  bool operator==(const Grid& other) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_cells_;
  double h_;
};

/// Cell averages on a grid.
class CellField {
 public:
  explicit CellField(const Grid& grid, double value = 0.0);
  CellField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double min() const;
  double max() const;
  /// max_i |f_i|
  double sup_norm() const;
  /// h * sum_i f_i
  double integral() const;

  bool operator==(const CellField& other) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Sum of |f_{i+1} - f_i| over interior interfaces.
double total_variation(const CellField& f);
/// h * sum_i |f_i - g_i|; throws GridMismatchError on different grids.
double l1_distance(const CellField& f, const CellField& g);
/// max_i |f_i - g_i|; throws GridMismatchError on different grids.
double c0_distance(const CellField& f, const CellField& g);
double l1_norm(const CellField& f);

void require_same_grid(const CellField& f, const CellField& g);

}  // namespace garz
