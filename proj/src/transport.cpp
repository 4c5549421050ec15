#include "garz/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "garz/errors.hpp"

namespace garz {

namespace {

// Upwind ratio for the marker flux. Only exact vacuum is skipped: thin tails
// just above kRhoFloor still need their own ratio or the bound leaks.
double upwind_ratio(double q, double rho) {
  return rho > std::numeric_limits<double>::min() ? q / rho : 0.0;
}

}  // namespace

CellField step_marker(const CellField& q, const CellField& rho_old, const InterfaceFluxes& fluxes,
                      double dt) {
  require_same_grid(q, rho_old);
  if (!(fluxes.grid == q.grid()) || fluxes.values.size() != q.size() + 1) {
    throw GridMismatchError("interface fluxes were computed on a different grid");
  }
  if (fluxes.dt != dt) {
    throw PreconditionError("marker step dt " + std::to_string(dt) +
                            " differs from the density step dt " + std::to_string(fluxes.dt));
  }
  const std::size_t n = q.size();
  const double ratio = dt / q.grid().h();
  // Ghost cells copy the boundary cells.
  auto cell = [&](std::ptrdiff_t i) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double f = fluxes.values[k];
    const std::size_t up = f >= 0.0 ? cell(static_cast<std::ptrdiff_t>(k) - 1) : cell(static_cast<std::ptrdiff_t>(k));
    g[k] = f * upwind_ratio(q[up], rho_old[up]);
  }
  CellField out(q.grid());
  for (std::size_t i = 0; i < n; ++i) out[i] = q[i] - ratio * (g[i + 1] - g[i]);
  return out;
}

CellField extract_ratio(const CellField& q, const CellField& rho, double fallback) {
  require_same_grid(q, rho);
  CellField out(q.grid(), fallback);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (rho[i] > kRhoFloor) out[i] = q[i] / rho[i];
  }
  return out;
}

CellField extract_ratio_pinned(const CellField& q, const CellField& rho, double left_boundary) {
  require_same_grid(q, rho);
  CellField out(q.grid());
  double last = left_boundary;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (rho[i] > kRhoFloor) last = q[i] / rho[i];
    out[i] = last;
  }
  return out;
}

CellField reconstruct(const CellField& q, double boundary) {
  CellField out(q.grid());
  const double h = q.grid().h();
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    sum += q[i];
    out[i] = boundary + h * sum;
  }
  return out;
}

CellField difference(const CellField& f, double boundary) {
  CellField out(f.grid());
  const double h = f.grid().h();
  double prev = boundary;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = (f[i] - prev) / h;
    prev = f[i];
  }
  return out;
}

double max_gap_on_support(const CellField& a, const CellField& b, const CellField& rho) {
  require_same_grid(a, b);
  require_same_grid(a, rho);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rho[i] > kRhoFloor) gap = std::max(gap, std::abs(a[i] - b[i]));
  }
  return gap;
}

}  // namespace garz
