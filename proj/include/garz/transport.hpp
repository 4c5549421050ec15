#pragma once

#include <vector>

#include "garz/core.hpp"

namespace garz {

/// Densities at or below this are vacuum for ratio extraction.
inline constexpr double kRhoFloor = 1e-12;

/// Interface fluxes F_{i+1/2}, i = -1..n-1, produced by one density step.
/// values[0] is the left boundary interface, values[n] the right one.
struct InterfaceFluxes {
  Grid grid;
  double dt = 0.0;
  std::vector<double> values;
};

/// Conservative upwind update of a marker q = rho * theta using the density
/// fluxes of the matching step. Throws GridMismatchError or PreconditionError
/// when the fluxes belong to another grid or time step.
CellField step_marker(const CellField& q, const CellField& rho_old, const InterfaceFluxes& fluxes,
                      double dt);

/// q / rho where rho > kRhoFloor, `fallback` elsewhere.
CellField extract_ratio(const CellField& q, const CellField& rho, double fallback);

/// Like extract_ratio, but vacuum cells take the value of the nearest
/// non-vacuum cell on their left (`left_boundary` if there is none).
CellField extract_ratio_pinned(const CellField& q, const CellField& rho, double left_boundary);

/// boundary + h * inclusive prefix sum of q.
CellField reconstruct(const CellField& q, double boundary);

/// Inverse of reconstruct: (f_i - f_{i-1}) / h with f_{-1} = boundary.
CellField difference(const CellField& f, double boundary);

/// Largest |ratio_a - ratio_b| over cells with rho > kRhoFloor.
double max_gap_on_support(const CellField& a, const CellField& b, const CellField& rho);

}  // namespace garz
