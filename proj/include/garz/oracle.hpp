#pragma once

#include <functional>
#include <utility>

#include "garz/core.hpp"
#include "garz/iteration.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"

namespace garz {

struct ViscousConfig {
  double cfl = 0.45;
  /// Stored states, evenly spaced over [0, T] (the initial state excluded).
  int snapshots = 32;
};

/// Explicit centred-difference solve of the system with eps * u_xx added to
/// both equations. dt <= min(cfl h / s_max, h^2 / (4 eps)). Only rho and u are
/// evolved; v is the difference quotient of u, w, z and psi are zero.
/// Throws PreconditionError when eps < h, InstabilityError on NaN or blow-up.
Trajectory viscous_solve(const InitialData& data, double eps, const Grid& grid, double horizon,
                         const VelocityModel& model, const ViscousConfig& config = {});

/// Smallest and largest wave speed of the Riemann problem (rhoL, rhoR) at u_c.
std::pair<double, double> riemann_wave_span(double rho_left, double rho_right, double u_c,
                                            const VelocityModel& model);

/// Entropy solution of the scalar Riemann problem with the marker frozen at
/// u_c, evaluated at (t, x). Throws UnsupportedModelError when the flux is not
/// concave between the two states and InputRangeError for t <= 0.
double lwr_riemann_exact(double rho_left, double rho_right, double u_c, const VelocityModel& model,
                         double t, double x);

/// Exact solution for piecewise-constant rho0 at constant u_c while the
/// elementary waves of neighbouring jumps have not met. Throws
/// InvalidDataError for non-constant pieces, PreconditionError once waves interact.
double exact_piecewise_constant(const Profile& rho0, double u_c, const VelocityModel& model,
                                double t, double x);

/// Solution by characteristics for continuous piecewise-linear rho0 at
/// constant u_c, valid until the first shock forms. Throws InvalidDataError
/// for jumps and PreconditionError once characteristics cross.
double characteristic_solution(const Profile& rho0, double u_c, const VelocityModel& model,
                               double t, double x);

/// Cell averages of g by composite 8-point Gauss-Legendre quadrature.
CellField cell_averages(const Grid& grid, const std::function<double(double)>& g);

}  // namespace garz
