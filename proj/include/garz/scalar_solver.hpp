#pragma once

#include "garz/core.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"
#include "garz/transport.hpp"

namespace garz {

/// Lower bound on the characteristic speed used by cfl_dt.
inline constexpr double kMinSpeed = 1e-12;

/// Godunov interface flux for rho -> rho V(rho, u_if): the minimum of the flux
/// over [rhoL, rhoR] when rhoL <= rhoR, the maximum over [rhoR, rhoL] otherwise.
double godunov_flux(double rho_left, double rho_right, double u_if, const VelocityModel& model);

/// Largest characteristic speed over the cells and interfaces of u, floored
/// at kMinSpeed.
double max_speed(const CellField& u, const VelocityModel& model);

/// cfl * h / max_speed(u).
double cfl_dt(const CellField& u, const VelocityModel& model, double cfl);
double cfl_dt(const SystemState& state, const VelocityModel& model, double cfl);

struct StepDiagnostics {
  double dt = 0.0;
  double cfl_number = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
};

struct DensityStep {
  CellField rho;
  InterfaceFluxes fluxes;
  StepDiagnostics diagnostics;
};

/// One conservative Godunov step of the density equation with u frozen.
/// Interface markers are (u_i + u_{i+1}) / 2; ghost cells copy the boundary
/// cells. Throws PreconditionError when dt exceeds the CFL limit.
DensityStep step_density(const CellField& rho, const CellField& u, double dt,
                         const VelocityModel& model);
DensityStep step_density(const SystemState& state, double dt, const VelocityModel& model);

/// Discrete Kruzhkov residual of one step for the constant k:
///
///   (|rho_new - k| - |rho_old - k|) / dt + (Q_{i+1/2} - Q_{i-1/2}) / h
///     + s_i k dV/du(k, u_i) (u_{i+1} - u_{i-1}) / (2h)
///
/// with Q the Godunov entropy flux and s_i = sign(rho_new_i - k).
/// Admissible steps give residuals <= 0 up to rounding.
CellField entropy_residual(const CellField& rho_old, const CellField& rho_new, const CellField& u,
                           double k, double dt, const VelocityModel& model);

}  // namespace garz
