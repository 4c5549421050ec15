#pragma once

#include <string>
#include <vector>

#include "garz/core.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"

namespace garz {

/// A shipped test problem: data, domain, horizon and closure.
struct Scenario {
  std::string name;
  InitialData data;
  double x_min = 0.0;
  double x_max = 0.0;
  double horizon = 1.0;
  VelocityModel model = VelocityModel::greenshields();
  /// Piecewise-constant rho0 with psi0 = 0 and z_inf = 0 (exact Riemann oracle applies).
  bool riemann = false;

  Grid grid(std::size_t n_cells) const { return Grid(x_min, x_max, n_cells); }
};

/// rho = 0.4 everywhere, u = 1.
Scenario constant_scenario();
/// u = 1; 0.2 on [-2,0), 0.8 on [0,2]: a stationary shock between two edge waves.
Scenario shock_scenario();
/// u = 1; 0.8 on [-2,0), 0.2 on [0,2]: a centred fan between two edge waves.
Scenario rarefaction_scenario();
/// 0.6 plateau on [-1.5,1.5] with a +-0.5 square pulse in psi0, z_inf = 0.5.
Scenario smoke_scenario();
/// Two platoons separated by an empty gap, power-law closure.
Scenario vacuum_scenario();
/// u = 1; Lipschitz trapezoid that stays smooth up to t = 1.
Scenario smooth_scenario();

/// The five acceptance scenarios in a fixed order.
std::vector<Scenario> shipped_scenarios();
/// Any scenario above by name; throws InputRangeError for unknown names.
Scenario scenario_by_name(const std::string& name);

}  // namespace garz
