#include "garz/scenarios.hpp"

#include "garz/errors.hpp"

namespace garz {

Scenario constant_scenario() {
  Scenario s;
  s.name = "constant";
  s.x_min = -3.0;
  s.x_max = 3.0;
  s.data = {Profile({Piece::constant(-3.0, 3.0, 0.4)}), Profile(), 0.0, 1.0};
  return s;
}

Scenario shock_scenario() {
  Scenario s;
  s.name = "shock";
  s.x_min = -4.5;
  s.x_max = 4.5;
  s.riemann = true;
  s.data = {Profile({Piece::constant(-2.0, 0.0, 0.2), Piece::constant(0.0, 2.0, 0.8)}), Profile(),
            0.0, 1.0};
  return s;
}

Scenario rarefaction_scenario() {
  Scenario s;
  s.name = "rarefaction";
  s.x_min = -4.5;
  s.x_max = 4.5;
  s.riemann = true;
  s.data = {Profile({Piece::constant(-2.0, 0.0, 0.8), Piece::constant(0.0, 2.0, 0.2)}), Profile(),
            0.0, 1.0};
  return s;
}

Scenario smoke_scenario() {
  Scenario s;
  s.name = "smoke";
  s.x_min = -5.5;
  s.x_max = 5.5;
  s.data = {Profile({Piece::constant(-1.5, 1.5, 0.6)}),
            Profile({Piece::constant(-1.5, 0.0, 0.5), Piece::constant(0.0, 1.5, -0.5)}), 0.5, 1.0};
  return s;
}

Scenario vacuum_scenario() {
  Scenario s;
  s.name = "vacuum";
  s.x_min = -4.5;
  s.x_max = 4.5;
  s.model = VelocityModel::power_law(2.0);
  s.data = {Profile({Piece::constant(-2.0, -0.5, 0.7), Piece::constant(0.5, 1.5, 0.5)}),
            Profile({Piece::constant(-2.0, -0.5, 0.3), Piece::constant(0.5, 1.5, -0.4)}), 0.2,
            0.5};
  return s;
}

Scenario smooth_scenario() {
  Scenario s;
  s.name = "smooth";
  s.x_min = -5.5;
  s.x_max = 4.5;
  s.data = {Profile({Piece::linear(-3.0, -1.0, 0.0, 0.6), Piece::constant(-1.0, 0.0, 0.6),
                     Piece::linear(0.0, 2.0, 0.6, 0.0)}),
            Profile(), 0.0, 1.0};
  return s;
}

std::vector<Scenario> shipped_scenarios() {
  return {constant_scenario(), shock_scenario(), rarefaction_scenario(), smoke_scenario(),
          vacuum_scenario()};
}

Scenario scenario_by_name(const std::string& name) {
  for (const auto& s : shipped_scenarios()) {
    if (s.name == name) return s;
  }
  if (name == "smooth") return smooth_scenario();
  throw InputRangeError("unknown scenario '" + name + "'");
}

}  // namespace garz
