#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "garz/errors.hpp"
#include "garz/iteration.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"
#include "garz/verify.hpp"

namespace garz::cli {

/// Bad configuration text. `line` is 0 when only the field is known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string field, int line = 0)
      : Error(message), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct StabilitySpec {
  double shift = 0.0;        ///< translation of rho0 and psi0 for the second run
  double shift_cells = 0.0;  ///< extra translation in cells of the configured grid
  double u_inf_delta = 0.0;
  bool operator==(const StabilitySpec&) const = default;
};

struct ConvergenceSpec {
  std::size_t n0 = 200;
  int rungs = 3;
  std::string reference = "exact";  ///< exact | characteristic | viscous
  double eps_factor = 4.0;          ///< viscous reference uses eps = eps_factor * h
  double min_order = 0.4;
  std::optional<std::pair<double, double>> window;
  bool operator==(const ConvergenceSpec&) const = default;
};

/// Everything a run configuration file describes.
struct RunConfig {
  // [model]
  std::string model = "greenshields";
  std::map<std::string, double> model_params;
  // [grid]
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_cells = 200;
  // [initial]
  InitialData data;
  // [slab]
  double horizon = 1.0;
  SolverConfig solver;
  // [output]
  std::string name = "run";
  bool plot = true;
  // [checks]
  bool audit = true;
  int seeds = 3;
  // [stability], [convergence]
  StabilitySpec stability;
  ConvergenceSpec convergence;

  Grid grid() const { return Grid(x_min, x_max, n_cells); }
  VelocityModel velocity_model() const { return VelocityModel::from_name(model, model_params); }
  /// Second datum of the stability pair.
  InitialData perturbed_data() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the sectioned key = value format. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Normalized text; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& config);

/// Pieces as "(a, b, v)" or "(a, b, vl->vr)" separated by blanks.
Profile parse_profile(const std::string& text, const std::string& field);
std::string format_profile(const Profile& profile);
/// Shortest round-tripping decimal form; "inf" / "-inf" for infinities.
std::string format_number(double x);

/// Writes plot/rho_NNNN.dat, u_NNNN.dat, z_NNNN.dat per stored state and the
/// tv.dat, mass.dat, phi.dat series. Returns the number of files written.
std::size_t emit_plotdata(const Trajectory& traj, const std::filesystem::path& dir);
/// Writes whatever series the report carries (tv, mass, phi, stability ratio,
/// convergence table).
std::size_t emit_plotdata(const RunReport& report, const std::filesystem::path& dir);

/// Writes manifest.json and snapshots/NNNN.csv for a trajectory.
void write_trajectory(const Trajectory& traj, const RunConfig& config,
                      const std::filesystem::path& dir);

/// Command-line entry point. Exit codes: 0 all checks pass, 1 solver error,
/// 2 configuration or usage error, 3 a check failed.
int run(int argc, char** argv);

}  // namespace garz::cli
