#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "garz/core.hpp"
#include "garz/iteration.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"

namespace garz {

/// Tolerances pinned by the audit.
inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kTvTolerance = 1e-12;
inline constexpr double kEntropyFactor = 10.0;  // residual <= kEntropyFactor * h
inline constexpr double kPrefixTolerance = 1e-10;
inline constexpr double kUniquenessFactor = 20.0;

struct CheckEntry {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;
  double at_time = 0.0;
};

struct ConvergenceRow {
  double h = 0.0;
  double error = 0.0;
  double order = 0.0;  ///< log2(e_{2h} / e_h); NaN on the first row or for zero errors
};

/// Result of an audit or a measurement. Every enabled check appears once.
struct RunReport {
  std::vector<CheckEntry> checks;
  std::vector<double> entropy_k;
  std::vector<double> entropy_max;
  std::vector<double> times;
  std::vector<double> tv;
  std::vector<double> tv_envelope;
  std::vector<double> mass;
  /// Final Phi of each slab, stamped with the slab start time.
  std::vector<std::pair<double, double>> phi_history;
  std::optional<double> k_measured;
  std::vector<double> ratio_times;
  std::vector<double> ratio_values;
  std::vector<ConvergenceRow> convergence;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  bool pass() const;
  /// Throws std::out_of_range for an unknown name.
  const CheckEntry& check(const std::string& name) const;
  std::string to_json() const;
  /// Header plus one "check,worst_violation,pass" line per entry.
  std::string to_csv() const;
};

/// Reference quantities an audit compares against.
struct AuditContext {
  double h = 0.0;
  double mass0 = 0.0;
  double rho0_l1 = 0.0;
  double rho0_tv = 0.0;
  double u0_sup = 0.0;
  double z0_sup = 0.0;
  double psi0_sup = 0.0;
  double M0 = 0.0;
  double tilde_C = 0.0;
  double tol_phi = 0.0;
  double first_slab_end = 0.0;
  bool u_constant = false;
};

/// Context from the trajectory's own initial state and constants.
AuditContext make_audit_context(const Trajectory& traj);

/// Checks every stored state against the a-priori bounds, conservation, TV
/// control, entropy residuals, Phi at convergence, the prefix-sum identities
/// and the vacuum rule for z. Never throws on failures.
RunReport audit_trajectory(const Trajectory& traj, const AuditContext& ctx);
RunReport audit_trajectory(const Trajectory& traj);

struct StabilityResult {
  double k_measured = 0.0;
  double lhs0 = 0.0;
  double tilde_C = 0.0;
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> ratio;
};

/// Runs both data with a common slab length and reports
/// max_t LHS(t) / LHS(0), LHS = ||u1 - u2||_C0 + ||rho1 - rho2||_L1, over the
/// union of both runs' stored times. Throws DegeneratePairError when LHS(0) = 0.
StabilityResult measure_stability(const InitialData& data1, const InitialData& data2,
                                  const Grid& grid, double horizon, const SolverConfig& config,
                                  const VelocityModel& model);

struct UniquenessResult {
  double gap = 0.0;
  double tol_phi = 0.0;
  bool pass = false;
  std::vector<std::string> variants;
};

/// Solves the same data under `seeds` internal settings (cfl in {0.4, 0.5,
/// 0.8}, snapshot cadence, Phi tolerance factor) and returns the largest
/// pairwise ||rho_a - rho_b||_L1 + ||u_a - u_b||_C0 over time.
/// Passes iff gap <= 20 tol_phi. Requires seeds >= 2.
UniquenessResult uniqueness_check(const InitialData& data, const Grid& grid, double horizon,
                                  const SolverConfig& config, const VelocityModel& model,
                                  int seeds);

/// Reference cell averages at the horizon on a given grid.
using ReferenceFn = std::function<CellField(const Grid&)>;

/// L1 error of solve_global at the horizon against `reference` on each grid
/// of a halving ladder (>= 3 rungs), restricted to cells whose centres lie in
/// `window` when given.
std::vector<ConvergenceRow> convergence_study(const InitialData& data, double horizon,
                                              const std::vector<Grid>& grids,
                                              const ReferenceFn& reference,
                                              const SolverConfig& config,
                                              const VelocityModel& model,
                                              std::optional<std::pair<double, double>> window = {});

/// Grids with n0, 2 n0, 4 n0, ... cells on [x_min, x_max].
std::vector<Grid> halving_ladder(double x_min, double x_max, std::size_t n0, int rungs);

/// Thread budget for multi-solve operations: GARZ_THREADS when set, else the
/// hardware concurrency.
unsigned worker_threads();

}  // namespace garz
