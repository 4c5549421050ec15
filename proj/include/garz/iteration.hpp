#pragma once

#include <cstddef>
#include <vector>

#include "garz/errors.hpp"
#include "garz/model.hpp"
#include "garz/state.hpp"

namespace garz {

/// Tolerance-relaxed a-priori bounds enforced on every snapshot.
struct InvariantLimits {
  double u_max = 0.0;
  double z_max = 0.0;
  double psi_max = 0.0;
};

inline constexpr double kRhoBoundTolerance = 1e-12;
inline constexpr double kMarkerBoundTolerance = 1e-10;

struct SlabConfig {
  double tau0 = 0.25;
  double M0 = 4.0;
  double tol_phi = 1e-3;
  int max_picard_iters = 40;
  double cfl = 0.9;
  int snapshots = 32;
  /// Evaluate entropy residuals on every micro step.
  bool audit_entropy = true;
  /// Throw InvariantBreachError when a snapshot leaves `limits`.
  bool check_invariants = true;
  InvariantLimits limits;
};

/// History of one Picard solve. Iterate 1 is the frozen start state, so phi[j]
/// holds Phi_{j+2}; the other per-iterate vectors are indexed from iterate 1.
struct PicardTrace {
  double t_start = 0.0;
  double tau = 0.0;
  int halvings = 0;
  std::vector<double> phi;            ///< sup_t ||rho_n - rho_{n+1}|| + ||v_n - v_{n-1}||
  std::vector<double> phi_symmetric;  ///< sup_t ||rho_n - rho_{n+1}|| + ||v_n - v_{n+1}||
  std::vector<double> sup_u;
  std::vector<double> sup_z;
  std::vector<double> sup_psi;
  std::vector<double> max_tv;
  bool converged = false;

  std::size_t iterations() const { return sup_u.size(); }
  /// phi[j] / phi[j-1]; 0 when the previous value is already 0.
  std::vector<double> ratios() const;
};

/// Picard iteration failed to meet tol_phi within max_picard_iters.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, PicardTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const PicardTrace& trace() const { return trace_; }

 private:
  PicardTrace trace_;
};

/// Everything a slab solve returns.
struct SlabResult {
  std::vector<SystemState> snapshots;  ///< snapshots + 1 states, start included
  PicardTrace trace;
  std::vector<double> entropy_max;  ///< per k of the entropy lattice, accepted iterate
  double max_cfl_number = 0.0;
  std::size_t micro_steps = 0;
  /// Largest |v/rho - z| on the support over the accepted snapshots.
  double route_gap = 0.0;
};

/// Constants of one global solve, all computed from the initial state.
struct SolveConstants {
  double tilde_C = 0.0;
  double tau0_literal = 0.0;
  double slab_length = 0.0;
  double M0 = 0.0;
  double tol_phi = 0.0;
  double u0_sup = 0.0;
  double z0_sup = 0.0;
  double psi0_sup = 0.0;
  double rho0_l1 = 0.0;
  double rho0_tv = 0.0;
  double mass0 = 0.0;
  bool u_constant = false;
};

struct Trajectory {
  std::vector<SystemState> states;  ///< strictly increasing times
  std::vector<double> slab_starts;
  std::vector<PicardTrace> traces;
  SolveConstants constants;
  std::vector<double> entropy_k;
  std::vector<double> entropy_max;
  double max_cfl_number = 0.0;
  std::size_t micro_steps = 0;
  double route_gap = 0.0;
  double horizon = 0.0;

  const Grid& grid() const { return states.front().grid(); }
  std::vector<double> times() const;
};

/// Knobs of a global solve. Zero tol_phi / tau0 select the defaults.
struct SolverConfig {
  double cfl = 0.9;
  int snapshots_per_slab = 32;
  int max_picard_iters = 40;
  double tol_phi = 0.0;
  double tol_factor = 1.0;
  double tau0 = 0.0;
  int max_halvings = 5;
  int output_every = 1;
  bool audit_entropy = true;
  bool check_invariants = true;

  bool operator==(const SolverConfig&) const = default;
};

/// {0, 0.1, ..., 1}
std::vector<double> entropy_lattice();

/// 4 TV(rho0) + 4
double compute_M0(const CellField& rho0);

/// Growth constant assembled from the model's derivative sup-norms on
/// [0,1] x [0,u_max].
double compute_tilde_C(const VelocityModel& model, double z0_sup, double psi0_sup, double rho0_l1,
                       double u_max);

/// Largest tau <= 1/4 with exp(tilde_C tau) - 1 <= 2 tau, by bisection to 1e-10.
/// For tilde_C >= 2 only tau = 0 qualifies and 0 is returned.
double compute_tau0(double tilde_C);

/// Slab length actually used: compute_tau0 when positive, otherwise
/// min(1/4, ln(3/2) / tilde_C), which keeps exp(tilde_C tau) <= 3/2.
double slab_length(double tilde_C);

/// Gronwall envelope M0 exp(tilde_C t) + exp(tilde_C t) - 1.
double tv_envelope(double M0, double tilde_C, double t);

/// ||rho_curr - rho_next||_L1 + ||v_curr - v_prev||_L1 at one time.
double phi_functional(const SystemState& next, const SystemState& curr, const SystemState& prev);

/// Picard iteration over one slab starting from `start`. Throws
/// NonConvergenceError with the trace when tol_phi is not met.
SlabResult picard_slab(const SystemState& start, const SlabConfig& slab,
                       const VelocityModel& model);

/// Constants for a given initial state (tol_phi from config or h ||rho0||_L1).
SolveConstants solve_constants(const SystemState& initial, const VelocityModel& model,
                               const SolverConfig& config);

/// Chains Picard slabs to the horizon. The model is validated once on
/// [0,1] x [0, ||u0||]; failure throws UnsupportedModelError.
Trajectory solve_global(const InitialData& data, const Grid& grid, double horizon,
                        const SolverConfig& config, const VelocityModel& model);

/// Same from an already built initial state (no domain-margin check). A
/// positive config.tau0 fixes the slab length, which aligns paired runs.
Trajectory solve_global(const SystemState& initial, double horizon, const SolverConfig& config,
                        const VelocityModel& model);

/// Linear interpolation in time between stored states (clamped at the ends).
SystemState state_at(const Trajectory& traj, double t);

}  // namespace garz
