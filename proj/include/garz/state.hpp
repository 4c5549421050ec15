#pragma once

#include <vector>

#include "garz/core.hpp"

namespace garz {

/// Linear piece on [x_left, x_right]; constant when both values agree.
/// Unbounded pieces (infinite endpoints) must be constant.
struct Piece {
  double x_left = 0.0;
  double x_right = 0.0;
  double value_left = 0.0;
  double value_right = 0.0;

  static Piece constant(double a, double b, double value) { return {a, b, value, value}; }
  static Piece linear(double a, double b, double va, double vb) { return {a, b, va, vb}; }

  bool is_constant() const { return value_left == value_right; }
  double value_at(double x) const;
  /// Exact integral over [a,b] intersected with the piece.
  double integral(double a, double b) const;

  bool operator==(const Piece&) const = default;
};

/// Piecewise constant/linear profile, zero outside its pieces.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<Piece> pieces);

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  double value(double x) const;
  double cell_average(double a, double b) const;
  double sup_abs() const;
  double min_value() const;
  double max_value() const;
  /// Integral of |profile| over the real line (infinite for unbounded pieces).
  double l1_norm() const;
  Profile shifted(double dx) const;
  /// True when the profile takes the single value `value` on all of [a,b].
  bool constant_on(double a, double b, double value) const;
  /// Smallest interval outside of which the profile vanishes.
  std::pair<double, double> support() const;

  bool operator==(const Profile&) const = default;

 private:
  std::vector<Piece> pieces_;  // sorted, non-overlapping
};

/// Initial data (rho0, psi0, z_inf, u_inf); z0 and u0 are derived by
/// antiderivatives so that z0' = rho0 psi0 and u0' = rho0 z0 hold exactly.
struct InitialData {
  Profile rho0;
  Profile psi0;
  double z_inf = 0.0;
  double u_inf = 0.0;

  /// Throws InvalidDataError when rho0 leaves [0,1] or inputs are not finite.
  void validate() const;
  /// Copy with rho0 and psi0 translated by dx.
  InitialData shifted(double dx) const;

  bool operator==(const InitialData&) const = default;
};

/// One time level of the system.
struct SystemState {
  double t = 0.0;
  CellField rho;
  CellField v;    ///< conserved marker rho z (= d_x u)
  CellField w;    ///< conserved marker rho psi (= d_x z)
  CellField z;    ///< z_inf + antiderivative of w
  CellField u;    ///< u_inf + antiderivative of v
  CellField psi;  ///< w / rho, 0 on vacuum
  double z_inf = 0.0;
  double u_inf = 0.0;

  const Grid& grid() const { return rho.grid(); }
};

/// Cell-averages the data and builds z, v, u by inclusive prefix sums.
/// Throws InvalidDataError on rho0 outside [0,1] or u0 < 0 anywhere.
SystemState build_initial_state(const InitialData& data, const Grid& grid);

/// Width of the strip at each end of the grid that waves cannot cross by T.
double domain_margin(double max_speed, double horizon);

/// Checks that nothing can reach the boundary before `horizon`: on both
/// margin strips rho0 must vanish, or rho0 must be the same constant on both
/// strips with psi0 = 0 everywhere and z_inf = 0 (constant u, so inflow and
/// outflow balance).
void check_domain_margin(const InitialData& data, const Grid& grid, double max_speed,
                         double horizon);

}  // namespace garz
