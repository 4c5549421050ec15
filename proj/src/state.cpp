#include "garz/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "garz/errors.hpp"
#include "garz/transport.hpp"

namespace garz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double Piece::value_at(double x) const {
  if (is_constant()) return value_left;
  return value_left + (value_right - value_left) * (x - x_left) / (x_right - x_left);
}

double Piece::integral(double a, double b) const {
  const double lo = std::max(a, x_left);
  const double hi = std::min(b, x_right);
  if (!(hi > lo)) return 0.0;
  if (is_constant()) return value_left * (hi - lo);
  return 0.5 * (value_at(lo) + value_at(hi)) * (hi - lo);
}

Profile::Profile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.x_left < b.x_left; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (std::isnan(p.x_left) || std::isnan(p.x_right) || !(p.x_right > p.x_left)) {
      throw InvalidDataError("piece " + std::to_string(i) + " has an empty or invalid interval");
    }
    if (!std::isfinite(p.value_left) || !std::isfinite(p.value_right)) {
      throw InvalidDataError("piece " + std::to_string(i) + " has a non-finite value");
    }
    if ((std::isinf(p.x_left) || std::isinf(p.x_right)) && !p.is_constant()) {
      throw InvalidDataError("unbounded piece " + std::to_string(i) + " must be constant");
    }
    if (i > 0 && pieces_[i - 1].x_right > p.x_left) {
      throw InvalidDataError("pieces " + std::to_string(i - 1) + " and " + std::to_string(i) +
                             " overlap");
    }
  }
}

double Profile::value(double x) const {
  for (const auto& p : pieces_) {
    if (x >= p.x_left && x < p.x_right) return p.value_at(x);
  }
  return 0.0;
}

double Profile::cell_average(double a, double b) const {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.integral(a, b);
  return s / (b - a);
}

double Profile::sup_abs() const {
  double s = 0.0;
  for (const auto& p : pieces_) s = std::max({s, std::abs(p.value_left), std::abs(p.value_right)});
  return s;
}

double Profile::min_value() const {
  double s = 0.0;
  for (const auto& p : pieces_) s = std::min({s, p.value_left, p.value_right});
  return s;
}

double Profile::max_value() const {
  double s = 0.0;
  for (const auto& p : pieces_) s = std::max({s, p.value_left, p.value_right});
  return s;
}

double Profile::l1_norm() const {
  double s = 0.0;
  for (const auto& p : pieces_) {
    if (std::isinf(p.x_left) || std::isinf(p.x_right)) {
      if (p.value_left != 0.0) return kInf;
      continue;
    }
    const double a = p.value_left;
    const double b = p.value_right;
    const double len = p.x_right - p.x_left;
    if (a * b >= 0.0) {
      s += 0.5 * (std::abs(a) + std::abs(b)) * len;
    } else {
      // Split at the root of the linear piece.
      const double frac = std::abs(a) / (std::abs(a) + std::abs(b));
      s += 0.5 * std::abs(a) * frac * len + 0.5 * std::abs(b) * (1.0 - frac) * len;
    }
  }
  return s;
}

Profile Profile::shifted(double dx) const {
  std::vector<Piece> out = pieces_;
  for (auto& p : out) {
    p.x_left += dx;
    p.x_right += dx;
  }
  return Profile(std::move(out));
}

bool Profile::constant_on(double a, double b, double value) const {
  double covered_to = a;
  for (const auto& p : pieces_) {
    if (p.x_right <= a || p.x_left >= b) continue;
    if (p.x_left > covered_to && value != 0.0) return false;  // zero gap
    if (!(p.is_constant() && p.value_left == value)) return false;
    covered_to = std::max(covered_to, p.x_right);
  }
  return value == 0.0 || covered_to >= b;
}

std::pair<double, double> Profile::support() const {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& p : pieces_) {
    if (p.value_left == 0.0 && p.value_right == 0.0) continue;
    lo = std::min(lo, p.x_left);
    hi = std::max(hi, p.x_right);
  }
  return {lo, hi};
}

void InitialData::validate() const {
  if (rho0.min_value() < 0.0 || rho0.max_value() > 1.0) {
    throw InvalidDataError("rho0 must take values in [0,1]");
  }
  if (!std::isfinite(z_inf) || !std::isfinite(u_inf)) {
    throw InvalidDataError("z_inf and u_inf must be finite");
  }
  if (u_inf < 0.0) throw InvalidDataError("u_inf must be >= 0");
}

InitialData InitialData::shifted(double dx) const {
  return {rho0.shifted(dx), psi0.shifted(dx), z_inf, u_inf};
}

SystemState build_initial_state(const InitialData& data, const Grid& grid) {
  data.validate();
  const std::size_t n = grid.n_cells();
  CellField rho(grid);
  CellField psi_avg(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid.left_edge(i);
    const double b = grid.right_edge(i);
    double r = data.rho0.cell_average(a, b);
    if (r < -1e-14 || r > 1.0 + 1e-14) {
      throw InvalidDataError("cell average of rho0 outside [0,1] in cell " + std::to_string(i));
    }
    rho[i] = std::clamp(r, 0.0, 1.0);
    psi_avg[i] = data.psi0.cell_average(a, b);
  }

  CellField w(grid);
  for (std::size_t i = 0; i < n; ++i) w[i] = rho[i] * psi_avg[i];
  CellField z = reconstruct(w, data.z_inf);
  CellField v(grid);
  for (std::size_t i = 0; i < n; ++i) v[i] = rho[i] * z[i];
  CellField u = reconstruct(v, data.u_inf);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] < 0.0) {
      throw InvalidDataError("u0 = " + std::to_string(u[i]) + " < 0 in cell " + std::to_string(i));
    }
  }

  SystemState s{0.0, std::move(rho), std::move(v), std::move(w), std::move(z), std::move(u),
                CellField(grid), data.z_inf, data.u_inf};
  s.psi = extract_ratio(s.w, s.rho, 0.0);
  return s;
}

double domain_margin(double max_speed, double horizon) { return max_speed * horizon + 1.0; }

void check_domain_margin(const InitialData& data, const Grid& grid, double max_speed,
                         double horizon) {
  const double background = data.rho0.value(grid.x_min());
  const bool constant_marker = data.z_inf == 0.0 && data.psi0.sup_abs() == 0.0;
  if (constant_marker && data.rho0.constant_on(grid.x_min(), grid.x_max(), background)) return;

  const double m = domain_margin(max_speed, horizon);
  const double left_hi = grid.x_min() + m;
  const double right_lo = grid.x_max() - m;
  if (!(left_hi < right_lo)) {
    throw InvalidDataError("grid [" + std::to_string(grid.x_min()) + ", " +
                           std::to_string(grid.x_max()) + "] is narrower than twice the margin " +
                           std::to_string(m));
  }
  if (data.rho0.constant_on(grid.x_min(), left_hi, 0.0) &&
      data.rho0.constant_on(right_lo, grid.x_max(), 0.0)) {
    return;
  }
  const bool uniform_background = data.rho0.constant_on(grid.x_min(), left_hi, background) &&
                                  data.rho0.constant_on(right_lo, grid.x_max(), background);
  if (uniform_background && constant_marker) return;
  throw InvalidDataError("rho0 must vanish within " + std::to_string(m) +
                         " of both grid ends (or be a common constant there with psi0 = 0, "
                         "z_inf = 0)");
}

}  // namespace garz
