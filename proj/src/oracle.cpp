#include "garz/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "garz/errors.hpp"
#include "garz/transport.hpp"

namespace garz {

namespace {

constexpr int kConcavitySamples = 33;
constexpr double kConcavityTolerance = 1e-9;
constexpr double kBlowup = 1e6;

void require_concave(double a, double b, double u_c, const VelocityModel& model) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  for (int j = 0; j < kConcavitySamples; ++j) {
    const double rho = lo + (hi - lo) * j / (kConcavitySamples - 1);
    if (model.flux_second_derivative(rho, u_c) > kConcavityTolerance) {
      throw UnsupportedModelError("flux of '" + model.name() + "' is not concave at rho = " +
                                  std::to_string(rho) + ", u = " + std::to_string(u_c));
    }
  }
}

// rho in [lo, hi] with f'(rho) = xi, f' decreasing on the interval.
double invert_speed(double xi, double lo, double hi, double u_c, const VelocityModel& model) {
  if (model.name() == "greenshields") return std::clamp(0.5 * (1.0 - xi / u_c), lo, hi);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.flux_derivative(mid, u_c) > xi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Jump {
  double x;
  double left;
  double right;
  double s_min;
  double s_max;
};

std::vector<Jump> jumps_of(const Profile& rho0, double u_c, const VelocityModel& model) {
  std::vector<double> bps;
  for (const auto& p : rho0.pieces()) {
    if (!p.is_constant()) throw InvalidDataError("exact Riemann superposition needs constant pieces");
    if (std::isfinite(p.x_left)) bps.push_back(p.x_left);
    if (std::isfinite(p.x_right)) bps.push_back(p.x_right);
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<Jump> out;
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const double left = rho0.value(k == 0 ? bps[k] - 1.0 : 0.5 * (bps[k - 1] + bps[k]));
    const double right = rho0.value(k + 1 == bps.size() ? bps[k] + 1.0 : 0.5 * (bps[k] + bps[k + 1]));
    if (left == right) continue;
    const auto [a, b] = riemann_wave_span(left, right, u_c, model);
    out.push_back({bps[k], left, right, a, b});
  }
  return out;
}

}  // namespace

Trajectory viscous_solve(const InitialData& data, double eps, const Grid& grid, double horizon,
                         const VelocityModel& model, const ViscousConfig& config) {
  if (!(eps >= grid.h())) throw PreconditionError("viscosity eps must be >= h");
  if (!(horizon > 0.0)) throw InputRangeError("horizon must be > 0");
  if (config.snapshots < 1) throw InputRangeError("viscous solve needs at least one snapshot");
  SystemState s = build_initial_state(data, grid);
  Trajectory traj;
  traj.constants = solve_constants(s, model, SolverConfig{});
  traj.horizon = horizon;
  traj.states.push_back(s);

  const std::size_t n = grid.n_cells();
  const double h = grid.h();
  auto at = [n](const CellField& f, std::ptrdiff_t i) {
    return f[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1))];
  };
  CellField rho = s.rho;
  CellField u = s.u;
  CellField rho_next(grid);
  CellField u_next(grid);
  std::vector<double> flux(n);
  double t = 0.0;
  for (int j = 1; j <= config.snapshots; ++j) {
    const double t_next = horizon * j / config.snapshots;
    while (t < t_next) {
      double speed = 1e-12;
      for (double x : u) speed = std::max(speed, model.max_char_speed(x));
      const double dt_max = std::min(config.cfl * h / speed, 0.25 * h * h / eps);
      const double remaining = t_next - t;
      const double dt = remaining <= dt_max * (1.0 + 1e-12)
                            ? remaining
                            : remaining / std::ceil(remaining / dt_max);
      const double lam = dt / (2.0 * h);
      const double mu = eps * dt / (h * h);
      for (std::size_t i = 0; i < n; ++i) flux[i] = model.flux_unchecked(rho[i], u[i]);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        const double fl = flux[static_cast<std::size_t>(std::max<std::ptrdiff_t>(k - 1, 0))];
        const double fr = flux[std::min(i + 1, n - 1)];
        rho_next[i] = rho[i] - lam * (fr - fl) + mu * (at(rho, k + 1) - 2.0 * rho[i] + at(rho, k - 1));
        const double vel = model.velocity(std::clamp(rho[i], 0.0, 1.0), u[i]);
        u_next[i] = u[i] - lam * vel * (at(u, k + 1) - at(u, k - 1)) +
                    mu * (at(u, k + 1) - 2.0 * u[i] + at(u, k - 1));
      }
      std::swap(rho, rho_next);
      std::swap(u, u_next);
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rho[i]) || !std::isfinite(u[i]) || std::abs(rho[i]) > kBlowup ||
            std::abs(u[i]) > kBlowup) {
          throw InstabilityError("viscous solve blew up at t = " + std::to_string(t));
        }
      }
      t = dt == remaining ? t_next : t + dt;
      ++traj.micro_steps;
    }
    SystemState snap{t_next, rho, difference(u, s.u_inf), CellField(grid), CellField(grid), u,
                     CellField(grid), s.z_inf, s.u_inf};
    traj.states.push_back(std::move(snap));
  }
  return traj;
}

std::pair<double, double> riemann_wave_span(double rho_left, double rho_right, double u_c,
                                            const VelocityModel& model) {
  if (rho_left < rho_right) {
    const double s = (model.flux_unchecked(rho_right, u_c) - model.flux_unchecked(rho_left, u_c)) /
                     (rho_right - rho_left);
    return {s, s};
  }
  if (rho_left > rho_right) {
    return {model.flux_derivative(rho_left, u_c), model.flux_derivative(rho_right, u_c)};
  }
  const double s = model.flux_derivative(rho_left, u_c);
  return {s, s};
}

double lwr_riemann_exact(double rho_left, double rho_right, double u_c, const VelocityModel& model,
                         double t, double x) {
  if (!(t > 0.0)) throw InputRangeError("exact Riemann solution needs t > 0");
  if (!(rho_left >= 0.0 && rho_left <= 1.0 && rho_right >= 0.0 && rho_right <= 1.0)) {
    throw InputRangeError("Riemann states must lie in [0,1]");
  }
  if (rho_left == rho_right) return rho_left;
  require_concave(rho_left, rho_right, u_c, model);
  const double xi = x / t;
  const auto [a, b] = riemann_wave_span(rho_left, rho_right, u_c, model);
  if (rho_left < rho_right) return xi < a ? rho_left : rho_right;
  if (xi <= a) return rho_left;
  if (xi >= b) return rho_right;
  return invert_speed(xi, rho_right, rho_left, u_c, model);
}

double exact_piecewise_constant(const Profile& rho0, double u_c, const VelocityModel& model,
                                double t, double x) {
  const std::vector<Jump> jumps = jumps_of(rho0, u_c, model);
  if (jumps.empty()) return rho0.value(x);
  for (std::size_t k = 0; k + 1 < jumps.size(); ++k) {
    if (jumps[k].x + jumps[k].s_max * t > jumps[k + 1].x + jumps[k + 1].s_min * t) {
      throw PreconditionError("waves from x = " + std::to_string(jumps[k].x) + " and x = " +
                              std::to_string(jumps[k + 1].x) + " interact before t = " +
                              std::to_string(t));
    }
  }
  if (t <= 0.0) return rho0.value(x);
  for (const auto& j : jumps) {
    if (x < j.x + j.s_min * t) return j.left;
    if (x <= j.x + j.s_max * t) return lwr_riemann_exact(j.left, j.right, u_c, model, t, x - j.x);
  }
  return jumps.back().right;
}

double characteristic_solution(const Profile& rho0, double u_c, const VelocityModel& model,
                               double t, double x) {
  const auto& pieces = rho0.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Piece& p = pieces[k];
    const double prev = (k > 0 && pieces[k - 1].x_right == p.x_left) ? pieces[k - 1].value_right : 0.0;
    if (p.value_left != prev) throw InvalidDataError("characteristic solution needs continuous data");
    const bool joined = k + 1 < pieces.size() && pieces[k + 1].x_left == p.x_right;
    if (!joined && p.value_right != 0.0) {
      throw InvalidDataError("characteristic solution needs continuous data");
    }
    if (p.is_constant()) continue;
    const double slope = (p.value_right - p.value_left) / (p.x_right - p.x_left);
    for (int j = 0; j < kConcavitySamples; ++j) {
      const double rho = p.value_left + (p.value_right - p.value_left) * j / (kConcavitySamples - 1);
      if (1.0 + t * model.flux_second_derivative(rho, u_c) * slope <= 0.0) {
        throw PreconditionError("characteristics cross before t = " + std::to_string(t));
      }
    }
  }
  if (t <= 0.0) return rho0.value(x);
  const double reach = model.max_char_speed(u_c) * t + 1.0;
  double lo = x - reach;
  double hi = x + reach;
  auto foot = [&](double xi) { return xi + model.flux_derivative(rho0.value(xi), u_c) * t; };
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (foot(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return rho0.value(0.5 * (lo + hi));
}

CellField cell_averages(const Grid& grid, const std::function<double(double)>& g) {
  static constexpr std::array<double, 8> nodes = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
      0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> weights = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
      0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  constexpr int kSub = 4;
  CellField out(grid);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double a = grid.left_edge(i);
    const double w = grid.h() / kSub;
    double sum = 0.0;
    for (int s = 0; s < kSub; ++s) {
      const double mid = a + w * (s + 0.5);
      for (std::size_t q = 0; q < nodes.size(); ++q) sum += weights[q] * g(mid + 0.5 * w * nodes[q]);
    }
    out[i] = sum * 0.5 / kSub;
  }
  return out;
}

}  // namespace garz
