#include "garz/scalar_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "garz/errors.hpp"

namespace garz {

namespace {

constexpr int kFluxSamples = 64;
constexpr double kGoldenTolerance = 1e-14;

// Extremum of g on [a, b]: coarse sampling picks a bracket, golden-section
// search refines inside it. `sign` = +1 maximises, -1 minimises.
template <class G>
double sampled_extremum(const G& g, double a, double b, double sign) {
  double best = sign * g(a);
  int best_idx = 0;
  const double step = (b - a) / kFluxSamples;
  for (int j = 1; j <= kFluxSamples; ++j) {
    const double val = sign * g(a + step * j);
    if (val > best) {
      best = val;
      best_idx = j;
    }
  }
  double lo = a + step * std::max(best_idx - 1, 0);
  double hi = a + step * std::min(best_idx + 1, kFluxSamples);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = sign * g(x1);
  double f2 = sign * g(x2);
  while (hi - lo > kGoldenTolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sign * g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sign * g(x1);
    }
  }
  return sign * std::max({best, f1, f2});
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

// Interface fluxes F_{k-1/2}, k = 0..n, with clamped ghost cells.
std::vector<double> interface_fluxes(const CellField& rho, const CellField& u,
                                     const VelocityModel& model) {
  const std::size_t n = rho.size();
  std::vector<double> f(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const std::size_t l = clamp_index(static_cast<std::ptrdiff_t>(k) - 1, n);
    const std::size_t r = clamp_index(static_cast<std::ptrdiff_t>(k), n);
    f[k] = godunov_flux(rho[l], rho[r], 0.5 * (u[l] + u[r]), model);
  }
  return f;
}

}  // namespace

double godunov_flux(double rho_left, double rho_right, double u_if, const VelocityModel& model) {
  auto f = [&](double r) { return model.flux_unchecked(r, u_if); };
  if (rho_left == rho_right) return f(rho_left);
  if (model.is_builtin()) {
    // Unimodal flux: the minimum sits at an endpoint, the maximum at the
    // critical density clipped to the interval.
    if (rho_left <= rho_right) return std::min(f(rho_left), f(rho_right));
    const double star = *model.critical_density(u_if);
    return f(std::clamp(star, rho_right, rho_left));
  }
  if (rho_left <= rho_right) return sampled_extremum(f, rho_left, rho_right, -1.0);
  return sampled_extremum(f, rho_right, rho_left, 1.0);
}

double max_speed(const CellField& u, const VelocityModel& model) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s = std::max(s, model.max_char_speed(u[i]));
    if (!model.is_builtin() && i + 1 < u.size()) {
      s = std::max(s, model.max_char_speed(0.5 * (u[i] + u[i + 1])));
    }
  }
  return std::max(s, kMinSpeed);
}

double cfl_dt(const CellField& u, const VelocityModel& model, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InputRangeError("cfl must lie in (0,1]");
  return cfl * u.grid().h() / max_speed(u, model);
}

double cfl_dt(const SystemState& state, const VelocityModel& model, double cfl) {
  return cfl_dt(state.u, model, cfl);
}

DensityStep step_density(const CellField& rho, const CellField& u, double dt,
                         const VelocityModel& model) {
  require_same_grid(rho, u);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("step needs a finite dt > 0");
  const double h = rho.grid().h();
  const double cfl_number = dt * max_speed(u, model) / h;
  if (cfl_number > 1.0 + 1e-12) {
    throw PreconditionError("dt " + std::to_string(dt) + " gives CFL number " +
                            std::to_string(cfl_number) + " > 1");
  }
  InterfaceFluxes fluxes{rho.grid(), dt, interface_fluxes(rho, u, model)};
  const double ratio = dt / h;
  CellField out(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    out[i] = rho[i] - ratio * (fluxes.values[i + 1] - fluxes.values[i]);
  }
  StepDiagnostics d;
  d.dt = dt;
  d.cfl_number = cfl_number;
  d.mass_before = rho.integral();
  d.mass_after = out.integral();
  d.rho_min = out.min();
  d.rho_max = out.max();
  return {std::move(out), std::move(fluxes), d};
}

DensityStep step_density(const SystemState& state, double dt, const VelocityModel& model) {
  return step_density(state.rho, state.u, dt, model);
}

CellField entropy_residual(const CellField& rho_old, const CellField& rho_new, const CellField& u,
                           double k, double dt, const VelocityModel& model) {
  require_same_grid(rho_old, rho_new);
  require_same_grid(rho_old, u);
  if (!(dt > 0.0)) throw PreconditionError("entropy residual needs dt > 0");
  const std::size_t n = rho_old.size();
  const double h = rho_old.grid().h();
  std::vector<double> q(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t l = clamp_index(static_cast<std::ptrdiff_t>(j) - 1, n);
    const std::size_t r = clamp_index(static_cast<std::ptrdiff_t>(j), n);
    const double a = rho_old[l];
    const double b = rho_old[r];
    const double u_if = 0.5 * (u[l] + u[r]);
    q[j] = godunov_flux(std::max(a, k), std::max(b, k), u_if, model) -
           godunov_flux(std::min(a, k), std::min(b, k), u_if, model);
  }
  CellField out(rho_old.grid());
  for (std::size_t i = 0; i < n; ++i) {
    const double du = (u[clamp_index(static_cast<std::ptrdiff_t>(i) + 1, n)] -
                       u[clamp_index(static_cast<std::ptrdiff_t>(i) - 1, n)]) /
                      (2.0 * h);
    const double diff = rho_new[i] - k;
    const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    out[i] = (std::abs(rho_new[i] - k) - std::abs(rho_old[i] - k)) / dt + (q[i + 1] - q[i]) / h +
             s * k * model.d_u(k, u[i]) * du;
  }
  return out;
}

}  // namespace garz
