#include "garz/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "garz/scalar_solver.hpp"
#include "garz/transport.hpp"

namespace garz {

namespace {

CellField lerp(const CellField& a, const CellField& b, double alpha) {
  if (alpha == 0.0) return a;
  if (alpha == 1.0) return b;
  CellField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - alpha) * a[i] + alpha * b[i];
  return out;
}

SystemState lerp(const SystemState& a, const SystemState& b, double alpha) {
  return {(1.0 - alpha) * a.t + alpha * b.t,
          lerp(a.rho, b.rho, alpha),
          lerp(a.v, b.v, alpha),
          lerp(a.w, b.w, alpha),
          lerp(a.z, b.z, alpha),
          lerp(a.u, b.u, alpha),
          lerp(a.psi, b.psi, alpha),
          a.z_inf,
          a.u_inf};
}

void check_state(const SystemState& s, const InvariantLimits& limits) {
  for (const CellField* f : {&s.rho, &s.v, &s.w, &s.z, &s.u, &s.psi}) {
    for (double x : *f) {
      if (!std::isfinite(x)) throw InvariantBreachError("finite fields", x, s.t);
    }
  }
  if (s.rho.min() < -kRhoBoundTolerance) throw InvariantBreachError("rho>=0", -s.rho.min(), s.t);
  if (s.rho.max() > 1.0 + kRhoBoundTolerance) {
    throw InvariantBreachError("rho<=1", s.rho.max() - 1.0, s.t);
  }
  if (s.u.min() < -kMarkerBoundTolerance) throw InvariantBreachError("u>=0", -s.u.min(), s.t);
  if (s.u.max() > limits.u_max + kMarkerBoundTolerance) {
    throw InvariantBreachError("u<=|u0|", s.u.max() - limits.u_max, s.t);
  }
  if (s.z.sup_norm() > limits.z_max + kMarkerBoundTolerance) {
    throw InvariantBreachError("|z|<=|z0|", s.z.sup_norm() - limits.z_max, s.t);
  }
  if (s.psi.sup_norm() > limits.psi_max + kMarkerBoundTolerance) {
    throw InvariantBreachError("|psi|<=|psi0|", s.psi.sup_norm() - limits.psi_max, s.t);
  }
}

struct IterateRun {
  std::vector<SystemState> snapshots;
  std::vector<double> entropy_max;
  double max_cfl_number = 0.0;
  std::size_t micro_steps = 0;
  double route_gap = 0.0;
};

// One density/marker solve over the slab with u frozen at `frozen`
// (linear in time between its snapshots).
IterateRun advance(const std::vector<SystemState>& frozen, const SlabConfig& slab,
                   const VelocityModel& model, const std::vector<double>& lattice) {
  const SystemState& start = frozen.front();
  const Grid& grid = start.grid();
  const std::size_t s_count = frozen.size() - 1;
  IterateRun run;
  run.entropy_max.assign(lattice.size(), -std::numeric_limits<double>::infinity());
  run.snapshots.reserve(frozen.size());
  run.snapshots.push_back(start);

  CellField rho = start.rho;
  CellField v = start.v;
  CellField w = start.w;
  for (std::size_t j = 0; j < s_count; ++j) {
    const double interval = frozen[j + 1].t - frozen[j].t;
    const double speed =
        std::max(max_speed(frozen[j].u, model), max_speed(frozen[j + 1].u, model));
    const double dt_cfl = slab.cfl * grid.h() / speed;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(interval / dt_cfl)));
    const double dt = interval / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const CellField u =
          lerp(frozen[j].u, frozen[j + 1].u, static_cast<double>(k) / static_cast<double>(steps));
      DensityStep step = step_density(rho, u, dt, model);
      v = step_marker(v, rho, step.fluxes, dt);
      w = step_marker(w, rho, step.fluxes, dt);
      if (slab.audit_entropy) {
        for (std::size_t m = 0; m < lattice.size(); ++m) {
          const CellField r = entropy_residual(rho, step.rho, u, lattice[m], dt, model);
          run.entropy_max[m] = std::max(run.entropy_max[m], r.max());
        }
      }
      run.max_cfl_number = std::max(run.max_cfl_number, step.diagnostics.cfl_number);
      ++run.micro_steps;
      rho = std::move(step.rho);
    }
    SystemState snap{frozen[j + 1].t, rho, v, w, reconstruct(w, start.z_inf),
                     reconstruct(v, start.u_inf), extract_ratio(w, rho, 0.0), start.z_inf,
                     start.u_inf};
    run.route_gap =
        std::max(run.route_gap, max_gap_on_support(extract_ratio(v, rho, 0.0), snap.z, rho));
    if (slab.check_invariants) check_state(snap, slab.limits);
    run.snapshots.push_back(std::move(snap));
  }
  return run;
}

void record_iterate(PicardTrace& trace, const std::vector<SystemState>& it) {
  double su = 0.0, sz = 0.0, sp = 0.0, tv = 0.0;
  for (const auto& s : it) {
    su = std::max(su, s.u.sup_norm());
    sz = std::max(sz, s.z.sup_norm());
    sp = std::max(sp, s.psi.sup_norm());
    tv = std::max(tv, total_variation(s.rho));
  }
  trace.sup_u.push_back(su);
  trace.sup_z.push_back(sz);
  trace.sup_psi.push_back(sp);
  trace.max_tv.push_back(tv);
}

}  // namespace

std::vector<double> PicardTrace::ratios() const {
  std::vector<double> out;
  for (std::size_t j = 1; j < phi.size(); ++j) {
    out.push_back(phi[j - 1] > 0.0 ? phi[j] / phi[j - 1] : 0.0);
  }
  return out;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.t);
  return out;
}

std::vector<double> entropy_lattice() {
  std::vector<double> k;
  for (int i = 0; i <= 10; ++i) k.push_back(i / 10.0);
  return k;
}

double compute_M0(const CellField& rho0) { return 4.0 * total_variation(rho0) + 4.0; }

double compute_tilde_C(const VelocityModel& model, double z0_sup, double psi0_sup, double rho0_l1,
                       double u_max) {
  const DerivativeBounds b = model.bounds(u_max);
  return b.d_u_rho * z0_sup + b.d_u * z0_sup + b.d_uu * z0_sup * z0_sup * rho0_l1 +
         b.d_u * (psi0_sup * rho0_l1 + z0_sup);
}

double compute_tau0(double tilde_C) {
  if (!(tilde_C >= 0.0)) throw InputRangeError("tilde_C must be >= 0");
  auto excess = [&](double tau) { return std::expm1(tilde_C * tau) - 2.0 * tau; };
  if (excess(0.25) <= 0.0) return 0.25;
  double lo = 0.0;
  double hi = 0.25;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double slab_length(double tilde_C) {
  const double literal = compute_tau0(tilde_C);
  if (literal > 0.0) return literal;
  return std::min(0.25, std::log(1.5) / tilde_C);
}

double tv_envelope(double M0, double tilde_C, double t) {
  const double g = std::exp(tilde_C * t);
  return M0 * g + (g - 1.0);
}

double phi_functional(const SystemState& next, const SystemState& curr, const SystemState& prev) {
  return l1_distance(curr.rho, next.rho) + l1_distance(curr.v, prev.v);
}

SlabResult picard_slab(const SystemState& start, const SlabConfig& slab,
                       const VelocityModel& model) {
  if (!(slab.tau0 > 0.0)) throw PreconditionError("slab length must be > 0");
  if (slab.snapshots < 1) throw PreconditionError("a slab needs at least one snapshot");
  if (slab.max_picard_iters < 3) throw PreconditionError("max_picard_iters must be >= 3");
  if (!(slab.tol_phi > 0.0)) throw PreconditionError("tol_phi must be > 0");
  const auto lattice = entropy_lattice();
  const std::size_t s_count = static_cast<std::size_t>(slab.snapshots);

  // Iterate 1: the start state frozen in time.
  std::vector<SystemState> curr;
  for (std::size_t j = 0; j <= s_count; ++j) {
    SystemState s = start;
    s.t = j == s_count ? start.t + slab.tau0
                       : start.t + slab.tau0 * static_cast<double>(j) / static_cast<double>(s_count);
    curr.push_back(std::move(s));
  }

  SlabResult result;
  result.trace.t_start = start.t;
  result.trace.tau = slab.tau0;
  record_iterate(result.trace, curr);
  std::vector<SystemState> prev;
  for (int n = 2; n <= slab.max_picard_iters; ++n) {
    IterateRun next = advance(curr, slab, model, lattice);
    record_iterate(result.trace, next.snapshots);
    if (!prev.empty()) {
      double phi = 0.0, sym = 0.0;
      for (std::size_t j = 0; j <= s_count; ++j) {
        phi = std::max(phi, phi_functional(next.snapshots[j], curr[j], prev[j]));
        sym = std::max(sym, l1_distance(curr[j].rho, next.snapshots[j].rho) +
                                l1_distance(curr[j].v, next.snapshots[j].v));
      }
      result.trace.phi.push_back(phi);
      result.trace.phi_symmetric.push_back(sym);
      if (phi <= slab.tol_phi) {
        result.trace.converged = true;
        result.snapshots = std::move(next.snapshots);
        result.entropy_max = std::move(next.entropy_max);
        result.max_cfl_number = next.max_cfl_number;
        result.micro_steps = next.micro_steps;
        result.route_gap = next.route_gap;
        return result;
      }
    }
    prev = std::move(curr);
    curr = std::move(next.snapshots);
  }
  const double last = result.trace.phi.empty() ? 0.0 : result.trace.phi.back();
  throw NonConvergenceError("Picard iteration on [" + std::to_string(start.t) + ", " +
                                std::to_string(start.t + slab.tau0) + "] stopped at Phi = " +
                                std::to_string(last) + " > tol " + std::to_string(slab.tol_phi) +
                                " after " + std::to_string(slab.max_picard_iters) + " iterates",
                            result.trace);
}

SolveConstants solve_constants(const SystemState& initial, const VelocityModel& model,
                               const SolverConfig& config) {
  SolveConstants c;
  c.u0_sup = initial.u.sup_norm();
  c.z0_sup = initial.z.sup_norm();
  c.psi0_sup = initial.psi.sup_norm();
  c.rho0_l1 = l1_norm(initial.rho);
  c.rho0_tv = total_variation(initial.rho);
  c.mass0 = initial.rho.integral();
  c.M0 = compute_M0(initial.rho);
  c.tilde_C = compute_tilde_C(model, c.z0_sup, c.psi0_sup, c.rho0_l1, c.u0_sup);
  c.tau0_literal = compute_tau0(c.tilde_C);
  c.slab_length = config.tau0 > 0.0 ? config.tau0 : slab_length(c.tilde_C);
  const double h = initial.grid().h();
  const double base = config.tol_phi > 0.0 ? config.tol_phi
                                           : (c.rho0_l1 > 0.0 ? h * c.rho0_l1 : h * 1e-12);
  c.tol_phi = base * config.tol_factor;
  c.u_constant = initial.v.sup_norm() == 0.0;
  return c;
}

Trajectory solve_global(const InitialData& data, const Grid& grid, double horizon,
                        const SolverConfig& config, const VelocityModel& model) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InputRangeError("horizon must be finite and > 0");
  }
  SystemState initial = build_initial_state(data, grid);
  check_domain_margin(data, grid, model.max_char_speed(initial.u.sup_norm()), horizon);
  return solve_global(initial, horizon, config, model);
}

Trajectory solve_global(const SystemState& initial, double horizon, const SolverConfig& config,
                        const VelocityModel& model) {
  if (!(horizon > initial.t) || !std::isfinite(horizon)) {
    throw InputRangeError("horizon must be finite and after the initial time");
  }
  if (config.output_every < 1) throw InputRangeError("output_every must be >= 1");
  if (config.max_halvings < 0) throw InputRangeError("max_halvings must be >= 0");
  if (!(config.tol_factor > 0.0)) throw InputRangeError("tol_factor must be > 0");

  Trajectory traj;
  traj.constants = solve_constants(initial, model, config);
  const SolveConstants& c = traj.constants;
  const ModelValidationReport report = validate_model(model, c.u0_sup, 101);
  if (!report.pass()) {
    std::string failed;
    for (const auto& cond : report.conditions) {
      if (!cond.pass) failed += (failed.empty() ? "" : ", ") + cond.name;
    }
    throw UnsupportedModelError("model '" + model.name() + "' violates " + failed +
                                " on [0,1] x [0," + std::to_string(c.u0_sup) + "]");
  }

  traj.horizon = horizon;
  traj.entropy_k = entropy_lattice();
  traj.entropy_max.assign(traj.entropy_k.size(), -std::numeric_limits<double>::infinity());
  traj.states.push_back(initial);

  SlabConfig slab;
  slab.M0 = c.M0;
  slab.tol_phi = c.tol_phi;
  slab.max_picard_iters = config.max_picard_iters;
  slab.cfl = config.cfl;
  slab.snapshots = config.snapshots_per_slab;
  slab.audit_entropy = config.audit_entropy;
  slab.check_invariants = config.check_invariants;
  slab.limits = {c.u0_sup, c.z0_sup, c.psi0_sup};

  SystemState start = initial;
  while (start.t < horizon) {
    double len = std::min(c.slab_length, horizon - start.t);
    if (horizon - start.t - len < 1e-9 * c.slab_length) len = horizon - start.t;
    SlabResult res;
    for (int halvings = 0;; ++halvings) {
      slab.tau0 = len / std::pow(2.0, halvings);
      try {
        res = picard_slab(start, slab, model);
        res.trace.halvings = halvings;
        break;
      } catch (const NonConvergenceError& e) {
        if (halvings >= config.max_halvings) {
          PicardTrace trace = e.trace();
          trace.halvings = halvings;
          throw NonConvergenceError(std::string(e.what()) + " (after " +
                                        std::to_string(halvings) + " halvings)",
                                    std::move(trace));
        }
      }
    }
    if (res.snapshots.back().t > horizon || horizon - res.snapshots.back().t < 1e-12) {
      res.snapshots.back().t = horizon;
    }
    traj.slab_starts.push_back(start.t);
    const std::size_t last = res.snapshots.size() - 1;
    for (std::size_t j = 1; j <= last; ++j) {
      if (j % static_cast<std::size_t>(config.output_every) == 0 || j == last) {
        traj.states.push_back(res.snapshots[j]);
      }
    }
    for (std::size_t m = 0; m < traj.entropy_max.size() && m < res.entropy_max.size(); ++m) {
      traj.entropy_max[m] = std::max(traj.entropy_max[m], res.entropy_max[m]);
    }
    traj.max_cfl_number = std::max(traj.max_cfl_number, res.max_cfl_number);
    traj.micro_steps += res.micro_steps;
    traj.route_gap = std::max(traj.route_gap, res.route_gap);
    traj.traces.push_back(std::move(res.trace));
    start = res.snapshots.back();
  }
  return traj;
}

SystemState state_at(const Trajectory& traj, double t) {
  const auto& s = traj.states;
  if (t <= s.front().t) return s.front();
  if (t >= s.back().t) return s.back();
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double x, const SystemState& st) { return x < st.t; });
  const SystemState& b = *it;
  const SystemState& a = *(it - 1);
  const double alpha = (t - a.t) / (b.t - a.t);
  SystemState out = lerp(a, b, alpha);
  out.t = t;
  return out;
}

}  // namespace garz
