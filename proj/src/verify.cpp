#include "garz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "garz/errors.hpp"
#include "garz/transport.hpp"

namespace garz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs the jobs with at most worker_threads() in flight; results keep job order.
template <class R>
std::vector<R> run_parallel(const std::vector<std::function<R()>>& jobs) {
  const std::size_t width = std::max(1u, worker_threads());
  std::vector<R> out;
  out.reserve(jobs.size());
  for (std::size_t start = 0; start < jobs.size(); start += width) {
    std::vector<std::future<R>> batch;
    for (std::size_t j = start; j < std::min(jobs.size(), start + width); ++j) {
      batch.push_back(std::async(std::launch::async, jobs[j]));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

class Worst {
 public:
  explicit Worst(std::string name) { entry_.name = std::move(name); }
  void see(double violation, double t) {
    if (violation > entry_.worst_violation || std::isnan(violation)) {
      entry_.worst_violation = std::isnan(violation) ? std::numeric_limits<double>::infinity()
                                                     : violation;
      entry_.at_time = t;
    }
  }
  CheckEntry done(double tolerance) {
    entry_.pass = entry_.worst_violation <= tolerance;
    return entry_;
  }

 private:
  CheckEntry entry_;
};

std::vector<double> merged_times(const Trajectory& a, const Trajectory& b) {
  std::vector<double> t = a.times();
  const std::vector<double> tb = b.times();
  t.insert(t.end(), tb.begin(), tb.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

double lhs_gap(const SystemState& a, const SystemState& b) {
  return c0_distance(a.u, b.u) + l1_distance(a.rho, b.rho);
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("GARZ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.pass; });
}

const CheckEntry& RunReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"worst_violation", c.worst_violation},
                           {"at_time", c.at_time}});
  }
  if (!entropy_k.empty()) {
    j["entropy"] = {{"k", entropy_k}, {"max_residual", entropy_max}};
  }
  if (!times.empty()) {
    j["series"] = {{"t", times}, {"tv", tv}, {"tv_envelope", tv_envelope}, {"mass", mass}};
  }
  if (!phi_history.empty()) {
    nlohmann::json ph = nlohmann::json::array();
    for (const auto& [t, phi] : phi_history) ph.push_back({t, phi});
    j["phi_history"] = ph;
  }
  if (k_measured) {
    j["stability"] = {{"K_measured", *k_measured}, {"t", ratio_times}, {"ratio", ratio_values}};
  }
  if (!convergence.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : convergence) {
      rows.push_back({{"h", r.h}, {"error", r.error}, {"order", r.order}});
    }
    j["convergence"] = rows;
  }
  if (!diagnostics.empty()) j["diagnostics"] = diagnostics;
  if (!notes.empty()) j["notes"] = notes;
  return j.dump(2);
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "check,worst_violation,pass\n";
  for (const auto& c : checks) {
    out << '"' << c.name << "\"," << c.worst_violation << ',' << (c.pass ? "true" : "false")
        << '\n';
  }
  return out.str();
}

AuditContext make_audit_context(const Trajectory& traj) {
  const SolveConstants& c = traj.constants;
  AuditContext ctx;
  ctx.h = traj.grid().h();
  ctx.mass0 = c.mass0;
  ctx.rho0_l1 = c.rho0_l1;
  ctx.rho0_tv = c.rho0_tv;
  ctx.u0_sup = c.u0_sup;
  ctx.z0_sup = c.z0_sup;
  ctx.psi0_sup = c.psi0_sup;
  ctx.M0 = c.M0;
  ctx.tilde_C = c.tilde_C;
  ctx.tol_phi = c.tol_phi;
  ctx.first_slab_end = traj.slab_starts.size() > 1 ? traj.slab_starts[1] : traj.horizon;
  ctx.u_constant = c.u_constant;
  return ctx;
}

RunReport audit_trajectory(const Trajectory& traj) {
  return audit_trajectory(traj, make_audit_context(traj));
}

RunReport audit_trajectory(const Trajectory& traj, const AuditContext& ctx) {
  RunReport r;
  Worst rho_bounds("0<=rho<=1");
  Worst u_bounds("0<=u<=|u0|");
  Worst z_bound("|z|<=|z0|");
  Worst psi_bound("|psi|<=|psi0|");
  Worst v_bound("|v|<=|z0| rho");
  Worst w_bound("|w|<=|psi0| rho");
  Worst mass("mass conservation");
  Worst l1("|rho|_L1<=|rho0|_L1");
  Worst tv_first("TV<=M0 (first slab)");
  Worst tv_env("TV<=D(t)");
  Worst tv_mono("TV non-increasing");
  Worst prefix("prefix-sum identities");
  Worst pinned("z pinned on vacuum");

  const double mass_scale = ctx.mass0 != 0.0 ? std::abs(ctx.mass0) : 1.0;
  double prev_tv = ctx.rho0_tv;
  for (const SystemState& s : traj.states) {
    const double t = s.t;
    rho_bounds.see(std::max(-s.rho.min(), s.rho.max() - 1.0), t);
    u_bounds.see(std::max(-s.u.min(), s.u.max() - ctx.u0_sup), t);
    z_bound.see(s.z.sup_norm() - ctx.z0_sup, t);
    psi_bound.see(s.psi.sup_norm() - ctx.psi0_sup, t);
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
      v_bound.see(std::abs(s.v[i]) - ctx.z0_sup * s.rho[i], t);
      w_bound.see(std::abs(s.w[i]) - ctx.psi0_sup * s.rho[i], t);
    }
    const double m = s.rho.integral();
    mass.see(std::abs(m - ctx.mass0) / mass_scale, t);
    l1.see(l1_norm(s.rho) - ctx.rho0_l1, t);

    const double tv = total_variation(s.rho);
    const double env = tv_envelope(ctx.M0, ctx.tilde_C, t);
    if (t <= ctx.first_slab_end) tv_first.see(tv - ctx.M0, t);
    tv_env.see(tv - env, t);
    if (ctx.u_constant) tv_mono.see(std::max(tv - ctx.rho0_tv, tv - prev_tv), t);
    prev_tv = tv;

    const CellField u_rebuilt = reconstruct(s.v, s.u_inf);
    const CellField z_rebuilt = reconstruct(s.w, s.z_inf);
    prefix.see(std::max(c0_distance(u_rebuilt, s.u), c0_distance(z_rebuilt, s.z)), t);
    double left = s.z_inf;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
      if (s.rho[i] <= kRhoFloor) pinned.see(std::abs(s.z[i] - left), t);
      left = s.z[i];
    }

    r.times.push_back(t);
    r.tv.push_back(tv);
    r.tv_envelope.push_back(env);
    r.mass.push_back(m);
  }

  r.checks.push_back(rho_bounds.done(kRhoBoundTolerance));
  r.checks.push_back(u_bounds.done(kMarkerBoundTolerance));
  r.checks.push_back(z_bound.done(kMarkerBoundTolerance));
  r.checks.push_back(psi_bound.done(kMarkerBoundTolerance));
  r.checks.push_back(v_bound.done(kRhoBoundTolerance));
  r.checks.push_back(w_bound.done(kRhoBoundTolerance));
  r.checks.push_back(mass.done(kMassTolerance));
  r.checks.push_back(l1.done(kMassTolerance));
  r.checks.push_back(tv_first.done(kTvTolerance));
  r.checks.push_back(tv_env.done(kTvTolerance));
  if (ctx.u_constant) r.checks.push_back(tv_mono.done(kTvTolerance));

  if (!traj.entropy_max.empty() && std::isfinite(traj.entropy_max.front())) {
    Worst entropy("entropy residual<=10h");
    for (double e : traj.entropy_max) entropy.see(e - kEntropyFactor * ctx.h, traj.horizon);
    r.checks.push_back(entropy.done(0.0));
    r.entropy_k = traj.entropy_k;
    r.entropy_max = traj.entropy_max;
  }

  if (!traj.traces.empty()) {
    Worst phi("Phi<=tol_phi at convergence");
    for (const auto& trace : traj.traces) {
      const double last = trace.phi.empty() ? std::numeric_limits<double>::infinity()
                                            : trace.phi.back();
      phi.see(trace.converged ? last - ctx.tol_phi : std::numeric_limits<double>::infinity(),
              trace.t_start);
      r.phi_history.emplace_back(trace.t_start, last);
    }
    r.checks.push_back(phi.done(0.0));
  }

  r.checks.push_back(prefix.done(kPrefixTolerance));
  r.checks.push_back(pinned.done(kRhoBoundTolerance));

  r.diagnostics["h"] = ctx.h;
  r.diagnostics["M0"] = ctx.M0;
  r.diagnostics["tilde_C"] = ctx.tilde_C;
  r.diagnostics["tol_phi"] = ctx.tol_phi;
  r.diagnostics["tau0_literal"] = traj.constants.tau0_literal;
  r.diagnostics["slab_length"] = traj.constants.slab_length;
  r.diagnostics["max_cfl_number"] = traj.max_cfl_number;
  r.diagnostics["micro_steps"] = static_cast<double>(traj.micro_steps);
  r.diagnostics["route_gap"] = traj.route_gap;
  r.notes.push_back(
      "D(t) = M0 exp(tilde_C t) + exp(tilde_C t) - 1 is one admissible TV envelope, not the only "
      "one");
  r.notes.push_back(
      "route_gap compares v/rho with the reconstructed z on the support; it is O(h), not a check");
  return r;
}

StabilityResult measure_stability(const InitialData& data1, const InitialData& data2,
                                  const Grid& grid, double horizon, const SolverConfig& config,
                                  const VelocityModel& model) {
  const SystemState s1 = build_initial_state(data1, grid);
  const SystemState s2 = build_initial_state(data2, grid);
  StabilityResult out;
  out.lhs0 = lhs_gap(s1, s2);
  if (out.lhs0 == 0.0) {
    throw DegeneratePairError(
        "both runs start from the same state; use the uniqueness check for same-data runs");
  }
  const double max_speed = model.max_char_speed(std::max(s1.u.sup_norm(), s2.u.sup_norm()));
  check_domain_margin(data1, grid, max_speed, horizon);
  check_domain_margin(data2, grid, max_speed, horizon);

  SolverConfig common = config;
  const SolveConstants c1 = solve_constants(s1, model, config);
  const SolveConstants c2 = solve_constants(s2, model, config);
  out.tilde_C = std::max(c1.tilde_C, c2.tilde_C);
  if (!(common.tau0 > 0.0)) common.tau0 = std::min(c1.slab_length, c2.slab_length);

  const std::vector<std::function<Trajectory()>> jobs = {
      [&] { return solve_global(s1, horizon, common, model); },
      [&] { return solve_global(s2, horizon, common, model); }};
  const std::vector<Trajectory> runs = run_parallel(jobs);

  out.times = merged_times(runs[0], runs[1]);
  for (double t : out.times) {
    const double lhs = lhs_gap(state_at(runs[0], t), state_at(runs[1], t));
    out.lhs.push_back(lhs);
    out.ratio.push_back(lhs / out.lhs0);
    out.k_measured = std::max(out.k_measured, lhs / out.lhs0);
  }
  return out;
}

UniquenessResult uniqueness_check(const InitialData& data, const Grid& grid, double horizon,
                                  const SolverConfig& config, const VelocityModel& model,
                                  int seeds) {
  if (seeds < 2) throw PreconditionError("uniqueness check needs at least 2 seeds");
  static constexpr double kCfl[] = {0.4, 0.5, 0.8};
  static constexpr int kSnapshots[] = {32, 48, 24, 64};
  static constexpr double kTolFactor[] = {1.0, 0.5, 0.25, 0.1};

  const SystemState initial = build_initial_state(data, grid);
  check_domain_margin(data, grid, model.max_char_speed(initial.u.sup_norm()), horizon);
  UniquenessResult out;
  out.tol_phi = solve_constants(initial, model, config).tol_phi;

  std::vector<std::function<Trajectory()>> jobs;
  for (int s = 0; s < seeds; ++s) {
    SolverConfig c = config;
    c.cfl = kCfl[s % 3];
    c.snapshots_per_slab = kSnapshots[s % 4];
    c.tol_factor = config.tol_factor * kTolFactor[s % 4];
    out.variants.push_back("cfl=" + std::to_string(c.cfl) +
                           " snapshots=" + std::to_string(c.snapshots_per_slab) +
                           " tol_factor=" + std::to_string(c.tol_factor));
    jobs.push_back([c, &initial, horizon, &model] {
      return solve_global(initial, horizon, c, model);
    });
  }
  const std::vector<Trajectory> runs = run_parallel(jobs);
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      for (double t : merged_times(runs[a], runs[b])) {
        out.gap = std::max(out.gap, lhs_gap(state_at(runs[a], t), state_at(runs[b], t)));
      }
    }
  }
  out.pass = out.gap <= kUniquenessFactor * out.tol_phi;
  return out;
}

std::vector<Grid> halving_ladder(double x_min, double x_max, std::size_t n0, int rungs) {
  std::vector<Grid> out;
  std::size_t n = n0;
  for (int k = 0; k < rungs; ++k, n *= 2) out.emplace_back(x_min, x_max, n);
  return out;
}

std::vector<ConvergenceRow> convergence_study(const InitialData& data, double horizon,
                                              const std::vector<Grid>& grids,
                                              const ReferenceFn& reference,
                                              const SolverConfig& config,
                                              const VelocityModel& model,
                                              std::optional<std::pair<double, double>> window) {
  if (grids.size() < 3) throw PreconditionError("a convergence ladder needs at least 3 grids");
  for (std::size_t k = 1; k < grids.size(); ++k) {
    const Grid& a = grids[k - 1];
    const Grid& b = grids[k];
    if (a.x_min() != b.x_min() || a.x_max() != b.x_max() || b.n_cells() != 2 * a.n_cells()) {
      throw PreconditionError("convergence ladder must halve h on a fixed domain");
    }
  }
  std::vector<std::function<double()>> jobs;
  for (const Grid& g : grids) {
    jobs.push_back([&data, horizon, g, &reference, &config, &model, window] {
      const Trajectory traj = solve_global(data, g, horizon, config, model);
      const CellField ref = reference(g);
      const CellField& rho = traj.states.back().rho;
      double err = 0.0;
      for (std::size_t i = 0; i < g.n_cells(); ++i) {
        const double x = g.center(i);
        if (window && (x < window->first || x > window->second)) continue;
        err += std::abs(rho[i] - ref[i]);
      }
      return err * g.h();
    });
  }
  const std::vector<double> errors = run_parallel(jobs);
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    ConvergenceRow row{grids[k].h(), errors[k], kNaN};
    if (k > 0 && errors[k] > 0.0 && errors[k - 1] > 0.0) {
      row.order = std::log2(errors[k - 1] / errors[k]);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace garz
