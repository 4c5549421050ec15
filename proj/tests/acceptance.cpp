// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "garz/oracle.hpp"
#include "garz/scenarios.hpp"
#include "garz/transport.hpp"
#include "garz/verify.hpp"

using namespace garz;

namespace {

constexpr std::size_t kCells = 400;
constexpr double kHorizon = 1.0;

constexpr double kRhoSlack = 1e-12;
constexpr double kMarkerSlack = 1e-10;
constexpr double kMassRelative = 1e-12;
constexpr double kTvSlack = 1e-12;
constexpr double kEntropyPerH = 10.0;
constexpr double kShockOrder = 0.4;
constexpr double kSmoothOrder = 0.8;
constexpr double kRatioBound = 0.9;
constexpr int kMaxIterates = 25;
constexpr double kDeepTolerance = 1e-11;
constexpr double kRefinementChange = 0.2;
constexpr double kUniquenessFactor20 = 20.0;
constexpr double kPreservation = 1e-12;
constexpr double kVacuumPin = 1e-10;
// Fan interior, away from the edge waves and the kink at x = 0.
constexpr std::pair<double, double> kFanWindow{-0.45, 0.45};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all = shipped_scenarios();
  return all;
}

const Trajectory& run_of(const Scenario& sc, std::size_t n) {
  static std::map<std::pair<std::string, std::size_t>, Trajectory> cache;
  const auto key = std::pair{sc.name, n};
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, solve_global(sc.data, sc.grid(n), kHorizon, SolverConfig{}, sc.model)).first;
  }
  return it->second;
}

Outcome bounds_suite() {
  Outcome o;
  for (const auto& sc : scenarios()) {
    const Trajectory& tr = run_of(sc, kCells);
    const SystemState& s0 = tr.states.front();
    const double u0 = s0.u.sup_norm();
    const double z0 = s0.z.sup_norm();
    const double psi0 = s0.psi.sup_norm();
    double worst = 0.0;
    bool ok = true;
    for (const auto& s : tr.states) {
      ok = ok && s.rho.min() >= 0.0 && s.rho.max() <= 1.0 + kRhoSlack;
      ok = ok && s.u.min() >= 0.0 && s.u.max() <= u0 + kMarkerSlack;
      ok = ok && s.z.sup_norm() <= z0 + kMarkerSlack;
      ok = ok && s.psi.sup_norm() <= psi0 + kMarkerSlack;
      worst = std::max({worst, -s.rho.min(), s.rho.max() - 1.0, -s.u.min(), s.u.max() - u0,
                        s.z.sup_norm() - z0, s.psi.sup_norm() - psi0});
    }
    o.detail << ' ' << sc.name << ":" << g(worst);
    o.require(ok, sc.name);
  }
  return o;
}

Outcome conservation() {
  Outcome o;
  for (const auto& sc : scenarios()) {
    const Trajectory& tr = run_of(sc, kCells);
    const double m0 = tr.states.front().rho.integral();
    double drift = 0.0;
    for (const auto& s : tr.states) drift = std::max(drift, std::abs(s.rho.integral() - m0) / m0);
    o.detail << ' ' << sc.name << ":" << g(drift);
    o.require(drift <= kMassRelative, sc.name);
  }
  return o;
}

Outcome tv_control() {
  Outcome o;
  for (const auto& sc : scenarios()) {
    const Trajectory& tr = run_of(sc, kCells);
    const bool u_constant = sc.data.psi0.sup_abs() == 0.0 && sc.data.z_inf == 0.0;
    const double tv0 = total_variation(tr.states.front().rho);
    double prev = tv0;
    double margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& s : tr.states) {
      const double tv = total_variation(s.rho);
      if (u_constant) {
        ok = ok && tv <= prev + kTvSlack && tv <= tv0 + kTvSlack;
        margin = std::min(margin, tv0 - tv);
      } else {
        // M0 and tilde_C recomputed from the initial state.
        const double m0 = 4.0 * tv0 + 4.0;
        const double c = compute_tilde_C(sc.model, tr.states.front().z.sup_norm(),
                                         tr.states.front().psi.sup_norm(),
                                         l1_norm(tr.states.front().rho), tr.states.front().u.sup_norm());
        const double d = m0 * std::exp(c * s.t) + std::expm1(c * s.t);
        ok = ok && tv <= d;
        margin = std::min(margin, d - tv);
      }
      prev = tv;
    }
    o.detail << ' ' << sc.name << (u_constant ? "(monotone)" : "(envelope)") << ":" << g(margin);
    o.require(ok, sc.name);
  }
  return o;
}

Outcome entropy_audit() {
  Outcome o;
  for (const auto& sc : scenarios()) {
    double worst[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
      const std::size_t n = kCells << r;
      const Trajectory& tr = run_of(sc, n);
      const double h = sc.grid(n).h();
      if (tr.entropy_k.size() != 11) o.require(false, sc.name + " lattice size");
      for (double e : tr.entropy_max) worst[r] = std::max(worst[r], e);
      o.require(worst[r] <= kEntropyPerH * h, sc.name + " n=" + std::to_string(n));
    }
    o.detail << ' ' << sc.name << ":" << g(worst[0]) << "->" << g(worst[1]);
  }
  return o;
}

std::vector<ConvergenceRow> study(const Scenario& sc, const ReferenceFn& ref,
                                  std::optional<std::pair<double, double>> window = {}) {
  return convergence_study(sc.data, kHorizon, halving_ladder(sc.x_min, sc.x_max, 200, 3), ref,
                           SolverConfig{}, sc.model, window);
}

ReferenceFn riemann_reference(const Scenario& sc) {
  return [sc](const Grid& grid) {
    return cell_averages(grid, [&](double x) {
      return exact_piecewise_constant(sc.data.rho0, sc.data.u_inf, sc.model, kHorizon, x);
    });
  };
}

void orders(Outcome& o, const std::string& label, const std::vector<ConvergenceRow>& rows,
            double bar) {
  o.detail << ' ' << label << ":";
  for (std::size_t k = 1; k < rows.size(); ++k) o.detail << (k > 1 ? "," : "") << g(rows[k].order);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    o.require(rows[k].error < rows[k - 1].error && rows[k].order >= bar,
              label + " order " + g(rows[k].order) + " < " + g(bar));
  }
}

Outcome oracle_equivalence() {
  Outcome o;
  const Scenario shock = shock_scenario();
  orders(o, "shock", study(shock, riemann_reference(shock)), kShockOrder);

  const Scenario smooth = smooth_scenario();
  orders(o, "smooth", study(smooth, [&](const Grid& grid) {
           return cell_averages(grid, [&](double x) {
             return characteristic_solution(smooth.data.rho0, smooth.data.u_inf, smooth.model,
                                            kHorizon, x);
           });
         }),
         kSmoothOrder);

  const Scenario fan = rarefaction_scenario();
  orders(o, "fan-interior", study(fan, riemann_reference(fan), kFanWindow), kSmoothOrder);

  const Scenario smoke = smoke_scenario();
  std::vector<double> dist;
  for (std::size_t n : {200u, 400u, 800u}) {
    const Grid grid = smoke.grid(n);
    const Trajectory visc = viscous_solve(smoke.data, 4.0 * grid.h(), grid, kHorizon, smoke.model);
    dist.push_back(l1_distance(run_of(smoke, n).states.back().rho, visc.states.back().rho));
  }
  o.detail << " viscous:" << g(dist[0]) << "," << g(dist[1]) << "," << g(dist[2]);
  o.require(dist[1] < dist[0] && dist[2] < dist[1], "viscous distance not decreasing");
  return o;
}

void check_trace(Outcome& o, const PicardTrace& t) {
  o.require(t.converged, "slab at t=" + g(t.t_start) + " not converged");
  o.require(static_cast<int>(t.iterations()) <= kMaxIterates,
            "slab at t=" + g(t.t_start) + " used " + std::to_string(t.iterations()) + " iterates");
  for (double q : t.ratios()) o.require(q <= kRatioBound, "ratio " + g(q));
}

Outcome picard_contraction() {
  Outcome o;
  const Scenario sc = smoke_scenario();
  const Trajectory& tr = run_of(sc, kCells);
  double worst_ratio = 0.0;
  std::size_t most = 0;
  for (const auto& t : tr.traces) {
    check_trace(o, t);
    for (double q : t.ratios()) worst_ratio = std::max(worst_ratio, q);
    most = std::max(most, t.iterations());
  }
  o.detail << " slabs:" << tr.traces.size() << " max-iterates:" << most
           << " max-ratio:" << g(worst_ratio);

  // Deep run of the first slab down to roundoff-level Phi.
  const SystemState s0 = tr.states.front();
  SlabConfig cfg;
  cfg.tau0 = tr.constants.slab_length;
  cfg.M0 = tr.constants.M0;
  cfg.tol_phi = kDeepTolerance;
  cfg.limits = {tr.constants.u0_sup, tr.constants.z0_sup, tr.constants.psi0_sup};
  const SlabResult deep = picard_slab(s0, cfg, sc.model);
  check_trace(o, deep.trace);
  o.detail << " deep:";
  for (double q : deep.trace.ratios()) o.detail << g(q) << ";";
  return o;
}

Outcome stability() {
  Outcome o;
  const Scenario sc = smoke_scenario();
  const double shift = 2.0 * sc.grid(kCells).h();
  const InitialData base{Profile({Piece::constant(-1.0, 1.0, 0.5)}), Profile(), 0.3, 1.0};
  InitialData raised = base;
  raised.u_inf += 0.01;
  struct Pair {
    std::string label;
    InitialData a, b;
  };
  const std::vector<Pair> pairs = {{"shift", sc.data, sc.data.shifted(shift)},
                                   {"u_inf", base, raised}};
  for (const auto& p : pairs) {
    double k[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
      const StabilityResult s = measure_stability(p.a, p.b, sc.grid(kCells << r), kHorizon,
                                                  SolverConfig{}, sc.model);
      k[r] = s.k_measured;
      const double cap = std::exp(s.tilde_C * kHorizon);
      o.require(std::isfinite(s.k_measured) && s.k_measured <= cap,
                p.label + " K=" + g(s.k_measured) + " above exp(C T)=" + g(cap));
      if (r == 0) o.detail << ' ' << p.label << ": cap " << g(cap);
    }
    const double change = std::abs(k[1] - k[0]) / k[0];
    o.detail << " K " << g(k[0]) << "->" << g(k[1]);
    o.require(change <= kRefinementChange, p.label + " K changed by " + g(change));
  }
  return o;
}

Outcome uniqueness() {
  Outcome o;
  for (const auto& sc : scenarios()) {
    const UniquenessResult u =
        uniqueness_check(sc.data, sc.grid(kCells), kHorizon, SolverConfig{}, sc.model, 3);
    o.detail << ' ' << sc.name << ":" << g(u.gap) << "/" << g(u.tol_phi);
    o.require(u.gap <= kUniquenessFactor20 * u.tol_phi, sc.name);
  }
  return o;
}

Outcome degenerate_cases() {
  Outcome o;
  const Trajectory& flat = run_of(constant_scenario(), kCells);
  double drift = 0.0;
  for (const auto& s : flat.states) {
    drift = std::max({drift, c0_distance(s.rho, flat.states.front().rho),
                      c0_distance(s.u, flat.states.front().u)});
  }
  o.detail << " constant drift:" << g(drift);
  o.require(drift <= kPreservation, "constant state drifted");

  const Scenario vac = vacuum_scenario();
  const Trajectory& tr = run_of(vac, kCells);
  o.require(std::abs(tr.states.back().t - kHorizon) <= 1e-12, "vacuum run stopped early");
  // On a vacuum cell the marker flux vanishes, so z carries over from the left.
  std::size_t vacuum_cells = 0;
  double pin = 0.0;
  for (const auto& s : tr.states) {
    for (std::size_t i = 1; i < s.rho.size(); ++i) {
      if (s.rho[i] > kRhoFloor) continue;
      ++vacuum_cells;
      pin = std::max(pin, std::abs(s.z[i] - s.z[i - 1]));
    }
  }
  const double gap_z = tr.states.front().z[tr.states.front().rho.size() / 2];
  o.detail << " vacuum cells:" << vacuum_cells << " pin:" << g(pin) << " z(gap,0)=" << g(gap_z);
  o.require(vacuum_cells > 0, "no vacuum cells");
  o.require(pin <= kVacuumPin, "z not pinned on vacuum");
  o.require(audit_trajectory(tr).pass(), "vacuum audit");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bounds on rho, u, z, psi", bounds_suite},
      {"mass conservation", conservation},
      {"TV control", tv_control},
      {"entropy residual <= 10h", entropy_audit},
      {"oracle equivalence", oracle_equivalence},
      {"Picard contraction", picard_contraction},
      {"stability ratio", stability},
      {"uniqueness proxy", uniqueness},
      {"degenerate cases", degenerate_cases},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s):%s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
