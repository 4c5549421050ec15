#include "garz/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "garz/oracle.hpp"
#include "garz/transport.hpp"

namespace garz::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr int kExitChecksFailed = 3;

double parse_number(const std::string& raw, const std::string& field) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || std::isnan(x)) {
    throw ConfigError(field + ": '" + raw + "' is not a number", field);
  }
  return x;
}

// Key access for one [section]; remembers which keys were read so leftovers
// can be reported.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) node_ = &*child;
  }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }
  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_number(*v, field(key)) : fallback;
  }
  long integer(const std::string& key, long fallback, long min_value) {
    auto v = raw(key);
    if (!v) return fallback;
    const double x = parse_number(*v, field(key));
    if (x != std::floor(x) || x < static_cast<double>(min_value) || x > 1e15) {
      throw ConfigError(field(key) + ": expected an integer >= " + std::to_string(min_value),
                        field(key));
    }
    return static_cast<long>(x);
  }
  bool flag(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError(field(key) + ": expected true or false", field(key));
  }
  std::string text(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? *v : fallback;
  }
  /// Every key not read so far, in file order.
  std::vector<std::string> leftovers() const {
    std::vector<std::string> out;
    if (!node_) return out;
    for (const auto& [k, _] : *node_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }
  std::string field(const std::string& key) const { return "[" + name_ + "] " + key; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> used_;
};

void write_series(const fs::path& file, const std::vector<double>& x, const std::vector<double>& y) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    out << format_number(x[i]) << ' ' << format_number(y[i]) << '\n';
  }
  if (!out) throw Error("write failed for " + file.string());
}

std::string index_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
  if (!out) throw Error("cannot write " + file.string());
}

nlohmann::json trace_json(const PicardTrace& t) {
  return {{"t_start", t.t_start},   {"tau", t.tau},
          {"halvings", t.halvings}, {"iterations", t.iterations()},
          {"converged", t.converged}, {"phi", t.phi},
          {"phi_symmetric", t.phi_symmetric}, {"ratios", t.ratios()},
          {"sup_u", t.sup_u},       {"sup_z", t.sup_z},
          {"sup_psi", t.sup_psi},   {"max_tv", t.max_tv}};
}

fs::path output_root(const std::string& seed_dir) {
  if (!seed_dir.empty()) return seed_dir;
  if (const char* env = std::getenv("GARZ_OUTPUT_ROOT")) return env;
  return ".";
}

void print_checks(const RunReport& report) {
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "  ok    " : "  FAIL  ") << c.name
              << "  worst=" << format_number(c.worst_violation) << '\n';
  }
}

// Stability is bounded when K_measured stays below the Gronwall factor
// exp(tilde_C T) of the pair.
bool stability_bounded(const StabilityResult& s, double horizon) {
  return std::isfinite(s.k_measured) && s.k_measured <= std::exp(s.tilde_C * horizon) + 1e-12;
}

ReferenceFn reference_for(const RunConfig& c, const VelocityModel& model) {
  const std::string& kind = c.convergence.reference;
  const double u_c = c.data.u_inf;
  const Profile rho0 = c.data.rho0;
  const double horizon = c.horizon;
  const bool constant_u = c.data.z_inf == 0.0 && c.data.psi0.sup_abs() == 0.0;
  if ((kind == "exact" || kind == "characteristic") && !constant_u) {
    throw ConfigError("[convergence] reference: '" + kind + "' needs psi0 = 0 and z_inf = 0",
                      "[convergence] reference");
  }
  if (kind == "exact") {
    return [=](const Grid& g) {
      return cell_averages(
          g, [&](double x) { return exact_piecewise_constant(rho0, u_c, model, horizon, x); });
    };
  }
  if (kind == "characteristic") {
    return [=](const Grid& g) {
      return cell_averages(
          g, [&](double x) { return characteristic_solution(rho0, u_c, model, horizon, x); });
    };
  }
  if (kind == "viscous") {
    const InitialData data = c.data;
    const double factor = c.convergence.eps_factor;
    return [=](const Grid& g) {
      return viscous_solve(data, factor * g.h(), g, horizon, model).states.back().rho;
    };
  }
  throw ConfigError("[convergence] reference: expected exact, characteristic or viscous",
                    "[convergence] reference");
}

struct Overrides {
  std::size_t n_cells = 0;
  double horizon = 0.0;
  double cfl = 0.0;
  double tol_phi = 0.0;
  std::string name;
};

void apply(RunConfig& c, const Overrides& o) {
  if (o.n_cells > 0) c.n_cells = o.n_cells;
  if (o.horizon > 0.0) c.horizon = o.horizon;
  if (o.cfl > 0.0) c.solver.cfl = o.cfl;
  if (o.tol_phi > 0.0) c.solver.tol_phi = o.tol_phi;
  if (!o.name.empty()) c.name = o.name;
}

fs::path prepare_dir(const fs::path& root, const std::string& name) {
  const fs::path dir = root / name;
  fs::create_directories(dir);
  return dir;
}

int cmd_solve(const RunConfig& c, const fs::path& root, bool full_verify) {
  const VelocityModel model = c.velocity_model();
  const fs::path dir = prepare_dir(root, c.name);
  write_text(dir / "config.cfg", write_config(c));
  Trajectory traj;
  try {
    traj = solve_global(c.data, c.grid(), c.horizon, c.solver, model);
  } catch (const NonConvergenceError& e) {
    write_text(dir / "trace.json", trace_json(e.trace()).dump(2) + "\n");
    throw;
  }
  write_trajectory(traj, c, dir);
  bool pass = true;
  if (c.audit || full_verify) {
    RunReport report = audit_trajectory(traj);
    if (full_verify && c.seeds >= 2) {
      const UniquenessResult u = uniqueness_check(c.data, c.grid(), c.horizon, c.solver, model, c.seeds);
      report.checks.push_back({"uniqueness gap<=20 tol_phi", u.pass, u.gap - kUniquenessFactor * u.tol_phi, c.horizon});
      report.diagnostics["uniqueness_gap"] = u.gap;
    }
    write_text(dir / "report.csv", report.to_csv());
    if (full_verify) write_text(dir / "report.json", report.to_json());
    if (c.plot) emit_plotdata(report, dir / "plot");
    print_checks(report);
    pass = report.pass();
  }
  if (c.plot) emit_plotdata(traj, dir / "plot");
  std::cout << "wrote " << dir.string() << '\n';
  return pass ? 0 : kExitChecksFailed;
}

int cmd_stability(const RunConfig& c, const fs::path& root) {
  const VelocityModel model = c.velocity_model();
  const fs::path dir = prepare_dir(root, c.name);
  write_text(dir / "config.cfg", write_config(c));
  const StabilityResult s =
      measure_stability(c.data, c.perturbed_data(), c.grid(), c.horizon, c.solver, model);
  RunReport report;
  report.k_measured = s.k_measured;
  report.ratio_times = s.times;
  report.ratio_values = s.ratio;
  report.diagnostics["lhs0"] = s.lhs0;
  report.diagnostics["tilde_C"] = s.tilde_C;
  report.diagnostics["gronwall_factor"] = std::exp(s.tilde_C * c.horizon);
  report.checks.push_back({"stability ratio bounded", stability_bounded(s, c.horizon),
                           s.k_measured - std::exp(s.tilde_C * c.horizon), c.horizon});
  report.notes.push_back("K_measured is an empirical lower bound on any valid stability constant");
  write_text(dir / "report.json", report.to_json());
  write_text(dir / "report.csv", report.to_csv());
  if (c.plot) emit_plotdata(report, dir / "plot");
  std::cout << "K_measured = " << format_number(s.k_measured) << '\n';
  print_checks(report);
  return report.pass() ? 0 : kExitChecksFailed;
}

int cmd_uniqueness(const RunConfig& c, const fs::path& root) {
  const VelocityModel model = c.velocity_model();
  const fs::path dir = prepare_dir(root, c.name);
  const UniquenessResult u =
      uniqueness_check(c.data, c.grid(), c.horizon, c.solver, model, std::max(c.seeds, 2));
  RunReport report;
  report.checks.push_back({"uniqueness gap<=20 tol_phi", u.pass,
                           u.gap - kUniquenessFactor * u.tol_phi, c.horizon});
  report.diagnostics["gap"] = u.gap;
  report.diagnostics["tol_phi"] = u.tol_phi;
  report.notes = u.variants;
  write_text(dir / "report.json", report.to_json());
  write_text(dir / "report.csv", report.to_csv());
  std::cout << "gap = " << format_number(u.gap) << "  tol_phi = " << format_number(u.tol_phi)
            << '\n';
  print_checks(report);
  return report.pass() ? 0 : kExitChecksFailed;
}

int cmd_convergence(const RunConfig& c, const fs::path& root) {
  const VelocityModel model = c.velocity_model();
  const fs::path dir = prepare_dir(root, c.name);
  const auto grids = halving_ladder(c.x_min, c.x_max, c.convergence.n0, c.convergence.rungs);
  RunReport report;
  report.convergence = convergence_study(c.data, c.horizon, grids, reference_for(c, model),
                                         c.solver, model, c.convergence.window);
  double worst = -std::numeric_limits<double>::infinity();
  bool pass = true;
  for (std::size_t k = 1; k < report.convergence.size(); ++k) {
    const double order = report.convergence[k].order;
    const double shortfall = std::isnan(order) ? 0.0 : c.convergence.min_order - order;
    worst = std::max(worst, shortfall);
    if (shortfall > 0.0) pass = false;
  }
  report.checks.push_back({"observed order>=" + format_number(c.convergence.min_order), pass,
                           worst, c.horizon});
  write_text(dir / "report.json", report.to_json());
  write_text(dir / "report.csv", report.to_csv());
  if (c.plot) emit_plotdata(report, dir / "plot");
  for (const auto& r : report.convergence) {
    std::cout << "h=" << format_number(r.h) << "  error=" << format_number(r.error)
              << "  order=" << format_number(r.order) << '\n';
  }
  print_checks(report);
  return pass ? 0 : kExitChecksFailed;
}

}  // namespace

InitialData RunConfig::perturbed_data() const {
  const double h = (x_max - x_min) / static_cast<double>(n_cells);
  InitialData d = data.shifted(stability.shift + stability.shift_cells * h);
  d.u_inf += stability.u_inf_delta;
  return d;
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

Profile parse_profile(const std::string& text, const std::string& field) {
  static const std::regex piece_re(R"(\s*\(([^()]*)\)\s*)");
  std::vector<Piece> pieces;
  auto it = text.cbegin();
  std::smatch m;
  while (it != text.cend()) {
    if (std::all_of(it, text.cend(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); })) break;
    if (!std::regex_search(it, text.cend(), m, piece_re, std::regex_constants::match_continuous)) {
      throw ConfigError(field + ": expected pieces like (x_left, x_right, value)", field);
    }
    std::vector<std::string> parts;
    std::stringstream ss(m[1].str());
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 3) {
      throw ConfigError(field + ": a piece needs exactly three fields, got '" + m[1].str() + "'",
                        field);
    }
    const double a = parse_number(parts[0], field);
    const double b = parse_number(parts[1], field);
    const auto arrow = parts[2].find("->");
    if (arrow == std::string::npos) {
      pieces.push_back(Piece::constant(a, b, parse_number(parts[2], field)));
    } else {
      pieces.push_back(Piece::linear(a, b, parse_number(parts[2].substr(0, arrow), field),
                                     parse_number(parts[2].substr(arrow + 2), field)));
    }
    it = m[0].second;
  }
  try {
    return Profile(std::move(pieces));
  } catch (const InvalidDataError& e) {
    throw ConfigError(field + ": " + e.what(), field);
  }
}

std::string format_profile(const Profile& profile) {
  std::string out;
  for (const auto& p : profile.pieces()) {
    if (!out.empty()) out += ' ';
    out += "(" + format_number(p.x_left) + ", " + format_number(p.x_right) + ", ";
    out += p.is_constant() ? format_number(p.value_left)
                           : format_number(p.value_left) + "->" + format_number(p.value_right);
    out += ")";
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message(), "",
                      static_cast<int>(e.line()));
  }
  static const std::set<std::string> known = {"model",  "grid",   "initial",   "slab",
                                              "output", "checks", "stability", "convergence"};
  for (const auto& [name, node] : root) {
    if (!known.count(name) || node.empty()) {
      throw ConfigError("unknown section or key outside a section: '" + name + "'", name);
    }
  }

  RunConfig c;
  std::vector<Section> done;

  Section model(root, "model");
  c.model = model.text("name", c.model);
  if (auto node = root.get_child_optional("model")) {
    for (const auto& [k, v] : *node) {
      if (k == "name") continue;
      c.model_params[k] = parse_number(v.data(), model.field(k));
      model.raw(k);
    }
  }
  try {
    c.velocity_model();
  } catch (const Error& e) {
    throw ConfigError(std::string("[model] ") + e.what(), "[model] name");
  }
  done.push_back(std::move(model));

  Section grid(root, "grid");
  c.x_min = grid.number("x_min", c.x_min);
  c.x_max = grid.number("x_max", c.x_max);
  c.n_cells = static_cast<std::size_t>(grid.integer("n_cells", static_cast<long>(c.n_cells), 2));
  if (!(c.x_max > c.x_min) || !std::isfinite(c.x_min) || !std::isfinite(c.x_max)) {
    throw ConfigError("[grid] needs finite x_min < x_max", "[grid] x_min");
  }
  done.push_back(std::move(grid));

  Section init(root, "initial");
  c.data.rho0 = parse_profile(init.text("rho0", ""), init.field("rho0"));
  c.data.psi0 = parse_profile(init.text("psi0", ""), init.field("psi0"));
  c.data.z_inf = init.number("z_inf", 0.0);
  c.data.u_inf = init.number("u_inf", 0.0);
  try {
    c.data.validate();
  } catch (const InvalidDataError& e) {
    throw ConfigError(std::string("[initial] ") + e.what(), "[initial] rho0");
  }
  done.push_back(std::move(init));

  Section slab(root, "slab");
  c.horizon = slab.number("horizon", c.horizon);
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) {
    throw ConfigError("[slab] horizon must be finite and > 0", "[slab] horizon");
  }
  SolverConfig& s = c.solver;
  s.cfl = slab.number("cfl", s.cfl);
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw ConfigError("[slab] cfl must lie in (0,1]", "[slab] cfl");
  s.snapshots_per_slab = static_cast<int>(slab.integer("snapshots", s.snapshots_per_slab, 1));
  s.max_picard_iters = static_cast<int>(slab.integer("max_picard_iters", s.max_picard_iters, 3));
  s.tol_phi = slab.number("tol_phi", s.tol_phi);
  s.tol_factor = slab.number("tol_factor", s.tol_factor);
  if (s.tol_phi < 0.0 || !(s.tol_factor > 0.0)) {
    throw ConfigError("[slab] tol_phi must be >= 0 and tol_factor > 0", "[slab] tol_phi");
  }
  s.tau0 = slab.number("tau0", s.tau0);
  if (s.tau0 < 0.0) throw ConfigError("[slab] tau0 must be >= 0", "[slab] tau0");
  s.max_halvings = static_cast<int>(slab.integer("max_halvings", s.max_halvings, 0));
  done.push_back(std::move(slab));

  Section out(root, "output");
  c.name = out.text("name", c.name);
  if (c.name.empty() || c.name.find("..") != std::string::npos) {
    throw ConfigError("[output] name must be a non-empty relative name", "[output] name");
  }
  s.output_every = static_cast<int>(out.integer("every", s.output_every, 1));
  c.plot = out.flag("plot", c.plot);
  done.push_back(std::move(out));

  Section checks(root, "checks");
  c.audit = checks.flag("audit", c.audit);
  s.audit_entropy = checks.flag("entropy", s.audit_entropy);
  s.check_invariants = checks.flag("invariants", s.check_invariants);
  c.seeds = static_cast<int>(checks.integer("seeds", c.seeds, 0));
  done.push_back(std::move(checks));

  Section stab(root, "stability");
  c.stability.shift = stab.number("shift", 0.0);
  c.stability.shift_cells = stab.number("shift_cells", 0.0);
  c.stability.u_inf_delta = stab.number("u_inf_delta", 0.0);
  done.push_back(std::move(stab));

  Section conv(root, "convergence");
  c.convergence.n0 = static_cast<std::size_t>(conv.integer("n0", static_cast<long>(c.convergence.n0), 2));
  c.convergence.rungs = static_cast<int>(conv.integer("rungs", c.convergence.rungs, 3));
  c.convergence.reference = conv.text("reference", c.convergence.reference);
  if (c.convergence.reference != "exact" && c.convergence.reference != "characteristic" &&
      c.convergence.reference != "viscous") {
    throw ConfigError("[convergence] reference: expected exact, characteristic or viscous",
                      "[convergence] reference");
  }
  c.convergence.eps_factor = conv.number("eps_factor", c.convergence.eps_factor);
  if (!(c.convergence.eps_factor >= 1.0)) {
    throw ConfigError("[convergence] eps_factor must be >= 1", "[convergence] eps_factor");
  }
  c.convergence.min_order = conv.number("min_order", c.convergence.min_order);
  auto lo = conv.raw("window_lo");
  auto hi = conv.raw("window_hi");
  if (lo.has_value() != hi.has_value()) {
    throw ConfigError("[convergence] window_lo and window_hi go together", "[convergence] window_lo");
  }
  if (lo) {
    c.convergence.window = std::pair{parse_number(*lo, conv.field("window_lo")),
                                     parse_number(*hi, conv.field("window_hi"))};
  }
  done.push_back(std::move(conv));

  for (const auto& sec : done) {
    for (const auto& k : sec.leftovers()) {
      throw ConfigError("unknown key " + sec.field(k), sec.field(k));
    }
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const RunConfig& c) {
  std::ostringstream o;
  const SolverConfig& s = c.solver;
  auto b = [](bool x) { return x ? "true" : "false"; };
  o << "[model]\nname = " << c.model << '\n';
  for (const auto& [k, v] : c.model_params) o << k << " = " << format_number(v) << '\n';
  o << "\n[grid]\nx_min = " << format_number(c.x_min) << "\nx_max = " << format_number(c.x_max)
    << "\nn_cells = " << c.n_cells << '\n';
  o << "\n[initial]\nrho0 = " << format_profile(c.data.rho0)
    << "\npsi0 = " << format_profile(c.data.psi0) << "\nz_inf = " << format_number(c.data.z_inf)
    << "\nu_inf = " << format_number(c.data.u_inf) << '\n';
  o << "\n[slab]\nhorizon = " << format_number(c.horizon) << "\ncfl = " << format_number(s.cfl)
    << "\nsnapshots = " << s.snapshots_per_slab << "\nmax_picard_iters = " << s.max_picard_iters
    << "\ntol_phi = " << format_number(s.tol_phi) << "\ntol_factor = " << format_number(s.tol_factor)
    << "\ntau0 = " << format_number(s.tau0) << "\nmax_halvings = " << s.max_halvings << '\n';
  o << "\n[output]\nname = " << c.name << "\nevery = " << s.output_every << "\nplot = " << b(c.plot)
    << '\n';
  o << "\n[checks]\naudit = " << b(c.audit) << "\nentropy = " << b(s.audit_entropy)
    << "\ninvariants = " << b(s.check_invariants) << "\nseeds = " << c.seeds << '\n';
  o << "\n[stability]\nshift = " << format_number(c.stability.shift)
    << "\nshift_cells = " << format_number(c.stability.shift_cells)
    << "\nu_inf_delta = " << format_number(c.stability.u_inf_delta) << '\n';
  o << "\n[convergence]\nn0 = " << c.convergence.n0 << "\nrungs = " << c.convergence.rungs
    << "\nreference = " << c.convergence.reference
    << "\neps_factor = " << format_number(c.convergence.eps_factor)
    << "\nmin_order = " << format_number(c.convergence.min_order) << '\n';
  if (c.convergence.window) {
    o << "window_lo = " << format_number(c.convergence.window->first)
      << "\nwindow_hi = " << format_number(c.convergence.window->second) << '\n';
  }
  return o.str();
}

std::size_t emit_plotdata(const Trajectory& traj, const fs::path& dir) {
  fs::create_directories(dir);
  std::size_t files = 0;
  const Grid& g = traj.grid();
  std::vector<double> x(g.n_cells());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.center(i);
  std::vector<double> t, tv, mass;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const SystemState& s = traj.states[k];
    const std::string id = index_name(k);
    const auto vals = [](const CellField& f) { return std::vector<double>(f.begin(), f.end()); };
    write_series(dir / ("rho_" + id + ".dat"), x, vals(s.rho));
    write_series(dir / ("u_" + id + ".dat"), x, vals(s.u));
    write_series(dir / ("z_" + id + ".dat"), x, vals(s.z));
    files += 3;
    t.push_back(s.t);
    tv.push_back(total_variation(s.rho));
    mass.push_back(s.rho.integral());
  }
  write_series(dir / "tv.dat", t, tv);
  write_series(dir / "mass.dat", t, mass);
  files += 2;
  if (!traj.traces.empty()) {
    std::vector<double> ts, phi;
    for (const auto& tr : traj.traces) {
      ts.push_back(tr.t_start);
      phi.push_back(tr.phi.empty() ? 0.0 : tr.phi.back());
    }
    write_series(dir / "phi.dat", ts, phi);
    ++files;
  }
  return files;
}

std::size_t emit_plotdata(const RunReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  std::size_t files = 0;
  if (!report.times.empty()) {
    write_series(dir / "tv.dat", report.times, report.tv);
    write_series(dir / "tv_envelope.dat", report.times, report.tv_envelope);
    write_series(dir / "mass.dat", report.times, report.mass);
    files += 3;
  }
  if (!report.phi_history.empty()) {
    std::vector<double> t, phi;
    for (const auto& [a, b] : report.phi_history) {
      t.push_back(a);
      phi.push_back(b);
    }
    write_series(dir / "phi.dat", t, phi);
    ++files;
  }
  if (report.k_measured) {
    write_series(dir / "stability_ratio.dat", report.ratio_times, report.ratio_values);
    ++files;
  }
  if (!report.convergence.empty()) {
    std::vector<double> h, e;
    for (const auto& r : report.convergence) {
      h.push_back(r.h);
      e.push_back(r.error);
    }
    write_series(dir / "convergence.dat", h, e);
    ++files;
  }
  return files;
}

void write_trajectory(const Trajectory& traj, const RunConfig& config, const fs::path& dir) {
  const fs::path snaps = dir / "snapshots";
  fs::create_directories(snaps);
  nlohmann::json manifest;
  manifest["config"] = write_config(config);
  const SolveConstants& c = traj.constants;
  manifest["constants"] = {{"tilde_C", c.tilde_C},   {"tau0_literal", c.tau0_literal},
                           {"slab_length", c.slab_length}, {"M0", c.M0},
                           {"tol_phi", c.tol_phi},   {"u0_sup", c.u0_sup},
                           {"z0_sup", c.z0_sup},     {"psi0_sup", c.psi0_sup},
                           {"rho0_l1", c.rho0_l1},   {"rho0_tv", c.rho0_tv},
                           {"mass0", c.mass0},       {"u_constant", c.u_constant}};
  manifest["diagnostics"] = {{"micro_steps", traj.micro_steps},
                             {"max_cfl_number", traj.max_cfl_number},
                             {"route_gap", traj.route_gap},
                             {"entropy_k", traj.entropy_k},
                             {"entropy_max", traj.entropy_max}};
  manifest["slabs"] = nlohmann::json::array();
  for (const auto& t : traj.traces) manifest["slabs"].push_back(trace_json(t));
  manifest["snapshots"] = nlohmann::json::array();
  const Grid& g = traj.grid();
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const SystemState& s = traj.states[k];
    const std::string file = "snapshots/" + index_name(k) + ".csv";
    std::ofstream out(dir / file);
    out << "x_center,rho,u,z,psi,v,w\n";
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      out << format_number(g.center(i)) << ',' << format_number(s.rho[i]) << ','
          << format_number(s.u[i]) << ',' << format_number(s.z[i]) << ','
          << format_number(s.psi[i]) << ',' << format_number(s.v[i]) << ','
          << format_number(s.w[i]) << '\n';
    }
    if (!out) throw Error("cannot write " + (dir / file).string());
    manifest["snapshots"].push_back({{"index", k}, {"t", s.t}, {"file", file}});
  }
  manifest["notes"] = {
      "TV envelope D(t) = M0 exp(tilde_C t) + exp(tilde_C t) - 1 is one admissible choice",
      "slab_length falls back to min(1/4, ln(3/2)/tilde_C) when tau0_literal is 0"};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

int run(int argc, char** argv) {
  CLI::App app{"Finite-volume solver kit for a two-equation traffic flow system with a transported marker"};
  app.require_subcommand(1);
  std::string seed_dir;
  app.add_option("--seed-dir", seed_dir, "Output root (default $GARZ_OUTPUT_ROOT or .)");

  std::string config_path;
  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--n-cells", ov.n_cells, "Override [grid] n_cells");
    sub->add_option("--horizon", ov.horizon, "Override [slab] horizon");
    sub->add_option("--cfl", ov.cfl, "Override [slab] cfl");
    sub->add_option("--tol-phi", ov.tol_phi, "Override [slab] tol_phi");
    sub->add_option("--name", ov.name, "Override [output] name");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve and write the trajectory");
  CLI::App* verify = app.add_subcommand("verify", "Solve, audit and run the uniqueness check");
  CLI::App* stability = app.add_subcommand("stability", "Measure the stability ratio of a pair");
  CLI::App* uniqueness = app.add_subcommand("uniqueness", "Compare runs with perturbed settings");
  CLI::App* convergence = app.add_subcommand("convergence", "Refinement study against a reference");
  for (CLI::App* sub : {solve, verify, stability, uniqueness, convergence}) add_common(sub);

  CLI::App* riemann = app.add_subcommand("riemann", "Exact constant-marker Riemann solution");
  double rho_l = 0.0, rho_r = 0.0, u_c = 1.0, t = 1.0, x_lo = -1.0, x_hi = 1.0;
  std::size_t points = 201;
  std::string model_name = "greenshields";
  double gamma = 2.0;
  std::string out_file;
  riemann->add_option("--rhoL", rho_l, "Left density")->required();
  riemann->add_option("--rhoR", rho_r, "Right density")->required();
  riemann->add_option("--u", u_c, "Constant marker");
  riemann->add_option("--t", t, "Time (> 0)");
  riemann->add_option("--x-min", x_lo);
  riemann->add_option("--x-max", x_hi);
  riemann->add_option("--points", points)->check(CLI::Range(2, 1000000));
  riemann->add_option("--model", model_name);
  riemann->add_option("--gamma", gamma);
  riemann->add_option("--output", out_file, "CSV file (default stdout)");

  CLI::App* validate = app.add_subcommand("validate-model", "Sample the closure assumptions");
  double u_max = 1.0;
  int samples = 101;
  validate->add_option("--model", model_name);
  validate->add_option("--gamma", gamma);
  validate->add_option("--u-max", u_max);
  validate->add_option("--samples", samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const fs::path root = output_root(seed_dir);
  try {
    if (*riemann) {
      const VelocityModel model = VelocityModel::from_name(model_name, {{"gamma", gamma}});
      std::ostringstream csv;
      csv << "x,rho\n";
      for (std::size_t i = 0; i < points; ++i) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        csv << format_number(x) << ',' << format_number(lwr_riemann_exact(rho_l, rho_r, u_c, model, t, x))
            << '\n';
      }
      if (out_file.empty()) {
        std::cout << csv.str();
      } else {
        write_text(root / out_file, csv.str());
      }
      return 0;
    }
    if (*validate) {
      const VelocityModel model = VelocityModel::from_name(model_name, {{"gamma", gamma}});
      const ModelValidationReport r = validate_model(model, u_max, samples);
      for (const auto& c : r.conditions) {
        std::cout << (c.pass ? "  ok    " : "  FAIL  ") << c.name
                  << "  worst=" << format_number(c.worst_violation) << " at (rho="
                  << format_number(c.at_rho) << ", u=" << format_number(c.at_u) << ")\n";
      }
      std::cout << r.samples << " samples\n";
      return r.pass() ? 0 : kExitChecksFailed;
    }

    RunConfig config = load_config(config_path);
    apply(config, ov);
    if (*solve) return cmd_solve(config, root, false);
    if (*verify) return cmd_solve(config, root, true);
    if (*stability) return cmd_stability(config, root);
    if (*uniqueness) return cmd_uniqueness(config, root);
    if (*convergence) return cmd_convergence(config, root);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!config_path.empty()) std::cerr << " in " << config_path;
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const NonConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << '\n' << trace_json(e.trace()).dump(2) << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace garz::cli
