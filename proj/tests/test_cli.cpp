#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "garz/cli.hpp"
#include "garz/scenarios.hpp"

using namespace garz;
using namespace garz::cli;
namespace fs = std::filesystem;

#ifndef GARZ_CONFIG_DIR
#error "GARZ_CONFIG_DIR must point at the shipped configs"
#endif

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("garz_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "garz");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string config_path(const std::string& name) {
  return (fs::path(GARZ_CONFIG_DIR) / (name + ".cfg")).string();
}

const char* kMinimal = R"(
[model]
name = greenshields
[grid]
x_min = -3
x_max = 3
n_cells = 60
[initial]
rho0 = (-1, 0, 0.3) (0, 1, 0.1->0.6)
psi0 = (-1, 1, -0.25)
z_inf = 0.4
u_inf = 1
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("numbers round-trip in shortest form") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("profile syntax") {
  const Profile p = parse_profile("(-1, 0, 0.3) (0, 1, 0.1->0.6)", "f");
  REQUIRE(p.pieces().size() == 2);
  CHECK(p.pieces()[1] == Piece::linear(0.0, 1.0, 0.1, 0.6));
  CHECK(parse_profile(format_profile(p), "f") == p);
  CHECK(parse_profile("(-inf, inf, 0.25)", "f").value(1e9) == 0.25);
  CHECK(parse_profile("", "f").empty());
  CHECK_THROWS_AS(parse_profile("(0, 1)", "f"), ConfigError);
  CHECK_THROWS_AS(parse_profile("(0, 1, x)", "f"), ConfigError);
  CHECK_THROWS_AS(parse_profile("0, 1, 0.2", "f"), ConfigError);
  CHECK_THROWS_AS(parse_profile("(1, 0, 0.2)", "f"), ConfigError);
}

TEST_CASE("written configs parse back to the same config") {
  RunConfig c = parse_config(kMinimal);
  CHECK(c.n_cells == 60);
  CHECK(c.data.z_inf == 0.4);
  CHECK(parse_config(write_config(c)) == c);
  c.model = "power";
  c.model_params["gamma"] = 2.5;
  c.solver.tol_phi = 1.0 / 3.0;
  c.stability.shift = 0.055;
  c.convergence.window = std::pair{-0.45, 0.45};
  c.plot = false;
  CHECK(parse_config(write_config(c)) == c);
  CHECK(write_config(parse_config(write_config(c))) == write_config(c));
}

TEST_CASE("shipped configs describe the shipped scenarios") {
  for (const auto& name : {"constant", "shock", "rarefaction", "smoke", "vacuum", "smooth"}) {
    INFO(name);
    const RunConfig c = load_config(config_path(name));
    const Scenario sc = scenario_by_name(name);
    CHECK(c.data == sc.data);
    CHECK(c.x_min == sc.x_min);
    CHECK(c.x_max == sc.x_max);
    CHECK(c.horizon == sc.horizon);
    CHECK(c.velocity_model().name() == sc.model.name());
    CHECK(c.velocity_model().params() == sc.model.params());
    CHECK(c.name == name);
  }
  const RunConfig pair = load_config(config_path("stability_shift"));
  CHECK(pair.data == smoke_scenario().data);
  CHECK(pair.perturbed_data() == smoke_scenario().data.shifted(0.055));
  const RunConfig uinf = load_config(config_path("stability_uinf"));
  CHECK(uinf.perturbed_data().u_inf == doctest::Approx(1.01));
}

TEST_CASE("config errors name the line or the field") {
  const auto error_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("", "");
  };
  CHECK(error_of("[grid\nx_min = 0\n").line() == 1);
  CHECK(error_of(std::string(kMinimal) + "bogus = 1\n").field() == "[initial] bogus");
  CHECK(error_of(std::string(kMinimal) + "[slab]\ncfl = fast\n").field() == "[slab] cfl");
  CHECK(error_of(std::string(kMinimal) + "[slab]\ncfl = 1.5\n").field() == "[slab] cfl");
  CHECK(error_of(std::string(kMinimal) + "[weird]\na = 1\n").field() == "weird");
  CHECK(error_of("[initial]\nrho0 = (0, 1, 2)\n").field() == "[initial] rho0");
  CHECK(error_of("[model]\nname = nope\n").field() == "[model] name");
}

TEST_CASE("solve writes the run directory") {
  const fs::path root = fresh_dir("solve");
  CHECK(run_args({"--seed-dir", root.string(), "solve", "--config", config_path("constant"),
                  "--n-cells", "60"}) == 0);
  const fs::path dir = root / "constant";
  REQUIRE(fs::exists(dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const std::size_t n_snaps = manifest["snapshots"].size();
  CHECK(n_snaps >= 2);
  CHECK(fs::exists(dir / "snapshots" / "0000.csv"));
  CHECK(slurp(dir / "snapshots" / "0000.csv").rfind("x_center,rho,u,z,psi,v,w\n", 0) == 0);
  CHECK(fs::exists(dir / "report.csv"));
  // Flat series for the constant state.
  std::ifstream tv(dir / "plot" / "tv.dat");
  double t = 0.0, value = 0.0;
  std::vector<double> series;
  while (tv >> t >> value) series.push_back(value);
  REQUIRE(series.size() == n_snaps);
  for (double x : series) CHECK(x == series.front());
  CHECK(fs::exists(dir / "plot" / "rho_0000.dat"));
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  for (const auto& root : {a, b}) {
    CHECK(run_args({"--seed-dir", root.string(), "solve", "--config", config_path("smoke"),
                    "--n-cells", "100", "--horizon", "0.3"}) == 0);
  }
  for (const auto& entry : fs::recursive_directory_iterator(a / "smoke")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    INFO(rel.string());
    CHECK(slurp(entry.path()) == slurp(b / rel));
  }
}

TEST_CASE("stability subcommand reports K and its ratio series") {
  const fs::path root = fresh_dir("stability");
  CHECK(run_args({"--seed-dir", root.string(), "stability", "--config",
                  config_path("stability_shift"), "--n-cells", "100", "--horizon", "0.5"}) == 0);
  const auto report = nlohmann::json::parse(slurp(root / "stability_shift" / "report.json"));
  const double k = report["stability"]["K_measured"];
  std::ifstream series(root / "stability_shift" / "plot" / "stability_ratio.dat");
  double t = 0.0, q = 0.0, peak = 0.0;
  while (series >> t >> q) peak = std::max(peak, q);
  CHECK(peak == k);
}

TEST_CASE("riemann subcommand") {
  const fs::path root = fresh_dir("riemann");
  CHECK(run_args({"--seed-dir", root.string(), "riemann", "--rhoL", "0.2", "--rhoR", "0.8", "--u",
                  "1", "--t", "0.5", "--points", "5", "--output", "r.csv"}) == 0);
  CHECK(slurp(root / "r.csv") == "x,rho\n-1,0.2\n-0.5,0.2\n0,0.8\n0.5,0.8\n1,0.8\n");
}

TEST_CASE("exit codes") {
  const fs::path root = fresh_dir("codes");
  std::ofstream(root / "bad.cfg") << "[grid]\nx_min = abc\n";
  CHECK(run_args({"--seed-dir", root.string(), "solve", "--config", (root / "bad.cfg").string()}) == 2);
  CHECK(run_args({"solve"}) == 2);
  CHECK(run_args({"validate-model", "--model", "greenshields", "--u-max", "2"}) == 0);
  // Three iterates cannot reach a tiny tolerance on the smoke test.
  std::string smoke = slurp(config_path("smoke"));
  smoke.replace(smoke.find("max_picard_iters = 40"), 21, "max_picard_iters = 3");
  std::ofstream(root / "short.cfg") << smoke;
  CHECK(run_args({"--seed-dir", root.string(), "solve", "--config", (root / "short.cfg").string(),
                  "--n-cells", "60", "--tol-phi", "1e-30"}) == 1);
  const auto trace = nlohmann::json::parse(slurp(root / "smoke" / "trace.json"));
  CHECK(trace["converged"] == false);
  CHECK(trace["iterations"] == 3);
  // A convergence bar that no first-order scheme meets.
  std::string text = slurp(config_path("shock"));
  text.replace(text.find("min_order = 0.4"), 15, "min_order = 5");
  std::ofstream(root / "strict.cfg") << text;
  CHECK(run_args({"--seed-dir", root.string(), "convergence", "--config",
                  (root / "strict.cfg").string(), "--horizon", "0.2"}) == 3);
}

}
