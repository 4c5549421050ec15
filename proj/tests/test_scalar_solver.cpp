#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "garz/errors.hpp"
#include "garz/scalar_solver.hpp"
#include "garz/state.hpp"

using namespace garz;

namespace {

// Min/max of the flux over [a, b] by dense sampling.
double sampled_godunov(double l, double r, double u, const VelocityModel& m) {
  const int n = 200000;
  const double lo = std::min(l, r), hi = std::max(l, r);
  double best = l <= r ? INFINITY : -INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double f = m.flux(lo + (hi - lo) * i / n, u);
    best = l <= r ? std::min(best, f) : std::max(best, f);
  }
  return best;
}

}  // namespace

TEST_SUITE("scalar_solver") {

TEST_CASE("godunov flux values") {
  const auto m = VelocityModel::greenshields();
  CHECK(godunov_flux(0.2, 0.8, 1.0, m) == doctest::Approx(0.16));
  CHECK(godunov_flux(0.8, 0.2, 1.0, m) == doctest::Approx(0.25));
  for (double r : {0.0, 0.3, 1.0}) CHECK(godunov_flux(r, r, 0.8, m) == doctest::Approx(m.flux(r, 0.8)));
}

TEST_CASE("godunov flux matches dense sampling") {
  const auto custom = VelocityModel::custom("cubic", [](double rho, double u) {
    return u * (1.0 - rho) * (1.0 + rho - rho * rho);
  });
  for (const auto& m : {VelocityModel::greenshields(), VelocityModel::power_law(2.0),
                        VelocityModel::power_law(4.0), custom}) {
    for (double l : {0.0, 0.15, 0.45, 0.9}) {
      for (double r : {0.05, 0.3, 0.6, 1.0}) {
        CHECK(godunov_flux(l, r, 1.3, m) == doctest::Approx(sampled_godunov(l, r, 1.3, m)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("cfl time step") {
  const Grid g(0.0, 1.0, 50);
  const auto m = VelocityModel::greenshields();
  CHECK(cfl_dt(CellField(g, 1.0), m, 0.9) == doctest::Approx(0.9 * g.h()));
  CHECK(cfl_dt(CellField(g, 1.0), m, 0.5) == doctest::Approx(0.5 * cfl_dt(CellField(g, 1.0), m, 1.0)));
  CHECK(cfl_dt(CellField(g, 0.0), m, 0.5) == doctest::Approx(0.5 * g.h() / kMinSpeed));
  CHECK_THROWS_AS(cfl_dt(CellField(g, 1.0), m, 1.5), InputRangeError);
}

TEST_CASE("constant state is preserved") {
  const Grid g(0.0, 1.0, 50);
  const auto m = VelocityModel::greenshields();
  const CellField rho(g, 0.37);
  const DensityStep s = step_density(rho, CellField(g, 1.0), 0.9 * g.h(), m);
  CHECK(s.rho == rho);
}

TEST_CASE("stationary shock is preserved") {
  const Grid g(-1.0, 1.0, 40);
  const auto m = VelocityModel::greenshields();
  CellField rho(g);
  for (std::size_t i = 0; i < 40; ++i) rho[i] = i < 20 ? 0.2 : 0.8;
  const DensityStep s = step_density(rho, CellField(g, 1.0), 0.9 * g.h(), m);
  for (std::size_t i = 0; i < 40; ++i) CHECK(s.rho[i] == doctest::Approx(rho[i]).epsilon(1e-15));
}

TEST_CASE("mass is conserved on compact support") {
  const Grid g(-3.0, 3.0, 120);
  const auto m = VelocityModel::power_law(2.0);
  const InitialData d{Profile({Piece::constant(-1.0, 0.0, 0.9), Piece::linear(0.0, 1.0, 0.3, 0.0)}),
                      Profile({Piece::constant(-1.0, 1.0, 0.4)}), 0.2, 0.5};
  const SystemState st = build_initial_state(d, g);
  CellField rho = st.rho;
  const double mass0 = rho.integral();
  const double dt = cfl_dt(st.u, m, 0.9);
  for (int n = 0; n < 40; ++n) rho = step_density(rho, st.u, dt, m).rho;
  CHECK(std::abs(rho.integral() - mass0) <= 1e-12 * mass0);
  CHECK(rho.min() >= 0.0);
  CHECK(rho.max() <= 1.0);
}

TEST_CASE("step rejects a dt beyond the CFL limit") {
  const Grid g(0.0, 1.0, 50);
  const auto m = VelocityModel::greenshields();
  CHECK_THROWS_AS(step_density(CellField(g, 0.5), CellField(g, 1.0), 1.5 * g.h(), m), PreconditionError);
}

TEST_CASE("entropy residual") {
  const auto m = VelocityModel::greenshields();
  const Grid g(-1.0, 1.0, 40);
  const double dt = 0.9 * g.h();
  const CellField c(g, 0.4);
  const CellField one(g, 1.0);
  const DensityStep sc = step_density(c, one, dt, m);
  for (double k : {0.0, 0.4, 0.7}) {
    CHECK(entropy_residual(c, sc.rho, one, k, dt, m).sup_norm() <= 1e-12);
  }

  CellField shock(g);
  for (std::size_t i = 0; i < 40; ++i) shock[i] = i < 20 ? 0.2 : 0.8;
  const DensityStep ss = step_density(shock, one, dt, m);
  CHECK(entropy_residual(shock, ss.rho, one, 0.5, dt, m).max() <= 10.0 * g.h());
  CHECK(entropy_residual(shock, ss.rho, one, 1.0, dt, m).max() <= 1e-12);

  // A non-entropic expansion shock, kept as a fake step, violates the inequality.
  CellField fan(g);
  for (std::size_t i = 0; i < 40; ++i) fan[i] = i < 20 ? 0.8 : 0.2;
  const DensityStep good = step_density(fan, one, dt, m);
  CHECK(entropy_residual(fan, good.rho, one, 0.5, dt, m).max() <= 1e-12);
  CHECK(entropy_residual(fan, fan, one, 0.5, dt, m).max() > 0.1);
}

}
