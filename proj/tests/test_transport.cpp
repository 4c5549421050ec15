#include <doctest.h>

#include <cmath>

#include "garz/errors.hpp"
#include "garz/scalar_solver.hpp"
#include "garz/transport.hpp"

using namespace garz;

namespace {

// Compactly supported bumpy density with a nonconstant marker.
struct Setup {
  Grid g{-2.0, 2.0, 80};
  CellField rho{g};
  CellField u{g};
  Setup() {
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      const double x = g.center(i);
      rho[i] = std::abs(x) < 1.0 ? 0.5 + 0.4 * std::sin(3.0 * x) : 0.0;
      u[i] = 1.0 + 0.2 * std::tanh(x);
    }
  }
};

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("zero marker stays zero") {
  Setup s;
  const auto model = VelocityModel::greenshields();
  const double dt = cfl_dt(s.u, model, 0.9);
  const DensityStep step = step_density(s.rho, s.u, dt, model);
  const CellField q = step_marker(CellField(s.g), s.rho, step.fluxes, dt);
  CHECK(q.sup_norm() == 0.0);
}

TEST_CASE("constant ratio is carried with the density") {
  Setup s;
  const auto model = VelocityModel::greenshields();
  const double dt = cfl_dt(s.u, model, 0.9);
  const DensityStep step = step_density(s.rho, s.u, dt, model);
  CellField q(s.g);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 0.7 * s.rho[i];
  const CellField next = step_marker(q, s.rho, step.fluxes, dt);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(next[i] == doctest::Approx(0.7 * step.rho[i]).epsilon(1e-12));
}

TEST_CASE("marker mass is conserved and bounded by the density") {
  Setup s;
  const auto model = VelocityModel::greenshields();
  const double dt = cfl_dt(s.u, model, 0.9);
  CellField q(s.g);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.rho[i] * std::cos(5.0 * s.g.center(i));
  CellField rho = s.rho;
  const double mass0 = q.integral();
  for (int n = 0; n < 10; ++n) {
    const DensityStep step = step_density(rho, s.u, dt, model);
    q = step_marker(q, rho, step.fluxes, dt);
    rho = step.rho;
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(q[i]) <= rho[i] + 1e-12);
  }
  CHECK(std::abs(q.integral() - mass0) <= 1e-12 * std::abs(mass0) + 1e-15);
}

TEST_CASE("marker step rejects foreign fluxes") {
  Setup s;
  const auto model = VelocityModel::greenshields();
  const double dt = cfl_dt(s.u, model, 0.9);
  const DensityStep step = step_density(s.rho, s.u, dt, model);
  CHECK_THROWS_AS(step_marker(s.rho, s.rho, step.fluxes, 0.5 * dt), PreconditionError);
  const Grid other(-2.0, 2.0, 40);
  CHECK_THROWS_AS(step_marker(CellField(other), CellField(other), step.fluxes, dt), GridMismatchError);
}

TEST_CASE("ratio extraction") {
  const Grid g(0.0, 1.0, 6);
  const CellField rho(g, {0.0, 0.2, 0.5, 0.0, 1.0, 0.0});
  CellField q(g);
  for (std::size_t i = 0; i < 6; ++i) q[i] = 0.3 * rho[i];
  const CellField r = extract_ratio(q, rho, -1.0);
  CHECK(r[0] == -1.0);
  CHECK(r[1] == doctest::Approx(0.3));
  CHECK(r[2] == doctest::Approx(0.3));
  CHECK(r[3] == -1.0);
  CHECK(r[4] == doctest::Approx(0.3));
  CHECK(extract_ratio(q, CellField(g), 0.25).min() == 0.25);
  CellField bounded(g, {0.0, 0.4, -0.9, 0.0, 2.0, 0.0});
  CHECK(extract_ratio(bounded, rho, 0.0).sup_norm() <= 2.0);

  const CellField p = extract_ratio_pinned(q, rho, 0.9);
  CHECK(p[0] == 0.9);
  CHECK(p[3] == doctest::Approx(0.3));
}

TEST_CASE("prefix-sum reconstruction") {
  const Grid g(0.0, 1.0, 10);
  CHECK(reconstruct(CellField(g), 0.4).min() == 0.4);
  CHECK(reconstruct(CellField(g), 0.4).max() == 0.4);
  CellField q(g);
  q[3] = 1.0;
  const CellField step = reconstruct(q, 0.0);
  CHECK(step[2] == 0.0);
  CHECK(step[3] == doctest::Approx(0.1));
  CHECK(step[9] == doctest::Approx(0.1));
  CellField f(g);
  for (std::size_t i = 0; i < 10; ++i) f[i] = std::sin(static_cast<double>(i));
  const CellField back = reconstruct(difference(f, 0.2), 0.2);
  for (std::size_t i = 0; i < 10; ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-14));
}

}
