#include "garz/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "garz/errors.hpp"

namespace garz {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Second-order difference of g at x, one-sided when the centered stencil
// would leave [lo, hi].
template <class G>
double differentiate(const G& g, double x, double step, double lo, double hi) {
  if (x - step < lo) {
    return (-3.0 * g(x) + 4.0 * g(x + step) - g(x + 2.0 * step)) / (2.0 * step);
  }
  if (x + step > hi) {
    return (3.0 * g(x) - 4.0 * g(x - step) + g(x - 2.0 * step)) / (2.0 * step);
  }
  return (g(x + step) - g(x - step)) / (2.0 * step);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

VelocityModel VelocityModel::greenshields() {
  return VelocityModel("greenshields", {}, Greenshields{});
}

VelocityModel VelocityModel::power_law(double gamma) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw InputRangeError("power-law exponent must be a finite number >= 1");
  }
  return VelocityModel("power", {{"gamma", gamma}}, PowerLaw{gamma});
}

VelocityModel VelocityModel::custom(std::string name, Closure v, std::optional<Closure> d_rho,
                                    std::optional<Closure> d_u) {
  if (!v) throw InputRangeError("custom velocity model needs a closure");
  return VelocityModel(std::move(name), {}, Custom{std::move(v), std::move(d_rho), std::move(d_u)});
}

VelocityModel VelocityModel::from_name(const std::string& name,
                                       const std::map<std::string, double>& params) {
  if (name == "greenshields") return greenshields();
  if (name == "power") {
    auto it = params.find("gamma");
    return power_law(it == params.end() ? 2.0 : it->second);
  }
  throw UnsupportedModelError("unknown velocity model '" + name + "'");
}

double VelocityModel::velocity(double rho, double u) const {
  return std::visit(Overloaded{
                        [&](const Greenshields&) { return u * (1.0 - rho); },
                        [&](const PowerLaw& p) {
                          return u * std::pow(std::max(0.0, 1.0 - rho), p.gamma);
                        },
                        [&](const Custom& c) { return c.v(rho, u); },
                    },
                    impl_);
}

double VelocityModel::d_rho(double rho, double u) const {
  return std::visit(
      Overloaded{
          [&](const Greenshields&) { return -u; },
          [&](const PowerLaw& p) {
            return -p.gamma * u * std::pow(std::max(0.0, 1.0 - rho), p.gamma - 1.0);
          },
          [&](const Custom& c) {
            if (c.d_rho) return (*c.d_rho)(rho, u);
            auto g = [&](double r) { return c.v(r, u); };
            return differentiate(g, rho, kFiniteDifferenceStep, 0.0, 1.0);
          },
      },
      impl_);
}

double VelocityModel::d_u(double rho, double u) const {
  return std::visit(
      Overloaded{
          [&](const Greenshields&) { return 1.0 - rho; },
          [&](const PowerLaw& p) { return std::pow(std::max(0.0, 1.0 - rho), p.gamma); },
          [&](const Custom& c) {
            if (c.d_u) return (*c.d_u)(rho, u);
            auto g = [&](double w) { return c.v(rho, w); };
            return differentiate(g, u, kFiniteDifferenceStep, 0.0, kInf);
          },
      },
      impl_);
}

double VelocityModel::d_u_rho(double rho, double u) const {
  return std::visit(
      Overloaded{
          [&](const Greenshields&) { return -1.0; },
          [&](const PowerLaw& p) {
            return -p.gamma * std::pow(std::max(0.0, 1.0 - rho), p.gamma - 1.0);
          },
          [&](const Custom&) {
            auto g = [&](double r) { return d_u(r, u); };
            return differentiate(g, rho, kSecondDifferenceStep, 0.0, 1.0);
          },
      },
      impl_);
}

double VelocityModel::d_uu(double rho, double u) const {
  return std::visit(Overloaded{
                        [&](const Greenshields&) { return 0.0; },
                        [&](const PowerLaw&) { return 0.0; },
                        [&](const Custom&) {
                          auto g = [&](double w) { return d_u(rho, w); };
                          return differentiate(g, u, kSecondDifferenceStep, 0.0, kInf);
                        },
                    },
                    impl_);
}

double VelocityModel::flux(double rho, double u) const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw InputRangeError("density " + std::to_string(rho) + " outside [0,1]");
  }
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw InputRangeError("marker " + std::to_string(u) + " must be finite and >= 0");
  }
  return flux_unchecked(rho, u);
}

double VelocityModel::flux_derivative(double rho, double u) const {
  return velocity(rho, u) + rho * d_rho(rho, u);
}

double VelocityModel::flux_second_derivative(double rho, double u) const {
  const double d_rho_rho = std::visit(
      Overloaded{
          [&](const Greenshields&) { return 0.0; },
          [&](const PowerLaw& p) {
            if (p.gamma == 1.0) return 0.0;
            return p.gamma * (p.gamma - 1.0) * u *
                   std::pow(std::max(0.0, 1.0 - rho), p.gamma - 2.0);
          },
          [&](const Custom&) {
            auto g = [&](double r) { return d_rho(r, u); };
            return differentiate(g, rho, kSecondDifferenceStep, 0.0, 1.0);
          },
      },
      impl_);
  return 2.0 * d_rho(rho, u) + rho * d_rho_rho;
}

Eigenvalues VelocityModel::eigenvalues(double rho, double u) const {
  if (!(rho >= 0.0 && rho <= 1.0) || !(u >= 0.0) || !std::isfinite(u)) {
    throw InputRangeError("eigenvalues: state outside [0,1] x [0,inf)");
  }
  const double v = velocity(rho, u);
  return {v + rho * d_rho(rho, u), v};
}

std::optional<double> VelocityModel::critical_density(double /*u*/) const {
  return std::visit(Overloaded{
                        [](const Greenshields&) -> std::optional<double> { return 0.5; },
                        [](const PowerLaw& p) -> std::optional<double> {
                          return 1.0 / (1.0 + p.gamma);
                        },
                        [](const Custom&) -> std::optional<double> { return std::nullopt; },
                    },
                    impl_);
}

double VelocityModel::max_char_speed(double u) const {
  if (is_builtin()) {
    // |d_rho f| and V both peak at rho = 0 where they equal u.
    return std::abs(u);
  }
  double s = 0.0;
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) {
    const double rho = static_cast<double>(i) / kSamples;
    s = std::max({s, std::abs(flux_derivative(rho, u)), std::abs(velocity(rho, u))});
  }
  return s;
}

bool VelocityModel::has_analytic_derivatives() const {
  return !std::holds_alternative<Custom>(impl_);
}

bool VelocityModel::is_builtin() const { return !std::holds_alternative<Custom>(impl_); }

DerivativeBounds VelocityModel::bounds(double u_max, int samples_per_axis) const {
  DerivativeBounds b;
  b.u_max = u_max;
  const int n = std::max(samples_per_axis, 2);
  for (int i = 0; i < n; ++i) {
    const double rho = static_cast<double>(i) / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double u = u_max * static_cast<double>(j) / (n - 1);
      b.v = std::max(b.v, std::abs(velocity(rho, u)));
      b.d_rho = std::max(b.d_rho, std::abs(d_rho(rho, u)));
      b.d_u = std::max(b.d_u, std::abs(d_u(rho, u)));
      b.d_u_rho = std::max(b.d_u_rho, std::abs(d_u_rho(rho, u)));
      b.d_uu = std::max(b.d_uu, std::abs(d_uu(rho, u)));
    }
  }
  return b;
}

bool ModelValidationReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck& ModelValidationReport::condition(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no model condition named " + name);
}

ModelValidationReport validate_model(const VelocityModel& model, double u_max, int n_samples) {
  if (n_samples < 2) throw PreconditionError("validate_model needs at least 2 samples per axis");
  if (!(u_max >= 0.0)) throw InputRangeError("validate_model: u_max must be >= 0");

  ModelValidationReport report;
  report.u_max = u_max;
  report.conditions = {{"C2"}, {"V>=0"}, {"dV/drho<=0"}, {"dV/du>=0"}, {"V(1,u)=0"}};
  auto record = [&](std::size_t idx, double violation, double rho, double u) {
    auto& c = report.conditions[idx];
    if (violation > c.worst_violation || std::isnan(violation)) {
      c.worst_violation = std::isnan(violation) ? kInf : violation;
      c.at_rho = rho;
      c.at_u = u;
    }
  };

  for (int i = 0; i < n_samples; ++i) {
    const double rho = static_cast<double>(i) / (n_samples - 1);
    for (int j = 0; j < n_samples; ++j) {
      const double u = u_max * static_cast<double>(j) / (n_samples - 1);
      const double second[] = {model.d_u_rho(rho, u), model.d_uu(rho, u),
                               model.flux_second_derivative(rho, u)};
      double c2 = 0.0;
      for (double s : second) {
        if (!std::isfinite(s)) c2 = kInf;
      }
      record(0, c2, rho, u);
      record(1, std::max(0.0, -model.velocity(rho, u)), rho, u);
      record(2, std::max(0.0, model.d_rho(rho, u)), rho, u);
      record(3, std::max(0.0, -model.d_u(rho, u)), rho, u);
      if (i == n_samples - 1) record(4, std::abs(model.velocity(1.0, u)), rho, u);
      ++report.samples;
    }
  }
  for (auto& c : report.conditions) c.pass = c.worst_violation <= kModelTolerance;
  return report;
}

}  // namespace garz
