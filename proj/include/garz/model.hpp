#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace garz {

/// Sup-norms of the closure and its derivatives over [0,1] x [0, u_max].
struct DerivativeBounds {
  double u_max = 0.0;
  double v = 0.0;
  double d_rho = 0.0;
  double d_u = 0.0;
  double d_u_rho = 0.0;
  double d_uu = 0.0;
};

struct Eigenvalues {
  double lambda1 = 0.0;  ///< V + rho * dV/drho
  double lambda2 = 0.0;  ///< V
};

/// Velocity closure V(rho, u) of the traffic system together with its first and
/// second partial derivatives. Built-in closures carry analytic derivatives;
/// custom closures fall back to centered finite differences.
///
/// Instances are immutable and can be shared across threads.
class VelocityModel {
 public:
  using Closure = std::function<double(double, double)>;

  /// V = u (1 - rho).
  static VelocityModel greenshields();
  /// V = u (1 - rho)^gamma, gamma >= 1.
  static VelocityModel power_law(double gamma);
  /// Any closure; missing derivatives are approximated by finite differences.
  static VelocityModel custom(std::string name, Closure v,
                              std::optional<Closure> d_rho = std::nullopt,
                              std::optional<Closure> d_u = std::nullopt);
  /// Built-in lookup by configuration name ("greenshields", "power").
  static VelocityModel from_name(const std::string& name,
                                 const std::map<std::string, double>& params);

  double velocity(double rho, double u) const;
  double d_rho(double rho, double u) const;
  double d_u(double rho, double u) const;
  double d_u_rho(double rho, double u) const;
  double d_uu(double rho, double u) const;

  /// rho * V(rho, u). Throws InputRangeError unless rho in [0,1], u >= 0.
  double flux(double rho, double u) const;
  /// Same arithmetic as flux() without the domain check.
  double flux_unchecked(double rho, double u) const { return rho * velocity(rho, u); }
  /// d/drho [rho V(rho, u)].
  double flux_derivative(double rho, double u) const;
  double flux_second_derivative(double rho, double u) const;

  Eigenvalues eigenvalues(double rho, double u) const;

  /// Maximiser of rho -> rho V(rho,u) on [0,1] when known in closed form.
  std::optional<double> critical_density(double u) const;
  /// sup over rho in [0,1] of max(|d_rho f|, V) at fixed u.
  double max_char_speed(double u) const;

  bool has_analytic_derivatives() const;
  /// Built-ins have a unimodal flux with a closed-form critical point.
  bool is_builtin() const;

  /// Sampled sup-norms of V and its derivatives on [0,1] x [0,u_max].
  DerivativeBounds bounds(double u_max, int samples_per_axis = 201) const;

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }

 private:
  struct Greenshields {};
  struct PowerLaw {
    double gamma;
  };
  struct Custom {
    Closure v;
    std::optional<Closure> d_rho;
    std::optional<Closure> d_u;
  };

  VelocityModel(std::string name, std::map<std::string, double> params,
                std::variant<Greenshields, PowerLaw, Custom> impl)
      : name_(std::move(name)), params_(std::move(params)), impl_(std::move(impl)) {}

  std::string name_;
  std::map<std::string, double> params_;
  std::variant<Greenshields, PowerLaw, Custom> impl_;
};

/// Step for centered first differences of custom closures.
inline constexpr double kFiniteDifferenceStep = 1e-6;
/// Step for centered second differences (nested first differences at 1e-6
/// lose ~8 digits to cancellation).
inline constexpr double kSecondDifferenceStep = 1e-4;

struct ConditionCheck {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;
  double at_rho = 0.0;
  double at_u = 0.0;
};

/// Outcome of sampling the structural assumptions on V over a box.
struct ModelValidationReport {
  std::vector<ConditionCheck> conditions;  // C2, V>=0, dV/drho<=0, dV/du>=0, V(1,u)=0
  std::size_t samples = 0;
  double u_max = 0.0;

  bool pass() const;
  const ConditionCheck& condition(const std::string& name) const;
};

inline constexpr double kModelTolerance = 1e-12;

/// Samples [0,1] x [0,u_max] on an n x n lattice and records the worst
/// violation of each structural assumption. Never throws on violations.
ModelValidationReport validate_model(const VelocityModel& model, double u_max,
                                     int n_samples);

}  // namespace garz
