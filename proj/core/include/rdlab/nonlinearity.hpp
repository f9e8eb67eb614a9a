#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdlab/fields.hpp"

namespace rdlab {

/// Constants of the growth and dissipativity hypotheses
///   |f(u)| <= C1 (1 + |u|^{p-1}),   f(u) u >= alpha |u|^p - C2.
struct StructuralConstants {
  double p = 2.0;
  double C1 = 1.0;
  double C2 = 0.0;
  double alpha = 1.0;
};

enum class Family { cubic_chafee_infante, odd_power, nonlipschitz_root, custom };

/// Reaction term f together with its structural constants.
///
/// f is split as f(u) = c u + g(u) where c = linear_coefficient(); the solver
/// integrates the linear piece exactly alongside the Laplacian.
class Nonlinearity {
 public:
  /// Registered families:
  ///   cubic_chafee_infante [lambda]          f = u^3 - lambda u
  ///   odd_power            [p, lambda]       f = |u|^{p-2} u - lambda u
  ///   nonlipschitz_root    [p, theta, beta]  f = |u|^{p-2} u - beta sign(u) |u|^theta
  static Nonlinearity builtin(std::string_view family, std::span<const double> params);

  static Nonlinearity custom(std::string name, std::function<double(double)> f,
                             std::function<double(double)> df, StructuralConstants constants);

  double operator()(double u) const;
  /// f'(u); +-inf where f is not differentiable with finite slope.
  double derivative(double u) const;

  double linear_coefficient() const { return linear_; }
  double nonlinear_part(double u) const;
  double nonlinear_derivative(double u) const;

  /// Bound on |g'| over [-R, R] used to cap the explicit reaction step. For
  /// the non-Lipschitz family only the Lipschitz part enters.
  double step_stiffness(double R) const;

  /// max |f'| on [-R, R] when available in closed form (nullopt otherwise,
  /// +inf for families that are not locally Lipschitz).
  std::optional<double> two_sided_closed_form(double R) const;
  /// max(0, -min f') on [-R, R], same conventions.
  std::optional<double> one_sided_closed_form(double R) const;

  const StructuralConstants& constants() const { return constants_; }
  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  bool differentiable() const { return family_ != Family::nonlipschitz_root; }

 private:
  Family family_ = Family::custom;
  std::string name_;
  std::vector<double> params_;
  StructuralConstants constants_;
  double linear_ = 0.0;
  std::function<double(double)> custom_f_;
  std::function<double(double)> custom_df_;
};

/// Forcing g held as a field plus its integrability tag s.
class Forcing {
 public:
  Forcing() = default;
  /// Throws if s <= d/2 for d >= 2.
  Forcing(Field g, double s_exponent);

  static Forcing zero(const BoxDomain& domain);
  /// Profiles: "zero", "constant" (g = amplitude), "mode1" (amplitude * first eigenmode).
  static Forcing profile(const BoxDomain& domain, std::string_view name, double amplitude,
                         double s_exponent = 2.0);

  const Field& field() const { return g_; }
  double s_exponent() const { return s_; }
  double norm_s() const { return norm_s_; }
  double norm_l2() const { return norm_2_; }
  bool is_zero() const { return norm_2_ == 0.0; }

 private:
  Field g_;
  double s_ = 2.0;
  double norm_s_ = 0.0;
  double norm_2_ = 0.0;
};

struct CertificationResult {
  bool pass = false;
  /// Growth: max |f(u)| / (1 + |u|^{p-1}). Dissipativity: min f(u)u - alpha|u|^p + C2.
  double worst = 0.0;
  double worst_at = 0.0;
  std::size_t samples = 0;
};

/// Symmetric log-spaced samples over [-range, range] including 0.
std::vector<double> log_spaced_samples(double range, std::size_t count);

CertificationResult certify_growth(const Nonlinearity& f, double range = 1e3,
                                   std::size_t count = 10000);
CertificationResult certify_dissipativity(const Nonlinearity& f, double range = 1e3,
                                          std::size_t count = 10000);

struct LipschitzEstimate {
  double estimate = 0.0;   ///< sampled constant at `count` points
  double refined = 0.0;    ///< sampled constant at 4x `count` points
  bool diverges = false;   ///< refinement grows the estimate (no finite constant)
  std::optional<double> closed_form;
  bool pass = false;
};

LipschitzEstimate certify_one_sided_lipschitz(const Nonlinearity& f, double R,
                                              std::size_t count = 10000);
LipschitzEstimate certify_two_sided_lipschitz(const Nonlinearity& f, double R,
                                              std::size_t count = 10000);

}  // namespace rdlab
