#include "rdlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdlab {

namespace {

double signed_power(double u, double e) { return std::copysign(std::pow(std::abs(u), e), u); }

void require_params(std::string_view family, std::span<const double> params, std::size_t n) {
  if (params.size() != n) {
    throw std::invalid_argument(std::string(family) + ": expected " + std::to_string(n) +
                                " parameter(s), got " + std::to_string(params.size()));
  }
  for (double x : params) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(family) + ": non-finite parameter");
  }
}

// min over s >= 0 of a s^p - b s^q for p > q > 0, a, b > 0, returned as a positive offset.
double power_gap(double a, double p, double b, double q) {
  const double s = std::pow(b * q / (a * p), 1.0 / (p - q));
  return b * std::pow(s, q) - a * std::pow(s, p);
}

}  // namespace

Nonlinearity Nonlinearity::builtin(std::string_view family, std::span<const double> params) {
  Nonlinearity nl;
  nl.name_ = std::string(family);
  nl.params_.assign(params.begin(), params.end());

  if (family == "cubic_chafee_infante") {
    require_params(family, params, 1);
    const double lambda = params[0];
    nl.family_ = Family::cubic_chafee_infante;
    nl.linear_ = -lambda;
    // u^4 - lambda u^2 >= u^4/2 - lambda^2/2, minimum at u^2 = lambda.
    nl.constants_ = {4.0, 1.0 + std::abs(lambda), lambda > 0.0 ? 0.5 * lambda * lambda : 0.0, 0.5};
    return nl;
  }
  if (family == "odd_power") {
    require_params(family, params, 2);
    const double p = params[0];
    const double lambda = params[1];
    if (p < 2.0) throw std::invalid_argument("odd_power: growth exponent p must be >= 2");
    nl.family_ = Family::odd_power;
    if (p == 2.0) {
      // f = (1 - lambda) u is dissipative only for lambda < 1.
      if (!(lambda < 1.0)) {
        throw std::invalid_argument("odd_power: p = 2 requires lambda < 1 for dissipativity");
      }
      nl.linear_ = 1.0 - lambda;
      nl.constants_ = {2.0, std::abs(1.0 - lambda), 0.0, 1.0 - lambda};
    } else {
      nl.linear_ = -lambda;
      const double c2 = lambda > 0.0 ? power_gap(0.5, p, lambda, 2.0) : 0.0;
      nl.constants_ = {p, 1.0 + std::abs(lambda), c2, 0.5};
    }
    return nl;
  }
  if (family == "nonlipschitz_root") {
    require_params(family, params, 3);
    const double p = params[0];
    const double theta = params[1];
    const double beta = params[2];
    if (p < 2.0) throw std::invalid_argument("nonlipschitz_root: growth exponent p must be >= 2");
    if (!(theta > 0.0 && theta < 1.0)) {
      throw std::invalid_argument("nonlipschitz_root: theta must lie in (0, 1)");
    }
    if (!(beta > 0.0)) throw std::invalid_argument("nonlipschitz_root: beta must be positive");
    nl.family_ = Family::nonlipschitz_root;
    nl.linear_ = p == 2.0 ? 1.0 : 0.0;
    // |u|^p - beta |u|^{1+theta} >= |u|^p / 2 - C2.
    nl.constants_ = {p, 1.0 + beta, power_gap(0.5, p, beta, 1.0 + theta), 0.5};
    return nl;
  }
  throw std::invalid_argument("unknown nonlinearity family '" + std::string(family) + "'");
}

Nonlinearity Nonlinearity::custom(std::string name, std::function<double(double)> f,
                                  std::function<double(double)> df,
                                  StructuralConstants constants) {
  if (!f) throw std::invalid_argument("Nonlinearity::custom: f is required");
  if (constants.p < 2.0) throw std::invalid_argument("Nonlinearity::custom: p must be >= 2");
  Nonlinearity nl;
  nl.family_ = Family::custom;
  nl.name_ = std::move(name);
  nl.constants_ = constants;
  nl.custom_f_ = std::move(f);
  nl.custom_df_ = std::move(df);
  return nl;
}

double Nonlinearity::operator()(double u) const { return linear_ * u + nonlinear_part(u); }

double Nonlinearity::derivative(double u) const { return linear_ + nonlinear_derivative(u); }

double Nonlinearity::nonlinear_part(double u) const {
  switch (family_) {
    case Family::cubic_chafee_infante:
      return u * u * u;
    case Family::odd_power: {
      const double p = params_[0];
      return p == 2.0 ? 0.0 : signed_power(u, p - 1.0);
    }
    case Family::nonlipschitz_root: {
      const double p = params_[0];
      const double root = -params_[2] * signed_power(u, params_[1]);
      return p == 2.0 ? root : signed_power(u, p - 1.0) + root;
    }
    case Family::custom:
      return custom_f_(u);
  }
  return 0.0;
}

double Nonlinearity::nonlinear_derivative(double u) const {
  switch (family_) {
    case Family::cubic_chafee_infante:
      return 3.0 * u * u;
    case Family::odd_power: {
      const double p = params_[0];
      return p == 2.0 ? 0.0 : (p - 1.0) * std::pow(std::abs(u), p - 2.0);
    }
    case Family::nonlipschitz_root: {
      const double p = params_[0];
      const double theta = params_[1];
      const double root = u == 0.0 ? -kInfinity
                                    : -params_[2] * theta * std::pow(std::abs(u), theta - 1.0);
      return p == 2.0 ? root : (p - 1.0) * std::pow(std::abs(u), p - 2.0) + root;
    }
    case Family::custom: {
      if (custom_df_) return custom_df_(u);
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      return (custom_f_(u + h) - custom_f_(u - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double Nonlinearity::step_stiffness(double R) const {
  R = std::abs(R);
  switch (family_) {
    case Family::cubic_chafee_infante:
      return 3.0 * R * R;
    case Family::odd_power:
    case Family::nonlipschitz_root: {
      const double p = params_[0];
      return p == 2.0 ? 0.0 : (p - 1.0) * std::pow(R, p - 2.0);
    }
    case Family::custom: {
      double worst = 0.0;
      constexpr int kSamples = 257;
      for (int i = 0; i < kSamples; ++i) {
        const double u = -R + 2.0 * R * i / (kSamples - 1);
        worst = std::max(worst, std::abs(nonlinear_derivative(u)));
      }
      return worst;
    }
  }
  return 0.0;
}

std::optional<double> Nonlinearity::two_sided_closed_form(double R) const {
  R = std::abs(R);
  switch (family_) {
    case Family::cubic_chafee_infante: {
      const double lambda = params_[0];
      // f' = 3u^2 - lambda is extremal at u = 0 or |u| = R.
      return std::max(std::abs(lambda), std::abs(3.0 * R * R - lambda));
    }
    case Family::odd_power: {
      const double p = params_[0];
      const double lambda = params_[1];
      if (p == 2.0) return std::abs(1.0 - lambda);
      return std::max(std::abs(lambda), std::abs((p - 1.0) * std::pow(R, p - 2.0) - lambda));
    }
    case Family::nonlipschitz_root:
      return kInfinity;
    case Family::custom:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> Nonlinearity::one_sided_closed_form(double R) const {
  switch (family_) {
    case Family::cubic_chafee_infante:
      return std::max(0.0, params_[0]);
    case Family::odd_power: {
      const double p = params_[0];
      const double lambda = params_[1];
      return p == 2.0 ? std::max(0.0, lambda - 1.0) : std::max(0.0, lambda);
    }
    case Family::nonlipschitz_root:
      return R > 0.0 ? std::optional<double>(kInfinity) : std::optional<double>(0.0);
    case Family::custom:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Forcing::Forcing(Field g, double s_exponent) : g_(std::move(g)), s_(s_exponent) {
  const int d = g_.domain().dim;
  if (!(s_ >= 1.0)) throw std::invalid_argument("Forcing: integrability exponent must be >= 1");
  if (d >= 2 && !(s_ > 0.5 * d)) {
    throw std::invalid_argument("Forcing: integrability exponent must exceed d/2");
  }
  norm_s_ = lp_norm(g_, s_);
  norm_2_ = lp_norm(g_, 2.0);
}

Forcing Forcing::zero(const BoxDomain& domain) { return Forcing(Field::zero(domain), 2.0); }

Forcing Forcing::profile(const BoxDomain& domain, std::string_view name, double amplitude,
                         double s_exponent) {
  if (name == "zero") return Forcing(Field::zero(domain), s_exponent);
  if (name == "constant") {
    return Forcing(Field::from_function(domain, [amplitude](double, double) { return amplitude; }),
                   s_exponent);
  }
  if (name == "mode1") return Forcing(Field::mode(domain, {1, 1}, amplitude), s_exponent);
  throw std::invalid_argument("unknown forcing profile '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

std::vector<double> log_spaced_samples(double range, std::size_t count) {
  if (!(range > 0.0)) throw std::invalid_argument("log_spaced_samples: range must be positive");
  const std::size_t half = std::max<std::size_t>(count / 2, 2);
  const double lo = std::log(range * 1e-9);
  const double hi = std::log(range);
  std::vector<double> out;
  out.reserve(2 * half + 1);
  out.push_back(0.0);
  for (std::size_t i = 0; i < half; ++i) {
    const double x = std::exp(lo + (hi - lo) * static_cast<double>(i) / (half - 1));
    out.push_back(x);
    out.push_back(-x);
  }
  return out;
}

CertificationResult certify_growth(const Nonlinearity& f, double range, std::size_t count) {
  const auto& c = f.constants();
  CertificationResult r;
  r.worst = 0.0;
  for (double u : log_spaced_samples(range, count)) {
    const double ratio = std::abs(f(u)) / (1.0 + std::pow(std::abs(u), c.p - 1.0));
    if (ratio > r.worst) {
      r.worst = ratio;
      r.worst_at = u;
    }
    ++r.samples;
  }
  r.pass = std::isfinite(r.worst) && r.worst <= c.C1 * (1.0 + 1e-12);
  return r;
}

CertificationResult certify_dissipativity(const Nonlinearity& f, double range, std::size_t count) {
  const auto& c = f.constants();
  CertificationResult r;
  r.worst = kInfinity;
  r.pass = true;
  for (double u : log_spaced_samples(range, count)) {
    const double fu_u = f(u) * u;
    const double growth = c.alpha * std::pow(std::abs(u), c.p);
    const double slack = fu_u - growth + c.C2;
    const double tol = 1e-12 * (std::abs(fu_u) + growth + c.C2);
    if (slack < r.worst) {
      r.worst = slack;
      r.worst_at = u;
    }
    if (!(slack >= -tol)) r.pass = false;
    ++r.samples;
  }
  return r;
}

namespace {

// Sup of a pairwise quotient over adjacent, strided and mirrored pairs of a
// uniform grid on [-R, R].
template <typename Quotient>
double sampled_sup(double R, std::size_t count, Quotient q) {
  if (count < 3) count = 3;
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) {
    x[i] = -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  double best = -kInfinity;
  for (std::size_t stride = 1; stride < count; stride *= 2) {
    for (std::size_t i = 0; i + stride < count; ++i) best = std::max(best, q(x[i], x[i + stride]));
  }
  for (double u : x) {
    if (u > 0.0) best = std::max(best, q(u, -u));
  }
  return best;
}

LipschitzEstimate finish(double estimate, double refined, std::optional<double> closed) {
  LipschitzEstimate e;
  e.estimate = estimate;
  e.refined = refined;
  e.closed_form = closed;
  e.diverges = !std::isfinite(refined) || refined > 1.25 * estimate + 1e-12;
  e.pass = !e.diverges;
  if (closed && std::isfinite(*closed)) {
    e.pass = e.pass && estimate <= *closed * (1.0 + 1e-9) + 1e-12;
  }
  return e;
}

}  // namespace

LipschitzEstimate certify_one_sided_lipschitz(const Nonlinearity& f, double R, std::size_t count) {
  if (!(R > 0.0)) throw std::invalid_argument("certify_one_sided_lipschitz: R must be positive");
  auto q = [&f](double u, double v) { return -(f(u) - f(v)) / (u - v); };
  const double a = std::max(0.0, sampled_sup(R, count, q));
  const double b = std::max(0.0, sampled_sup(R, 4 * count, q));
  return finish(a, b, f.one_sided_closed_form(R));
}

LipschitzEstimate certify_two_sided_lipschitz(const Nonlinearity& f, double R, std::size_t count) {
  if (!(R > 0.0)) throw std::invalid_argument("certify_two_sided_lipschitz: R must be positive");
  auto q = [&f](double u, double v) { return std::abs(f(u) - f(v)) / std::abs(u - v); };
  const double a = std::max(0.0, sampled_sup(R, count, q));
  const double b = std::max(0.0, sampled_sup(R, 4 * count, q));
  return finish(a, b, f.two_sided_closed_form(R));
}

}  // namespace rdlab
