#include "rdlab/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace rdlab {

Scheme parse_scheme(std::string_view name) {
  if (name == "etd1") return Scheme::etd1;
  if (name == "etd2rk") return Scheme::etd2rk;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected etd1 or etd2rk)");
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::etd1 ? "etd1" : "etd2rk";
}

namespace {

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2 without cancellation.
void phi_functions(double z, double& phi1, double& phi2) {
  if (std::abs(z) < 0.5) {
    double term = 1.0;
    phi1 = 0.0;
    phi2 = 0.0;
    for (int k = 0; k < 30; ++k) {
      phi1 += term / (k + 1);
      phi2 += term / ((k + 1) * (k + 2));
      term *= z / (k + 1);
    }
    return;
  }
  const double em1 = std::expm1(z);
  phi1 = em1 / z;
  phi2 = (em1 - z) / (z * z);
}

}  // namespace

Integrator::Integrator(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                       const Forcing& forcing, double dt, StepOptions options)
    : domain_(domain),
      nl_(nonlinearity),
      reaction_(domain, nonlinearity),
      dt_(dt),
      options_(options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Integrator: dt must be positive");
  if (!(forcing.field().domain() == domain)) {
    throw std::invalid_argument("Integrator: forcing lives on a different grid");
  }
  const std::size_t n = domain.size();
  rates_.resize(n);
  for (std::size_t i = 0; i < n; ++i) rates_[i] = -(domain.eigenvalue(i) + nl_.linear_coefficient());
  forcing_.assign(forcing.field().coeffs().begin(), forcing.field().coeffs().end());
  n0_.resize(n);
  n1_.resize(n);
  stage_.resize(n);
}

const Integrator::Factors& Integrator::factors(int level) {
  while (static_cast<int>(levels_.size()) <= level) {
    const int j = static_cast<int>(levels_.size());
    const double h = std::ldexp(dt_, -j);
    Factors f;
    f.decay.resize(rates_.size());
    f.phi1.resize(rates_.size());
    f.phi2.resize(rates_.size());
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      const double z = rates_[i] * h;
      double p1, p2;
      phi_functions(z, p1, p2);
      f.decay[i] = std::exp(z);
      f.phi1[i] = h * p1;
      f.phi2[i] = h * p2;
    }
    levels_.push_back(std::move(f));
  }
  return levels_[static_cast<std::size_t>(level)];
}

int Integrator::required_level(double peak) const {
  const double stiffness = nl_.step_stiffness(peak);
  if (!(stiffness > 0.0)) return 0;
  if (!std::isfinite(stiffness)) return options_.max_level + 1;
  int level = 0;
  while (level <= options_.max_level && std::ldexp(dt_, -level) * stiffness > options_.stiffness_cap) {
    ++level;
  }
  return level;
}

double Integrator::reaction(std::span<const double> coeffs, double t, std::span<double> out) const {
  const double peak = reaction_.evaluate(coeffs, out);
  if (time_forcing_) {
    const auto g = time_forcing_(t);
    if (g.size() != out.size()) throw std::invalid_argument("Integrator: time forcing size mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = forcing_[i] + g[i] - out[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = forcing_[i] - out[i];
  }
  return peak;
}

void Integrator::advance(std::vector<double>& coeffs, double t) {
  if (coeffs.size() != rates_.size()) throw std::invalid_argument("Integrator::advance: size mismatch");
  const int top = options_.max_level;
  const std::uint64_t full = std::uint64_t{1} << top;
  std::uint64_t offset = 0;
  const std::vector<double> start = coeffs;

  while (offset < full) {
    const double time = t + dt_ * std::ldexp(static_cast<double>(offset), -top);
    const double peak = reaction(coeffs, time, n0_);
    int level = required_level(peak);
    if (level > top) {
      throw BlowUpError("Integrator: reaction too stiff to resolve within max_level",
                        Field::from_coeffs(domain_, start), t);
    }
    // Only step sizes that divide the elapsed offset keep us on the dyadic grid.
    if (offset != 0) level = std::max(level, top - std::countr_zero(offset));
    const auto& f = factors(level);
    const double h = std::ldexp(dt_, -level);

    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      stage_[i] = f.decay[i] * coeffs[i] + f.phi1[i] * n0_[i];
    }
    if (options_.scheme == Scheme::etd2rk) {
      reaction(stage_, time + h, n1_);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = stage_[i] + f.phi2[i] * (n1_[i] - n0_[i]);
      }
    } else {
      coeffs = stage_;
    }
    for (double c : coeffs) {
      if (!std::isfinite(c)) {
        throw BlowUpError("Integrator: non-finite state", Field::from_coeffs(domain_, start), t);
      }
    }
    offset += std::uint64_t{1} << (top - level);
    ++substeps_;
  }
}

Field step(const Field& u, double dt, const Nonlinearity& nonlinearity, const Forcing& forcing,
           Scheme scheme) {
  StepOptions opts;
  opts.scheme = scheme;
  Integrator integrator(u.domain(), nonlinearity, forcing, dt, opts);
  std::vector<double> c(u.coeffs().begin(), u.coeffs().end());
  integrator.advance(c, 0.0);
  return Field::from_coeffs(u.domain(), std::move(c));
}

std::int64_t step_count(double horizon, double dt) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  const double ratio = horizon / dt;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("simulate: horizon must be an integer multiple of dt");
  }
  return n;
}

Trajectory simulate(const Field& u0, const Nonlinearity& nonlinearity, const Forcing& forcing,
                    const SimulateOptions& options, TimeForcing time_forcing) {
  const auto steps = step_count(options.horizon, options.dt);
  if (options.snapshot_stride < 1) throw std::invalid_argument("simulate: snapshot_stride must be >= 1");
  if (options.log_stride < 0) throw std::invalid_argument("simulate: log_stride must be >= 0");

  Integrator integrator(u0.domain(), nonlinearity, forcing, options.dt, options.step);
  if (time_forcing) integrator.set_time_forcing(std::move(time_forcing));

  Trajectory traj(options.norm_orders);
  traj.meta.scheme = std::string(scheme_name(options.step.scheme));
  traj.meta.dt = options.dt;
  traj.meta.nonlinearity = nonlinearity.name();
  traj.meta.params = nonlinearity.params();
  traj.meta.forcing = forcing.is_zero() ? "zero" : "field";
  traj.meta.seed = options.seed;

  traj.append(options.t0, u0);
  if (options.log_stride > 0) traj.log(NormRecord::measure(options.t0, u0, options.norm_orders));

  std::vector<double> c(u0.coeffs().begin(), u0.coeffs().end());
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t_prev = options.t0 + static_cast<double>(i - 1) * options.dt;
    const double t = options.t0 + static_cast<double>(i) * options.dt;
    try {
      integrator.advance(c, t_prev);
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.what(), e.last_finite_state(), t_prev);
    }
    const bool snap = i % options.snapshot_stride == 0 || i == steps;
    const bool log = options.log_stride > 0 && (i % options.log_stride == 0 || i == steps);
    if (!snap && !log) continue;
    Field u = Field::from_coeffs(u0.domain(), c);
    if (log) traj.log(NormRecord::measure(t, u, options.norm_orders));
    if (snap) traj.append(t, std::move(u));
  }
  return traj;
}

}  // namespace rdlab
