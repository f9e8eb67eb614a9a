#include "rdlab/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdlab/reaction.hpp"

namespace rdlab {

BumpProfile::BumpProfile(double a, double b) : a_(a), b_(b) {
  if (!(b > a)) throw std::invalid_argument("BumpProfile: empty support");
  // int_a^b ((t-a)(b-t))^3 dt = (b-a)^7 / 140
  scale_ = 140.0 / std::pow(b - a, 7);
}

double BumpProfile::value(double t) const {
  if (t <= a_ || t >= b_) return 0.0;
  const double w = (t - a_) * (b_ - t);
  return scale_ * w * w * w;
}

double BumpProfile::derivative(double t) const {
  if (t <= a_ || t >= b_) return 0.0;
  const double w = (t - a_) * (b_ - t);
  return scale_ * 3.0 * w * w * (a_ + b_ - 2.0 * t);
}

namespace {

void require_support(const Trajectory& traj, const BumpProfile& eta, const char* what) {
  if (traj.size() < 3) throw std::invalid_argument(std::string(what) + ": too few snapshots");
  const double slack = 1e-12 * std::max(1.0, std::abs(traj.end_time()));
  if (eta.begin() < traj.start_time() - slack || eta.end() > traj.end_time() + slack) {
    throw std::invalid_argument(std::string(what) + ": test profile support exceeds the trajectory");
  }
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace

double weak_residual(const Trajectory& traj, const Field& v, const BumpProfile& eta,
                     const Nonlinearity& nonlinearity, const Forcing& forcing,
                     const TimeForcing& time_forcing) {
  require_support(traj, eta, "weak_residual");
  const auto& domain = traj.front().domain();
  if (!(v.domain() == domain) || !(forcing.field().domain() == domain)) {
    throw std::invalid_argument("weak_residual: mismatched grids");
  }
  DealiasedReaction reaction(domain, nonlinearity);
  std::vector<double> g_coeffs(domain.size());
  const double weight = domain.mode_weight();
  const double c = nonlinearity.linear_coefficient();
  const double gv_static = l2_inner(forcing.field(), v);

  std::vector<double> integrand(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times()[i];
    const double e = eta.value(t);
    const double de = eta.derivative(t);
    if (e == 0.0 && de == 0.0) {
      integrand[i] = 0.0;
      continue;
    }
    const Field& u = traj.state(i);
    reaction.evaluate(u.coeffs(), g_coeffs);
    double fv = 0.0;
    for (std::size_t k = 0; k < g_coeffs.size(); ++k) fv += g_coeffs[k] * v.coeffs()[k];
    fv = fv * weight + c * l2_inner(u, v);
    double gv = gv_static;
    if (time_forcing) {
      const auto gt = time_forcing(t);
      double extra = 0.0;
      for (std::size_t k = 0; k < gt.size(); ++k) extra += gt[k] * v.coeffs()[k];
      gv += extra * weight;
    }
    integrand[i] = -l2_inner(u, v) * de + (h1_inner(u, v) + fv - gv) * e;
  }
  return trapezoid(traj.times(), integrand);
}

IbpSides ibp_identity_check(const Trajectory& traj, double k, double m, const BumpProfile& eta) {
  require_support(traj, eta, "ibp_identity_check");
  if (!(k > 0.0)) throw std::invalid_argument("ibp_identity_check: level must be positive");
  if (!(m >= 1.0)) throw std::invalid_argument("ibp_identity_check: exponent must be >= 1");
  const auto inside = traj.window(eta.begin(), eta.end());
  if (inside.size() < 5) throw std::invalid_argument("ibp_identity_check: too-sparse snapshots");

  const auto& t = traj.times();
  const std::size_t n = traj.size();
  const auto& domain = traj.front().domain();
  const double h = domain.cell_volume();

  std::vector<double> lhs(n, 0.0), rhs(n, 0.0);
  std::vector<double> ut(domain.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double e = eta.value(t[i]);
    const double de = eta.derivative(t[i]);
    if (e == 0.0 && de == 0.0) continue;

    // Three-point second-order derivative on a possibly non-uniform grid.
    std::size_t a, b, c;
    if (i == 0) {
      a = 0, b = 1, c = 2;
    } else if (i + 1 == n) {
      a = n - 3, b = n - 2, c = n - 1;
    } else {
      a = i - 1, b = i, c = i + 1;
    }
    const double ta = t[a], tb = t[b], tc = t[c], x = t[i];
    const double wa = ((x - tb) + (x - tc)) / ((ta - tb) * (ta - tc));
    const double wb = ((x - ta) + (x - tc)) / ((tb - ta) * (tb - tc));
    const double wc = ((x - ta) + (x - tb)) / ((tc - ta) * (tc - tb));
    const auto ua = traj.state(a).nodal(), ub = traj.state(b).nodal(), uc = traj.state(c).nodal();
    for (std::size_t j = 0; j < ut.size(); ++j) ut[j] = wa * ua[j] + wb * ub[j] + wc * uc[j];

    const auto u = traj.state(i).nodal();
    double pairing = 0.0;
    double phi = 0.0;
    for (std::size_t j = 0; j < ut.size(); ++j) {
      const double up = std::max(u[j], 0.0);
      pairing += ut[j] * std::pow(std::min(up, k), 2.0 * m - 1.0);
      phi += phi_km(up, k, m);
    }
    lhs[i] = pairing * h * e;
    rhs[i] = -phi * h * de;
  }
  return {trapezoid(t, lhs), trapezoid(t, rhs)};
}

DecayConstants decay_constants(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                               const Forcing& forcing) {
  const auto& c = nonlinearity.constants();
  const double lambda1 = domain.eigenvalue(0);
  const double a = lambda1 + (c.p == 2.0 ? c.alpha : 0.0);
  const double g = forcing.norm_l2();
  DecayConstants out;
  if (c.C2 == 0.0) {
    out.alpha = a;
    out.K = g / a;
  } else {
    out.alpha = 0.5 * a;
    out.K = std::sqrt((2.0 * c.C2 * domain.measure() + g * g / a) / a);
  }
  return out;
}

DecayCheck l2_decay_check(const Trajectory& traj, const Nonlinearity& nonlinearity,
                          const Forcing& forcing) {
  const auto& log = traj.norm_log();
  if (log.empty()) throw std::invalid_argument("l2_decay_check: trajectory has no norm log");
  DecayCheck out;
  out.derived = decay_constants(traj.front().domain(), nonlinearity, forcing);
  const double t0 = log.front().time;
  const double y0 = log.front().l2;
  const double alpha = out.derived.alpha;
  const double K = out.derived.K;

  out.worst_excess = -kInfinity;
  for (const auto& r : log) {
    const double bound = y0 * std::exp(-alpha * (r.time - t0)) + K;
    const double excess = r.l2 - bound;
    out.worst_excess = std::max(out.worst_excess, excess);
    if (excess > 1e-12 * std::max(1.0, bound)) ++out.violations;
    out.K_fit = std::max(out.K_fit, r.l2 - y0 * std::exp(-alpha * (r.time - t0)));
  }

  auto holds = [&](double a) {
    for (const auto& r : log) {
      const double bound = y0 * std::exp(-a * (r.time - t0)) + K;
      if (r.l2 > bound + 1e-12 * std::max(1.0, bound)) return false;
    }
    return true;
  };
  if (holds(0.0)) {
    double lo = 0.0, hi = std::max(1.0, 4.0 * alpha);
    while (holds(hi) && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
    out.alpha_fit = lo;
  }
  return out;
}

}  // namespace rdlab
