#include "rdlab/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rdlab {

double rung_ratio(int dim) {
  if (dim < 1) throw std::invalid_argument("rung_ratio: dimension must be >= 1");
  if (dim <= 3) return 2.0;
  return static_cast<double>(dim) / static_cast<double>(dim - 2);
}

LadderSchedule LadderSchedule::make(int dim, double delta, double D_exp, double m0,
                                    double m_max) {
  LadderSchedule s;
  s.A = rung_ratio(dim);
  s.m0 = m0;
  s.m_max = m_max;
  s.delta = delta;
  s.D_exp = D_exp;
  for (double m = m0; m * s.A <= m_max * (1.0 + 1e-12); m *= s.A) s.rungs.push_back(m);
  s.validate();
  return s;
}

LadderSchedule LadderSchedule::for_total_wait(int dim, double tau, double D_exp, double m0,
                                              double m_max) {
  const double A = rung_ratio(dim);
  const double AD = std::pow(A, D_exp);
  const double delta = tau * std::pow(m0, D_exp) * (AD - 1.0) / AD;
  return make(dim, delta, D_exp, m0, m_max);
}

void LadderSchedule::validate() const {
  if (!(A > 1.0)) throw std::invalid_argument("LadderSchedule: A must exceed 1");
  if (!(delta > 0.0)) throw std::invalid_argument("LadderSchedule: delta must be positive");
  if (!(D_exp > 0.0)) throw std::invalid_argument("LadderSchedule: D_exp must be positive");
  if (!(m0 >= 1.0)) throw std::invalid_argument("LadderSchedule: m0 must be >= 1");
  if (rungs.empty()) throw std::invalid_argument("LadderSchedule: no rungs below m_max");
  for (std::size_t j = 1; j < rungs.size(); ++j) {
    if (!(rungs[j] > rungs[j - 1])) throw std::invalid_argument("LadderSchedule: rungs not increasing");
  }
}

double LadderSchedule::wait(std::size_t j) const { return delta / std::pow(rungs.at(j), D_exp); }

double LadderSchedule::total_wait() const {
  double s = 0.0;
  for (std::size_t j = 0; j < rungs.size(); ++j) s += wait(j);
  return s;
}

double LadderSchedule::wait_bound() const {
  const double AD = std::pow(A, D_exp);
  return delta * AD / (std::pow(m0, D_exp) * (AD - 1.0));
}

namespace {

double positive_norm(const Field& u, double m) {
  std::vector<double> up(u.nodal().begin(), u.nodal().end());
  for (double& x : up) x = std::max(x, 0.0);
  return lp_norm(up, u.domain(), m);
}

void require_cover(const Trajectory& traj, double a, double b, const char* what) {
  if (traj.empty()) throw std::invalid_argument(std::string(what) + ": empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::abs(b));
  if (a < traj.start_time() - slack || b > traj.end_time() + slack) {
    throw std::invalid_argument(std::string(what) + ": window not covered by snapshots");
  }
}

Field sample(const Trajectory& traj, double t) {
  return traj.at(std::clamp(t, traj.start_time(), traj.end_time()));
}

}  // namespace

RungRecord rung_check(const Trajectory& traj, double t1, double tau, double m, double A,
                      std::span<const double> k_grid, double floor, double D_exp) {
  if (!(m >= 2.0)) throw std::invalid_argument("rung_check: m must be >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("rung_check: tau must be positive");
  require_cover(traj, t1, t1 + tau, "rung_check");

  RungRecord r;
  r.m = m;
  r.target = A * m;
  r.t_start = t1;
  r.tau = tau;

  const Field u1 = sample(traj, t1);
  const Field u2 = sample(traj, t1 + tau);
  r.window_sup = std::max(positive_norm(u1, m), positive_norm(u2, m));
  for (std::size_t i : traj.window(t1, t1 + tau)) {
    r.window_sup = std::max(r.window_sup, positive_norm(traj.state(i), m));
  }
  r.lhs = positive_norm(u2, A * m);
  r.quotient = std::max(r.lhs, floor) / std::max(r.window_sup, floor);
  r.implied_D_delta = std::pow(r.quotient, m) / std::pow(m, D_exp);

  std::vector<double> ks(k_grid.begin(), k_grid.end());
  if (ks.empty()) {
    const double peak = positive_norm(u2, kInfinity);
    const double base = peak > 0.0 ? peak : 1.0;
    ks = {0.5 * base, base, 2.0 * base, 4.0 * base};
  }
  std::sort(ks.begin(), ks.end());

  const Field p1 = positive_part(u1);
  const double h = u2.domain().cell_volume();
  const double D = floor;
  const double tail = std::pow(D, m) + D * std::pow(m, D) * std::pow(r.window_sup, 2.0 * m);
  for (double k : ks) {
    TruncationRow row;
    row.k = k;
    for (double x : u2.nodal()) row.lhs += std::pow(std::clamp(x, 0.0, k), 2.0 * m);
    row.lhs *= h;
    row.phi_term = 2.0 * m * big_phi(p1, k, m);
    row.rhs_tail = tail;
    if (!r.truncation.empty()) {
      const auto& prev = r.truncation.back();
      const double tol = 1e-12;
      if (row.lhs < prev.lhs * (1.0 - tol) || row.phi_term < prev.phi_term * (1.0 - tol)) {
        r.monotone_in_k = false;
      }
      if (row.rhs_tail != prev.rhs_tail) r.k_independent = false;
    }
    r.truncation.push_back(row);
  }
  return r;
}

double telescoped_bound(double D_delta, double m, double A, double D_exp) {
  const double s = A / (A - 1.0);
  return std::pow(D_delta, s / m) * std::pow(m, (D_exp / m) * s) *
         std::pow(A, (D_exp / m) * s / (A - 1.0));
}

LadderReport run_ladder(const Trajectory& traj, double t1, const LadderSchedule& schedule,
                        double floor) {
  schedule.validate();
  require_cover(traj, t1, t1 + schedule.total_wait(), "run_ladder");
  LadderReport rep;
  rep.schedule = schedule;
  rep.t1 = t1;
  rep.floor = floor;

  double t = t1;
  double elapsed = 0.0;
  rep.fitted_D_delta = 1.0;
  for (std::size_t j = 0; j < schedule.rungs.size(); ++j) {
    const double tau = schedule.wait(j);
    RungRecord r = rung_check(traj, t, tau, schedule.rungs[j], schedule.A, {}, floor,
                              schedule.D_exp);
    elapsed += tau;
    r.t_cumulative = elapsed;
    rep.product *= r.quotient;
    rep.fitted_D_delta = std::max(rep.fitted_D_delta, r.implied_D_delta);
    rep.rungs.push_back(std::move(r));
    t += tau;
  }
  rep.product_bound =
      telescoped_bound(rep.fitted_D_delta, schedule.m0, schedule.A, schedule.D_exp);

  const Field terminal = sample(traj, t);
  rep.terminal_linf = lp_norm(terminal, kInfinity);
  rep.terminal_lmax = lp_norm(terminal, schedule.m_max);
  double sup2 = 0.0;
  for (std::size_t i : traj.window(t1, traj.end_time())) {
    sup2 = std::max(sup2, lp_norm(traj.state(i), 2.0));
  }
  sup2 = std::max(sup2, lp_norm(sample(traj, t1), 2.0));
  rep.terminal_D = rep.terminal_linf / (sup2 + 1.0);
  return rep;
}

nlohmann::json to_json(const LadderReport& report) {
  using nlohmann::json;
  const auto& s = report.schedule;
  json rungs = json::array();
  for (const auto& r : report.rungs) {
    json trunc = json::array();
    for (const auto& row : r.truncation) {
      trunc.push_back({{"k", row.k}, {"lhs", row.lhs}, {"phi_term", row.phi_term},
                       {"rhs_tail", row.rhs_tail}});
    }
    rungs.push_back({{"m", r.m},
                     {"target", r.target},
                     {"t_start", r.t_start},
                     {"tau", r.tau},
                     {"t_cumulative", r.t_cumulative},
                     {"window_sup", r.window_sup},
                     {"lhs", r.lhs},
                     {"quotient", r.quotient},
                     {"implied_D_delta", r.implied_D_delta},
                     {"monotone_in_k", r.monotone_in_k},
                     {"k_independent", r.k_independent},
                     {"truncation", trunc}});
  }
  json violations = json::array();
  for (const auto& r : report.rungs) {
    if (!r.monotone_in_k) violations.push_back({{"m", r.m}, {"kind", "truncation not monotone"}});
    if (!r.k_independent) violations.push_back({{"m", r.m}, {"kind", "right side depends on k"}});
  }
  if (report.product > report.product_bound * (1.0 + 1e-12)) {
    violations.push_back({{"kind", "product exceeds telescoped bound"}});
  }
  return {{"schedule",
           {{"A", s.A},
            {"m0", s.m0},
            {"m_max", s.m_max},
            {"delta", s.delta},
            {"D_exp", s.D_exp},
            {"rungs", s.rungs},
            {"total_wait", s.total_wait()},
            {"wait_bound", s.wait_bound()}}},
          {"t1", report.t1},
          {"floor", report.floor},
          {"rungs", rungs},
          {"fitted",
           {{"D_delta", report.fitted_D_delta},
            {"product", report.product},
            {"product_bound", report.product_bound},
            {"terminal_linf", report.terminal_linf},
            {"terminal_lmax", report.terminal_lmax},
            {"terminal_D", report.terminal_D}}},
          {"violations", violations}};
}

LinfBoundCheck linf_bound_check(std::span<const Trajectory> ensemble, double t1, double tau,
                                double reference) {
  LinfBoundCheck out;
  struct Member {
    double u0 = 0.0;
    double quotient = 0.0;
  };
  std::vector<Member> members;
  members.reserve(ensemble.size());
  for (const auto& traj : ensemble) {
    const auto& log = traj.norm_log();
    if (log.empty()) throw std::invalid_argument("linf_bound_check: trajectory has no norm log");
    double sup2 = 0.0;
    for (const auto& r : log) {
      if (r.time >= t1) sup2 = std::max(sup2, r.l2);
    }
    Member mb;
    mb.u0 = log.front().l2;
    for (const auto& r : log) {
      if (r.time < t1 + tau) continue;
      const double q = r.linf / (sup2 + 1.0);
      ++out.samples;
      if (!std::isfinite(q) || q > reference * (1.0 + 1e-12)) ++out.violations;
      if (std::isfinite(q)) mb.quotient = std::max(mb.quotient, q);
    }
    members.push_back(mb);
  }
  if (members.empty()) return out;

  auto fit = [](auto first, auto last) {
    double d = 0.0;
    for (auto it = first; it != last; ++it) d = std::max(d, it->quotient);
    return d;
  };
  out.D_hat = fit(members.begin(), members.end());
  const std::size_t half = (members.size() + 1) / 2;
  out.D_prefix = fit(members.begin(), members.begin() + half);

  std::vector<Member> sorted = members;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Member& a, const Member& b) { return a.u0 < b.u0; });
  const std::size_t lower = sorted.size() / 2;
  out.D_small = fit(sorted.begin(), sorted.begin() + lower);
  out.D_large = fit(sorted.begin() + lower, sorted.end());
  const double hi = std::max(out.D_small, out.D_large);
  const double lo = std::min(out.D_small, out.D_large);
  out.split_ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? kInfinity : 1.0);
  return out;
}

double attractor_linf_radius(std::span<const Field> sample) {
  if (sample.empty()) throw std::invalid_argument("attractor_linf_radius: empty sample");
  double r = 0.0;
  for (const auto& u : sample) r = std::max(r, lp_norm(u, kInfinity));
  return r;
}

}  // namespace rdlab
