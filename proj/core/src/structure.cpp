#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "rdlab/attractor.hpp"
#include "rdlab/random.hpp"

namespace rdlab {

namespace {

// Trajectory states with consecutive L2 gaps of at most gap_max; wide steps
// are re-integrated with a finer step.
std::vector<Field> dense_path(const Trajectory& traj, double gap_max, const Nonlinearity& nonlinearity,
                              const Forcing& forcing, const SimulateOptions& base) {
  std::vector<Field> out;
  if (traj.empty()) return out;
  out.push_back(traj.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double gap = l2_distance(traj.state(k - 1), traj.state(k));
    if (gap > gap_max) {
      SimulateOptions o = base;
      o.t0 = traj.times()[k - 1];
      o.horizon = traj.times()[k] - o.t0;
      o.dt = o.horizon / std::ceil(gap / gap_max);
      o.snapshot_stride = 1;
      o.log_stride = 0;
      o.norm_orders.clear();
      const Trajectory fine = simulate(traj.state(k - 1), nonlinearity, forcing, o);
      for (std::size_t j = 1; j + 1 < fine.size(); ++j) out.push_back(fine.state(j));
    }
    out.push_back(traj.state(k));
  }
  return out;
}

}  // namespace

StructureReport structure_check(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                                const Forcing& forcing, const StructureBudget& budget) {
  if (!(budget.spacing > 0.0)) throw std::invalid_argument("structure_check: spacing must be positive");
  StructureReport rep;
  rep.equilibria = find_equilibria(domain, nonlinearity, forcing, budget.search);
  const auto& eqs = rep.equilibria.equilibria;
  if (eqs.empty()) throw std::runtime_error("structure_check: no equilibria found");

  std::vector<ManifoldSegment> segments;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    if (eqs[i].morse_index < 1) continue;
    auto segs = unstable_manifold_shoot(eqs, i, nonlinearity, forcing, budget.shoot);
    for (auto& s : segs) segments.push_back(std::move(s));
  }
  for (const auto& s : segments) {
    rep.manifold_limit_distance = std::max(rep.manifold_limit_distance, s.limit.distance);
    if (!s.limit.converged) ++rep.undecided;
    if (s.limit.converged && s.limit.nearest != s.origin) {
      rep.connections.push_back({s.origin, s.limit.nearest, s.amplitude});
    }
  }

  // Forward ensemble, mostly from small data so that the snapshots trace the
  // connecting orbits rather than the approach to them.
  const double dt = budget.shoot.simulate.dt;
  SimulateOptions sim = budget.shoot.simulate;
  sim.horizon = budget.forward_horizon;
  sim.snapshot_stride = std::max(1, static_cast<int>(std::lround(budget.window_stride / dt)));
  sim.log_stride = 0;
  CounterRng rng(budget.seed, "structure.forward");
  std::vector<Field> forward_points;
  std::vector<Field> forward_limits;
  const auto small = static_cast<std::size_t>(std::lround(budget.small_fraction * budget.ensemble));
  for (std::size_t i = 0; i < budget.ensemble; ++i) {
    CounterRng member = rng.substream(i);
    const double scale = member.uniform(0.1, 1.0) * (i < small ? budget.small_norm : budget.large_norm);
    const Field u0 = random_field(domain, member, scale);
    const Trajectory traj = simulate(u0, nonlinearity, forcing, sim);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (traj.times()[k] >= budget.window_start - 1e-9) forward_points.push_back(traj.state(k));
    }
    const auto limit = forward_limit_check(traj, eqs, budget.limit_tol);
    rep.forward_limit_distance = std::max(rep.forward_limit_distance, limit.distance);
    if (!limit.converged) ++rep.undecided;
    forward_limits.push_back(traj.back());
  }
  rep.forward_runs = budget.ensemble;
  rep.forward_points = forward_points.size();
  rep.inconclusive = rep.undecided > budget.undecided_quota;

  // Thinned gaps then stay within an eighth of the finest spacing.
  std::vector<std::vector<Field>> paths;
  for (const auto& s : segments) {
    paths.push_back(dense_path(s.trajectory, budget.spacing / 16, nonlinearity, forcing, budget.shoot.simulate));
  }
  std::vector<Field> finest;
  for (double spacing : {budget.spacing, 0.5 * budget.spacing}) {
    std::vector<Field> sample;
    for (const auto& e : eqs) sample.push_back(e.state);
    for (const auto& path : paths) {
      auto thinned = thin_by_spacing(path, spacing);
      sample.insert(sample.end(), thinned.begin(), thinned.end());
    }
    rep.spacings.push_back(spacing);
    rep.sample_sizes.push_back(sample.size());
    rep.mismatch.push_back(directed_hausdorff(forward_points, sample));
    finest = std::move(sample);
  }

  // Forward invariance: sample points pushed forward one time unit stay close
  // to the sample.
  if (budget.invariance_points > 0 && !finest.empty()) {
    SimulateOptions one = budget.shoot.simulate;
    one.horizon = 1.0;
    one.log_stride = 0;
    std::vector<Field> pushed;
    const std::size_t count = std::min(budget.invariance_points, finest.size());
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t idx = i * finest.size() / count;
      pushed.push_back(simulate(finest[idx], nonlinearity, forcing, one).back());
    }
    rep.invariance_mismatch = directed_hausdorff(pushed, finest);
  }

  for (const auto& e : eqs) rep.sample.add(e.state, Provenance::equilibrium);
  const std::size_t n_eq = eqs.size();
  for (std::size_t i = n_eq; i < finest.size(); ++i) rep.sample.add(finest[i], Provenance::manifold_shoot);
  for (auto& u : forward_limits) rep.sample.add(std::move(u), Provenance::forward_limit);
  return rep;
}

nlohmann::json to_json(const StructureReport& report) {
  using nlohmann::json;
  json connections = json::array();
  std::set<std::pair<std::size_t, std::size_t>> distinct;
  for (const auto& c : report.connections) {
    connections.push_back({{"from", c.from}, {"to", c.to}, {"amplitude", c.amplitude}});
    distinct.insert({c.from, c.to});
  }
  json refinement = json::array();
  for (std::size_t i = 0; i < report.spacings.size(); ++i) {
    refinement.push_back({{"spacing", report.spacings[i]},
                          {"sample_size", report.sample_sizes[i]},
                          {"mismatch", report.mismatch[i]}});
  }
  return {{"equilibria", to_json(report.equilibria)},
          {"connections", connections},
          {"distinct_connections", distinct.size()},
          {"forward_runs", report.forward_runs},
          {"forward_points", report.forward_points},
          {"undecided", report.undecided},
          {"inconclusive", report.inconclusive},
          {"forward_limit_distance", report.forward_limit_distance},
          {"manifold_limit_distance", report.manifold_limit_distance},
          {"refinement", refinement},
          {"invariance_mismatch", report.invariance_mismatch},
          {"sample_size", report.sample.size()}};
}

}  // namespace rdlab
