#include "rdlab/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "rdlab/random.hpp"
#include "rdlab/reaction.hpp"
#include "rdlab/verifiers.hpp"

namespace rdlab {

namespace {

double coeff_norm(std::span<const double> a, const BoxDomain& domain) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s * domain.mode_weight());
}

void residual_coeffs(const DealiasedReaction& reaction, std::span<const double> a,
                     std::span<const double> g, std::span<double> r) {
  const auto& domain = reaction.domain();
  const double c = reaction.nonlinearity().linear_coefficient();
  reaction.evaluate(a, r);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += (domain.eigenvalue(k) + c) * a[k] - g[k];
}

Eigen::MatrixXd jacobian(DealiasedReaction& reaction, std::span<const double> a) {
  const auto& domain = reaction.domain();
  const std::size_t n = a.size();
  const double c = reaction.nonlinearity().linear_coefficient();
  reaction.linearize_at(a);
  Eigen::MatrixXd J(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    reaction.apply_linearization(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) J(i, j) = col[i];
    J(j, j) += domain.eigenvalue(j) + c;
  }
  return J;
}

Field normalized_vector(const BoxDomain& domain, const Eigen::VectorXd& v) {
  std::vector<double> c(v.data(), v.data() + v.size());
  std::size_t big = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (std::abs(c[i]) > std::abs(c[big]) * (1.0 + 1e-9)) big = i;
  }
  const double scale = (c[big] < 0.0 ? -1.0 : 1.0) / coeff_norm(c, domain);
  for (double& x : c) x *= scale;
  return Field::from_coeffs(domain, std::move(c));
}

}  // namespace

Field equilibrium_residual(const Field& z, const Nonlinearity& nonlinearity,
                           const Forcing& forcing) {
  DealiasedReaction reaction(z.domain(), nonlinearity);
  std::vector<double> r(z.size());
  residual_coeffs(reaction, z.coeffs(), forcing.field().coeffs(), r);
  return Field::from_coeffs(z.domain(), std::move(r));
}

LinearSpectrum linearized_spectrum(const Field& z, const Nonlinearity& nonlinearity,
                                   std::size_t count) {
  const auto& domain = z.domain();
  DealiasedReaction reaction(domain, nonlinearity);
  const Eigen::MatrixXd J = jacobian(reaction, z.coeffs());
  if (!J.allFinite()) throw std::runtime_error("linearized_spectrum: non-finite linearization");
  const Eigen::MatrixXd S = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("linearized_spectrum: eigensolver did not converge");
  }
  LinearSpectrum out;
  const auto& values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) ++out.morse_index;
  }
  const std::size_t take = std::min<std::size_t>(count, static_cast<std::size_t>(values.size()));
  for (std::size_t i = 0; i < take; ++i) {
    out.values.push_back(values[static_cast<Eigen::Index>(i)]);
    out.vectors.push_back(normalized_vector(domain, solver.eigenvectors().col(static_cast<Eigen::Index>(i))));
  }
  return out;
}

NewtonResult newton_solve(const Field& guess, const Nonlinearity& nonlinearity,
                          const Forcing& forcing, const NewtonOptions& options) {
  const auto& domain = guess.domain();
  DealiasedReaction reaction(domain, nonlinearity);
  const auto g = forcing.field().coeffs();
  const std::size_t n = guess.size();
  std::vector<double> a(guess.coeffs().begin(), guess.coeffs().end());
  std::vector<double> r(n), trial(n), rt(n);
  residual_coeffs(reaction, a, g, r);
  double norm = coeff_norm(r, domain);

  NewtonResult out;
  for (int it = 0; it < options.max_iterations && std::isfinite(norm); ++it) {
    if (norm <= options.tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd J = jacobian(reaction, a);
    if (!J.allFinite()) break;
    const Eigen::VectorXd step =
        J.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(n)));
    if (!step.allFinite()) break;
    double damping = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = a[k] - damping * step[static_cast<Eigen::Index>(k)];
      residual_coeffs(reaction, trial, g, rt);
      const double tn = coeff_norm(rt, domain);
      if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * damping) * norm) {
        a.swap(trial);
        r.swap(rt);
        norm = tn;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      // Stagnation at roundoff level still counts if the tolerance is met.
      break;
    }
  }
  out.converged = std::isfinite(norm) && norm <= options.tolerance;
  out.residual = norm;
  out.state = Field::from_coeffs(domain, std::move(a));
  return out;
}

EquilibriumSet find_equilibria(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                               const Forcing& forcing, const EquilibriumSearch& search) {
  if (search.seed_count < 1) throw std::invalid_argument("find_equilibria: seed_count must be >= 1");
  domain.validate();
  double amp_max = search.amplitude_max;
  if (!(amp_max > 0.0)) {
    amp_max = decay_constants(domain, nonlinearity, forcing).K / std::sqrt(domain.mode_weight());
    if (!(amp_max > 0.0)) amp_max = 1.0;
  }

  std::vector<Field> seeds;
  seeds.push_back(Field::zero(domain));
  const int jmax = search.max_mode;
  for (int j1 = 1; j1 <= jmax; ++j1) {
    for (int j2 = 1; j2 <= (domain.dim == 2 ? jmax : 1); ++j2) {
      for (int i = 1; i <= search.seed_count; ++i) {
        const double a = amp_max * i / search.seed_count;
        seeds.push_back(Field::mode(domain, {j1, j2}, a));
        seeds.push_back(Field::mode(domain, {j1, j2}, -a));
      }
    }
  }

  EquilibriumSet out;
  out.seeds = seeds.size();
  std::vector<Field> found;
  std::vector<double> residuals;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const NewtonResult res = newton_solve(seeds[s], nonlinearity, forcing, search.newton);
    if (!res.converged) {
      ++out.diverged;
      std::ostringstream line;
      line << "seed " << s << ": newton stopped after " << res.iterations
           << " iterations, residual " << res.residual;
      out.log.push_back(line.str());
      continue;
    }
    bool duplicate = false;
    for (const auto& f : found) {
      if (l2_distance(f, res.state) <= search.dedup_distance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      found.push_back(res.state);
      residuals.push_back(res.residual);
    }
  }

  std::vector<std::size_t> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto before = [&](std::size_t x, std::size_t y) {
    const double nx = lp_norm(found[x], 2.0), ny = lp_norm(found[y], 2.0);
    if (std::abs(nx - ny) > 1e-8 * std::max(1.0, nx)) return nx < ny;
    const auto cx = found[x].coeffs(), cy = found[y].coeffs();
    for (std::size_t k = 0; k < cx.size(); ++k) {
      if (std::abs(cx[k] - cy[k]) > 1e-8) return cx[k] > cy[k];
    }
    return false;
  };
  std::sort(order.begin(), order.end(), before);

  for (std::size_t i : order) {
    Equilibrium e;
    e.state = found[i];
    e.residual = residuals[i];
    const LinearSpectrum spec = linearized_spectrum(e.state, nonlinearity, search.spectrum_count);
    e.spectrum = spec.values;
    e.eigenvectors = spec.vectors;
    e.morse_index = spec.morse_index;
    out.equilibria.push_back(std::move(e));
  }
  return out;
}

LimitClassification forward_limit_check(const Trajectory& traj,
                                        std::span<const Equilibrium> equilibria, double tol) {
  LimitClassification out;
  if (traj.empty() || equilibria.empty()) return out;
  const Field& last = traj.back();
  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    const double d = l2_distance(last, equilibria[i].state);
    if (d < out.distance) {
      out.distance = d;
      out.nearest = i;
    }
  }
  if (traj.size() >= 2) {
    const std::size_t n = traj.size();
    out.terminal_speed = l2_distance(traj.state(n - 1), traj.state(n - 2)) /
                         (traj.times()[n - 1] - traj.times()[n - 2]);
  }
  out.converged = out.distance <= tol;

  const Field& z = equilibria[out.nearest].state;
  out.monotone_after = traj.start_time();
  double prev = l2_distance(traj.state(0), z);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = l2_distance(traj.state(i), z);
    if (d > prev * (1.0 + 1e-12) + 1e-14) out.monotone_after = traj.times()[i];
    prev = d;
  }
  return out;
}

std::vector<ManifoldSegment> unstable_manifold_shoot(std::span<const Equilibrium> equilibria,
                                                     std::size_t origin,
                                                     const Nonlinearity& nonlinearity,
                                                     const Forcing& forcing,
                                                     const ShootOptions& options) {
  const Equilibrium& z = equilibria[origin];
  std::vector<ManifoldSegment> out;
  const auto dirs = std::min<std::size_t>(static_cast<std::size_t>(z.morse_index), z.eigenvectors.size());
  SimulateOptions sim = options.simulate;
  sim.horizon = options.horizon;
  for (std::size_t d = 0; d < dirs; ++d) {
    for (double a : options.amplitudes) {
      for (double sign : {1.0, -1.0}) {
        ManifoldSegment seg;
        seg.origin = origin;
        seg.direction = d;
        seg.amplitude = sign * a;
        seg.trajectory = simulate(z.state + z.eigenvectors[d] * seg.amplitude, nonlinearity,
                                  forcing, sim);
        seg.limit = forward_limit_check(seg.trajectory, equilibria, options.limit_tol);
        out.push_back(std::move(seg));
      }
    }
  }
  return out;
}

double exit_time(const Trajectory& traj, const Field& z, double radius) {
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (l2_distance(traj.state(i), z) >= radius) return traj.times()[i];
  }
  return kInfinity;
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::forward_limit: return "forward-limit";
    case Provenance::manifold_shoot: return "manifold-shoot";
    case Provenance::equilibrium: return "equilibrium";
  }
  return "unknown";
}

void AttractorSample::add(Field point, Provenance p) {
  points.push_back(std::move(point));
  provenance.push_back(p);
}

std::vector<Field> thin_by_spacing(std::span<const Field> path, double spacing) {
  std::vector<Field> out;
  for (const auto& u : path) {
    if (out.empty() || l2_distance(out.back(), u) >= spacing) out.push_back(u);
  }
  return out;
}

double directed_hausdorff(std::span<const Field> query, std::span<const Field> reference) {
  if (reference.empty()) return query.empty() ? 0.0 : kInfinity;
  double worst = 0.0;
  for (const auto& q : query) {
    double best = kInfinity;
    const auto qc = q.coeffs();
    for (const auto& r : reference) {
      const auto rc = r.coeffs();
      double s = 0.0;
      for (std::size_t k = 0; k < qc.size() && s < best; ++k) {
        const double d = qc[k] - rc[k];
        s += d * d;
      }
      best = std::min(best, s);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst * query.front().domain().mode_weight());
}

LipschitzCheck attractor_lipschitz_check(std::span<const std::pair<Field, Field>> pairs,
                                         std::span<const double> t_grid, double L,
                                         const Nonlinearity& nonlinearity,
                                         const Forcing& forcing, double dt) {
  LipschitzCheck out;
  if (t_grid.empty()) return out;
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  SimulateOptions sim;
  sim.dt = dt;
  sim.horizon = horizon;
  sim.log_stride = 0;
  for (const auto& [u0, v0] : pairs) {
    ++out.pairs;
    const double d0 = l2_distance(u0, v0);
    const Trajectory tu = simulate(u0, nonlinearity, forcing, sim);
    const Trajectory tv = simulate(v0, nonlinearity, forcing, sim);
    bool bad = false;
    for (double t : t_grid) {
      const double d = l2_distance(tu.at(t), tv.at(t));
      const double env = d0 * std::exp(L * t);
      if (env > 0.0) out.worst_ratio = std::max(out.worst_ratio, d / env);
      if (d > env * (1.0 + 1e-3)) bad = true;
    }
    if (bad) ++out.violations;
  }
  return out;
}

BranchingReport branching_probe(const Field& u0, const Nonlinearity& nonlinearity,
                                const Forcing& forcing, const BranchingOptions& options) {
  if (options.ensemble < 2) throw std::invalid_argument("branching_probe: ensemble must be >= 2");
  const auto& domain = u0.domain();
  Field base = u0;
  if (options.restart_time > 0.0) {
    SimulateOptions pre;
    pre.dt = options.dt;
    pre.horizon = options.restart_time;
    pre.log_stride = 0;
    base = simulate(u0, nonlinearity, forcing, pre).back();
  }
  SimulateOptions sim;
  sim.dt = options.dt;
  sim.horizon = options.horizon;
  sim.log_stride = 0;

  BranchingReport rep;
  std::vector<std::vector<double>> divergence;  // per scale, per snapshot
  std::vector<double> times;
  for (std::size_t s = 0; s < options.scales.size(); ++s) {
    const double scale = options.scales[s];
    CounterRng rng(options.seed, "branching");
    std::vector<Trajectory> runs;
    for (std::size_t i = 0; i < options.ensemble; ++i) {
      CounterRng member = rng.substream(i);
      const Field xi = random_field(domain, member, 1.0);
      runs.push_back(simulate(base + xi * scale, nonlinearity, forcing, sim));
    }
    times = runs.front().times();
    std::vector<double> D(times.size(), 0.0);
    for (std::size_t a = 0; a < runs.size(); ++a) {
      for (std::size_t b = a + 1; b < runs.size(); ++b) {
        for (std::size_t k = 0; k < times.size(); ++k) {
          D[k] = std::max(D[k], l2_distance(runs[a].state(k), runs[b].state(k)));
        }
      }
    }
    BranchingScale row;
    row.scale = scale;
    row.initial = D.front();
    row.divergence = *std::max_element(D.begin(), D.end());
    if (row.initial > 0.0) {
      row.implied_L = -kInfinity;
      for (std::size_t k = 1; k < times.size(); ++k) {
        const double dt = times[k] - times.front();
        row.implied_L = std::max(row.implied_L, std::log(D[k] / row.initial) / dt);
      }
    }
    rep.scales.push_back(row);
    divergence.push_back(std::move(D));
  }

  rep.L_used = options.L;
  if (rep.L_used == 0.0 && !rep.scales.empty()) {
    double largest = -1.0;
    for (const auto& r : rep.scales) {
      if (r.scale > largest) {
        largest = r.scale;
        rep.L_used = std::max(0.0, r.implied_L);
      }
    }
  }
  for (std::size_t s = 0; s < rep.scales.size(); ++s) {
    auto& row = rep.scales[s];
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double env = row.initial * std::exp(rep.L_used * (times[k] - times.front()));
      if (divergence[s][k] > env * (1.0 + 1e-3)) row.envelope_ok = false;
    }
  }

  std::vector<std::size_t> order(rep.scales.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rep.scales[a].scale > rep.scales[b].scale; });
  bool fails = order.size() >= 2;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = rep.scales[order[i - 1]];
    const auto& cur = rep.scales[order[i]];
    if (!(cur.scale > 0.0) || !(cur.implied_L > prev.implied_L) || cur.envelope_ok) fails = false;
  }
  rep.envelope_fails_as_scale_shrinks = fails;
  return rep;
}

nlohmann::json to_json(const EquilibriumSet& set) {
  using nlohmann::json;
  json eqs = json::array();
  for (std::size_t i = 0; i < set.equilibria.size(); ++i) {
    const auto& e = set.equilibria[i];
    eqs.push_back({{"index", i},
                   {"residual", e.residual},
                   {"l2", lp_norm(e.state, 2.0)},
                   {"linf", lp_norm(e.state, kInfinity)},
                   {"spectrum", e.spectrum},
                   {"morse_index", e.morse_index},
                   {"provenance", provenance_name(Provenance::equilibrium)}});
  }
  return {{"seeds", set.seeds}, {"diverged", set.diverged}, {"equilibria", eqs},
          {"newton_log", set.log}};
}

}  // namespace rdlab
