#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rdlab/dimension.hpp"
#include "rdlab/ladder.hpp"
#include "rdlab/random.hpp"
#include "rdlab/verifiers.hpp"

namespace rdlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json header(const std::string& command, const Config& cfg) {
  json config = json::object();
  for (const auto& [k, v] : cfg.values()) config[k] = v;
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", config}};
}

json norms_json(const Field& u) {
  return {{"l2", lp_norm(u, 2.0)}, {"linf", lp_norm(u, kInfinity)}, {"h1", h1_seminorm(u)}};
}

double certified_L(const Nonlinearity& nl, double R, std::size_t samples) {
  const auto est = certify_two_sided_lipschitz(nl, R, samples);
  if (est.closed_form) return *est.closed_form;
  return est.diverges ? kInfinity : est.refined;
}

void write_fields(const fs::path& path, const std::vector<Field>& fields) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& f : fields) write_binary(out, f);
}

}  // namespace

Problem make_problem(const Config& cfg) {
  Problem p;
  const auto dim = cfg.integer("domain.dim");
  const auto lengths = cfg.numbers("domain.lengths");
  const auto resolution = cfg.numbers("domain.resolution");
  if (lengths.empty() || resolution.empty()) {
    throw ConfigError("domain.lengths and domain.resolution must be non-empty");
  }
  auto res = [&](std::size_t i) {
    const double r = resolution[std::min(i, resolution.size() - 1)];
    if (r != std::floor(r)) throw ConfigError("key 'domain.resolution': expected integers");
    return static_cast<int>(r);
  };
  auto len = [&](std::size_t i) { return lengths[std::min(i, lengths.size() - 1)]; };
  if (dim == 1) {
    p.domain = BoxDomain::interval(len(0), res(0));
  } else if (dim == 2) {
    p.domain = BoxDomain::rectangle(len(0), len(1), res(0), res(1));
  } else {
    throw ConfigError("key 'domain.dim': expected 1 or 2");
  }
  p.domain.validate();
  p.nonlinearity = Nonlinearity::builtin(cfg.text("nonlinearity.family"), cfg.numbers("nonlinearity.params"));
  p.forcing = Forcing::profile(p.domain, cfg.text("forcing.profile"), cfg.number("forcing.amplitude"),
                               cfg.number("forcing.s"));
  p.seed = cfg.unsigned_integer("seed");
  p.simulate.dt = cfg.number("solver.dt");
  p.simulate.horizon = cfg.number("solver.horizon");
  p.simulate.step.scheme = parse_scheme(cfg.text("solver.scheme"));
  p.simulate.step.stiffness_cap = cfg.number("solver.stiffness_cap");
  p.simulate.norm_orders = cfg.numbers("output.norm_orders");
  p.simulate.seed = p.seed;
  if (!(p.simulate.dt > 0.0)) throw ConfigError("key 'solver.dt': must be positive");
  return p;
}

Field initial_state(const Config& cfg, const Problem& problem) {
  const std::string profile = cfg.text("initial.profile");
  const double l2 = cfg.number("initial.l2");
  if (profile == "zero") return Field::zero(problem.domain);
  if (profile == "mode1") {
    return Field::mode(problem.domain, {1, 1}, l2 / std::sqrt(problem.domain.mode_weight()));
  }
  if (profile == "random") {
    CounterRng rng(problem.seed, "initial");
    return random_field(problem.domain, rng, l2, cfg.number("initial.decay"),
                        static_cast<int>(cfg.integer("initial.max_mode")));
  }
  throw ConfigError("key 'initial.profile': unknown profile '" + profile + "'");
}

std::vector<double> ensemble_norms(const Config& cfg, std::size_t count) {
  const double lo = cfg.number("ensemble.l2_min");
  const double hi = cfg.number("ensemble.l2_max");
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("ensemble.l2_min/l2_max: need 0 < min <= max");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    out[i] = lo * std::pow(hi / lo, s);
  }
  return out;
}

std::vector<Trajectory> run_ensemble(const Config& cfg, const Problem& problem) {
  const auto train = static_cast<std::size_t>(cfg.integer("ensemble.size"));
  const auto held = static_cast<std::size_t>(cfg.integer("ensemble.held_out"));
  const auto norms = ensemble_norms(cfg, train);
  const double lo = cfg.number("ensemble.l2_min");
  const double hi = cfg.number("ensemble.l2_max");
  SimulateOptions sim = problem.simulate;
  sim.horizon = cfg.number("ensemble.horizon");
  sim.snapshot_stride = 1;
  CounterRng rng(problem.seed, "ensemble");
  CounterRng held_rng(problem.seed, "ensemble.held_out");
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < train + held; ++i) {
    CounterRng member = i < train ? rng.substream(i) : held_rng.substream(i - train);
    const double norm = i < train ? norms[i] : lo * std::pow(hi / lo, member.uniform());
    const Field u0 = random_field(problem.domain, member, norm, cfg.number("initial.decay"),
                                  static_cast<int>(cfg.integer("initial.max_mode")));
    sim.seed = problem.seed;
    out.push_back(simulate(u0, problem.nonlinearity, problem.forcing, sim));
  }
  return out;
}

StructureBudget structure_budget(const Config& cfg, const Problem& problem) {
  StructureBudget b;
  b.search.seed_count = static_cast<int>(cfg.integer("equilibria.seed_count"));
  b.search.max_mode = static_cast<int>(cfg.integer("equilibria.max_mode"));
  b.search.spectrum_count = static_cast<std::size_t>(cfg.integer("equilibria.spectrum_count"));
  b.shoot.amplitudes = {cfg.number("structure.manifold_amplitude")};
  b.shoot.horizon = cfg.number("structure.manifold_horizon");
  b.shoot.simulate = problem.simulate;
  b.shoot.simulate.norm_orders.clear();
  b.shoot.simulate.log_stride = 0;
  b.shoot.limit_tol = cfg.number("structure.limit_tol");
  b.ensemble = static_cast<std::size_t>(cfg.integer("structure.ensemble"));
  b.forward_horizon = cfg.number("structure.horizon");
  b.window_start = cfg.number("structure.window_start");
  b.window_stride = cfg.number("structure.window_stride");
  b.small_fraction = cfg.number("structure.small_fraction");
  b.small_norm = cfg.number("structure.small_norm");
  b.large_norm = cfg.number("structure.large_norm");
  b.spacing = cfg.number("structure.spacing");
  b.limit_tol = cfg.number("structure.limit_tol");
  b.undecided_quota = static_cast<std::size_t>(cfg.integer("structure.undecided_quota"));
  b.seed = problem.seed;
  return b;
}

Outcome run_simulate(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  SimulateOptions sim = p.simulate;
  sim.snapshot_stride = static_cast<int>(cfg.integer("output.snapshot_stride"));
  const Field u0 = initial_state(cfg, p);
  const Trajectory traj = simulate(u0, p.nonlinearity, p.forcing, sim);

  std::ostringstream csv;
  traj.write_norm_csv(csv);
  write_text(out / "norms.csv", csv.str());
  write_fields(out / "snapshots.bin", traj.states());
  std::ostringstream fin;
  write_csv(fin, traj.back());
  write_text(out / "final.csv", fin.str());

  const DecayCheck decay = l2_decay_check(traj, p.nonlinearity, p.forcing);
  json rep = header("simulate", cfg);
  rep["snapshots"] = traj.size();
  rep["snapshot_times"] = traj.times();
  rep["initial"] = norms_json(u0);
  rep["final"] = norms_json(traj.back());
  rep["decay"] = {{"alpha", decay.derived.alpha}, {"K", decay.derived.K},
                  {"violations", decay.violations}, {"worst_excess", decay.worst_excess},
                  {"alpha_fit", decay.alpha_fit}, {"K_fit", decay.K_fit}};
  write_json(out / "simulate.json", rep);
  return {rep, decay.violations == 0 ? 0 : 1};
}

Outcome run_ladder(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  const double t1 = cfg.number("ladder.t1");
  const double tau = cfg.number("ladder.tau");
  Config ecfg = cfg;
  const double need = t1 + tau;
  if (cfg.number("ensemble.horizon") < need) {
    const double steps = std::ceil(need / p.simulate.dt - 1e-9);
    std::ostringstream v;
    v.precision(17);
    v << steps * p.simulate.dt;
    ecfg.set("ensemble.horizon", v.str());
  }
  const auto ensemble = run_ensemble(ecfg, p);
  const auto train = static_cast<std::size_t>(cfg.integer("ensemble.size"));
  std::span<const Trajectory> training(ensemble.data(), train);
  std::span<const Trajectory> held(ensemble.data() + train, ensemble.size() - train);

  const auto schedule = LadderSchedule::for_total_wait(
      p.domain.dim, tau, cfg.number("ladder.D_exp"), cfg.number("ladder.m0"), cfg.number("ladder.m_max"));
  const double floor = cfg.number("ladder.floor");

  const LinfBoundCheck fit = linf_bound_check(training, t1, tau);
  const LinfBoundCheck check = linf_bound_check(held, t1, tau, fit.D_hat);

  double envelope = 0.0, held_max = 0.0;
  std::size_t held_violations = 0;
  std::vector<LadderReport> reports;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    reports.push_back(rdlab::run_ladder(ensemble[i], t1, schedule, floor));
    double q = 0.0;
    for (const auto& r : reports.back().rungs) q = std::max(q, r.quotient);
    if (i < train) envelope = std::max(envelope, q);
  }
  for (std::size_t i = train; i < ensemble.size(); ++i) {
    for (const auto& r : reports[i].rungs) {
      held_max = std::max(held_max, r.quotient);
      if (r.quotient > envelope) ++held_violations;
    }
  }

  // Saturation of the largest tracked L^m norm against the nodal max.
  const auto& orders = p.simulate.norm_orders;
  const auto top = std::max_element(orders.begin(), orders.end());
  double saturation = kInfinity;
  if (top != orders.end()) {
    const auto col = static_cast<std::size_t>(top - orders.begin());
    for (const auto& traj : ensemble) {
      for (const auto& r : traj.norm_log()) {
        if (r.time >= t1 && r.linf > 0.0) saturation = std::min(saturation, r.lm[col] / r.linf);
      }
    }
  }

  std::size_t decay_violations = 0;
  for (const auto& traj : ensemble) decay_violations += l2_decay_check(traj, p.nonlinearity, p.forcing).violations;

  json sweep = json::array();
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    if (t1 + s > ecfg.number("ensemble.horizon") + 1e-9) continue;
    sweep.push_back({{"tau", s}, {"D_hat", linf_bound_check(training, t1, s).D_hat}});
  }

  json rep = header("ladder", cfg);
  rep["t1"] = t1;
  rep["tau"] = tau;
  rep["linf_bound"] = {{"D_hat", fit.D_hat},        {"D_small", fit.D_small},
                       {"D_large", fit.D_large},    {"D_prefix", fit.D_prefix},
                       {"split_ratio", fit.split_ratio}, {"samples", fit.samples},
                       {"held_out_violations", check.violations}};
  rep["tau_sweep"] = sweep;
  rep["envelope"] = {{"training_max_quotient", envelope},
                     {"held_out_max_quotient", held_max},
                     {"held_out_violations", held_violations}};
  rep["saturation_min_ratio"] = std::isfinite(saturation) ? json(saturation) : json(nullptr);
  rep["decay_violations"] = decay_violations;
  rep["example"] = to_json(reports.front());
  write_json(out / "ladder.json", rep);
  const bool ok = std::isfinite(fit.D_hat) && check.violations == 0 && held_violations == 0 &&
                  decay_violations == 0;
  return {rep, ok ? 0 : 1};
}

Outcome run_equilibria(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  const StructureBudget b = structure_budget(cfg, p);
  const EquilibriumSet set = find_equilibria(p.domain, p.nonlinearity, p.forcing, b.search);
  std::vector<Field> states;
  for (std::size_t i = 0; i < set.equilibria.size(); ++i) {
    states.push_back(set.equilibria[i].state);
    write_fields(out / ("equilibrium_" + std::to_string(i) + ".bin"), {set.equilibria[i].state});
  }
  json rep = header("equilibria", cfg);
  rep["result"] = to_json(set);
  write_json(out / "equilibria.json", rep);
  return {rep, set.equilibria.empty() ? 1 : 0};
}

Outcome run_attractor(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  const StructureReport s = structure_check(p.domain, p.nonlinearity, p.forcing, structure_budget(cfg, p));
  write_fields(out / "sample.bin", s.sample.points);
  json points = json::array();
  for (std::size_t i = 0; i < s.sample.size(); ++i) {
    points.push_back({{"index", i},
                      {"provenance", provenance_name(s.sample.provenance[i])},
                      {"l2", lp_norm(s.sample.points[i], 2.0)},
                      {"linf", lp_norm(s.sample.points[i], kInfinity)}});
  }
  json rep = header("attractor", cfg);
  rep["equilibria"] = to_json(s.equilibria);
  rep["linf_radius"] = attractor_linf_radius(s.sample.points);
  rep["points"] = points;
  write_json(out / "attractor.json", rep);
  return {rep, s.inconclusive ? 1 : 0};
}

Outcome run_structure(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  const StructureReport s = structure_check(p.domain, p.nonlinearity, p.forcing, structure_budget(cfg, p));
  json rep = header("structure", cfg);
  rep["result"] = to_json(s);
  write_json(out / "structure.json", rep);
  return {rep, s.inconclusive ? 1 : 0};
}

Outcome run_dimension(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  if (!p.nonlinearity.differentiable()) {
    json rep = header("dimension", cfg);
    rep["diagnostic"] = "reaction term is not locally Lipschitz; no contraction pair exists";
    write_json(out / "dimension.json", rep);
    return {rep, 1};
  }
  const StructureReport s = structure_check(p.domain, p.nonlinearity, p.forcing, structure_budget(cfg, p));

  DimensionReport d;
  d.R = attractor_linf_radius(s.sample.points);
  d.L = certified_L(p.nonlinearity, std::max(d.R, 1e-9),
                    static_cast<std::size_t>(cfg.integer("lipschitz.samples")));
  const SpectrumTable table =
      laplacian_spectrum(p.domain, static_cast<std::size_t>(cfg.integer("dimension.spectrum_count")));
  d.D_asym = weyl_constant(table);

  json rep = header("dimension", cfg);
  if (!std::isfinite(d.L)) {
    rep["diagnostic"] = "no finite Lipschitz constant at the attractor radius";
    rep["R"] = d.R;
    write_json(out / "dimension.json", rep);
    return {rep, 1};
  }
  d.closed_form = closed_form_constants(d.L, table, d.D_asym, cfg.number("dimension.alpha_slack"));
  auto grid = log_time_grid(cfg.number("dimension.t_min"), cfg.number("dimension.t_max"),
                            static_cast<std::size_t>(cfg.integer("dimension.t_count")));
  if (d.closed_form.t > 0.0) grid.push_back(d.closed_form.t);
  d.search = search_bound(d.L, table, grid, static_cast<std::size_t>(cfg.integer("dimension.N_max")));
  if (cfg.flag("dimension.box_counting")) {
    d.box = box_counting(s.sample.points, static_cast<std::size_t>(cfg.integer("dimension.projection_modes")));
  }
  rep["result"] = to_json(d);
  rep["sample_size"] = s.sample.size();
  write_json(out / "dimension.json", rep);
  const bool ok = d.search.feasible && (d.closed_form.trivial || d.closed_form.satisfied);
  return {rep, ok ? 0 : 1};
}

Outcome run_check(const Config& cfg, const fs::path& out) {
  const Problem p = make_problem(cfg);
  json props = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    props.push_back({{"property", name}, {"pass", pass}, {"detail", std::move(detail)}});
    all = all && pass;
  };

  const auto growth = certify_growth(p.nonlinearity);
  record("growth", growth.pass, {{"worst", growth.worst}, {"at", growth.worst_at}});
  const auto diss = certify_dissipativity(p.nonlinearity);
  record("dissipativity", diss.pass, {{"worst", diss.worst}, {"at", diss.worst_at}});

  // L2 decay on a short ensemble spanning small and large data.
  Config ecfg = cfg;
  ecfg.set("ensemble.size", "8");
  ecfg.set("ensemble.held_out", "0");
  const auto ensemble = run_ensemble(ecfg, p);
  std::size_t violations = 0;
  for (const auto& traj : ensemble) violations += l2_decay_check(traj, p.nonlinearity, p.forcing).violations;
  record("l2_decay", violations == 0, {{"runs", ensemble.size()}, {"violations", violations}});

  // Reproducibility of a single run.
  SimulateOptions sim = p.simulate;
  sim.horizon = 1.0;
  const Field u0 = initial_state(cfg, p);
  std::ostringstream a, b;
  simulate(u0, p.nonlinearity, p.forcing, sim).write_norm_csv(a);
  simulate(u0, p.nonlinearity, p.forcing, sim).write_norm_csv(b);
  record("determinism", a.str() == b.str(), json::object());

  if (p.nonlinearity.differentiable()) {
    const StructureBudget budget = structure_budget(cfg, p);
    const EquilibriumSet set = find_equilibria(p.domain, p.nonlinearity, p.forcing, budget.search);
    double worst_res = 0.0, worst_drift = 0.0;
    std::vector<Field> states;
    for (const auto& e : set.equilibria) {
      worst_res = std::max(worst_res, e.residual);
      SimulateOptions one = p.simulate;
      one.horizon = 1.0;
      one.log_stride = 0;
      worst_drift = std::max(worst_drift, l2_distance(simulate(e.state, p.nonlinearity, p.forcing, one).back(), e.state));
      states.push_back(e.state);
    }
    record("equilibria", !set.equilibria.empty() && worst_res <= 1e-10 && worst_drift <= 1e-8,
           {{"count", set.equilibria.size()}, {"worst_residual", worst_res}, {"worst_fixed_point_drift", worst_drift}});

    const double R = std::max(attractor_linf_radius(states), 1e-9);
    const double L = certified_L(p.nonlinearity, R, static_cast<std::size_t>(cfg.integer("lipschitz.samples")));
    record("lipschitz_finite", std::isfinite(L), {{"R", R}, {"L", L}});
    if (std::isfinite(L)) {
      const SpectrumTable table = laplacian_spectrum(p.domain, static_cast<std::size_t>(cfg.integer("dimension.spectrum_count")));
      const ClosedFormRoute route = closed_form_constants(L, table, weyl_constant(table), cfg.number("dimension.alpha_slack"));
      record("closed_form_route", route.trivial || route.satisfied,
             {{"N", route.N}, {"twelve_l_delta", route.twelve_l_delta}, {"diagnostic", route.diagnostic}});
      if (!route.trivial && route.satisfied) {
        const AbstractBound ab = abstract_bound(route.l, route.delta, route.N);
        const double eta = eta_by_search(route.l, route.delta, route.N);
        record("eta_routes_agree", std::abs(eta - ab.eta) <= 1e-12 * std::max(1.0, ab.eta),
               {{"closed_form", ab.eta}, {"search", eta}});
      }
    }
  }

  json rep = header("check", cfg);
  rep["properties"] = props;
  rep["pass"] = all;
  write_json(out / "check.json", rep);
  return {rep, all ? 0 : 1};
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "ladder", "equilibria", "attractor",
                                                 "structure", "dimension", "check"};
  return names;
}

Outcome run(const std::string& subcommand, const Config& cfg, const fs::path& out) {
  fs::create_directories(out);
  if (subcommand == "simulate") return run_simulate(cfg, out);
  if (subcommand == "ladder") return run_ladder(cfg, out);
  if (subcommand == "equilibria") return run_equilibria(cfg, out);
  if (subcommand == "attractor") return run_attractor(cfg, out);
  if (subcommand == "structure") return run_structure(cfg, out);
  if (subcommand == "dimension") return run_dimension(cfg, out);
  if (subcommand == "check") return run_check(cfg, out);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace rdlab::cli
