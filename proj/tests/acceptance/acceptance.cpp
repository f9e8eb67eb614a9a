// Property-based acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "experiment.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rdlab/attractor.hpp"
#include "rdlab/dimension.hpp"
#include "rdlab/ladder.hpp"
#include "rdlab/random.hpp"
#include "rdlab/verifiers.hpp"

using namespace rdlab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cli::Config preset(const std::string& name) {
  return cli::Config::load(std::string(RDLAB_PRESET_DIR) + "/" + name);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rdlab_accept_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double two_sided_L(const Nonlinearity& f, double R) {
  const auto e = certify_two_sided_lipschitz(f, std::max(R, 1e-9));
  return e.closed_form ? *e.closed_form : e.refined;
}

// Shared between criteria 3, 4 and 9.
struct EnsembleData {
  cli::Problem problem;
  std::vector<Trajectory> runs;
  std::size_t training = 0;
  double seconds = 0.0;
};

const EnsembleData& ensemble() {
  static const EnsembleData data = [] {
    const auto start = std::chrono::steady_clock::now();
    EnsembleData e;
    const cli::Config cfg = preset("chafee_infante_lambda2.cfg");
    e.problem = cli::make_problem(cfg);
    e.runs = cli::run_ensemble(cfg, e.problem);
    e.training = static_cast<std::size_t>(cfg.integer("ensemble.size"));
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
  }();
  return data;
}

// Shared between criteria 5, 6 and 8.
const StructureReport& lambda2_structure() {
  static const StructureReport report = [] {
    const cli::Config cfg = preset("chafee_infante_lambda2.cfg");
    const cli::Problem p = cli::make_problem(cfg);
    return structure_check(p.domain, p.nonlinearity, p.forcing, cli::structure_budget(cfg, p));
  }();
  return report;
}

Verdict criterion1() {
  const auto d1 = fixture::unit_interval();
  const auto d2 = BoxDomain::rectangle(std::numbers::pi, 2.0, 31, 15);
  CounterRng rng(1, "acceptance.sandwich");
  std::size_t checks = 0, violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const BoxDomain& d = i % 10 == 9 ? d2 : d1;
    const Field up = positive_part(random_field(d, rng, rng.uniform(0.05, 20.0), rng.uniform(0.5, 2.0)));
    for (double m : {1.0, 2.0, 4.0, 8.0}) {
      const double hi = std::pow(lp_norm(up, 2 * m), 2 * m) / (2 * m);
      for (double k : {0.1, 1.0, 10.0}) {
        const double lo = std::pow(lp_norm(truncate(up, k), 2 * m), 2 * m) / (2 * m);
        const double mid = big_phi(up, k, m);
        ++checks;
        if (lo > mid * (1 + 1e-10) || mid > hi * (1 + 1e-10)) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%zu checks, %zu violations", checks, violations)};
}

Verdict criterion2() {
  const auto d = fixture::unit_interval();
  const BumpProfile eta(0.3, 1.7);
  bool ok = true;
  std::string detail;
  for (double m : {1.0, 2.0}) {
    for (double k : {10.0, 1.0}) {
      std::vector<double> gaps;
      double scale = 0.0;
      for (double dt : {4e-3, 2e-3, 1e-3}) {
        const IbpSides s = ibp_identity_check(fixture::sampled(d, fixture::wobble, 0, 2, dt), k, m, eta);
        gaps.push_back(std::abs(s.lhs - s.rhs));
        scale = std::max(1.0, std::abs(s.rhs));
      }
      const double rel = gaps.back() / scale;
      const double order = std::log2(gaps[1] / gaps[2]);
      ok = ok && rel <= 1e-6 && order >= 1.8;
      detail += fmt("m=%g k=%g gap %.2e order %.2f; ", m, k, rel, order);
    }
  }
  return {ok, detail};
}

Verdict criterion3() {
  const auto& e = ensemble();
  std::span<const Trajectory> train(e.runs.data(), e.training);
  const LinfBoundCheck c = linf_bound_check(train, 1.0, 1.0);
  const bool ok = std::isfinite(c.D_hat) && c.violations == 0 && c.split_ratio <= 2.0 && e.seconds <= 300.0;
  return {ok, fmt("D(1) = %.4f, small %.4f, large %.4f, split ratio %.4f, %zu runs in %.1f s", c.D_hat, c.D_small,
                  c.D_large, c.split_ratio, e.training, e.seconds)};
}

Verdict criterion4() {
  const auto& e = ensemble();
  const auto& orders = e.problem.simulate.norm_orders;
  const auto col = static_cast<std::size_t>(std::find(orders.begin(), orders.end(), 64.0) - orders.begin());
  if (col == orders.size()) return {false, "norm log lacks m = 64"};
  double saturation = kInfinity;
  for (const auto& traj : e.runs) {
    for (const auto& r : traj.norm_log()) {
      if (r.time >= 1.0 && r.linf > 0.0) saturation = std::min(saturation, r.lm[col] / r.linf);
    }
  }
  const LadderSchedule s = LadderSchedule::for_total_wait(1, 1.0);
  double envelope = 0.0, held = 0.0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < e.runs.size(); ++i) {
    const LadderReport rep = run_ladder(e.runs[i], 1.0, s);
    for (const auto& r : rep.rungs) {
      if (i < e.training) {
        envelope = std::max(envelope, r.quotient);
      } else {
        held = std::max(held, r.quotient);
        if (r.quotient > envelope || !std::isfinite(r.quotient)) ++violations;
      }
    }
  }
  const bool ok = saturation >= 0.95 && std::isfinite(envelope) && violations == 0;
  return {ok, fmt("min L64/Linf %.4f, envelope %.5f, held-out max %.5f over %zu seeds, %zu violations", saturation,
                  envelope, held, e.runs.size() - e.training, violations)};
}

Verdict criterion5() {
  const cli::Config low_cfg = preset("chafee_infante_lambda05.cfg");
  const cli::Problem lp = cli::make_problem(low_cfg);
  const StructureReport low = structure_check(lp.domain, lp.nonlinearity, lp.forcing, cli::structure_budget(low_cfg, lp));
  const bool low_ok = low.equilibria.equilibria.size() == 1 &&
                      oracle::chafee_infante_count(0.5, std::numbers::pi) == 1 &&
                      lp_norm(low.equilibria.equilibria[0].state, 2.0) == 0.0 && low.forward_limit_distance <= 1e-6 &&
                      !low.inconclusive;

  const StructureReport& mid = lambda2_structure();
  const auto& eq = mid.equilibria.equilibria;
  bool morse = eq.size() == 3 && eq[0].morse_index == 1 && eq[1].morse_index == 0 && eq[2].morse_index == 0;
  bool to_plus = false, to_minus = false;
  for (const auto& c : mid.connections) {
    if (c.from != 0) continue;
    to_plus = to_plus || c.to == 1;
    to_minus = to_minus || c.to == 2;
  }
  const double ratio = mid.mismatch.size() == 2 ? mid.mismatch[1] / mid.mismatch[0] : kInfinity;
  const bool mid_ok = static_cast<int>(eq.size()) == oracle::chafee_infante_count(2.0, std::numbers::pi) && morse &&
                      to_plus && to_minus && mid.mismatch.front() <= 1e-3 && ratio >= 0.4 && ratio <= 0.6 &&
                      mid.undecided == 0 && !mid.inconclusive;
  return {low_ok && mid_ok,
          fmt("lambda=0.5: %zu equilibrium, forward distance %.1e; lambda=2: %zu equilibria, Morse (%d,%d,%d), "
              "connections %zu, mismatch %.2e -> %.2e (ratio %.2f)",
              low.equilibria.equilibria.size(), low.forward_limit_distance, eq.size(), eq.size() > 0 ? eq[0].morse_index : -1,
              eq.size() > 1 ? eq[1].morse_index : -1, eq.size() > 2 ? eq[2].morse_index : -1, mid.connections.size(),
              mid.mismatch.front(), mid.mismatch.back(), ratio)};
}

Verdict criterion6() {
  const cli::Config cfg = preset("chafee_infante_lambda2.cfg");
  const cli::Problem p = cli::make_problem(cfg);
  const auto& sample = lambda2_structure().sample.points;
  const double R = attractor_linf_radius(sample);
  const double L = two_sided_L(p.nonlinearity, R);

  CounterRng rng(cfg.unsigned_integer("seed"), "acceptance.pairs");
  std::vector<std::pair<Field, Field>> pairs;
  while (pairs.size() < 100) {
    const auto i = static_cast<std::size_t>(rng.uniform() * sample.size());
    const auto j = static_cast<std::size_t>(rng.uniform() * sample.size());
    if (i != j) pairs.emplace_back(sample[i], sample[j]);
  }
  const double ts[] = {0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  const LipschitzCheck lc = attractor_lipschitz_check(pairs, ts, L, p.nonlinearity, p.forcing, p.simulate.dt);

  const cli::Config ncfg = preset("nonlipschitz.cfg");
  const cli::Problem np = cli::make_problem(ncfg);
  BranchingOptions bo;
  bo.scales = {1e-4, 1e-5, 1e-6, 1e-7};
  bo.seed = ncfg.unsigned_integer("seed");
  const BranchingReport br = branching_probe(Field::zero(np.domain), np.nonlinearity, np.forcing, bo);
  std::string rates;
  for (const auto& s : br.scales) rates += fmt("%.2g:%.3g ", s.scale, s.implied_L);
  return {lc.violations == 0 && br.envelope_fails_as_scale_shrinks,
          fmt("R %.4f, L %.4f, %zu pairs, %zu violations, worst ratio %.4f; branching implied L %s(L used %.3g)", R, L,
              lc.pairs, lc.violations, lc.worst_ratio, rates.c_str(), br.L_used)};
}

struct DimensionRun {
  std::string preset;
  nlohmann::json result;
  int status = 0;
};

const std::vector<DimensionRun>& dimension_runs() {
  static const std::vector<DimensionRun> runs = [] {
    std::vector<DimensionRun> out;
    for (const char* name : {"chafee_infante_lambda2.cfg", "chafee_infante_lambda05.cfg", "chafee_infante_lambda5.cfg",
                             "linear.cfg", "trivial_attractor.cfg", "square2d.cfg"}) {
      const auto o = cli::run_dimension(preset(name), scratch(std::string("dim_") + name));
      out.push_back({name, o.report.value("result", nlohmann::json::object()), o.status});
    }
    return out;
  }();
  return runs;
}

Verdict criterion7() {
  bool ok = true;
  std::string detail;

  // Closed form against bisection, over a grid and at the closed-form route.
  double worst = 0.0;
  for (double l : {1.0, 1.5, 4.0, 100.0}) {
    for (double delta : {1e-8, 1e-3, 0.1, 0.5, 0.7}) {
      for (std::size_t N : {1u, 3u, 34u, 500u}) {
        const double closed = abstract_bound(l, delta, N).eta;
        worst = std::max(worst, std::abs(eta_by_search(l, delta, N) - closed) / std::max(1.0, closed));
      }
    }
  }
  ok = ok && worst <= 1e-12;
  detail += fmt("eta routes differ by %.1e; ", worst);

  for (const auto& r : dimension_runs()) {
    const auto& s = r.result["search"];
    const auto& p = r.result["closed_form"];
    const double sb = s["bound"], pb = p["bound"];
    const bool trivial = p["trivial"];
    const bool strict = trivial || (p["satisfied"].get<bool>() && p["twelve_l_delta"].get<double>() < 1.0);
    const bool dominated = s["feasible"].get<bool>() && sb <= pb;
    ok = ok && r.status == 0 && strict && dominated;
    detail += fmt("%s search %.3g <= closed form %.4g%s; ", r.preset.c_str(), sb, pb, trivial ? " (trivial)" : "");
    if (r.preset == "trivial_attractor.cfg") ok = ok && trivial && sb == 0.0 && pb == 0.0;
  }

  const auto table = laplacian_spectrum(fixture::unit_interval(), 20000);
  const double D = weyl_constant(table);
  double scaling = 0.0;
  for (double L : {1.0, 2.0, 3.0, 5.0, 9.0}) {
    const double ratio = closed_form_constants(2 * L, table, D).bound / closed_form_constants(L, table, D).bound;
    scaling = std::max(scaling, std::abs(ratio - std::numbers::sqrt2));
  }
  ok = ok && scaling <= 1e-12;
  detail += fmt("doubling L scales the d=1 bound by sqrt2 to %.1e", scaling);
  return {ok, detail};
}

Verdict criterion8() {
  const auto& runs = dimension_runs();
  const auto& r = runs.front().result;
  if (!r.contains("box_counting")) return {false, "no box-counting estimate"};
  const double slope = r["box_counting"]["slope"], err = r["box_counting"]["stderr"];
  const double bound = r["search"]["bound"];
  const bool ok = r["box_counting"]["decided"].get<bool>() && std::abs(slope - 1.0) <= 0.2 && slope <= bound;
  return {ok, fmt("slope %.3f +- %.3f against search bound %.3f", slope, err, bound)};
}

Verdict criterion9() {
  const auto& e = ensemble();
  std::size_t violations = 0, rows = 0;
  for (const auto& traj : e.runs) {
    violations += l2_decay_check(traj, e.problem.nonlinearity, e.problem.forcing).violations;
    rows += traj.norm_log().size();
  }

  const cli::Config cfg = preset("linear.cfg");
  const cli::Problem p = cli::make_problem(cfg);
  const Field u0 = cli::initial_state(cfg, p);
  const Trajectory traj = simulate(u0, p.nonlinearity, p.forcing, p.simulate);
  const std::vector<double> a(u0.coeffs().begin(), u0.coeffs().end());
  const double c = p.nonlinearity.linear_coefficient();
  double worst = 0.0;
  for (const auto& r : traj.norm_log()) {
    const double exact = oracle::heat_l2(a, c, r.time);
    worst = std::max(worst, std::abs(r.l2 - exact) / std::max(exact, 1e-300));
  }
  const std::size_t linear_violations = l2_decay_check(traj, p.nonlinearity, p.forcing).violations;
  return {violations == 0 && linear_violations == 0 && worst <= 1e-8,
          fmt("%zu violations over %zu runs (%zu rows); linear preset relative error %.1e", violations, e.runs.size(),
              rows, worst)};
}

Verdict criterion10() {
  std::size_t files = 0, differ = 0;
  auto compare = [&](const std::string& name, const std::string& sub) {
    const cli::Config cfg = preset(name);
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    cli::run(sub, cfg, a);
    cli::run(sub, cfg, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) ++differ;
    }
  };
  for (const auto& entry : fs::directory_iterator(RDLAB_PRESET_DIR)) {
    if (entry.path().extension() == ".cfg") compare(entry.path().filename().string(), "simulate");
  }
  compare("default.cfg", "check");
  compare("chafee_infante_lambda2.cfg", "dimension");
  return {files > 0 && differ == 0, fmt("%zu report files compared, %zu differ", files, differ)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Phi sandwich on random fields", criterion1},
      {"truncated time identity", criterion2},
      {"uniform sup-norm bound", criterion3},
      {"ladder saturation and rung envelope", criterion4},
      {"attractor structure", criterion5},
      {"Lipschitz envelope and branching", criterion6},
      {"dimension pipeline", criterion7},
      {"box counting", criterion8},
      {"L2 decay", criterion9},
      {"determinism", criterion10},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria failed, %.1f s total\n", failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
