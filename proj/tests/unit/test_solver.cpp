#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rdlab/attractor.hpp"
#include "rdlab/random.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/verifiers.hpp"

using namespace rdlab;
using std::numbers::pi;

namespace {

Nonlinearity cubic(double lambda) {
  const double p[] = {lambda};
  return Nonlinearity::builtin("cubic_chafee_infante", p);
}

Nonlinearity linear() {
  const double p[] = {2.0, 0.0};
  return Nonlinearity::builtin("odd_power", p);
}

Nonlinearity zero_reaction() {
  return Nonlinearity::custom("zero", [](double) { return 0.0; }, [](double) { return 0.0; }, {2.0, 1.0, 0.0, 1e-9});
}

// Terminal error of the manufactured solution u* = e^{-t} sin x for cubic
// lambda = 2, driven by g(t) = f(u*) so that u_t - u_xx vanishes identically.
double manufactured_error(double dt, Scheme scheme) {
  const auto d = fixture::unit_interval(31);
  const Nonlinearity f = cubic(2.0);
  auto exact = [&](double t) { return Field::mode(d, {1, 1}, std::exp(-t)); };
  SimulateOptions o;
  o.dt = dt;
  o.horizon = 1.0;
  o.log_stride = 0;
  o.snapshot_stride = 1000000;
  o.step.scheme = scheme;
  // Sub-stepping would hide the macro step being refined.
  o.step.stiffness_cap = 1e9;
  TimeForcing g = [&](double t) {
    const double a = std::exp(-t);
    const Field r = Field::from_function(d, [&](double x, double) {
      const double u = a * std::sin(x);
      return u * u * u - 2 * u;
    });
    return std::vector<double>(r.coeffs().begin(), r.coeffs().end());
  };
  const Trajectory traj = simulate(exact(0), f, Forcing::zero(d), o, g);
  return l2_distance(traj.back(), exact(1.0));
}

}  // namespace

TEST_CASE("single heat mode decays exactly") {
  const auto d = fixture::unit_interval();
  const double dt = 0.037;
  const Field u = step(Field::mode(d, {1, 1}), dt, zero_reaction(), Forcing::zero(d));
  CHECK(u.coeffs()[0] == doctest::Approx(std::exp(-dt)).epsilon(1e-14));
  for (std::size_t i = 1; i < u.size(); ++i) CHECK(std::abs(u.coeffs()[i]) < 1e-15);
}

TEST_CASE("equilibria are fixed points of the step") {
  const auto d = fixture::unit_interval();
  const Nonlinearity f = cubic(2.0);
  const NewtonResult z = newton_solve(Field::mode(d, {1, 1}, 1.2), f, Forcing::zero(d));
  REQUIRE(z.converged);
  const Field next = step(z.state, 0.01, f, Forcing::zero(d));
  CHECK(l2_distance(next, z.state) < 1e-12);
}

TEST_CASE("manufactured solution converges at second order") {
  const double e1 = manufactured_error(0.1, Scheme::etd2rk);
  const double e2 = manufactured_error(0.05, Scheme::etd2rk);
  const double e3 = manufactured_error(0.025, Scheme::etd2rk);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);

  const double f1 = manufactured_error(0.05, Scheme::etd1);
  const double f2 = manufactured_error(0.025, Scheme::etd1);
  CHECK(std::log2(f1 / f2) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("simulate from zero stays zero") {
  const auto d = fixture::unit_interval();
  SimulateOptions o;
  o.horizon = 2.0;
  const Trajectory traj = simulate(Field::zero(d), cubic(2.0), Forcing::zero(d), o);
  for (const auto& s : traj.states()) {
    for (double c : s.coeffs()) CHECK(c == 0.0);
  }
  for (const auto& r : traj.norm_log()) CHECK(r.l2 == 0.0);
}

TEST_CASE("small data settle on a nontrivial equilibrium") {
  const auto d = fixture::unit_interval();
  const double amp = oracle::chafee_infante_amplitude(2.0, pi);
  SimulateOptions o;
  o.horizon = 30.0;
  o.snapshot_stride = 3000;
  o.log_stride = 0;
  for (std::uint64_t s = 0; s < 6; ++s) {
    CounterRng rng(s, "small");
    const Trajectory traj = simulate(random_field(d, rng, 0.1), cubic(2.0), Forcing::zero(d), o);
    CHECK(lp_norm(traj.back(), kInfinity) == doctest::Approx(amp).epsilon(1e-6));
  }
}

TEST_CASE("large data enter the absorbing ball without decay violations") {
  const auto d = fixture::unit_interval();
  const Nonlinearity f = cubic(2.0);
  SimulateOptions o;
  o.horizon = 2.0;
  o.snapshot_stride = 50;
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(static_cast<std::uint64_t>(i), "decay");
    const double norm = std::pow(10.0, 3.0 * i / 19.0);
    const Trajectory traj = simulate(random_field(d, rng, norm), f, Forcing::zero(d), o);
    const DecayCheck c = l2_decay_check(traj, f, Forcing::zero(d));
    CHECK(c.violations == 0);
    CHECK(traj.norm_log().back().l2 <= c.derived.K + norm * std::exp(-c.derived.alpha * 2.0));
  }
}

TEST_CASE("decay constants") {
  const auto d = fixture::unit_interval();
  // d/dt |u|^2 + 2 lambda_1 |u|^2 <= 2 C2 |Omega| + 2 |g| |u|, then Young.
  const DecayConstants c = decay_constants(d, cubic(2.0), Forcing::zero(d));
  CHECK(c.alpha == doctest::Approx(0.5));
  CHECK(c.K == doctest::Approx(std::sqrt(4 * pi)));

  const DecayConstants l = decay_constants(d, linear(), Forcing::zero(d));
  CHECK(l.alpha == doctest::Approx(2.0));
  CHECK(l.K == 0.0);
}

TEST_CASE("linear decay matches the closed form") {
  const auto d = fixture::unit_interval();
  CounterRng rng(4, "linear");
  const Field u0 = random_field(d, rng, 5.0);
  SimulateOptions o;
  o.horizon = 3.0;
  o.snapshot_stride = 100;
  const Trajectory traj = simulate(u0, linear(), Forcing::zero(d), o);
  const std::vector<double> a(u0.coeffs().begin(), u0.coeffs().end());
  for (const auto& r : traj.norm_log()) {
    CHECK(r.l2 == doctest::Approx(oracle::heat_l2(a, 1.0, r.time)).epsilon(1e-8));
  }
  const DecayCheck c = l2_decay_check(traj, linear(), Forcing::zero(d));
  CHECK(c.violations == 0);

  // Single mode: the decay inequality is an equality.
  const Trajectory one = simulate(Field::mode(d, {1, 1}, 2.0), linear(), Forcing::zero(d), o);
  const DecayCheck e = l2_decay_check(one, linear(), Forcing::zero(d));
  CHECK(e.violations == 0);
  CHECK(std::abs(e.worst_excess) < 1e-12);

  const Trajectory z = simulate(Field::zero(d), linear(), Forcing::zero(d), o);
  CHECK(l2_decay_check(z, linear(), Forcing::zero(d)).violations == 0);
}

TEST_CASE("semiflow concatenation") {
  const auto d = fixture::unit_interval();
  const Nonlinearity f = cubic(2.0);
  CounterRng rng(8, "concat");
  const Field u0 = random_field(d, rng, 30.0);
  SimulateOptions o;
  o.horizon = 2.0;
  const Trajectory whole = simulate(u0, f, Forcing::zero(d), o);
  o.horizon = 1.0;
  const Trajectory first = simulate(u0, f, Forcing::zero(d), o);
  o.t0 = 1.0;
  const Trajectory second = simulate(first.back(), f, Forcing::zero(d), o);
  for (std::size_t i = 0; i < second.size(); ++i) {
    const std::size_t j = first.size() - 1 + i;
    CHECK(second.times()[i] == doctest::Approx(whole.times()[j]));
    CHECK(l2_distance(second.state(i), whole.state(j)) <= 1e-9);
  }
}

TEST_CASE("halving dt reduces the terminal error at second order") {
  const auto d = fixture::unit_interval();
  const Nonlinearity f = cubic(2.0);
  CounterRng rng(12, "halving");
  const Field u0 = random_field(d, rng, 1.0, 2.0, 6);
  auto run = [&](double dt) {
    SimulateOptions o;
    o.dt = dt;
    o.horizon = 1.0;
    o.log_stride = 0;
    o.snapshot_stride = 1 << 20;
    o.step.stiffness_cap = 1e9;
    return simulate(u0, f, Forcing::zero(d), o).back();
  };
  const Field ref = run(0.1 / 64);
  const double e1 = l2_distance(run(0.1), ref), e2 = l2_distance(run(0.05), ref);
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("blow-up is reported with the last finite state") {
  const auto d = fixture::unit_interval(15);
  const Nonlinearity bad = Nonlinearity::custom("anti", [](double u) { return -u * u * u; },
                                                [](double u) { return -3 * u * u; }, {4.0, 1.0, 0.0, 1.0});
  SimulateOptions o;
  o.horizon = 5.0;
  try {
    simulate(Field::mode(d, {1, 1}, 5.0), bad, Forcing::zero(d), o);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time() < 5.0);
    CHECK(std::isfinite(lp_norm(e.last_finite_state(), 2.0)));
  }
  CHECK_THROWS(simulate(Field::zero(d), bad, Forcing::zero(d), {.dt = 0.03, .horizon = 1.0}));
}

TEST_CASE("weak residual") {
  const auto d = fixture::unit_interval();
  const Field v = Field::mode(d, {1, 1});
  const BumpProfile eta(0.2, 0.8);
  CHECK(oracle::integrate([&](double t) { return eta.value(t); }, 0.2, 0.8) == doctest::Approx(1.0).epsilon(1e-10));

  // f(u) = u: u = e^{-2t} sin x solves the equation.
  const Trajectory heat = fixture::sampled(d, [](double t, double x) { return std::exp(-2 * t) * std::sin(x); }, 0, 1, 1e-3);
  CHECK(std::abs(weak_residual(heat, v, eta, linear(), Forcing::zero(d))) <= 1e-8);

  const Nonlinearity f = cubic(2.0);
  const NewtonResult z = newton_solve(Field::mode(d, {1, 1}, 1.2), f, Forcing::zero(d));
  Trajectory still;
  for (int i = 0; i <= 100; ++i) still.append(i * 0.01, z.state);
  CHECK(std::abs(weak_residual(still, v, eta, f, Forcing::zero(d))) <= 1e-10);

  const Trajectory fake = fixture::sampled(d, [](double t, double x) { return std::exp(-t) * std::sin(x); }, 0, 1, 1e-3);
  CHECK(std::abs(weak_residual(fake, v, eta, linear(), Forcing::zero(d))) > 0.1);

  CHECK_THROWS(weak_residual(heat, Field::mode(fixture::unit_interval(31), {1, 1}), eta, linear(), Forcing::zero(d)));
  CHECK_THROWS(weak_residual(heat, v, BumpProfile(0.5, 1.5), linear(), Forcing::zero(d)));
}

TEST_CASE("integration by parts identity") {
  const auto d = fixture::unit_interval();
  const BumpProfile eta(0.3, 1.7);

  const Trajectory smooth = fixture::sampled(d, fixture::wobble, 0, 2, 1e-3);
  const IbpSides classical = ibp_identity_check(smooth, 10.0, 1.0, eta);
  CHECK(std::abs(classical.rhs) > 1e-2);
  CHECK(classical.lhs == doctest::Approx(classical.rhs).epsilon(1e-6).scale(1.0));

  const Trajectory negative = fixture::sampled(d, [](double t, double x) { return -(1 + t) * std::sin(x); }, 0, 2, 1e-2);
  const IbpSides zero = ibp_identity_check(negative, 1.0, 2.0, eta);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  std::vector<double> gaps;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const IbpSides s = ibp_identity_check(fixture::sampled(d, fixture::wobble, 0, 2, dt), 1.0, 2.0, eta);
    gaps.push_back(std::abs(s.lhs - s.rhs));
  }
  CHECK(std::log2(gaps[0] / gaps[1]) >= 1.8);
  CHECK(std::log2(gaps[1] / gaps[2]) >= 1.8);

  const Trajectory sparse = fixture::sampled(d, fixture::wobble, 0, 2, 0.5);
  CHECK_THROWS(ibp_identity_check(sparse, 1.0, 1.0, eta));
}
