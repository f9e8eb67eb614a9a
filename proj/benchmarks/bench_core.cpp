#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "rdlab/attractor.hpp"
#include "rdlab/dimension.hpp"
#include "rdlab/random.hpp"
#include "rdlab/solver.hpp"

using namespace rdlab;

namespace {

Nonlinearity cubic() {
  const double p[] = {2.0};
  return Nonlinearity::builtin("cubic_chafee_infante", p);
}

BoxDomain line(int n) { return BoxDomain::interval(std::numbers::pi, n); }

void BM_RoundTrip(benchmark::State& state) {
  const auto d = line(static_cast<int>(state.range(0)));
  CounterRng rng(1, "bench");
  const Field u = random_field(d, rng, 1.0);
  std::vector<double> nodal(u.nodal().begin(), u.nodal().end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Field::from_nodal(d, nodal));
  }
}
BENCHMARK(BM_RoundTrip)->Arg(63)->Arg(255)->Arg(1023);

void BM_Step(benchmark::State& state) {
  const auto d = line(static_cast<int>(state.range(0)));
  CounterRng rng(2, "bench");
  Integrator integ(d, cubic(), Forcing::zero(d), 0.01);
  const Field u = random_field(d, rng, 1.0);
  std::vector<double> c(u.coeffs().begin(), u.coeffs().end());
  double t = 0.0;
  for (auto _ : state) {
    integ.advance(c, t);
    t += 0.01;
  }
}
BENCHMARK(BM_Step)->Arg(63)->Arg(255);

void BM_Step2D(benchmark::State& state) {
  const auto d = BoxDomain::rectangle(std::numbers::pi, std::numbers::pi, 31, 31);
  CounterRng rng(3, "bench");
  const double p[] = {3.0};
  Integrator integ(d, Nonlinearity::builtin("cubic_chafee_infante", p), Forcing::zero(d), 0.01);
  const Field u = random_field(d, rng, 1.0);
  std::vector<double> c(u.coeffs().begin(), u.coeffs().end());
  for (auto _ : state) integ.advance(c, 0.0);
}
BENCHMARK(BM_Step2D);

void BM_Newton(benchmark::State& state) {
  const auto d = line(63);
  for (auto _ : state) {
    benchmark::DoNotOptimize(newton_solve(Field::mode(d, {1, 1}, 1.2), cubic(), Forcing::zero(d)));
  }
}
BENCHMARK(BM_Newton)->Unit(benchmark::kMillisecond);

void BM_BoxCounting(benchmark::State& state) {
  CounterRng rng(4, "bench");
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const double a = rng.uniform();
    pts.push_back({a, 0.5 * a * a, -a, 0.1 * a});
  }
  for (auto _ : state) benchmark::DoNotOptimize(box_counting(pts));
}
BENCHMARK(BM_BoxCounting)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
