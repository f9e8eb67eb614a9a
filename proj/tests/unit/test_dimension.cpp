#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fixtures.hpp"
#include "rdlab/dimension.hpp"
#include "rdlab/random.hpp"

using namespace rdlab;
using std::numbers::pi;
using std::numbers::sqrt2;

TEST_CASE("Laplacian spectrum of boxes") {
  const auto line = laplacian_spectrum(fixture::unit_interval(), 3);
  CHECK(line.eigenvalues == std::vector<double>{1.0, 4.0, 9.0});

  const auto unit = laplacian_spectrum(BoxDomain::interval(1.0, 63), 1);
  CHECK(unit.at(1) == doctest::Approx(pi * pi).epsilon(1e-15));

  const auto sq = laplacian_spectrum(BoxDomain::rectangle(pi, pi, 15, 15), 6);
  CHECK(sq.eigenvalues == std::vector<double>{2, 5, 5, 8, 10, 10});
  CHECK(sq.distinct[1] == std::pair<double, int>{5.0, 2});

  const auto big = laplacian_spectrum(fixture::unit_interval(), 500);
  CHECK(std::is_sorted(big.eigenvalues.begin(), big.eigenvalues.end()));
  CHECK(weyl_constant(big) == doctest::Approx(1.0));
  for (std::size_t N = 1; N <= big.size(); ++N) CHECK(big.at(N) >= weyl_constant(big) * double(N * N) * (1 - 1e-15));
}

TEST_CASE("contraction delta") {
  CHECK(contraction_delta(0.0, 4.0, 0.3) == doctest::Approx(std::exp(-1.2)));
  const double t = std::log(24.0) / 3;
  CHECK(contraction_delta(1.0, 4.0, t) == doctest::Approx(std::pow(24.0, -4.0 / 3) + std::exp(std::log(24.0) / 3) / 5).epsilon(1e-15));

  const double L = 0.3, lam = 9.0, ts = contraction_critical_time(L, lam);
  CHECK(std::isfinite(ts));
  for (double s = 0.01; s < ts; s += 0.01) CHECK(contraction_delta(L, lam, s + 0.005) < contraction_delta(L, lam, s));
  for (double l = 1.0; l < 50.0; l += 1.0) CHECK(contraction_delta(L, l + 0.5, 0.2) < contraction_delta(L, l, 0.2));
  // Small L t: the tail term dominates and tends to L / (L + lambda).
  CHECK(contraction_delta(1e-4, 5.0, 20.0) == doctest::Approx(1e-4 / (1e-4 + 5.0)).epsilon(1e-3));
  CHECK(contraction_critical_time(0.0, 3.0) == kInfinity);
  CHECK_THROWS(contraction_delta(-1.0, 1.0, 1.0));
  CHECK_THROWS(contraction_delta(1.0, 1.0, 0.0));
}

TEST_CASE("abstract bound") {
  const AbstractBound b = abstract_bound(2.0, 0.1, 3);
  const double ratio = std::log(sqrt2 * 0.1) / std::log(sqrt2 * 12.0);
  CHECK(b.printed == doctest::Approx(3 * (1 - ratio)).epsilon(1e-15));
  CHECK(b.printed == doctest::Approx(5.07).epsilon(1e-3));
  CHECK(b.eta == doctest::Approx(3 / -ratio).epsilon(1e-15));
  CHECK(b.bound == doctest::Approx(3 + b.eta));
  // sigma = 1 at the closed-form eta.
  CHECK(3 * std::log(sqrt2 * 12.0) + b.eta * std::log(sqrt2 * 0.1) == doctest::Approx(0.0).scale(1.0));

  CHECK(abstract_bound(2.0, 1e-300, 3).bound == doctest::Approx(3.0).epsilon(1e-2));
  CHECK_THROWS_AS(abstract_bound(2.0, 1 / sqrt2, 3), std::domain_error);
  CHECK_THROWS_AS(abstract_bound(0.5, 0.1, 3), std::domain_error);

  for (double l : {1.0, 2.0, 7.5}) {
    for (double delta : {1e-6, 0.01, 0.3, 0.7}) {
      for (std::size_t N : {1u, 3u, 40u}) {
        const double closed = abstract_bound(l, delta, N).eta;
        CHECK(std::abs(eta_by_search(l, delta, N) - closed) <= 1e-12 * std::max(1.0, closed));
      }
    }
  }
}

TEST_CASE("search bound") {
  const auto table = laplacian_spectrum(fixture::unit_interval(), 2000);
  const auto grid = log_time_grid(1e-3, 10.0, 200);
  CHECK(grid.size() == 200);
  CHECK(grid.front() == doctest::Approx(1e-3));
  CHECK(grid.back() == doctest::Approx(10.0));

  const SearchResult triv = search_bound(0.5, table, grid, 100);
  CHECK(triv.trivial);
  CHECK(triv.bound == 0.0);

  const SearchResult r = search_bound(2.0, table, grid, 200);
  REQUIRE(r.feasible);
  CHECK(std::isfinite(r.bound));
  CHECK(r.delta < 1 / sqrt2);
  CHECK(r.sigma < 1.0);
  CHECK(r.l == doctest::Approx(std::exp(2.0 * r.t)));
  CHECK(r.lambda_next == table.at(r.N + 1));

  double prev = kInfinity;
  for (std::size_t n : {5u, 20u, 100u, 400u}) {
    const SearchResult s = search_bound(2.0, table, grid, n);
    if (s.feasible) {
      CHECK(s.bound <= prev);
      prev = s.bound;
    }
  }

  const SearchResult none = search_bound(2.0, table, grid, 1);
  CHECK_FALSE(none.feasible);
  CHECK_FALSE(none.binding.empty());
}

TEST_CASE("closed-form route") {
  const auto table = laplacian_spectrum(fixture::unit_interval(), 20000);
  const double D = weyl_constant(table);
  const ClosedFormRoute p = closed_form_constants(2.0, table, D);
  CHECK(p.K == doctest::Approx((24 * 25 - 1) / D));
  CHECK(p.N == static_cast<std::size_t>(std::floor(std::sqrt(p.K * 2.0))));
  CHECK(p.t == doctest::Approx(std::log(24.0) / (table.at(p.N + 1) - 2.0)));
  CHECK(p.half_check == doctest::Approx(0.5));
  CHECK(p.tail_check <= p.tail_limit);
  CHECK(p.twelve_l_delta < 1.0);
  CHECK(p.satisfied);
  CHECK(p.two_n == 2.0 * p.N);
  CHECK(p.bound >= p.two_n);

  const ClosedFormRoute triv = closed_form_constants(0.3, table, D);
  CHECK(triv.trivial);
  CHECK(triv.bound == 0.0);

  for (double L : {1.0, 2.0, 3.5, 10.0}) {
    const ClosedFormRoute a = closed_form_constants(L, table, D), b = closed_form_constants(2 * L, table, D);
    CHECK(std::abs(b.bound / a.bound - sqrt2) <= 1e-12);
    const SearchResult s = search_bound(L, table, log_time_grid(1e-3, 10.0, 200), 5000);
    CHECK(s.bound <= a.bound);
  }

  // In 2D the law is linear in L.
  const auto sq = laplacian_spectrum(BoxDomain::rectangle(pi, pi, 15, 15), 20000);
  const double D2 = weyl_constant(sq);
  CHECK(closed_form_constants(8.0, sq, D2).bound / closed_form_constants(4.0, sq, D2).bound == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("box counting on known sets") {
  std::vector<std::vector<double>> point(2000, {0.3, -1.0, 2.0});
  const BoxCount p = box_counting(point);
  CHECK(p.decided);
  CHECK(p.slope == 0.0);

  CounterRng rng(77, "box");
  std::vector<std::vector<double>> seg, sheet;
  for (int i = 0; i < 40000; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    if (i < 4000) seg.push_back({a, 2 * a, -a});
    sheet.push_back({a, b, a + b});
  }
  const BoxCount s = box_counting(seg);
  CHECK(s.decided);
  CHECK(s.slope == doctest::Approx(1.0).epsilon(1e-12));
  const BoxCount q = box_counting(sheet);
  CHECK(q.decided);
  CHECK(q.slope == doctest::Approx(2.0).epsilon(0.1));

  std::vector<std::vector<double>> few(20, {0.0});
  for (int i = 0; i < 20; ++i) few[i][0] = i;
  CHECK_FALSE(box_counting(few).decided);
}

TEST_CASE("box counting on a field segment") {
  const auto d = fixture::unit_interval();
  std::vector<Field> arc;
  for (int i = 0; i <= 2000; ++i) {
    const double s = -1.0 + i / 1000.0;
    arc.push_back(Field::mode(d, {1, 1}, 1.1 * s) + Field::mode(d, {3, 1}, 0.05 * s * s));
  }
  const BoxCount b = box_counting(arc, 8);
  CHECK(b.decided);
  CHECK(b.slope == doctest::Approx(1.0).epsilon(0.2));
}
