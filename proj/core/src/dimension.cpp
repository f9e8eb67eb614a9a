#include "rdlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace rdlab {

namespace {
const double kSqrt2 = std::numbers::sqrt2;
// Box sizes entering the box-counting fit.
constexpr std::size_t kFitScales = 4;
}

SpectrumTable laplacian_spectrum(const BoxDomain& domain, std::size_t count) {
  if (count < 1) throw std::invalid_argument("laplacian_spectrum: count must be >= 1");
  SpectrumTable table;
  table.domain = domain;
  auto value = [&](long n1, long n2) {
    double lambda = 0.0;
    const long k[2] = {n1, n2};
    for (int i = 0; i < domain.dim; ++i) {
      const double w = static_cast<double>(k[i]) * std::numbers::pi / domain.lengths[i];
      lambda += w * w;
    }
    return lambda;
  };
  if (domain.dim == 1) {
    for (std::size_t n = 1; n <= count; ++n) table.eigenvalues.push_back(value(static_cast<long>(n), 0));
  } else {
    const double w1 = std::numbers::pi / domain.lengths[0];
    const double w2 = std::numbers::pi / domain.lengths[1];
    double cutoff = (w1 * w1 + w2 * w2) * static_cast<double>(count);
    for (;;) {
      std::vector<double> vals;
      const long n1max = static_cast<long>(std::sqrt(cutoff) / w1) + 1;
      for (long n1 = 1; n1 <= n1max; ++n1) {
        const double rest = cutoff - (n1 * w1) * (n1 * w1);
        if (rest < 0.0) break;
        const long n2max = static_cast<long>(std::sqrt(rest) / w2) + 1;
        for (long n2 = 1; n2 <= n2max; ++n2) {
          const double v = value(n1, n2);
          if (v <= cutoff) vals.push_back(v);
        }
      }
      if (vals.size() >= count) {
        std::sort(vals.begin(), vals.end());
        vals.resize(count);
        table.eigenvalues = std::move(vals);
        break;
      }
      cutoff *= 2.0;
    }
  }
  for (double v : table.eigenvalues) {
    if (!table.distinct.empty() &&
        std::abs(table.distinct.back().first - v) <= 1e-12 * std::max(1.0, v)) {
      ++table.distinct.back().second;
    } else {
      table.distinct.emplace_back(v, 1);
    }
  }
  return table;
}

double weyl_constant(const SpectrumTable& table) {
  const std::size_t n = std::min<std::size_t>(table.size(), 10000);
  if (n == 0) throw std::invalid_argument("weyl_constant: empty spectrum");
  const double e = 2.0 / table.domain.dim;
  double D = kInfinity;
  for (std::size_t N = 1; N <= n; ++N) {
    D = std::min(D, table.at(N) / std::pow(static_cast<double>(N), e));
  }
  return D;
}

double contraction_delta(double L, double lambda_next, double t) {
  if (!(L >= 0.0) || !(lambda_next > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("contraction_delta: need L >= 0, lambda > 0, t > 0");
  }
  return std::exp(-lambda_next * t) + L * std::exp(L * t) / (L + lambda_next);
}

double contraction_critical_time(double L, double lambda_next) {
  if (L <= 0.0) return kInfinity;
  return std::log(lambda_next * (L + lambda_next) / (L * L)) / (L + lambda_next);
}

AbstractBound abstract_bound(double l, double delta, std::size_t N) {
  if (!(l >= 1.0)) throw std::domain_error("abstract_bound: l must be >= 1");
  if (!(delta > 0.0) || !(kSqrt2 * delta < 1.0)) {
    throw std::domain_error("abstract_bound: delta must lie in (0, 1/sqrt2)");
  }
  const double a = std::log(kSqrt2 * 6.0 * l);
  const double b = std::log(kSqrt2 * delta);
  AbstractBound out;
  out.eta = static_cast<double>(N) * a / (-b);
  out.bound = static_cast<double>(N) + out.eta;
  out.printed = static_cast<double>(N) * (1.0 - b / a);
  return out;
}

double eta_by_search(double l, double delta, std::size_t N) {
  if (!(l >= 1.0)) throw std::domain_error("eta_by_search: l must be >= 1");
  if (!(delta > 0.0) || !(kSqrt2 * delta < 1.0)) {
    throw std::domain_error("eta_by_search: delta must lie in (0, 1/sqrt2)");
  }
  const double a = static_cast<double>(N) * std::log(kSqrt2 * 6.0 * l);
  const double b = std::log(kSqrt2 * delta);
  auto log_sigma = [&](double eta) { return a + eta * b; };
  double lo = 0.0, hi = 1.0;
  while (log_sigma(hi) >= 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (log_sigma(mid) >= 0.0 ? lo : hi) = mid;
  }
  return hi;
}

std::vector<double> log_time_grid(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) {
    throw std::invalid_argument("log_time_grid: need 0 < t_min < t_max and count >= 2");
  }
  std::vector<double> out(count);
  const double r = std::log(t_max / t_min);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t_min * std::exp(r * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

SearchResult search_bound(double L, const SpectrumTable& spectrum, std::span<const double> t_grid,
                          std::size_t N_max) {
  SearchResult best;
  if (spectrum.size() == 0) throw std::invalid_argument("search_bound: empty spectrum");
  if (spectrum.at(1) > L) {
    best.feasible = true;
    best.trivial = true;
    return best;
  }
  if (spectrum.size() < 2) {
    best.binding = "spectrum too short";
    return best;
  }
  N_max = std::min(N_max, spectrum.size() - 1);
  std::vector<double> ts(t_grid.begin(), t_grid.end());
  std::sort(ts.begin(), ts.end());
  best.bound = kInfinity;
  for (std::size_t N = 1; N <= N_max; ++N) {
    if (static_cast<double>(N) >= best.bound) break;
    const double lam = spectrum.at(N + 1);
    for (double t : ts) {
      if (!(t > 0.0)) continue;
      const double delta = contraction_delta(L, lam, t);
      if (!(kSqrt2 * delta < 1.0)) continue;
      const double l = std::exp(L * t);
      const AbstractBound ab = abstract_bound(l, delta, N);
      if (ab.bound < best.bound) {
        best.feasible = true;
        best.N = N;
        best.t = t;
        best.lambda_next = lam;
        best.l = l;
        best.delta = delta;
        best.eta = ab.eta;
        best.bound = ab.bound;
      }
    }
  }
  if (!best.feasible) {
    best.bound = 0.0;
    best.binding = "delta(t, N) >= 1/sqrt2 on the whole grid";
    return best;
  }
  const double eta = best.eta * (1.0 + 1e-9) + 1e-12;
  best.sigma = std::exp(static_cast<double>(best.N) * std::log(kSqrt2 * 6.0 * best.l) +
                        eta * std::log(kSqrt2 * best.delta));
  return best;
}

ClosedFormRoute closed_form_constants(double L, const SpectrumTable& spectrum, double D_asym,
                           double alpha_slack) {
  if (!(alpha_slack > 0.0)) throw std::invalid_argument("closed_form_constants: alpha_slack must be positive");
  if (!(D_asym > 0.0)) throw std::invalid_argument("closed_form_constants: D_asym must be positive");
  const int d = spectrum.domain.dim;
  ClosedFormRoute out;
  out.K = (24.0 * (24.0 + alpha_slack) - 1.0) / D_asym;
  out.C = 2.0 * std::pow(out.K, 0.5 * d);
  out.tail_limit = 1.0 / (24.0 + alpha_slack);
  if (spectrum.at(1) >= 3.0 * L) {
    out.trivial = true;
    out.satisfied = true;
    return out;
  }
  out.bound = out.C * std::pow(L, 0.5 * d);
  out.N = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(out.K * L, 0.5 * d))));
  out.two_n = 2.0 * static_cast<double>(out.N);
  if (out.N + 1 > spectrum.size()) {
    out.diagnostic = "spectrum table shorter than N + 1";
    return out;
  }
  out.lambda_next = spectrum.at(out.N + 1);
  if (!(out.lambda_next > L)) {
    out.diagnostic = "lambda_{N+1} <= L";
    return out;
  }
  out.t = std::log(24.0) / (out.lambda_next - L);
  out.l = std::exp(L * out.t);
  out.delta = contraction_delta(L, out.lambda_next, out.t);
  out.half_check = 12.0 * std::exp((L - out.lambda_next) * out.t);
  out.tail_check = L * std::exp(2.0 * L * out.t) / (L + out.lambda_next);
  out.twelve_l_delta = 12.0 * out.l * out.delta;
  const bool half_ok = std::abs(out.half_check - 0.5) <= 1e-12;
  const bool tail_ok = out.tail_check <= out.tail_limit;
  out.satisfied = half_ok && tail_ok && out.twelve_l_delta < 1.0;
  if (!half_ok) out.diagnostic = "12 e^{(L - lambda) t} != 1/2";
  else if (!tail_ok) out.diagnostic = "L e^{2Lt} / (L + lambda) > 1 / (24 + alpha)";
  else if (!(out.twelve_l_delta < 1.0)) out.diagnostic = "12 l delta >= 1";
  return out;
}

BoxCount box_counting(const std::vector<std::vector<double>>& points,
                      std::span<const double> eps_grid) {
  BoxCount out;
  if (points.empty()) throw std::invalid_argument("box_counting: empty sample");
  const std::size_t dim = points.front().size();
  std::vector<double> lo(dim, kInfinity), hi(dim, -kInfinity);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  double extent = 0.0;
  for (std::size_t i = 0; i < dim; ++i) extent = std::max(extent, hi[i] - lo[i]);
  if (!(extent > 0.0)) {
    // All points coincide.
    out.decided = true;
    return out;
  }
  if (eps_grid.empty()) {
    for (int k = 1; k <= 16; ++k) out.eps.push_back(extent * std::ldexp(1.0, -k));
  } else {
    out.eps.assign(eps_grid.begin(), eps_grid.end());
  }

  const double saturation = static_cast<double>(points.size()) / 10.0;
  std::vector<double> xs, ys;
  for (double eps : out.eps) {
    std::set<std::vector<long long>> boxes;
    std::vector<long long> key(dim);
    for (const auto& p : points) {
      for (std::size_t i = 0; i < dim; ++i) {
        // The sample maximum belongs to the last box, not a new one.
        const auto cells = std::max(1LL, static_cast<long long>(std::ceil((hi[i] - lo[i]) / eps - 1e-9)));
        key[i] = std::min(cells - 1, static_cast<long long>(std::floor((p[i] - lo[i]) / eps)));
      }
      boxes.insert(key);
    }
    const std::size_t n = boxes.size();
    out.counts.push_back(n);
    out.usable.push_back(n >= 4 && static_cast<double>(n) <= saturation);
  }
  // Coarse boxes carry an edge term of relative size eps, so only the finest
  // usable scales enter the fit.
  std::size_t kept = 0;
  for (std::size_t j = out.eps.size(); j-- > 0;) {
    if (!out.usable[j]) continue;
    if (kept == kFitScales) {
      out.usable[j] = false;
      continue;
    }
    ++kept;
    xs.push_back(std::log(1.0 / out.eps[j]));
    ys.push_back(std::log(static_cast<double>(out.counts[j])));
  }
  if (xs.size() < 3) return out;
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - my - out.slope * (xs[i] - mx);
    rss += r * r;
  }
  out.stderr_ = std::sqrt(rss / (m - 2.0) / sxx);
  out.decided = true;
  return out;
}

BoxCount box_counting(std::span<const Field> sample, std::size_t modes,
                      std::span<const double> eps_grid) {
  if (sample.empty()) throw std::invalid_argument("box_counting: empty sample");
  if (modes < 1) throw std::invalid_argument("box_counting: need at least one projection mode");
  const std::size_t k = std::min(modes, sample.front().size());
  const double w = std::sqrt(sample.front().domain().mode_weight());
  std::vector<std::vector<double>> points;
  points.reserve(sample.size());
  for (const auto& u : sample) {
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = u.coeffs()[i] * w;
    points.push_back(std::move(p));
  }
  return box_counting(points, eps_grid);
}

nlohmann::json to_json(const DimensionReport& report) {
  using nlohmann::json;
  const auto& s = report.search;
  const auto& p = report.closed_form;
  json out = {
      {"R", report.R},
      {"L", report.L},
      {"D_asym", report.D_asym},
      {"search",
       {{"feasible", s.feasible},
        {"trivial", s.trivial},
        {"binding", s.binding},
        {"N", s.N},
        {"t", s.t},
        {"lambda_next", s.lambda_next},
        {"l", s.l},
        {"delta", s.delta},
        {"eta", s.eta},
        {"sigma", s.sigma},
        {"bound", s.bound}}},
      {"closed_form",
       {{"K", p.K},
        {"C", p.C},
        {"N", p.N},
        {"t", p.t},
        {"lambda_next", p.lambda_next},
        {"l", p.l},
        {"delta", p.delta},
        {"half_check", p.half_check},
        {"tail_check", p.tail_check},
        {"tail_limit", p.tail_limit},
        {"twelve_l_delta", p.twelve_l_delta},
        {"satisfied", p.satisfied},
        {"trivial", p.trivial},
        {"two_n", p.two_n},
        {"bound", p.bound},
        {"diagnostic", p.diagnostic}}}};
  if (report.box) {
    const auto& b = *report.box;
    out["box_counting"] = {{"eps", b.eps},     {"counts", b.counts}, {"usable", b.usable},
                           {"slope", b.slope}, {"stderr", b.stderr_}, {"decided", b.decided}};
  } else {
    out["box_counting"] = nullptr;
  }
  return out;
}

}  // namespace rdlab
