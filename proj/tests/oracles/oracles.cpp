#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double shoot(double lambda, double s, double length, int steps) {
  double z = 0.0, v = s;
  const double h = length / steps;
  auto acc = [lambda](double q) { return q * q * q - lambda * q; };
  for (int i = 0; i < steps; ++i) {
    const double k1z = v, k1v = acc(z);
    const double k2z = v + 0.5 * h * k1v, k2v = acc(z + 0.5 * h * k1z);
    const double k3z = v + 0.5 * h * k2v, k3v = acc(z + 0.5 * h * k2z);
    const double k4z = v + h * k3v, k4v = acc(z + h * k3z);
    z += h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return z;
}

namespace {

// Orbits are parametrized by their peak A in (0, sqrt(lambda)); the slope at
// x = 0 follows from energy conservation, s^2 = lambda A^2 - A^4 / 2. Points
// cluster toward the separatrix, where the one-hump solution of long
// intervals sits.
std::vector<double> peak_grid(double lambda) {
  const double top = std::sqrt(lambda);
  std::vector<double> out;
  const int linear = 3000;
  for (int i = 1; i < linear; ++i) out.push_back(top * i / linear);
  for (int i = 1; i <= 1200; ++i) {
    out.push_back(top * (1.0 - std::pow(10.0, -std::log10(linear) - 0.01 * i)));
  }
  return out;
}

double slope_for_peak(double lambda, double A) {
  return std::sqrt(std::max(0.0, lambda * A * A - 0.5 * A * A * A * A));
}

std::vector<std::pair<double, double>> brackets(double lambda, double length) {
  const auto A = peak_grid(lambda);
  std::vector<std::pair<double, double>> out;
  double prev = shoot(lambda, slope_for_peak(lambda, A.front()), length);
  for (std::size_t i = 1; i < A.size(); ++i) {
    const double cur = shoot(lambda, slope_for_peak(lambda, A[i]), length);
    if ((prev < 0.0) != (cur < 0.0)) out.emplace_back(A[i - 1], A[i]);
    prev = cur;
  }
  return out;
}

}  // namespace

int chafee_infante_count(double lambda, double length) {
  if (lambda <= 0.0) return 1;
  return 2 * static_cast<int>(brackets(lambda, length).size()) + 1;
}

double chafee_infante_amplitude(double lambda, double length) {
  if (lambda <= 0.0) return 0.0;
  const auto roots = brackets(lambda, length);
  if (roots.empty()) return 0.0;
  // The largest peak is the one-hump solution.
  auto [a, b] = roots.back();
  double fa = shoot(lambda, slope_for_peak(lambda, a), length);
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = shoot(lambda, slope_for_peak(lambda, m), length);
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

double heat_l2(const std::vector<double>& coeffs, double c, double t) {
  const double pi = 3.14159265358979323846;
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double a = coeffs[i] * std::exp(-(k * k + c) * t);
    s += a * a;
  }
  return std::sqrt(s * pi / 2.0);
}

}  // namespace oracle
