#include "rdlab/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rdlab {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key_(mix64(seed ^ mix64(fnv1a(stream)))) {}

CounterRng CounterRng::substream(std::uint64_t index) const {
  return CounterRng(mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL)), 0, 0);
}

std::uint64_t CounterRng::next_u64() { return mix64(key_ ^ mix64(counter_++)); }

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Field random_field(const BoxDomain& domain, CounterRng& rng, double l2_norm, double decay,
                   int max_mode) {
  domain.validate();
  if (!(l2_norm >= 0.0)) throw std::invalid_argument("random_field: norm must be nonnegative");
  std::vector<double> coeffs(domain.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto k = domain.mode(i);
    bool active = true;
    double radius2 = 0.0;
    for (int a = 0; a < domain.dim; ++a) {
      active = active && k[a] <= max_mode;
      radius2 += static_cast<double>(k[a]) * k[a];
    }
    if (!active) continue;
    coeffs[i] = rng.normal() * std::pow(radius2, -0.5 * decay);
    sum += coeffs[i] * coeffs[i];
  }
  const double current = std::sqrt(sum * domain.mode_weight());
  if (current > 0.0) {
    for (auto& c : coeffs) c *= l2_norm / current;
  }
  return Field::from_coeffs(domain, std::move(coeffs));
}

}  // namespace rdlab
