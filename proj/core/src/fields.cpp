#include "rdlab/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rdlab/sine_transform.hpp"

namespace rdlab {

BoxDomain BoxDomain::interval(double length, int nodes) {
  BoxDomain d;
  d.dim = 1;
  d.lengths = {length, length};
  d.resolution = {nodes, nodes};
  d.validate();
  return d;
}

BoxDomain BoxDomain::rectangle(double lx, double ly, int nx, int ny) {
  BoxDomain d;
  d.dim = 2;
  d.lengths = {lx, ly};
  d.resolution = {nx, ny};
  d.validate();
  return d;
}

void BoxDomain::validate() const {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("BoxDomain: dim must be 1 or 2, got " + std::to_string(dim));
  }
  for (int i = 0; i < dim; ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
      throw std::invalid_argument("BoxDomain: lengths must be positive and finite");
    }
    if (resolution[i] < 8) {
      throw std::invalid_argument("BoxDomain: resolution must be at least 8 nodes per axis");
    }
  }
}

std::size_t BoxDomain::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(resolution[i]);
  return n;
}

std::vector<int> BoxDomain::shape() const {
  return std::vector<int>(resolution.begin(), resolution.begin() + dim);
}

double BoxDomain::measure() const {
  double m = 1.0;
  for (int i = 0; i < dim; ++i) m *= lengths[i];
  return m;
}

double BoxDomain::cell_volume() const {
  double h = 1.0;
  for (int i = 0; i < dim; ++i) h *= lengths[i] / (resolution[i] + 1);
  return h;
}

double BoxDomain::mode_weight() const { return measure() / static_cast<double>(1 << dim); }

std::array<int, 2> BoxDomain::mode(std::size_t flat) const {
  if (dim == 1) return {static_cast<int>(flat) + 1, 0};
  const auto n2 = static_cast<std::size_t>(resolution[1]);
  return {static_cast<int>(flat / n2) + 1, static_cast<int>(flat % n2) + 1};
}

double BoxDomain::eigenvalue(std::size_t flat) const {
  const auto k = mode(flat);
  double lambda = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double w = k[i] * std::numbers::pi / lengths[i];
    lambda += w * w;
  }
  return lambda;
}

std::vector<double> BoxDomain::eigenvalues() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eigenvalue(i);
  return out;
}

std::array<double, 2> BoxDomain::node(std::size_t flat) const {
  const auto j = mode(flat);  // same row-major indexing as modes
  std::array<double, 2> x{0.0, 0.0};
  for (int i = 0; i < dim; ++i) x[i] = j[i] * lengths[i] / (resolution[i] + 1);
  return x;
}

bool BoxDomain::operator==(const BoxDomain& o) const {
  if (dim != o.dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (lengths[i] != o.lengths[i] || resolution[i] != o.resolution[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Field::Field(BoxDomain domain, std::vector<double> coeffs, std::vector<double> nodal)
    : domain_(domain), coeffs_(std::move(coeffs)), nodal_(std::move(nodal)) {}

Field Field::zero(const BoxDomain& domain) {
  domain.validate();
  return Field(domain, std::vector<double>(domain.size(), 0.0),
               std::vector<double>(domain.size(), 0.0));
}

Field Field::from_coeffs(const BoxDomain& domain, std::vector<double> coeffs) {
  domain.validate();
  if (coeffs.size() != domain.size()) {
    throw std::invalid_argument("Field::from_coeffs: coefficient count does not match domain");
  }
  const auto shape = domain.shape();
  std::vector<double> nodal(coeffs.size());
  sine_transform(shape).to_nodal(coeffs, nodal);
  return Field(domain, std::move(coeffs), std::move(nodal));
}

Field Field::from_nodal(const BoxDomain& domain, std::vector<double> nodal) {
  domain.validate();
  if (nodal.size() != domain.size()) {
    throw std::invalid_argument("Field::from_nodal: node count does not match domain");
  }
  const auto shape = domain.shape();
  std::vector<double> coeffs(nodal.size());
  sine_transform(shape).to_coeffs(nodal, coeffs);
  return Field(domain, std::move(coeffs), std::move(nodal));
}

Field Field::from_function(const BoxDomain& domain,
                           const std::function<double(double, double)>& fn) {
  domain.validate();
  std::vector<double> nodal(domain.size());
  for (std::size_t i = 0; i < nodal.size(); ++i) {
    const auto x = domain.node(i);
    nodal[i] = fn(x[0], x[1]);
  }
  return from_nodal(domain, std::move(nodal));
}

Field Field::mode(const BoxDomain& domain, std::array<int, 2> k, double amplitude) {
  domain.validate();
  std::vector<double> coeffs(domain.size(), 0.0);
  for (int i = 0; i < domain.dim; ++i) {
    if (k[i] < 1 || k[i] > domain.resolution[i]) {
      throw std::invalid_argument("Field::mode: mode index outside the resolved range");
    }
  }
  const std::size_t flat = domain.dim == 1 ? static_cast<std::size_t>(k[0] - 1)
                                           : static_cast<std::size_t>(k[0] - 1) * domain.resolution[1] +
                                                 static_cast<std::size_t>(k[1] - 1);
  coeffs[flat] = amplitude;
  return from_coeffs(domain, std::move(coeffs));
}

namespace {
void require_same_domain(const Field& a, const Field& b, const char* what) {
  if (!(a.domain() == b.domain())) {
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
  }
}
}  // namespace

Field Field::operator+(const Field& o) const {
  require_same_domain(*this, o, "Field::operator+");
  std::vector<double> c(coeffs_.size()), v(nodal_.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = coeffs_[i] + o.coeffs_[i];
    v[i] = nodal_[i] + o.nodal_[i];
  }
  return Field(domain_, std::move(c), std::move(v));
}

Field Field::operator-(const Field& o) const {
  require_same_domain(*this, o, "Field::operator-");
  std::vector<double> c(coeffs_.size()), v(nodal_.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = coeffs_[i] - o.coeffs_[i];
    v[i] = nodal_[i] - o.nodal_[i];
  }
  return Field(domain_, std::move(c), std::move(v));
}

Field Field::operator*(double s) const {
  std::vector<double> c(coeffs_), v(nodal_);
  for (auto& x : c) x *= s;
  for (auto& x : v) x *= s;
  return Field(domain_, std::move(c), std::move(v));
}

// ---------------------------------------------------------------------------

double lp_norm(std::span<const double> nodal, const BoxDomain& domain, double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  double peak = 0.0;
  for (double x : nodal) {
    if (!std::isfinite(x)) throw std::domain_error("lp_norm: non-finite nodal value");
    peak = std::max(peak, std::abs(x));
  }
  if (std::isinf(m) || peak == 0.0) return peak;
  // Scale by the peak so that large exponents neither overflow nor underflow.
  double sum = 0.0;
  for (double x : nodal) sum += std::pow(std::abs(x) / peak, m);
  return peak * std::pow(sum * domain.cell_volume(), 1.0 / m);
}

double lp_norm(const Field& u, double m) { return lp_norm(u.nodal(), u.domain(), m); }

double l2_inner(const Field& u, const Field& v) {
  require_same_domain(u, v, "l2_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u.coeffs()[i] * v.coeffs()[i];
  return s * u.domain().mode_weight();
}

double l2_distance(const Field& u, const Field& v) {
  require_same_domain(u, v, "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u.coeffs()[i] - v.coeffs()[i];
    s += d * d;
  }
  return std::sqrt(s * u.domain().mode_weight());
}

double h1_inner(const Field& u, const Field& v) {
  require_same_domain(u, v, "h1_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += u.domain().eigenvalue(i) * u.coeffs()[i] * v.coeffs()[i];
  }
  return s * u.domain().mode_weight();
}

double h1_seminorm(const Field& u) { return std::sqrt(h1_inner(u, u)); }

double truncate(double s, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: level k must be positive");
  if (std::abs(s) <= k) return s;
  return s > 0.0 ? k : -k;
}

Field truncate(const Field& u, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  std::vector<double> v(u.nodal().begin(), u.nodal().end());
  for (auto& x : v) x = truncate(x, k);
  return Field::from_nodal(u.domain(), std::move(v));
}

Field positive_part(const Field& u) {
  std::vector<double> v(u.nodal().begin(), u.nodal().end());
  for (auto& x : v) x = std::max(x, 0.0);
  return Field::from_nodal(u.domain(), std::move(v));
}

Field negative_part(const Field& u) {
  std::vector<double> v(u.nodal().begin(), u.nodal().end());
  for (auto& x : v) x = -std::min(x, 0.0);
  return Field::from_nodal(u.domain(), std::move(v));
}

double phi_km(double s, double k, double m) {
  if (!(s >= 0.0)) throw std::invalid_argument("phi_km: argument must be nonnegative");
  if (!(k > 0.0)) throw std::invalid_argument("phi_km: level must be positive");
  if (!(m >= 1.0)) throw std::invalid_argument("phi_km: exponent must be >= 1");
  const double two_m = 2.0 * m;
  if (s <= k) return std::pow(s, two_m) / two_m;
  return std::pow(k, two_m) / two_m + (s - k) * std::pow(k, two_m - 1.0);
}

double big_phi(const Field& u, double k, double m) {
  double sum = 0.0;
  for (double x : u.nodal()) {
    if (!std::isfinite(x)) throw std::domain_error("big_phi: non-finite nodal value");
    sum += phi_km(x, k, m);
  }
  return sum * u.domain().cell_volume();
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("read_binary: truncated field stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_binary(std::ostream& out, const Field& u) {
  const auto& d = u.domain();
  put_le<std::int64_t>(out, d.dim);
  for (int i = 0; i < d.dim; ++i) put_le<std::int64_t>(out, d.resolution[i]);
  for (int i = 0; i < d.dim; ++i) put_le<double>(out, d.lengths[i]);
  for (double c : u.coeffs()) put_le<double>(out, c);
}

Field read_binary(std::istream& in) {
  BoxDomain d;
  const auto dim = get_le<std::int64_t>(in);
  if (dim != 1 && dim != 2) throw std::runtime_error("read_binary: unsupported dimension");
  d.dim = static_cast<int>(dim);
  for (int i = 0; i < d.dim; ++i) d.resolution[i] = static_cast<int>(get_le<std::int64_t>(in));
  for (int i = 0; i < d.dim; ++i) d.lengths[i] = get_le<double>(in);
  if (d.dim == 1) {
    d.resolution[1] = d.resolution[0];
    d.lengths[1] = d.lengths[0];
  }
  d.validate();
  std::vector<double> coeffs(d.size());
  for (auto& c : coeffs) c = get_le<double>(in);
  return Field::from_coeffs(d, std::move(coeffs));
}

void write_csv(std::ostream& out, const Field& u) {
  const auto& d = u.domain();
  std::ostringstream line;
  line.precision(17);
  out << "index,coefficient\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto k = d.mode(i);
    line.str("");
    line << k[0];
    if (d.dim == 2) line << ':' << k[1];
    line << ',' << u.coeffs()[i] << '\n';
    out << line.str();
  }
}

}  // namespace rdlab
