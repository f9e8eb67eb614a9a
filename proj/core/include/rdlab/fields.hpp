#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rdlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Axis-aligned box (0, l_1) x ... x (0, l_d) with n_i interior nodes per axis.
struct BoxDomain {
  int dim = 1;
  std::array<double, 2> lengths{3.14159265358979323846, 3.14159265358979323846};
  std::array<int, 2> resolution{63, 63};

  static BoxDomain interval(double length, int nodes);
  static BoxDomain rectangle(double lx, double ly, int nx, int ny);

  /// Throws std::invalid_argument unless dim is 1 or 2, lengths > 0, n_i >= 8.
  void validate() const;

  std::size_t size() const;
  std::vector<int> shape() const;
  double measure() const;
  /// Product of grid spacings l_i / (n_i + 1); the nodal quadrature weight.
  double cell_volume() const;
  /// |Omega| / 2^d, so that ||u||_2^2 = mode_weight() * sum a_k^2.
  double mode_weight() const;
  /// Dirichlet Laplacian eigenvalue sum_i (k_i pi / l_i)^2 of a flat mode index.
  double eigenvalue(std::size_t flat_mode) const;
  std::vector<double> eigenvalues() const;
  /// 1-based mode multi-index of a flat index.
  std::array<int, 2> mode(std::size_t flat_mode) const;
  /// Coordinates of a flat node index.
  std::array<double, 2> node(std::size_t flat_node) const;

  bool operator==(const BoxDomain& other) const;
};

/// Dirichlet-zero scalar field held both as sine coefficients and as values
/// at the interior collocation nodes. Immutable once built.
class Field {
 public:
  Field() = default;

  static Field zero(const BoxDomain& domain);
  static Field from_coeffs(const BoxDomain& domain, std::vector<double> coeffs);
  static Field from_nodal(const BoxDomain& domain, std::vector<double> nodal);
  /// Samples fn at the nodes; fn receives (x, y) with y = 0 in 1D.
  static Field from_function(const BoxDomain& domain,
                             const std::function<double(double, double)>& fn);
  /// Single eigenmode with the given 1-based multi-index and amplitude.
  static Field mode(const BoxDomain& domain, std::array<int, 2> k, double amplitude = 1.0);

  const BoxDomain& domain() const { return domain_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<const double> nodal() const { return nodal_; }
  std::size_t size() const { return coeffs_.size(); }

  Field operator+(const Field& other) const;
  Field operator-(const Field& other) const;
  Field operator*(double scale) const;

 private:
  Field(BoxDomain domain, std::vector<double> coeffs, std::vector<double> nodal);

  BoxDomain domain_;
  std::vector<double> coeffs_;
  std::vector<double> nodal_;
};

inline Field operator*(double scale, const Field& u) { return u * scale; }

/// Nodal-quadrature approximation of (int |u|^m)^(1/m); m = kInfinity gives the
/// nodal max, which can only under-estimate the true sup-norm.
double lp_norm(const Field& u, double m);
double lp_norm(std::span<const double> nodal, const BoxDomain& domain, double m);

double l2_inner(const Field& u, const Field& v);
double l2_distance(const Field& u, const Field& v);
/// (grad u, grad v) evaluated exactly in the sine basis.
double h1_inner(const Field& u, const Field& v);
double h1_seminorm(const Field& u);

/// T_k u: clamp nodal values to [-k, k]. Throws for k <= 0.
Field truncate(const Field& u, double k);
double truncate(double s, double k);
Field positive_part(const Field& u);
Field negative_part(const Field& u);

/// phi_{k,m}(s) = int_0^s T_k(r)^{2m-1} dr.
double phi_km(double s, double k, double m);
/// Phi_{k,m}(u) = int phi_{k,m}(u(x)) dx by nodal quadrature.
double big_phi(const Field& u, double k, double m);

/// Flat little-endian layout: dim, n_1..n_d (int64), l_1..l_d (float64), then
/// the coefficients row-major (float64).
void write_binary(std::ostream& out, const Field& u);
Field read_binary(std::istream& in);
/// "index,coefficient" rows, index being the 1-based mode multi-index joined by ':'.
void write_csv(std::ostream& out, const Field& u);

}  // namespace rdlab
