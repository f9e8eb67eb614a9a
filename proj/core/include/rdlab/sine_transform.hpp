#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdlab {

/// Type-I discrete sine transform on the interior nodes of a box.
///
/// Nodes are x_j = j * l / (n + 1), j = 1..n, per axis. Coefficients a_k,
/// k = 1..n, represent u(x) = sum_k a_k prod_i sin(k_i pi x_i / l_i). Both
/// arrays are stored row-major with the last axis fastest.
class SineTransform {
 public:
  explicit SineTransform(std::vector<int> shape);
  ~SineTransform();

  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  void to_nodal(std::span<const double> coeffs, std::span<double> nodal) const;
  void to_coeffs(std::span<const double> nodal, std::span<double> coeffs) const;

  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return size_; }

 private:
  std::vector<int> shape_;
  std::size_t size_ = 0;
  double* buffer_ = nullptr;
  void* plan_ = nullptr;
  double forward_scale_ = 1.0;
  double inverse_scale_ = 1.0;
};

/// Per-thread cache of transforms keyed by grid shape.
const SineTransform& sine_transform(std::span<const int> shape);

}  // namespace rdlab
