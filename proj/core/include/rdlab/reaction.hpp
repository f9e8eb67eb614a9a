#pragma once

#include <span>
#include <vector>

#include "rdlab/fields.hpp"
#include "rdlab/nonlinearity.hpp"

namespace rdlab {

/// Pseudo-spectral evaluation of the nonlinear part g of f(u) = c u + g(u),
/// dealiased with the 3/2 zero-padding rule. Holds scratch buffers, so one
/// instance must not be shared between threads.
class DealiasedReaction {
 public:
  DealiasedReaction(const BoxDomain& domain, Nonlinearity nonlinearity);

  /// Sine coefficients of g(u) projected onto the resolved modes. Returns the
  /// max |u| seen on the padded grid.
  double evaluate(std::span<const double> coeffs, std::span<double> out) const;

  /// Freezes g'(u) on the padded grid for subsequent apply_linearization calls.
  void linearize_at(std::span<const double> coeffs);
  /// Coefficients of g'(u) v for the frozen u.
  void apply_linearization(std::span<const double> v, std::span<double> out) const;

  const BoxDomain& domain() const { return domain_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  const std::vector<int>& padded_shape() const { return padded_shape_; }

 private:
  void embed(std::span<const double> coeffs) const;
  void extract(std::span<double> out) const;

  BoxDomain domain_;
  Nonlinearity nl_;
  std::vector<int> shape_;
  std::vector<int> padded_shape_;
  mutable std::vector<double> padded_coeffs_;
  mutable std::vector<double> padded_nodal_;
  std::vector<double> frozen_derivative_;
};

}  // namespace rdlab
