#include "rdlab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdlab/sine_transform.hpp"

namespace rdlab {

DealiasedReaction::DealiasedReaction(const BoxDomain& domain, Nonlinearity nonlinearity)
    : domain_(domain), nl_(std::move(nonlinearity)), shape_(domain.shape()) {
  domain_.validate();
  std::size_t padded = 1;
  for (int n : shape_) {
    const int m = (3 * (n + 1) + 1) / 2 - 1;
    padded_shape_.push_back(m);
    padded *= static_cast<std::size_t>(m);
  }
  padded_coeffs_.assign(padded, 0.0);
  padded_nodal_.assign(padded, 0.0);
}

void DealiasedReaction::embed(std::span<const double> coeffs) const {
  if (coeffs.size() != domain_.size()) {
    throw std::invalid_argument("DealiasedReaction: coefficient count does not match domain");
  }
  std::fill(padded_coeffs_.begin(), padded_coeffs_.end(), 0.0);
  if (shape_.size() == 1) {
    std::copy(coeffs.begin(), coeffs.end(), padded_coeffs_.begin());
  } else {
    const auto n1 = static_cast<std::size_t>(shape_[0]);
    const auto n2 = static_cast<std::size_t>(shape_[1]);
    const auto m2 = static_cast<std::size_t>(padded_shape_[1]);
    for (std::size_t i = 0; i < n1; ++i) {
      std::copy_n(coeffs.begin() + i * n2, n2, padded_coeffs_.begin() + i * m2);
    }
  }
  sine_transform(padded_shape_).to_nodal(padded_coeffs_, padded_nodal_);
}

void DealiasedReaction::extract(std::span<double> out) const {
  sine_transform(padded_shape_).to_coeffs(padded_nodal_, padded_coeffs_);
  if (shape_.size() == 1) {
    std::copy_n(padded_coeffs_.begin(), out.size(), out.begin());
  } else {
    const auto n1 = static_cast<std::size_t>(shape_[0]);
    const auto n2 = static_cast<std::size_t>(shape_[1]);
    const auto m2 = static_cast<std::size_t>(padded_shape_[1]);
    for (std::size_t i = 0; i < n1; ++i) {
      std::copy_n(padded_coeffs_.begin() + i * m2, n2, out.begin() + i * n2);
    }
  }
}

double DealiasedReaction::evaluate(std::span<const double> coeffs, std::span<double> out) const {
  embed(coeffs);
  double peak = 0.0;
  for (auto& x : padded_nodal_) {
    peak = std::max(peak, std::abs(x));
    x = nl_.nonlinear_part(x);
  }
  extract(out);
  return peak;
}

void DealiasedReaction::linearize_at(std::span<const double> coeffs) {
  embed(coeffs);
  frozen_derivative_.resize(padded_nodal_.size());
  for (std::size_t i = 0; i < padded_nodal_.size(); ++i) {
    frozen_derivative_[i] = nl_.nonlinear_derivative(padded_nodal_[i]);
  }
}

void DealiasedReaction::apply_linearization(std::span<const double> v, std::span<double> out) const {
  if (frozen_derivative_.empty()) {
    throw std::logic_error("DealiasedReaction: linearize_at must be called first");
  }
  embed(v);
  for (std::size_t i = 0; i < padded_nodal_.size(); ++i) padded_nodal_[i] *= frozen_derivative_[i];
  extract(out);
}

}  // namespace rdlab
