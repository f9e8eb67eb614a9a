#include "rdlab/sine_transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace rdlab {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SineTransform::SineTransform(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() > 3) {
    throw std::invalid_argument("SineTransform: rank must be 1..3");
  }
  size_ = 1;
  double denom = 1.0;
  for (int n : shape_) {
    if (n < 1) throw std::invalid_argument("SineTransform: extents must be positive");
    size_ *= static_cast<std::size_t>(n);
    denom *= static_cast<double>(n + 1);
  }
  // FFTW's RODFT00 computes Y_k = 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1)) per axis.
  inverse_scale_ = 1.0 / static_cast<double>(1 << shape_.size());
  forward_scale_ = 1.0 / denom;

  buffer_ = fftw_alloc_real(size_);
  std::vector<fftw_r2r_kind> kinds(shape_.size(), FFTW_RODFT00);
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps plans (and therefore results) identical across runs.
  plan_ = fftw_plan_r2r(static_cast<int>(shape_.size()), shape_.data(), buffer_, buffer_,
                        kinds.data(), FFTW_ESTIMATE);
  if (plan_ == nullptr) {
    fftw_free(buffer_);
    throw std::runtime_error("SineTransform: FFTW planning failed");
  }
}

SineTransform::~SineTransform() {
  std::lock_guard lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (buffer_ != nullptr) fftw_free(buffer_);
}

void SineTransform::to_nodal(std::span<const double> coeffs, std::span<double> nodal) const {
  if (coeffs.size() != size_ || nodal.size() != size_) {
    throw std::invalid_argument("SineTransform::to_nodal: size mismatch");
  }
  std::copy(coeffs.begin(), coeffs.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  for (std::size_t i = 0; i < size_; ++i) nodal[i] = buffer_[i] * inverse_scale_;
}

void SineTransform::to_coeffs(std::span<const double> nodal, std::span<double> coeffs) const {
  if (coeffs.size() != size_ || nodal.size() != size_) {
    throw std::invalid_argument("SineTransform::to_coeffs: size mismatch");
  }
  std::copy(nodal.begin(), nodal.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  for (std::size_t i = 0; i < size_; ++i) coeffs[i] = buffer_[i] * forward_scale_;
}

const SineTransform& sine_transform(std::span<const int> shape) {
  thread_local std::map<std::vector<int>, std::unique_ptr<SineTransform>> cache;
  std::vector<int> key(shape.begin(), shape.end());
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<SineTransform>(key)).first;
  }
  return *it->second;
}

}  // namespace rdlab
