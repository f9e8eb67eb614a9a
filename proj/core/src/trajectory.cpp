#include "rdlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rdlab {

NormRecord NormRecord::measure(double time, const Field& u, std::span<const double> orders) {
  NormRecord r;
  r.time = time;
  r.l2 = std::sqrt(std::max(0.0, l2_inner(u, u)));
  r.linf = lp_norm(u, kInfinity);
  r.h1 = h1_seminorm(u);
  r.lm.reserve(orders.size());
  for (double m : orders) r.lm.push_back(lp_norm(u, m));
  return r;
}

void Trajectory::append(double time, Field state) {
  if (!states_.empty()) {
    if (!(time > times_.back())) {
      throw std::invalid_argument("Trajectory::append: times must be strictly increasing");
    }
    if (!(state.domain() == states_.front().domain())) {
      throw std::invalid_argument("Trajectory::append: all states must share one grid");
    }
  }
  times_.push_back(time);
  states_.push_back(std::move(state));
}

void Trajectory::log(NormRecord record) {
  if (!std::isfinite(record.l2) || !std::isfinite(record.linf) || !std::isfinite(record.h1)) {
    throw std::domain_error("Trajectory::log: non-finite norm");
  }
  if (!log_.empty() && !(record.time > log_.back().time)) {
    throw std::invalid_argument("Trajectory::log: times must be strictly increasing");
  }
  log_.push_back(std::move(record));
}

Field Trajectory::at(double t) const {
  if (states_.empty()) throw std::out_of_range("Trajectory::at: empty trajectory");
  const double span = times_.back() - times_.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    throw std::out_of_range("Trajectory::at: time outside the stored window");
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return states_.back();
  const auto i = static_cast<std::size_t>(it - times_.begin());
  if (std::abs(*it - t) <= slack || i == 0) return states_[i];
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return states_[i - 1] * (1.0 - w) + states_[i] * w;
}

std::vector<std::size_t> Trajectory::window(double a, double b) const {
  std::vector<std::size_t> idx;
  const double slack = 1e-12 * std::max(1.0, std::abs(b));
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] >= a - slack && times_[i] <= b + slack) idx.push_back(i);
  }
  return idx;
}

void Trajectory::write_norm_csv(std::ostream& out) const {
  std::ostringstream line;
  line.precision(17);
  line << "time,l2,linf,h1";
  for (double m : norm_orders_) line << ",lm_" << m;
  line << '\n';
  for (const auto& r : log_) {
    line << r.time << ',' << r.l2 << ',' << r.linf << ',' << r.h1;
    for (double v : r.lm) line << ',' << v;
    line << '\n';
  }
  out << line.str();
}

}  // namespace rdlab
