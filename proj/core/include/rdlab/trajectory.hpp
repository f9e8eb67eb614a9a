#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rdlab/fields.hpp"

namespace rdlab {

/// One row of a trajectory's norm log.
struct NormRecord {
  double time = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h1 = 0.0;
  std::vector<double> lm;  ///< ||u||_m for each configured order m

  static NormRecord measure(double time, const Field& u, std::span<const double> orders);
};

struct TrajectoryMeta {
  std::string scheme;
  double dt = 0.0;
  std::string nonlinearity;
  std::vector<double> params;
  std::string forcing;
  std::uint64_t seed = 0;
};

/// Time-stamped snapshots of one solution on a single grid, plus a norm log.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<double> norm_orders) : norm_orders_(std::move(norm_orders)) {}

  /// Appends a snapshot; times must be strictly increasing and grids equal.
  void append(double time, Field state);
  void log(NormRecord record);

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Field>& states() const { return states_; }
  const Field& state(std::size_t i) const { return states_.at(i); }
  const Field& front() const { return states_.front(); }
  const Field& back() const { return states_.back(); }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  /// Snapshot at t, linearly interpolated in time between stored snapshots.
  /// Throws std::out_of_range outside [start_time, end_time].
  Field at(double t) const;
  /// Indices of snapshots with time in [a, b].
  std::vector<std::size_t> window(double a, double b) const;

  const std::vector<NormRecord>& norm_log() const { return log_; }
  const std::vector<double>& norm_orders() const { return norm_orders_; }

  /// CSV with columns time,l2,linf,h1,lm_<m>...
  void write_norm_csv(std::ostream& out) const;

  TrajectoryMeta meta;

 private:
  std::vector<double> times_;
  std::vector<Field> states_;
  std::vector<NormRecord> log_;
  std::vector<double> norm_orders_;
};

}  // namespace rdlab
