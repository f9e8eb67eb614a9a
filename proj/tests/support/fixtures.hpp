#pragma once

// Trajectories built from closed-form space-time functions, so identity checks
// can be tested without going through the solver.

#include <cmath>
#include <functional>

#include "rdlab/fields.hpp"
#include "rdlab/trajectory.hpp"

namespace fixture {

inline rdlab::BoxDomain unit_interval(int nodes = 63) {
  return rdlab::BoxDomain::interval(3.14159265358979323846, nodes);
}

/// Samples u(t, x) at t = t0, t0 + dt, ..., t1 on the nodes of `domain`.
inline rdlab::Trajectory sampled(const rdlab::BoxDomain& domain,
                                 const std::function<double(double, double)>& u, double t0,
                                 double t1, double dt) {
  rdlab::Trajectory traj;
  const auto steps = static_cast<long>(std::llround((t1 - t0) / dt));
  for (long i = 0; i <= steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    traj.append(t, rdlab::Field::from_function(domain, [&](double x, double) { return u(t, x); }));
  }
  return traj;
}

/// A sign-changing smooth trajectory whose positive part crosses level 1.
inline double wobble(double t, double x) {
  return (1.0 + 0.5 * std::sin(2.0 * t)) * 1.6 * std::sin(x) - 0.9 * std::cos(t) * std::sin(2.0 * x);
}

}  // namespace fixture
