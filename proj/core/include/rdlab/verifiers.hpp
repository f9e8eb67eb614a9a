#pragma once

#include <cstddef>

#include "rdlab/fields.hpp"
#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/trajectory.hpp"

namespace rdlab {

/// Smooth test profile eta(t) = c ((t - a)(b - t))^3 on (a, b), zero outside,
/// normalized to unit integral.
class BumpProfile {
 public:
  BumpProfile(double a, double b);
  double value(double t) const;
  double derivative(double t) const;
  double begin() const { return a_; }
  double end() const { return b_; }

 private:
  double a_, b_, scale_;
};

/// Left side of the space-time weak formulation tested against (v, eta):
///   -int (u, v) eta' dt + int [(u, v)_{H1_0} + (f(u), v) - (g, v)] eta dt,
/// by trapezoidal quadrature on the snapshot grid.
double weak_residual(const Trajectory& traj, const Field& v, const BumpProfile& eta,
                     const Nonlinearity& nonlinearity, const Forcing& forcing,
                     const TimeForcing& time_forcing = {});

struct IbpSides {
  double lhs = 0.0;  ///< int <u_t, (T_k u+)^{2m-1}> eta ds
  double rhs = 0.0;  ///< -int Phi_{k,m}(u+) eta' ds
};

/// Both sides of the truncated integration-by-parts identity. u_t comes from
/// second-order differences of the snapshots.
IbpSides ibp_identity_check(const Trajectory& traj, double k, double m, const BumpProfile& eta);

struct DecayConstants {
  double alpha = 0.0;
  double K = 0.0;
};

/// Energy-estimate constants for ||u(t)||_2 <= ||u0||_2 e^{-alpha t} + K,
/// built from the Poincare constant lambda_1, (C2, |Omega|, ||g||_2) and, for
/// p = 2, the dissipativity rate.
DecayConstants decay_constants(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                               const Forcing& forcing);

struct DecayCheck {
  DecayConstants derived;
  std::size_t violations = 0;
  double worst_excess = 0.0;  ///< max of ||u(t)|| - bound(t)
  double K_fit = 0.0;         ///< tightest K for the derived alpha
  double alpha_fit = 0.0;     ///< largest alpha that works with the derived K
};

/// Checks the decay inequality at every row of the trajectory's norm log.
DecayCheck l2_decay_check(const Trajectory& traj, const Nonlinearity& nonlinearity,
                          const Forcing& forcing);

}  // namespace rdlab
