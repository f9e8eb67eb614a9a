#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rdlab/fields.hpp"
#include "rdlab/nonlinearity.hpp"
#include "rdlab/reaction.hpp"
#include "rdlab/trajectory.hpp"

namespace rdlab {

enum class Scheme { etd1, etd2rk };
Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);

/// Sine coefficients of a time-dependent forcing g(t).
using TimeForcing = std::function<std::vector<double>(double t)>;

struct StepOptions {
  Scheme scheme = Scheme::etd2rk;
  /// Explicit reaction sub-steps satisfy h * max|g'| <= stiffness_cap.
  double stiffness_cap = 0.1;
  /// Deepest dyadic refinement of one macro step.
  int max_level = 40;
};

/// Raised when a step produces a non-finite state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, Field last_finite, double time)
      : std::runtime_error(what), last_finite_(std::move(last_finite)), time_(time) {}
  const Field& last_finite_state() const { return last_finite_; }
  double time() const { return time_; }

 private:
  Field last_finite_;
  double time_;
};

/// Exponential time differencing for u_t - Lap u + f(u) = g in the sine basis.
///
/// Each mode evolves under the exact factor exp(-(lambda_k + c) h), c being
/// the linear coefficient of f; the remainder -g(u) + forcing is explicit
/// (ETD1 or ETD2RK). A macro step dt is split into dyadic sub-steps whenever
/// dt * max|g'(u)| would exceed the stiffness cap, so large initial data stay
/// stable without changing the output grid.
class Integrator {
 public:
  Integrator(const BoxDomain& domain, const Nonlinearity& nonlinearity, const Forcing& forcing,
             double dt, StepOptions options = {});

  void set_time_forcing(TimeForcing forcing) { time_forcing_ = std::move(forcing); }

  /// Advances `coeffs` from time t to t + dt in place.
  void advance(std::vector<double>& coeffs, double t);

  /// Coefficients of -g(u) + forcing(t); returns the padded max |u|.
  double reaction(std::span<const double> coeffs, double t, std::span<double> out) const;

  double dt() const { return dt_; }
  const BoxDomain& domain() const { return domain_; }
  const StepOptions& options() const { return options_; }
  /// Total explicit sub-steps taken so far (diagnostic).
  std::uint64_t substeps() const { return substeps_; }

 private:
  struct Factors {
    std::vector<double> decay;  // exp(l h)
    std::vector<double> phi1;   // h phi1(l h)
    std::vector<double> phi2;   // h phi2(l h)
  };
  const Factors& factors(int level);
  int required_level(double peak) const;

  BoxDomain domain_;
  Nonlinearity nl_;
  DealiasedReaction reaction_;
  std::vector<double> rates_;
  std::vector<double> forcing_;
  TimeForcing time_forcing_;
  double dt_;
  StepOptions options_;
  std::vector<Factors> levels_;
  std::vector<double> n0_, n1_, stage_;
  std::uint64_t substeps_ = 0;
};

/// One macro step of the scheme.
Field step(const Field& u, double dt, const Nonlinearity& nonlinearity, const Forcing& forcing,
           Scheme scheme = Scheme::etd2rk);

struct SimulateOptions {
  double dt = 0.01;
  double horizon = 1.0;
  double t0 = 0.0;
  int snapshot_stride = 1;  ///< store every k-th step (the final state is always stored)
  int log_stride = 1;       ///< norm log every k-th step (0 disables the log)
  std::vector<double> norm_orders;
  StepOptions step;
  std::uint64_t seed = 0;  ///< recorded in the trajectory metadata
};

/// Integrates from u0 over [t0, t0 + horizon]. horizon must be an integer
/// multiple of dt. Propagates BlowUpError.
Trajectory simulate(const Field& u0, const Nonlinearity& nonlinearity, const Forcing& forcing,
                    const SimulateOptions& options, TimeForcing time_forcing = {});

/// Number of steps for a horizon; throws unless horizon is a multiple of dt.
std::int64_t step_count(double horizon, double dt);

}  // namespace rdlab
