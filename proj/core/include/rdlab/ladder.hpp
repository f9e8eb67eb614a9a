#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/fields.hpp"
#include "rdlab/trajectory.hpp"

namespace rdlab {

/// Rung ratio A: 2 for d <= 3, d / (d - 2) for d >= 4.
double rung_ratio(int dim);

/// Exponents m_j = m0 A^j with waits tau_j = delta / m_j^D_exp. Each rung
/// raises m_j to A m_j, so the last rung reaches m_max.
struct LadderSchedule {
  double A = 2.0;
  double m0 = 2.0;
  double m_max = 64.0;
  double delta = 1.0;
  double D_exp = 1.0;
  std::vector<double> rungs;

  static LadderSchedule make(int dim, double delta, double D_exp = 1.0, double m0 = 2.0,
                             double m_max = 64.0);
  /// delta chosen so that the geometric wait bound equals tau.
  static LadderSchedule for_total_wait(int dim, double tau, double D_exp = 1.0, double m0 = 2.0,
                                       double m_max = 64.0);
  void validate() const;
  double wait(std::size_t j) const;
  double total_wait() const;
  /// delta A^D / (m0^D (A^D - 1)), the sum of the unbounded schedule.
  double wait_bound() const;
};

struct TruncationRow {
  double k = 0.0;
  double lhs = 0.0;        ///< ||T_k u+(t2)||_{2m}^{2m}
  double phi_term = 0.0;   ///< 2m Phi_{k,m}(u+(t1))
  double rhs_tail = 0.0;   ///< D^m + D m^D sup ||u+||_m^{2m}, independent of k
};

struct RungRecord {
  double m = 0.0;
  double target = 0.0;      ///< A m
  double t_start = 0.0;
  double tau = 0.0;
  double t_cumulative = 0.0;  ///< time elapsed since t1 at the end of the rung
  double window_sup = 0.0;    ///< sup over [t_start, t_start + tau] of ||u+||_m
  double lhs = 0.0;           ///< ||u+(t_start + tau)||_{A m}
  double quotient = 0.0;      ///< max{lhs, floor} / max{window_sup, floor}
  double implied_D_delta = 0.0;  ///< quotient^m / m^D_exp
  std::vector<TruncationRow> truncation;
  bool monotone_in_k = true;
  bool k_independent = true;
};

/// One rung of the iteration on [t1, t1 + tau]. The default k grid is
/// {1/2, 1, 2, 4} times the nodal max of u+(t1 + tau).
RungRecord rung_check(const Trajectory& traj, double t1, double tau, double m, double A,
                      std::span<const double> k_grid = {}, double floor = 1.0,
                      double D_exp = 1.0);

struct LadderReport {
  LadderSchedule schedule;
  double t1 = 0.0;
  double floor = 1.0;
  std::vector<RungRecord> rungs;
  double product = 1.0;            ///< product of rung quotients
  double fitted_D_delta = 0.0;     ///< max implied D(delta) over rungs, at least 1
  double product_bound = 0.0;      ///< closed-form telescoped bound with fitted_D_delta
  double terminal_linf = 0.0;      ///< nodal max of u at t1 + total wait
  double terminal_lmax = 0.0;      ///< ||u||_{m_max} at the same time
  double terminal_D = 0.0;         ///< terminal_linf / (sup_{s>=t1} ||u||_2 + 1)
};

/// D(delta)^{(1/m)A/(A-1)} m^{(D/m)A/(A-1)} A^{(D/m)A/(A-1)^2}.
double telescoped_bound(double D_delta, double m, double A, double D_exp);

LadderReport run_ladder(const Trajectory& traj, double t1, const LadderSchedule& schedule,
                        double floor = 1.0);

nlohmann::json to_json(const LadderReport& report);

struct LinfBoundCheck {
  double D_hat = 0.0;            ///< max of ||u(t)||_inf / (sup_{s>=t1} ||u(s)||_2 + 1)
  double D_small = 0.0;          ///< refit on the half with smaller ||u0||_2
  double D_large = 0.0;          ///< refit on the other half
  double D_prefix = 0.0;         ///< refit on the first half of the ensemble
  double split_ratio = 1.0;      ///< max/min of D_small, D_large
  std::size_t violations = 0;    ///< non-finite quotients or quotients above reference
  std::size_t samples = 0;
};

/// Fits the uniform sup-norm constant from the norm logs, using rows with
/// t >= t1 + tau.
LinfBoundCheck linf_bound_check(std::span<const Trajectory> ensemble, double t1, double tau,
                                double reference = kInfinity);

/// Largest nodal sup-norm over a sample. Throws on an empty sample.
double attractor_linf_radius(std::span<const Field> sample);

}  // namespace rdlab
