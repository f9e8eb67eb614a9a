#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/fields.hpp"
#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/trajectory.hpp"

namespace rdlab {

/// Leading eigenpairs of v -> -Lap v + f'(z) v, ascending. Vectors have unit
/// L2 norm and a positive largest coefficient.
struct LinearSpectrum {
  std::vector<double> values;
  std::vector<Field> vectors;
  int morse_index = 0;  ///< negative eigenvalues among all modes, not only the leading ones
};

/// Spectral residual -Lap z + f(z) - g, with f(z) evaluated by the dealiased reaction.
Field equilibrium_residual(const Field& z, const Nonlinearity& nonlinearity,
                           const Forcing& forcing);

LinearSpectrum linearized_spectrum(const Field& z, const Nonlinearity& nonlinearity,
                                   std::size_t count);

struct Equilibrium {
  Field state;
  double residual = 0.0;  ///< L2 norm of the spectral residual
  std::vector<double> spectrum;
  std::vector<Field> eigenvectors;
  int morse_index = 0;
};

struct NewtonOptions {
  double tolerance = 1e-11;
  int max_iterations = 100;
};

struct NewtonResult {
  Field state;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton iteration with backtracking on the residual norm.
NewtonResult newton_solve(const Field& guess, const Nonlinearity& nonlinearity,
                          const Forcing& forcing, const NewtonOptions& options = {});

struct EquilibriumSearch {
  int seed_count = 6;          ///< amplitudes per seed mode
  int max_mode = 4;            ///< seed modes sin(j x) for j <= max_mode (per axis in 2D)
  double amplitude_max = 0.0;  ///< 0 selects the absorbing-ball radius in sup scale
  double dedup_distance = 1e-6;
  std::size_t spectrum_count = 6;
  NewtonOptions newton;
};

struct EquilibriumSet {
  std::vector<Equilibrium> equilibria;  ///< sorted by L2 norm, then by leading coefficient
  std::size_t seeds = 0;
  std::size_t diverged = 0;
  std::vector<std::string> log;  ///< one line per diverged seed
};

EquilibriumSet find_equilibria(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                               const Forcing& forcing, const EquilibriumSearch& search = {});

struct LimitClassification {
  std::size_t nearest = 0;   ///< index into the equilibrium list
  double distance = kInfinity;
  double terminal_speed = kInfinity;  ///< ||u_t||_2 from the last two snapshots
  bool converged = false;
  /// Earliest snapshot time after which the distance to the nearest
  /// equilibrium is nonincreasing.
  double monotone_after = 0.0;
};

LimitClassification forward_limit_check(const Trajectory& traj,
                                        std::span<const Equilibrium> equilibria, double tol);

struct ManifoldSegment {
  std::size_t origin = 0;     ///< equilibrium index
  std::size_t direction = 0;  ///< unstable eigendirection index
  double amplitude = 0.0;     ///< signed offset along the eigenvector
  Trajectory trajectory;
  LimitClassification limit;
};

struct ShootOptions {
  std::vector<double> amplitudes{1e-4};
  double horizon = 40.0;
  SimulateOptions simulate;
  double limit_tol = 1e-6;
};

/// Integrates forward from z +- a e for each unstable direction e and each a.
std::vector<ManifoldSegment> unstable_manifold_shoot(std::span<const Equilibrium> equilibria,
                                                     std::size_t origin,
                                                     const Nonlinearity& nonlinearity,
                                                     const Forcing& forcing,
                                                     const ShootOptions& options);

/// First snapshot time with ||u - z||_2 >= radius, or +inf.
double exit_time(const Trajectory& traj, const Field& z, double radius);

enum class Provenance { forward_limit, manifold_shoot, equilibrium };
std::string provenance_name(Provenance p);

struct AttractorSample {
  std::vector<Field> points;
  std::vector<Provenance> provenance;
  void add(Field point, Provenance p);
  std::size_t size() const { return points.size(); }
};

/// Keeps the first point, then every point at L2 distance >= spacing from the
/// last kept one.
std::vector<Field> thin_by_spacing(std::span<const Field> path, double spacing);

/// max over query points of the L2 distance to the nearest reference point.
double directed_hausdorff(std::span<const Field> query, std::span<const Field> reference);

struct StructureBudget {
  EquilibriumSearch search;
  ShootOptions shoot;
  std::size_t ensemble = 20;
  double forward_horizon = 30.0;
  double window_start = 10.0;
  double window_stride = 0.1;
  double small_fraction = 0.75;  ///< share of the ensemble started near the origin
  double small_norm = 1e-3;
  double large_norm = 20.0;
  double spacing = 1e-3;         ///< manifold sample spacing; refinement halves it
  double limit_tol = 1e-6;
  std::size_t undecided_quota = 0;
  std::size_t invariance_points = 10;
  std::uint64_t seed = 0;
};

struct Connection {
  std::size_t from = 0;
  std::size_t to = 0;
  double amplitude = 0.0;
};

struct StructureReport {
  EquilibriumSet equilibria;
  std::vector<Connection> connections;
  std::size_t forward_runs = 0;
  std::size_t forward_points = 0;
  std::size_t undecided = 0;
  bool inconclusive = false;
  double forward_limit_distance = 0.0;   ///< worst final distance of the forward ensemble
  double manifold_limit_distance = 0.0;  ///< worst final distance of the manifold segments
  std::vector<double> spacings;          ///< manifold sample spacings, coarse to fine
  std::vector<std::size_t> sample_sizes;
  std::vector<double> mismatch;          ///< forward snapshots to manifold sample, per spacing
  double invariance_mismatch = 0.0;
  AttractorSample sample;                ///< equilibria, fine manifold sample, forward limits
};

/// Sampled comparison of the long-time forward set with the unstable set of
/// the equilibria, plus convergence of every manifold segment.
StructureReport structure_check(const BoxDomain& domain, const Nonlinearity& nonlinearity,
                                const Forcing& forcing, const StructureBudget& budget);

nlohmann::json to_json(const EquilibriumSet& set);
nlohmann::json to_json(const StructureReport& report);

struct LipschitzCheck {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  ///< max of ||u(t)-v(t)|| / (||u0-v0|| e^{Lt})
};

/// Simulates each pair and checks the exponential envelope at every t in
/// t_grid with slack 1 + 1e-3.
LipschitzCheck attractor_lipschitz_check(std::span<const std::pair<Field, Field>> pairs,
                                         std::span<const double> t_grid, double L,
                                         const Nonlinearity& nonlinearity,
                                         const Forcing& forcing, double dt = 0.01);

struct BranchingScale {
  double scale = 0.0;
  double initial = 0.0;     ///< max pairwise initial distance
  double divergence = 0.0;  ///< max pairwise distance over the horizon
  double implied_L = 0.0;   ///< max over t of log(D(t)/D(0)) / t
  bool envelope_ok = true;  ///< D(t) <= D(0) e^{L t} (1 + 1e-3) with the supplied L
};

struct BranchingOptions {
  std::vector<double> scales{1e-4, 1e-5, 1e-6, 1e-7};
  std::size_t ensemble = 4;
  double restart_time = 0.0;
  double horizon = 2.0;
  double dt = 0.01;
  double L = 0.0;  ///< envelope rate; if 0 the rate fitted at the largest scale is used
  std::uint64_t seed = 0;
};

struct BranchingReport {
  std::vector<BranchingScale> scales;
  double L_used = 0.0;
  /// Implied L strictly increases as the scale decreases and every scale
  /// below the largest violates the envelope.
  bool envelope_fails_as_scale_shrinks = false;
};

BranchingReport branching_probe(const Field& u0, const Nonlinearity& nonlinearity,
                                const Forcing& forcing, const BranchingOptions& options);

}  // namespace rdlab
