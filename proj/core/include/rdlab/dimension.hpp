#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/fields.hpp"

namespace rdlab {

/// Dirichlet Laplacian eigenvalues of a box, ascending with multiplicity.
struct SpectrumTable {
  BoxDomain domain;
  std::vector<double> eigenvalues;
  std::vector<std::pair<double, int>> distinct;  ///< (value, multiplicity)

  /// lambda_N for 1-based N.
  double at(std::size_t N) const { return eigenvalues.at(N - 1); }
  std::size_t size() const { return eigenvalues.size(); }
};

SpectrumTable laplacian_spectrum(const BoxDomain& domain, std::size_t count);

/// min over N <= min(10^4, size) of lambda_N / N^{2/d}.
double weyl_constant(const SpectrumTable& table);

/// e^{-lambda t} + L e^{L t} / (L + lambda).
double contraction_delta(double L, double lambda_next, double t);

/// Stationary point of contraction_delta in t; +inf when L = 0.
double contraction_critical_time(double L, double lambda_next);

struct AbstractBound {
  double eta = 0.0;      ///< N log(sqrt2 6 l) / (-log(sqrt2 delta)), where sigma = 1
  double bound = 0.0;    ///< N + eta
  double printed = 0.0;  ///< N (1 - log(sqrt2 delta) / log(sqrt2 6 l)), the ratio inverted
};

/// Throws std::domain_error unless l >= 1 and 0 < delta < 1/sqrt2.
AbstractBound abstract_bound(double l, double delta, std::size_t N);

/// eta solving (sqrt2 6 l)^N (sqrt2 delta)^eta = 1 by bisection.
double eta_by_search(double l, double delta, std::size_t N);

struct SearchResult {
  bool feasible = false;
  bool trivial = false;  ///< lambda_1 > L: the attractor is a single point
  std::string binding;   ///< reason when infeasible
  std::size_t N = 0;
  double t = 0.0;
  double lambda_next = 0.0;
  double l = 1.0;
  double delta = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  double bound = 0.0;
};

/// Minimizes N + eta over N <= N_max and t in t_grid subject to delta < 1/sqrt2.
/// Ties go to the smaller N, then the smaller t.
SearchResult search_bound(double L, const SpectrumTable& spectrum, std::span<const double> t_grid,
                          std::size_t N_max);

/// Log-spaced times on [t_min, t_max].
std::vector<double> log_time_grid(double t_min, double t_max, std::size_t count);

struct ClosedFormRoute {
  double K = 0.0;
  double C = 0.0;
  std::size_t N = 0;
  double t = 0.0;
  double lambda_next = 0.0;
  double l = 1.0;
  double delta = 0.0;
  double half_check = 0.0;    ///< 12 e^{(L - lambda_{N+1}) t}, equal to 1/2
  double tail_check = 0.0;    ///< L e^{2Lt} / (L + lambda_{N+1})
  double tail_limit = 0.0;    ///< 1 / (24 + alpha)
  double twelve_l_delta = 0.0;
  bool satisfied = false;
  bool trivial = false;       ///< lambda_1 >= 3L
  double two_n = 0.0;         ///< 2N
  double bound = 0.0;         ///< C L^{d/2}, zero on the trivial branch
  std::string diagnostic;
};

ClosedFormRoute closed_form_constants(double L, const SpectrumTable& spectrum, double D_asym,
                           double alpha_slack = 1.0);

struct BoxCount {
  std::vector<double> eps;
  std::vector<std::size_t> counts;
  std::vector<bool> usable;
  double slope = 0.0;
  double stderr_ = 0.0;
  bool decided = false;
};

/// Box-counting slope of the sample projected onto its first `modes` sine
/// coefficients (scaled so the Euclidean metric is the L2 metric). An empty
/// eps_grid selects halvings of the sample extent. The slope is fitted over
/// the four finest scales with 4 <= n_eps <= P/10.
BoxCount box_counting(std::span<const Field> sample, std::size_t modes,
                      std::span<const double> eps_grid = {});

/// Same estimator on raw points.
BoxCount box_counting(const std::vector<std::vector<double>>& points,
                      std::span<const double> eps_grid = {});

struct DimensionReport {
  double R = 0.0;
  double L = 0.0;
  SearchResult search;
  ClosedFormRoute closed_form;
  double D_asym = 0.0;
  std::optional<BoxCount> box;
};

nlohmann::json to_json(const DimensionReport& report);

}  // namespace rdlab
