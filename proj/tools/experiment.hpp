#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "rdlab/attractor.hpp"
#include "rdlab/fields.hpp"
#include "rdlab/nonlinearity.hpp"
#include "rdlab/solver.hpp"

namespace rdlab::cli {

inline constexpr int kSchemaVersion = 1;

/// Domain, reaction, forcing and solver settings resolved from a config.
struct Problem {
  BoxDomain domain;
  Nonlinearity nonlinearity;
  Forcing forcing;
  SimulateOptions simulate;
  std::uint64_t seed = 0;
};

Problem make_problem(const Config& cfg);

/// Initial datum from the initial.* block, drawn from the "initial" stream.
Field initial_state(const Config& cfg, const Problem& problem);

/// L2 norms log-spaced over [ensemble.l2_min, ensemble.l2_max].
std::vector<double> ensemble_norms(const Config& cfg, std::size_t count);

/// Training members (ensemble.size) followed by held-out members
/// (ensemble.held_out), each simulated over ensemble.horizon.
std::vector<Trajectory> run_ensemble(const Config& cfg, const Problem& problem);

StructureBudget structure_budget(const Config& cfg, const Problem& problem);

/// Subcommand result: the report written to disk and the exit status.
struct Outcome {
  nlohmann::json report;
  int status = 0;
};

Outcome run_simulate(const Config& cfg, const std::filesystem::path& out);
Outcome run_ladder(const Config& cfg, const std::filesystem::path& out);
Outcome run_equilibria(const Config& cfg, const std::filesystem::path& out);
Outcome run_attractor(const Config& cfg, const std::filesystem::path& out);
Outcome run_structure(const Config& cfg, const std::filesystem::path& out);
Outcome run_dimension(const Config& cfg, const std::filesystem::path& out);
Outcome run_check(const Config& cfg, const std::filesystem::path& out);

/// Dispatches by name; throws ConfigError for an unknown subcommand.
Outcome run(const std::string& subcommand, const Config& cfg, const std::filesystem::path& out);

const std::vector<std::string>& subcommands();

}  // namespace rdlab::cli
