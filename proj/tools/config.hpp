#pragma once

#include "tullock/experiments.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tullock::cli {

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfig = 1,
  kExitNonConvergence = 2,
  kExitCheckFailed = 3,
  kExitIo = 4
};

struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct SweepSection
{
  std::string name = "custom";
  SweepKind kind = SweepKind::Q1Exclusive;
  int seed_count = 10;
  OccupationMetric metric = OccupationMetric::EffortShare;
  std::vector<SweepAxis> axes;
};

struct RunConfig
{
  GameTemplate game;
  std::vector<double> costs; // explicit costs; sampled from `seed` when empty
  SolverConfig solver;
  std::string out = "out";
  std::uint64_t seed = 42;
  int jobs = 1;
  int instances = 10; // theory-check family size
  std::string mode = "targeted"; // solve-in: targeted | arbitrary
  int round_cap = 5000;
  std::optional<SweepSection> sweep; // set when the file has a [sweep] section

  Game build_game() const;
  SweepSpec make_sweep() const;
};

struct Overrides
{
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<std::string> mode;
};

/// INI file with sections [game], [solver], [run], [sweep] and [axes].
/// Unknown sections or keys throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

void apply_overrides(RunConfig& config, const Overrides& o);

/// Fully resolved config in the same INI dialect.
std::string to_ini(const RunConfig& config);

std::vector<double> parse_list(const std::string& text);

} // namespace tullock::cli
