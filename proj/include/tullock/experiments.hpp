#pragma once

#include "tullock/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tullock {

enum class SweepKind
{
  Q1Exclusive,
  Q2InclusiveTargeted,
  Q2InclusiveArbitrary,
  Q3Inclusive,
  Q4Multitopic
};

const char* to_string(SweepKind kind);
std::optional<SweepKind> parse_sweep_kind(std::string_view name);
bool is_inclusive(SweepKind kind);

enum class OccupationMetric
{
  EffortShare,       // (s_k / sum s) / (mu_k / sum mu)
  HumanTrafficShare  // s_k^gamma / g_k(s_k)
};

const char* to_string(OccupationMetric metric);
std::optional<OccupationMetric> parse_occupation_metric(std::string_view name);

struct GameTemplate
{
  int n = 10;
  int K = 1;
  double alpha = 1.0;
  double beta = 0.5;
  double gamma = 0.9;
  double rho = 1.5;
  double mu = 100;
  // Optional per-topic overrides, each empty or of length K.
  std::vector<double> topic_alpha;
  std::vector<double> topic_beta;
  std::vector<double> topic_gamma;
  std::vector<double> topic_mu;
  CostKind cost_kind = CostKind::SeparablePower;
  double cost_lo = 1.0;
  double cost_hi = 10.0;

  void validate() const;
  std::vector<TopicParams<double>> topics() const;
};

struct SweepAxis
{
  std::string name;
  std::vector<double> values;
};

/// Names accepted in SweepAxis::name.
const std::vector<std::string>& sweepable_parameters();

std::vector<std::uint64_t> default_seeds(std::uint64_t base = 42, int count = 10);

struct SweepSpec
{
  std::string name;
  SweepKind kind = SweepKind::Q1Exclusive;
  GameTemplate base;
  std::vector<SweepAxis> axes; // full grid, last axis fastest
  std::vector<std::uint64_t> seeds = default_seeds();
  SolverConfig solver;
  OccupationMetric metric = OccupationMetric::EffortShare;
  int round_cap = 5000;

  void validate() const;
  std::size_t grid_size() const;
  std::vector<double> grid_point(std::size_t index) const;
  GameTemplate instantiate(std::size_t index) const;
};

struct SweepRow
{
  std::size_t instance_id = 0;
  std::uint64_t seed = 0;
  std::vector<double> swept;
  double s_star = 0;
  double welfare = 0;
  double genai_fraction = 0;
  double human_utility = 0;
  double genai_utility = 0;
  std::vector<double> topic_s;
  std::vector<std::optional<double>> topic_occ;
  std::vector<double> topic_gain;
  std::vector<double> decile_adoption; // arbitrary inclusive runs only
  std::vector<bool> genai;             // inclusive runs only
  int iterations = 0;
  double residual = 0;
  bool verified = false;
  SolveStatus status = SolveStatus::NonConvergence;
  std::string error;
};

/// n i.i.d. draws from U[lo, hi].
VectorXd sample_costs(Index n, double lo, double hi, std::uint64_t seed);

Game build_instance(const GameTemplate& tmpl, std::uint64_t seed);

/// Empty when the profile is all zero.
std::optional<VectorXd> occupation_ratio(const Profile& x, const Game& game,
                                         OccupationMetric metric = OccupationMetric::EffortShare);

/// (1/n) sum_i x_ik mu_k / g_k(s_k), costs excluded.
VectorXd per_topic_gain(const Profile& x, const Game& game);

/// Share of creators in each of `groups` equal cost bands (ascending cost)
/// that use GenAI.
std::vector<double> cost_group_adoption(const Game& game, const std::vector<bool>& genai,
                                        int groups = 10);

SweepRow run_instance(const SweepSpec& spec, std::size_t point, std::size_t seed_index);

/// Rows in grid order, seeds fastest, independent of `jobs`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1);

struct PointSummary
{
  std::size_t instance_id = 0;
  std::vector<double> swept;
  std::size_t count = 0;
  std::size_t verified = 0;
  // mean, std, sem per metric
  struct Stat
  {
    double mean = 0, std = 0, sem = 0;
  };
  Stat s_star, welfare, genai_fraction, human_utility, genai_utility;
  std::vector<Stat> topic_occ, topic_gain;
};

std::vector<PointSummary> summarize(const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Mean adoption per cost group over all rows.
std::vector<double> mean_decile_adoption(const std::vector<SweepRow>& rows);

std::vector<std::string> csv_header(const SweepSpec& spec);
void write_rows_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& os, const SweepSpec& spec,
                       const std::vector<PointSummary>& summary);
void write_decile_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Formats with 17 significant digits.
std::string format_double(double v);

const std::vector<std::string>& preset_names();

/// Specs for a named preset; several specs per preset are possible.
std::vector<SweepSpec> preset(std::string_view name, std::uint64_t base_seed = 42);

} // namespace tullock
