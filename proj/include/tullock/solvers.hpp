#pragma once

#include "tullock/game.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tullock {

using Game = ExclusiveGame<double>;
using Profile = MatrixXd;
using MixedProfile = InclusiveProfile<double>;

struct SolverConfig
{
  int max_iters = 1000;
  double step = 0.05;
  double tol = 1e-4;
  double init = 0.1;
  double grad_clip = kDefaultGradClip;
  double tie_eps = 1e-9;
  // Step-size safeguard: when the residual has not improved for
  // `stall_window` iterations (or turns non-finite) the step is halved and
  // the best iterate restored, at most `max_halvings` times.
  int stall_window = 50;
  int max_halvings = 8;

  void validate() const;
};

enum class SolveStatus
{
  Converged,
  NonConvergence,
  CycleSuspected
};

const char* to_string(SolveStatus s);

struct EquilibriumReport
{
  Profile efforts;         // n x K; rows of GenAI creators are zero
  std::vector<bool> genai; // empty for exclusive solves
  SolveStatus status = SolveStatus::NonConvergence;
  bool converged = false;
  int iterations = 0;
  double residual = 0;
  double step_used = 0;
  VectorXd utilities;
  VectorXd topic_totals;
  double welfare = 0;
  int genai_count = 0;
  bool verified = false; // passed the first-order or deviation check
  bool guaranteed_regime = true;

  MixedProfile profile() const;
};

/// Outcome of a projected-gradient solve over a subset of creators.
struct SubgameResult
{
  Profile efforts; // full n x K; fixed rows copied, GenAI rows zero
  bool converged = false;
  int iterations = 0;
  double residual = 0;
  double step_used = 0;
};

/// Multi-agent mirror descent with exact gradients and Euclidean projection
/// onto the nonnegative orthant.
EquilibriumReport mmd_solve(const Game& game, const SolverConfig& config = {});

/// First-order certificate: the largest |du_i/dx_ik| over positive
/// coordinates and max(0, du_i/dx_ik) over zero coordinates.
double verify_first_order(const Game& game, const Profile& x,
                          double grad_clip = kDefaultGradClip);

/// Holds every creator with `free[i] == false` at its action in `fixed`
/// and solves the induced exclusive game among the rest. GenAI creators in
/// `fixed` add to the game's multiplier.
SubgameResult subgame_solve(const Game& game, const MixedProfile& fixed,
                            const std::vector<bool>& free, const SolverConfig& config = {});

/// Best human response of creator i to the efforts in `others` (row i is
/// ignored) with `genai_count` GenAI agents in every denominator.
/// K = 1 uses bisection on the marginal utility; K > 1 projected ascent.
VectorXd best_response(const Game& game, Index i, const Profile& others, int genai_count,
                       const SolverConfig& config = {});

/// Exhaustive grid search for the same problem (K <= 2). Test oracle.
VectorXd best_response_oracle(const Game& game, Index i, const Profile& others, int genai_count,
                              double grid_step);

/// Algorithm for the cost-ordered PNE (x_1, ..., x_{n-m}, bot, ..., bot) of
/// the 1-D inclusive game. The result is always run through
/// inclusive_pne_check; `verified` records the outcome.
EquilibriumReport targeted_inclusive_pne(const Game& game, const SolverConfig& config = {});

struct CheckResult
{
  bool is_pne = false;
  MixedProfile updated;
  std::optional<Index> deviator;
  bool inner_converged = true;
};

/// Scans creators (in `order`, default index order) for a strictly improving
/// switch between effort and GenAI. The first deviation is applied, the other
/// humans re-solved, and the updated profile returned.
CheckResult inclusive_pne_check(const Game& game, const MixedProfile& profile,
                                const SolverConfig& config = {}, std::span<const Index> order = {});

struct ArbitraryResult
{
  EquilibriumReport report;
  int rounds = 0;
  std::vector<MixedProfile> cycle; // populated on CycleSuspected
  std::vector<Index> order;        // shuffled scan order
};

/// Repeated deviation checking from `initial` (default: the all-human PNE)
/// with a seeded scan order, until a PNE, a repeated state, or `round_cap`.
ArbitraryResult arbitrary_inclusive_pne(const Game& game, std::uint64_t seed,
                                        const SolverConfig& config = {}, int round_cap = 5000,
                                        std::optional<MixedProfile> initial = std::nullopt);

/// Quantised key of a profile at 1e-6 resolution, used for cycle detection.
std::vector<long long> profile_key(const MixedProfile& p);

/// Assemble a report (utilities, totals, welfare) for an inclusive profile.
EquilibriumReport make_inclusive_report(const Game& game, const MixedProfile& p);

} // namespace tullock
