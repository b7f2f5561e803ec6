#pragma once

#include "tullock/solvers.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tullock {

/// A measured quantity checked against strict bounds.
struct BoundReport
{
  std::string name;
  double value = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool pass = false;
  bool informative = true;
  std::string context;
};

/// Strict-inequality slack for every bound comparison.
inline constexpr double kBoundSlack = 1e-9;

bool strictly_between(double lower, double value, double upper);

/// Symmetrised negated game Hessian -H(x; 1) of size nK x nK, indexed
/// (i, k) -> i*K + k: per-topic contest blocks plus the cost Hessians.
MatrixXd negated_game_hessian(const Game& game, const Profile& x);

/// Smallest eigenvalue of negated_game_hessian. Positive means diagonal
/// strict concavity at x.
double dsc_min_eigenvalue(const Game& game, const Profile& x);

/// The scalar sufficient condition 0 <= 2s(g')^2 - s g'' g <= 2 g' g for
/// g(s) = s^gamma + m*alpha*s^beta. Returns (lower holds, upper holds).
std::pair<bool, bool> psd_scalar_condition(const TopicParams<double>& topic, double m, double s);

/// (sum_i c_i^{-1/(rho-1)})^{rho-1}.
double hadamard_inverse_norm(const VectorXd& c, double rho);

/// Total-content bounds 1/(2 rho (1+alpha)) < s^{gamma+rho-1} / (mu ||c^-1||) < 1/rho.
BoundReport check_theorem3(const EquilibriumReport& report, const Game& game);

/// Per-creator cost/gain balance: cost in (1/(2 rho), 1/rho) x gain.
std::vector<BoundReport> check_prop1(const EquilibriumReport& report, const Game& game);

struct MonotonicityChecks
{
  bool sorted = false;         // x and u nonincreasing along ascending cost
  bool cost_bump_hurts = false; // raising the top cost lowers that creator's utility
  bool entrant_shrinks = false; // an entrant lowers the incumbents' total
  bool all_converged = true;
};

MonotonicityChecks check_theorem2_properties(const Game& game, const SolverConfig& config = {},
                                             double sort_tol = 1e-6);

/// max_i x_i / s against the open upper bound 1/2.
BoundReport check_max_share(const EquilibriumReport& report);

/// Constant of the GenAI-fraction lower bound.
double theorem5_constant(double rho, double gamma, double beta, double c1);

/// m/n against 1 - C mu^e / (alpha n^{1 - e(rho-1)}), e = (gamma-beta)/(gamma+rho-1).
/// A non-positive bound is flagged uninformative and passes vacuously.
BoundReport theorem5_bound(int m, int n, const Game& game);

/// Built-in two-creator, two-topic inclusive instance with no PNE.
Game counterexample_game();

struct CycleStep
{
  Index mover = 0;
  MixedProfile before;
  MixedProfile after;
  VectorXd human_response;
  double human_utility = 0; // best human response payoff
  double genai_utility = 0; // payoff of the GenAI action
};

struct CounterexampleTrace
{
  VectorXd all_human_effort;   // symmetric exclusive PNE, per creator
  double all_human_utility = 0;
  double genai_deviation_utility = 0;
  std::vector<CycleStep> steps;
  std::vector<MixedProfile> loop; // distinct states of the detected loop
  bool loop_found = false;
  SolveStatus arbitrary_status = SolveStatus::NonConvergence;
};

/// Alternating best-response dynamics on counterexample_game() from
/// (bot, best response to bot), until a state repeats.
CounterexampleTrace run_counterexample(const SolverConfig& config = {}, int max_steps = 64);

} // namespace tullock
