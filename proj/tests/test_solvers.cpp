#include <doctest.h>

#include "tullock/experiments.hpp"
#include "tullock/random.hpp"
#include "tullock/solvers.hpp"
#include "tullock/theory.hpp"

#include <cmath>

using namespace tullock;

namespace {

Game tullock_pair()
{
  VectorXd c(2);
  c << 1.0, 1.0;
  return Game({TopicParams<double>{0.0, 0.5, 1.0, 8.0}},
              CostModel<double>{CostKind::SeparablePower, c, 2.0});
}

Game defaults(std::uint64_t seed, int n = 10)
{
  GameTemplate t;
  t.n = n;
  return build_instance(t, seed);
}

} // namespace

TEST_CASE("solver config validation")
{
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.step = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.tol = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("mmd recovers the symmetric Tullock equilibrium")
{
  const EquilibriumReport rep = mmd_solve(tullock_pair());
  CHECK(rep.converged);
  CHECK(rep.efforts(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.efforts(1, 0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.topic_totals[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(rep.verified);
}

TEST_CASE("mmd output is a fixed point of every best response")
{
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Game game = defaults(seed);
    const EquilibriumReport rep = mmd_solve(game);
    REQUIRE(rep.converged);
    CHECK(verify_first_order(game, rep.efforts) < 1e-3);
    for (Index i = 0; i < game.n(); ++i) {
      const double br = best_response(game, i, rep.efforts, static_cast<int>(game.genai_multiplier()))[0];
      CHECK(br == doctest::Approx(rep.efforts(i, 0)).epsilon(1e-3));
    }
  }
}

TEST_CASE("mmd on the multi-topic default game certifies")
{
  GameTemplate t;
  t.K = 10;
  for (CostKind kind : {CostKind::SeparablePower, CostKind::L1Power}) {
    t.cost_kind = kind;
    const Game game = build_instance(t, 42);
    SolverConfig cfg;
    cfg.max_iters = 5000;
    const EquilibriumReport rep = mmd_solve(game, cfg);
    CHECK(rep.converged);
    CHECK(verify_first_order(game, rep.efforts) < 1e-3);
  }
}

TEST_CASE("mmd is deterministic")
{
  const Game game = defaults(7);
  const auto a = mmd_solve(game);
  const auto b = mmd_solve(game);
  CHECK(a.efforts == b.efforts);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("non-convergence is reported, not thrown")
{
  SolverConfig cfg;
  cfg.max_iters = 3;
  const EquilibriumReport rep = mmd_solve(defaults(3), cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.status == SolveStatus::NonConvergence);
  CHECK_FALSE(rep.verified);
}

TEST_CASE("step halving rescues a divergent step size")
{
  // Stiff own-curvature: the default step oscillates on this instance.
  const Game game = counterexample_game();
  const EquilibriumReport rep = mmd_solve(game);
  CHECK(rep.converged);
  CHECK(rep.step_used < SolverConfig{}.step);
  CHECK(rep.efforts(0, 0) == doctest::Approx(0.17928).epsilon(1e-3));
}

TEST_CASE("bisection best response matches the grid oracle")
{
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<Index>(2 + rng.below(6));
    TopicParams<double> t;
    t.gamma = rng.uniform(0.3, 1.0);
    t.beta = rng.uniform(t.gamma - 1.0, t.gamma);
    t.alpha = rng.uniform(0.0, 2.0);
    t.mu = rng.uniform(10.0, 200.0);
    VectorXd c(n);
    for (Index i = 0; i < n; ++i)
      c[i] = rng.uniform(1.0, 10.0);
    const Game game({t}, CostModel<double>{CostKind::SeparablePower, c, rng.uniform(1.2, 2.5)});
    MatrixXd others(n, 1);
    for (Index i = 0; i < n; ++i)
      others(i, 0) = rng.uniform(0.0, 5.0);
    const int bots = static_cast<int>(rng.below(3));
    const double a = best_response(game, 0, others, bots)[0];
    const double b = best_response_oracle(game, 0, others, bots, 1e-4)[0];
    CHECK(std::abs(a - b) < 2e-3);
  }
}

TEST_CASE("two-topic best response matches the grid oracle")
{
  const Game game = counterexample_game();
  MatrixXd others = MatrixXd::Zero(2, 2);
  others.row(1) << 0.17645, 0.11803;
  const VectorXd a = best_response(game, 0, others, 0);
  const VectorXd b = best_response_oracle(game, 0, others, 0, 5e-4);
  CHECK((a - b).cwiseAbs().maxCoeff() < 2e-3);
}

TEST_CASE("best response to nobody with alpha = 0 sits at the cost corner")
{
  // Alone with no GenAI and gamma = 1: traffic is mu for any x > 0, so the
  // best response tends to 0+.
  VectorXd c(2);
  c << 1.0, 1.0;
  const Game game({TopicParams<double>{0.0, 0.5, 1.0, 8.0}},
                  CostModel<double>{CostKind::SeparablePower, c, 2.0});
  const double x = best_response(game, 0, MatrixXd::Zero(2, 1), 0)[0];
  CHECK(x < 1e-3);
}

TEST_CASE("subgame with everyone free equals the full solve")
{
  const Game game = defaults(5);
  const MixedProfile start(game.n(), 1);
  const SubgameResult sub =
      subgame_solve(game, start, std::vector<bool>(static_cast<std::size_t>(game.n()), true));
  const EquilibriumReport rep = mmd_solve(game);
  CHECK(sub.converged);
  CHECK((sub.efforts - rep.efforts).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("subgame holds fixed creators and counts fixed GenAI in the multiplier")
{
  const Game game = defaults(6).with_multiplier(0);
  MixedProfile fixed(game.n(), 1);
  fixed.set_genai(0);
  fixed.set_effort(1, Eigen::Matrix<double, 1, 1>(2.5));
  std::vector<bool> free(static_cast<std::size_t>(game.n()), true);
  free[0] = free[1] = false;
  const SubgameResult sub = subgame_solve(game, fixed, free);
  CHECK(sub.converged);
  CHECK(sub.efforts(0, 0) == 0.0);
  CHECK(sub.efforts(1, 0) == 2.5);
  // Every free creator best-responds with one GenAI agent present.
  for (Index i = 2; i < game.n(); ++i)
    CHECK(best_response(game, i, sub.efforts, 1)[0] == doctest::Approx(sub.efforts(i, 0)).epsilon(2e-3));
}

TEST_CASE("targeted inclusive solver returns a verified cost-ordered profile")
{
  for (std::uint64_t seed = 42; seed < 45; ++seed) {
    GameTemplate t;
    t.n = 30;
    t.mu = 1000;
    t.gamma = 0.6;
    const Game game = build_instance(t, seed);
    const EquilibriumReport rep = targeted_inclusive_pne(game);
    CHECK(rep.guaranteed_regime);
    CHECK(rep.verified);
    CHECK(rep.genai_count > 0);
    bool seen = false;
    for (Index i : game.cost_order()) {
      const bool g = rep.genai[static_cast<std::size_t>(i)];
      CHECK_FALSE((seen && !g));
      seen = seen || g;
    }
    CHECK(inclusive_pne_check(game.with_multiplier(0), rep.profile()).is_pne);

    // No unilateral deviation found by best_response or the GenAI comparison.
    const Game g0 = game.with_multiplier(0);
    const MixedProfile y = rep.profile();
    const int bots = y.genai_count();
    for (Index i = 0; i < game.n(); ++i) {
      const double now = utility_inclusive(g0, y, i);
      MixedProfile dev = y;
      if (y.uses_genai(i)) {
        dev.set_effort(i, best_response(g0, i, y.efforts(), bots - 1));
      } else {
        CHECK(best_response(g0, i, y.efforts(), bots)[0] ==
              doctest::Approx(y.efforts()(i, 0)).epsilon(2e-3));
        dev.set_genai(i);
      }
      CHECK(utility_inclusive(g0, dev, i) <= now + SolverConfig{}.tie_eps);
    }
  }
}

TEST_CASE("default parameters are flagged outside the guaranteed regime")
{
  const EquilibriumReport rep = targeted_inclusive_pne(defaults(42));
  CHECK_FALSE(rep.guaranteed_regime);
}

TEST_CASE("checker finds a profitable switch to GenAI")
{
  const Game game = defaults(42).with_multiplier(0);
  const auto all_human = MixedProfile::all_human(mmd_solve(game).efforts);
  const CheckResult res = inclusive_pne_check(game, all_human);
  REQUIRE_FALSE(res.is_pne);
  REQUIRE(res.deviator.has_value());
  CHECK(res.updated.uses_genai(*res.deviator));
  CHECK(utility_inclusive(game, res.updated, *res.deviator) >
        utility_inclusive(game, all_human, *res.deviator));
}

TEST_CASE("checker respects the scan order")
{
  const Game game = defaults(42).with_multiplier(0);
  const auto all_human = MixedProfile::all_human(mmd_solve(game).efforts);
  const std::vector<Index> order{game.cost_order().back()};
  const CheckResult res = inclusive_pne_check(game, all_human, {}, order);
  REQUIRE(res.deviator.has_value());
  CHECK(*res.deviator == game.cost_order().back());
}

TEST_CASE("arbitrary inclusive solver is seed-deterministic and verified")
{
  GameTemplate t;
  t.n = 20;
  t.mu = 1000;
  const Game game = build_instance(t, 42);
  const ArbitraryResult a = arbitrary_inclusive_pne(game, 9);
  const ArbitraryResult b = arbitrary_inclusive_pne(game, 9);
  CHECK(a.report.status == SolveStatus::Converged);
  CHECK(a.report.verified);
  CHECK(a.report.genai == b.report.genai);
  CHECK(a.report.efforts == b.report.efforts);
  CHECK(a.order == b.order);
  CHECK(inclusive_pne_check(game.with_multiplier(0), a.report.profile()).is_pne);
}

TEST_CASE("arbitrary inclusive solver reports the counterexample cycle")
{
  const ArbitraryResult res = arbitrary_inclusive_pne(counterexample_game(), 0);
  CHECK(res.report.status == SolveStatus::CycleSuspected);
  CHECK_FALSE(res.cycle.empty());
  CHECK_FALSE(res.report.verified);
}

TEST_CASE("round cap ends the search as a suspected cycle")
{
  const ArbitraryResult res = arbitrary_inclusive_pne(defaults(42, 30), 1, {}, 1);
  CHECK(res.rounds == 1);
  CHECK(res.report.status == SolveStatus::CycleSuspected);
  CHECK_FALSE(res.report.verified);
  CHECK(res.cycle.size() == 2);
  CHECK(arbitrary_inclusive_pne(defaults(42, 30), 1).report.status == SolveStatus::Converged);
}

TEST_CASE("profile keys quantise at 1e-6")
{
  MatrixXd x(2, 1);
  x << 1.0, 2.0;
  auto a = MixedProfile::all_human(x);
  MatrixXd y = x;
  y(0, 0) += 1e-9;
  auto b = MixedProfile::all_human(y);
  CHECK(profile_key(a) == profile_key(b));
  b.set_genai(1);
  CHECK(profile_key(a) != profile_key(b));
}
