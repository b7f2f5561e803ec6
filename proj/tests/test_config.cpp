#include <doctest.h>

#include "config.hpp"

using namespace tullock;
using namespace tullock::cli;

TEST_CASE("empty config yields defaults")
{
  const RunConfig c = parse_config("");
  CHECK(c.game.n == 10);
  CHECK(c.game.alpha == 1.0);
  CHECK(c.solver.tol == SolverConfig{}.tol);
  CHECK(c.seed == 42);
  CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("sections are parsed")
{
  const RunConfig c = parse_config(R"(
[game]
n = 3
K = 2
alpha = 0.5
cost_kind = l1
costs = 1, 2.5, 4
topic_mu = 10,20

[solver]
tol = 1e-6
max_iters = 300

[run]
seed = 7
mode = arbitrary

[sweep]
name = mine
kind = Q4_multitopic
seed_count = 2
metric = human_traffic_share

[axes]
beta = 0.1,0.5
alpha = 1
)");
  CHECK(c.game.n == 3);
  CHECK(c.game.cost_kind == CostKind::L1Power);
  CHECK(c.costs == std::vector<double>{1, 2.5, 4});
  CHECK(c.game.topic_mu == std::vector<double>{10, 20});
  CHECK(c.solver.tol == 1e-6);
  CHECK(c.solver.max_iters == 300);
  CHECK(c.mode == "arbitrary");
  REQUIRE(c.sweep);
  CHECK(c.sweep->metric == OccupationMetric::HumanTrafficShare);
  REQUIRE(c.sweep->axes.size() == 2);
  CHECK(c.sweep->axes[0].name == "beta");
  const SweepSpec spec = c.make_sweep();
  CHECK(spec.grid_size() == 2);
  CHECK(spec.seeds == default_seeds(7, 2));

  const Game game = c.build_game();
  CHECK(game.costs().c[1] == 2.5);
  CHECK(game.K() == 2);
}

TEST_CASE("unknown or malformed input is rejected")
{
  CHECK_THROWS_AS(parse_config("[game]\nwidth = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[game]\nn = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[game]\nn = 2\ncosts = 1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[game]\nrho = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nmode = greedy\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[axes]\nwidth = 1,2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\nkind = Q7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[game\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), IoError);
}

TEST_CASE("overrides win over the file and are validated")
{
  RunConfig c = parse_config("[run]\nseed = 5\n[solver]\ntol = 1e-5\n");
  Overrides o;
  o.seed = 9;
  o.tol = 1e-7;
  o.out = "elsewhere";
  apply_overrides(c, o);
  CHECK(c.seed == 9);
  CHECK(c.solver.tol == 1e-7);
  CHECK(c.out == "elsewhere");
  Overrides bad;
  bad.mode = "greedy";
  CHECK_THROWS_AS(apply_overrides(c, bad), ConfigError);
}

TEST_CASE("resolved config round-trips")
{
  RunConfig c = parse_config("[game]\nalpha = 0.1\nmu = 123.456789\ncosts = "
                             "1.1,2,3,4,5,6,7,8,9,9.999999999\n[sweep]\nkind = Q3_inclusive\n"
                             "[axes]\nbeta = 0.1,0.2\n");
  const std::string ini = to_ini(c);
  const RunConfig back = parse_config(ini);
  CHECK(to_ini(back) == ini);
  CHECK(back.game.alpha == 0.1);
  CHECK(back.costs == c.costs);
  REQUIRE(back.sweep);
  CHECK(back.sweep->kind == SweepKind::Q3Inclusive);
}
