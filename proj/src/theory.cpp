#include "tullock/theory.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tullock {

bool strictly_between(double lower, double value, double upper)
{
  return value > lower + kBoundSlack && value < upper - kBoundSlack;
}

MatrixXd negated_game_hessian(const Game& game, const Profile& x)
{
  check_profile(game, x);
  const Index n = game.n(), K = game.K();
  const double m = game.genai_multiplier();
  MatrixXd H = MatrixXd::Zero(n * K, n * K);

  for (Index k = 0; k < K; ++k) {
    const auto& t = game.topic(k);
    const double s = x.col(k).sum();
    if (!(s > 0))
      throw std::invalid_argument("dsc: every topic total must be positive");
    const double g = denominator(t, m, s);
    const double g1 = denominator_d1(t, m, s);
    const double g2 = denominator_d2(t, m, s);
    const double scale = t.mu / (g * g * g);
    const double spread = 0.5 * g2 * g - g1 * g1;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        H(i * K + k, j * K + k) +=
            scale * (spread * (x(i, k) + x(j, k)) + g1 * g * (i == j ? 2.0 : 1.0));
  }
  for (Index i = 0; i < n; ++i)
    H.block(i * K, i * K, K, K) += game.costs().hessian(i, x.row(i).transpose());
  return H;
}

double dsc_min_eigenvalue(const Game& game, const Profile& x)
{
  if ((x.array() <= 0).any())
    throw std::invalid_argument("dsc: profile must be strictly positive");
  const MatrixXd H = negated_game_hessian(game, x);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("dsc: eigen decomposition failed");
  return eig.eigenvalues().minCoeff();
}

std::pair<bool, bool> psd_scalar_condition(const TopicParams<double>& topic, double m, double s)
{
  if (!(s > 0))
    throw std::invalid_argument("psd_scalar_condition: s must be positive");
  const double g = denominator(topic, m, s);
  const double g1 = denominator_d1(topic, m, s);
  const double g2 = denominator_d2(topic, m, s);
  const double mid = 2 * s * g1 * g1 - s * g2 * g;
  return {0 <= mid, mid <= 2 * g1 * g};
}

double hadamard_inverse_norm(const VectorXd& c, double rho)
{
  if (!(rho > 1))
    throw std::invalid_argument("hadamard_inverse_norm: rho must exceed 1");
  if (c.size() == 0 || (c.array() <= 0).any())
    throw std::invalid_argument("hadamard_inverse_norm: costs must be positive");
  return std::pow(c.array().pow(-1.0 / (rho - 1)).sum(), rho - 1);
}

namespace {

void require_single_topic(const Game& game, const char* what)
{
  if (game.K() != 1)
    throw std::invalid_argument(std::string(what) + ": requires a single topic");
}

std::string instance_context(const Game& game, double s)
{
  const auto& t = game.topic(0);
  std::ostringstream os;
  os << "n=" << game.n() << " mu=" << t.mu << " alpha=" << t.alpha << " beta=" << t.beta
     << " gamma=" << t.gamma << " rho=" << game.costs().rho << " s*=" << s;
  if (!(game.costs().rho > 1 && game.costs().rho <= 2))
    os << " [rho outside (1,2]]";
  return os.str();
}

} // namespace

BoundReport check_theorem3(const EquilibriumReport& report, const Game& game)
{
  require_single_topic(game, "check_theorem3");
  const auto& t = game.topic(0);
  const double rho = game.costs().rho;
  const double alpha = t.alpha * game.genai_multiplier();
  const double s = report.topic_totals[0];

  BoundReport b;
  b.name = "total-content";
  b.value = std::pow(s, t.gamma + rho - 1) / (t.mu * hadamard_inverse_norm(game.costs().c, rho));
  b.lower = 1.0 / (2 * rho * (1 + alpha));
  b.upper = 1.0 / rho;
  b.pass = strictly_between(b.lower, b.value, b.upper);
  b.context = instance_context(game, s);
  return b;
}

std::vector<BoundReport> check_prop1(const EquilibriumReport& report, const Game& game)
{
  require_single_topic(game, "check_prop1");
  const auto& t = game.topic(0);
  const double rho = game.costs().rho;
  const double alpha = t.alpha * game.genai_multiplier();
  const double s = report.topic_totals[0];
  const double denom = std::pow(s, t.gamma) + alpha * std::pow(s, t.beta);

  std::vector<BoundReport> out;
  for (Index i = 0; i < game.n(); ++i) {
    const double x = report.efforts(i, 0);
    const double gain = x * t.mu / denom;
    BoundReport b;
    b.name = "cost-balance[" + std::to_string(i) + "]";
    b.value = game.costs().c[i] * std::pow(x, rho);
    b.lower = gain / (2 * rho);
    b.upper = gain / rho;
    b.pass = strictly_between(b.lower, b.value, b.upper);
    b.context = instance_context(game, s);
    out.push_back(std::move(b));
  }
  return out;
}

MonotonicityChecks check_theorem2_properties(const Game& game, const SolverConfig& config,
                                             double sort_tol)
{
  require_single_topic(game, "check_theorem2_properties");
  MonotonicityChecks out;
  const EquilibriumReport base = mmd_solve(game, config);
  out.all_converged = base.converged;

  const auto& order = game.cost_order();
  out.sorted = true;
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    const Index a = order[r], b = order[r + 1];
    out.sorted = out.sorted && base.efforts(a, 0) >= base.efforts(b, 0) - sort_tol &&
                 base.utilities[a] >= base.utilities[b] - sort_tol;
  }

  const Index top = order.back();
  VectorXd bumped = game.costs().c;
  bumped[top] *= 1.5;
  const EquilibriumReport after_bump = mmd_solve(game.with_costs(bumped), config);
  out.all_converged = out.all_converged && after_bump.converged;
  out.cost_bump_hurts = after_bump.utilities[top] < base.utilities[top];

  VectorXd grown(game.n() + 1);
  grown.head(game.n()) = game.costs().c;
  grown[game.n()] = game.costs().c.maxCoeff() * 1.1;
  const EquilibriumReport with_entrant = mmd_solve(game.with_costs(grown), config);
  out.all_converged = out.all_converged && with_entrant.converged;
  out.entrant_shrinks =
      with_entrant.efforts.col(0).head(game.n()).sum() < base.efforts.col(0).sum();
  return out;
}

BoundReport check_max_share(const EquilibriumReport& report)
{
  BoundReport b;
  b.name = "max-share";
  const double s = report.efforts.col(0).sum();
  b.value = s > 0 ? report.efforts.col(0).maxCoeff() / s : 0.0;
  b.lower = -std::numeric_limits<double>::infinity();
  b.upper = 0.5;
  b.pass = s > 0 && b.value < b.upper - kBoundSlack;
  b.context = "n=" + std::to_string(report.efforts.rows());
  return b;
}

double theorem5_constant(double rho, double gamma, double beta, double c1)
{
  const double e = (gamma - beta) / (gamma + rho - 1);
  return 2 * (2 * rho - 1) / rho * std::pow(rho * c1, -e);
}

BoundReport theorem5_bound(int m, int n, const Game& game)
{
  require_single_topic(game, "theorem5_bound");
  if (n <= 0 || m < 0 || m > n)
    throw std::invalid_argument("theorem5_bound: need 0 <= m <= n, n > 0");
  const auto& t = game.topic(0);
  const double rho = game.costs().rho;
  const double e = (t.gamma - t.beta) / (t.gamma + rho - 1);
  const double C = theorem5_constant(rho, t.gamma, t.beta, game.costs().c.minCoeff());

  BoundReport b;
  b.name = "genai-fraction";
  b.value = static_cast<double>(m) / n;
  b.lower = 1 - C * std::pow(t.mu, e) / (t.alpha * std::pow(static_cast<double>(n), 1 - e * (rho - 1)));
  b.upper = std::numeric_limits<double>::infinity();
  b.informative = b.lower > 0;
  b.pass = !b.informative || b.value > b.lower + kBoundSlack;
  std::ostringstream os;
  os << "n=" << n << " m=" << m << " mu=" << t.mu << " alpha=" << t.alpha << " beta=" << t.beta
     << " gamma=" << t.gamma << " rho=" << rho << " C=" << C;
  if (t.beta_tilde() + t.gamma_tilde() < 1)
    os << " [existence hypothesis fails]";
  if (!b.informative)
    os << " [uninformative]";
  b.context = os.str();
  return b;
}

Game counterexample_game()
{
  const TopicParams<double> first{0.25, 0.5, 1.0, 3.0};
  const TopicParams<double> second{0.25, 0.5, 1.0, 2.0};
  VectorXd c(2);
  c << 7.0, 7.0;
  return Game({first, second}, CostModel<double>{CostKind::L1Power, c, 2.0}, 0);
}

CounterexampleTrace run_counterexample(const SolverConfig& config, int max_steps)
{
  const Game game = counterexample_game();
  CounterexampleTrace trace;

  const EquilibriumReport all_human = mmd_solve(game, config);
  trace.all_human_effort = all_human.efforts.row(0).transpose();
  trace.all_human_utility = all_human.utilities[0];
  MixedProfile deviated = MixedProfile::all_human(all_human.efforts);
  deviated.set_genai(0);
  trace.genai_deviation_utility = utility_inclusive(game, deviated, 0);

  MixedProfile y(2, 2);
  y.set_genai(0);
  y.set_effort(1, best_response(game, 1, y.efforts(), 1, config));

  // States are compared together with whose move is next.
  std::vector<std::pair<std::vector<long long>, MixedProfile>> seen;
  auto tagged_key = [](const MixedProfile& p, Index mover) {
    auto key = profile_key(p);
    key.push_back(mover);
    return key;
  };
  seen.emplace_back(tagged_key(y, 0), y);

  for (int step = 0; step < max_steps; ++step) {
    const Index i = step % 2;
    const Index other = 1 - i;
    CycleStep cs;
    cs.mover = i;
    cs.before = y;
    cs.human_response = best_response(game, i, y.efforts(), y.uses_genai(other) ? 1 : 0, config);

    MixedProfile as_human = y;
    as_human.set_effort(i, cs.human_response);
    MixedProfile as_genai = y;
    as_genai.set_genai(i);
    cs.human_utility = utility_inclusive(game, as_human, i);
    cs.genai_utility = utility_inclusive(game, as_genai, i);
    y = cs.genai_utility > cs.human_utility + config.tie_eps ? as_genai : as_human;
    cs.after = y;
    trace.steps.push_back(cs);

    const auto key = tagged_key(y, other);
    const auto hit = std::find_if(seen.begin(), seen.end(),
                                  [&](const auto& entry) { return entry.first == key; });
    if (hit != seen.end()) {
      for (auto it = hit; it != seen.end(); ++it)
        trace.loop.push_back(it->second);
      trace.loop_found = true;
      break;
    }
    seen.emplace_back(key, y);
  }

  trace.arbitrary_status = arbitrary_inclusive_pne(game, 0, config).report.status;
  return trace;
}

} // namespace tullock
