#include "tullock/solvers.hpp"
#include "tullock/random.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace tullock {

void SolverConfig::validate() const
{
  if (max_iters <= 0)
    throw std::invalid_argument("solver: max_iters must be positive");
  if (!(step > 0) || !(tol > 0) || !(init > 0) || !(grad_clip > 0) || !(tie_eps > 0))
    throw std::invalid_argument("solver: step, tol, init, grad_clip and tie_eps must be positive");
  if (!(tol < init))
    throw std::invalid_argument("solver: tol must be smaller than init");
  if (stall_window <= 0 || max_halvings < 0)
    throw std::invalid_argument("solver: invalid step safeguard settings");
}

const char* to_string(SolveStatus s)
{
  switch (s) {
  case SolveStatus::Converged:
    return "converged";
  case SolveStatus::NonConvergence:
    return "non-convergence";
  case SolveStatus::CycleSuspected:
    return "cycle-suspected";
  }
  return "unknown";
}

MixedProfile EquilibriumReport::profile() const
{
  MixedProfile p = MixedProfile::all_human(efforts);
  for (std::size_t i = 0; i < genai.size(); ++i)
    if (genai[i])
      p.set_genai(static_cast<Index>(i));
  return p;
}

namespace {

// The exclusive game restricted to `free` creators, with everybody else
// folded into a per-topic background total and the GenAI multiplier.
struct Subproblem
{
  const Game& game;
  double multiplier;
  VectorXd background;
  std::vector<Index> free;
};

Profile free_gradient(const Subproblem& sp, const Profile& x, double clip)
{
  const Index K = sp.game.K();
  const VectorXd s = topic_totals(x) + sp.background;
  Profile g(x.rows(), K);
  for (Index r = 0; r < x.rows(); ++r) {
    const VectorXd cost_grad = sp.game.costs().gradient(sp.free[static_cast<std::size_t>(r)],
                                                        x.row(r).transpose());
    for (Index k = 0; k < K; ++k) {
      const double d =
          traffic_partial(sp.game.topic(k), sp.multiplier, s[k], x(r, k), clip) - cost_grad[k];
      g(r, k) = std::isfinite(d) ? std::clamp(d, -clip, clip) : -clip;
    }
  }
  return g;
}

struct AscentResult
{
  Profile x;
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  double step = 0;
};

// Simultaneous projected gradient ascent. Stops on the projected-gradient
// residual ||max(0, x + eta*g) - x|| / eta < tol.
AscentResult ascend(const Subproblem& sp, const SolverConfig& cfg)
{
  AscentResult out;
  const Index nf = static_cast<Index>(sp.free.size());
  out.x = Profile::Constant(nf, sp.game.K(), cfg.init);
  out.step = cfg.step;
  if (nf == 0) {
    out.converged = true;
    out.residual = 0;
    return out;
  }

  double eta = cfg.step;
  double best = std::numeric_limits<double>::infinity();
  Profile best_x = out.x;
  int stall = 0;
  int halvings = 0;
  Profile x = out.x;

  for (int t = 0; t < cfg.max_iters; ++t) {
    const Profile g = free_gradient(sp, x, cfg.grad_clip);
    const Profile next = (x + eta * g).cwiseMax(0.0);
    const double r = (next - x).norm() / eta;
    out.iterations = t + 1;
    if (r < cfg.tol) {
      out.x = next;
      out.converged = true;
      out.residual = r;
      out.step = eta;
      return out;
    }
    const bool finite = std::isfinite(r) && next.allFinite();
    if (finite && r < best) {
      best = r;
      best_x = x;
      stall = 0;
    } else {
      ++stall;
    }
    if (!finite || stall >= cfg.stall_window) {
      if (halvings < cfg.max_halvings) {
        eta *= 0.5;
        ++halvings;
        x = best_x;
        best = std::numeric_limits<double>::infinity();
        stall = 0;
        continue;
      }
      if (!finite)
        break;
    }
    x = next;
  }
  out.x = best_x;
  out.residual = best;
  out.step = eta;
  return out;
}

Subproblem make_subproblem(const Game& game, const MixedProfile& fixed,
                           const std::vector<bool>& free)
{
  if (fixed.n() != game.n() || fixed.K() != game.K() ||
      free.size() != static_cast<std::size_t>(game.n()))
    throw std::invalid_argument("subgame: dimensions do not match the game");
  Subproblem sp{game, static_cast<double>(game.genai_multiplier()), VectorXd::Zero(game.K()), {}};
  for (Index i = 0; i < game.n(); ++i) {
    if (free[static_cast<std::size_t>(i)])
      sp.free.push_back(i);
    else if (fixed.uses_genai(i))
      sp.multiplier += 1.0;
    else
      sp.background += fixed.efforts().row(i).transpose();
  }
  return sp;
}

double marginal_1d(const Game& game, Index i, double background, double m, double x)
{
  const auto& t = game.topic(0);
  const double traffic = traffic_partial(t, m, background + x, x, std::numeric_limits<double>::max());
  VectorXd xv(1);
  xv[0] = x;
  return traffic - game.costs().gradient(i, xv)[0];
}

VectorXd others_background(const Game& game, Index i, const Profile& others)
{
  if (others.rows() != game.n() || others.cols() != game.K())
    throw std::invalid_argument("best_response: profile dimensions do not match the game");
  VectorXd b = VectorXd::Zero(game.K());
  for (Index j = 0; j < game.n(); ++j)
    if (j != i)
      b += others.row(j).transpose();
  return b;
}

std::vector<bool> humans_except(const MixedProfile& p, Index skip)
{
  std::vector<bool> free(static_cast<std::size_t>(p.n()), false);
  for (Index j = 0; j < p.n(); ++j)
    free[static_cast<std::size_t>(j)] = j != skip && !p.uses_genai(j);
  return free;
}

} // namespace

SubgameResult subgame_solve(const Game& game, const MixedProfile& fixed,
                            const std::vector<bool>& free, const SolverConfig& config)
{
  config.validate();
  const Subproblem sp = make_subproblem(game, fixed, free);
  const AscentResult a = ascend(sp, config);

  SubgameResult out;
  out.efforts = fixed.efforts();
  for (std::size_t r = 0; r < sp.free.size(); ++r)
    out.efforts.row(sp.free[r]) = a.x.row(static_cast<Index>(r));
  out.converged = a.converged;
  out.iterations = a.iterations;
  out.residual = a.residual;
  out.step_used = a.step;
  return out;
}

double verify_first_order(const Game& game, const Profile& x, double grad_clip)
{
  check_profile(game, x);
  if ((x.array() < 0).any() || !x.allFinite())
    throw std::invalid_argument("verify_first_order: profile must be nonnegative and finite");
  double worst = 0;
  for (Index i = 0; i < game.n(); ++i) {
    const VectorXd g = grad_exclusive(game, x, i, grad_clip);
    for (Index k = 0; k < game.K(); ++k)
      worst = std::max(worst, x(i, k) > 0 ? std::abs(g[k]) : std::max(0.0, g[k]));
  }
  return worst;
}

EquilibriumReport mmd_solve(const Game& game, const SolverConfig& config)
{
  const MixedProfile fixed(game.n(), game.K());
  const std::vector<bool> all(static_cast<std::size_t>(game.n()), true);
  const SubgameResult sub = subgame_solve(game, fixed, all, config);

  EquilibriumReport rep;
  rep.efforts = sub.efforts;
  rep.converged = sub.converged;
  rep.status = sub.converged ? SolveStatus::Converged : SolveStatus::NonConvergence;
  rep.iterations = sub.iterations;
  rep.residual = sub.residual;
  rep.step_used = sub.step_used;
  rep.utilities = utilities_exclusive(game, rep.efforts);
  rep.topic_totals = topic_totals(rep.efforts);
  rep.welfare = rep.utilities.sum();
  rep.verified = sub.converged && verify_first_order(game, rep.efforts, config.grad_clip) < config.tol;
  for (const auto& t : game.topics())
    rep.guaranteed_regime = rep.guaranteed_regime && t.beta >= 0;
  return rep;
}

VectorXd best_response(const Game& game, Index i, const Profile& others, int genai_count,
                       const SolverConfig& config)
{
  if (i < 0 || i >= game.n())
    throw std::out_of_range("best_response: creator index out of range");
  if (genai_count < 0)
    throw std::invalid_argument("best_response: genai_count must be >= 0");
  const VectorXd b = others_background(game, i, others);

  if (game.K() > 1) {
    const Game g = game.with_multiplier(static_cast<unsigned>(genai_count));
    Subproblem sp{g, static_cast<double>(genai_count), b, {i}};
    const AscentResult a = ascend(sp, config);
    return a.x.row(0).transpose();
  }

  const double m = genai_count;
  VectorXd out = VectorXd::Zero(1);
  if (marginal_1d(game, i, b[0], m, 0.0) <= 0)
    return out;

  const auto& t = game.topic(0);
  const double c = game.costs().c[i];
  const double rho = game.costs().rho;
  double hi = 1.0;
  if (b[0] > 0 && rho > 1)
    hi = 10.0 * std::pow(t.mu / (c * rho * std::pow(b[0], t.gamma)) + 1.0, 1.0 / (rho - 1.0));
  for (int expand = 0; expand < 2000 && marginal_1d(game, i, b[0], m, hi) > 0; ++expand)
    hi *= 2.0;
  if (marginal_1d(game, i, b[0], m, hi) > 0)
    throw std::runtime_error("best_response: could not bracket the maximiser");

  double lo = 0.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (marginal_1d(game, i, b[0], m, mid) > 0 ? lo : hi) = mid;
  }
  out[0] = 0.5 * (lo + hi);
  return out;
}

VectorXd best_response_oracle(const Game& game, Index i, const Profile& others, int genai_count,
                              double grid_step)
{
  if (game.K() > 2)
    throw std::invalid_argument("best_response_oracle: at most two topics");
  if (!(grid_step > 0))
    throw std::invalid_argument("best_response_oracle: grid_step must be positive");
  const VectorXd b = others_background(game, i, others);
  const double m = genai_count;
  const double c = game.costs().c[i];
  const double rho = game.costs().rho;
  const Index K = game.K();

  // Any maximiser earns at least u(0) = 0, which bounds the search box.
  double box = std::numeric_limits<double>::infinity();
  double mu_sum = 0, best_rate = 0;
  bool increasing = true;
  for (Index k = 0; k < K; ++k) {
    const auto& t = game.topic(k);
    mu_sum += t.mu;
    increasing = increasing && (t.beta >= 0 || m * t.alpha == 0);
    best_rate = std::max(best_rate, b[k] > 0 ? t.mu / denominator(t, m, b[k])
                                             : std::numeric_limits<double>::infinity());
  }
  double min_gamma = 1;
  for (Index k = 0; k < K; ++k)
    min_gamma = std::min(min_gamma, game.topic(k).gamma);
  if (rho + min_gamma - 1 > 0)
    box = std::pow(std::max(1.0, mu_sum / c), 1.0 / (rho + min_gamma - 1));
  if (increasing && rho > 1 && std::isfinite(best_rate))
    box = std::min(box, std::pow(best_rate / c, 1.0 / (rho - 1)));
  if (!std::isfinite(box))
    throw std::invalid_argument("best_response_oracle: unbounded search box");

  const auto points = static_cast<long long>(std::ceil(box / grid_step)) + 1;
  if (K == 2 && points * points > 400'000'000LL)
    throw std::invalid_argument("best_response_oracle: grid too fine for the search box");

  Profile x = others;
  x.row(i).setZero();
  const Game g = game.with_multiplier(static_cast<unsigned>(genai_count));
  auto value = [&](const VectorXd& y) {
    double u = 0;
    for (Index k = 0; k < K; ++k)
      u += traffic_gain(g.topic(k), m, b[k] + y[k], y[k]);
    return u - g.costs().value(i, y);
  };

  VectorXd best = VectorXd::Zero(K), y(K);
  double best_u = value(best);
  if (K == 1) {
    for (long long a = 0; a < points; ++a) {
      y[0] = static_cast<double>(a) * grid_step;
      const double u = value(y);
      if (u > best_u) {
        best_u = u;
        best = y;
      }
    }
  } else {
    for (long long a = 0; a < points; ++a)
      for (long long c2 = 0; c2 < points; ++c2) {
        y[0] = static_cast<double>(a) * grid_step;
        y[1] = static_cast<double>(c2) * grid_step;
        const double u = value(y);
        if (u > best_u) {
          best_u = u;
          best = y;
        }
      }
  }
  return best;
}

EquilibriumReport make_inclusive_report(const Game& game, const MixedProfile& p)
{
  EquilibriumReport rep;
  rep.efforts = p.efforts();
  rep.genai = p.genai_flags();
  rep.utilities = utilities_inclusive(game, p);
  rep.topic_totals = p.human_totals();
  rep.welfare = rep.utilities.sum();
  rep.genai_count = static_cast<int>(p.genai_count());
  return rep;
}

std::vector<long long> profile_key(const MixedProfile& p)
{
  std::vector<long long> key;
  key.reserve(static_cast<std::size_t>(p.n() * (p.K() + 1)));
  for (Index i = 0; i < p.n(); ++i) {
    key.push_back(p.uses_genai(i) ? 1 : 0);
    for (Index k = 0; k < p.K(); ++k)
      key.push_back(std::llround(p.efforts()(i, k) * 1e6));
  }
  return key;
}

CheckResult inclusive_pne_check(const Game& game, const MixedProfile& profile,
                                const SolverConfig& config, std::span<const Index> order)
{
  const Game g0 = game.with_multiplier(0);
  check_profile(g0, profile.efforts());
  std::vector<Index> default_order;
  if (order.empty()) {
    default_order.resize(static_cast<std::size_t>(game.n()));
    std::iota(default_order.begin(), default_order.end(), Index{0});
    order = default_order;
  }

  for (const Index i : order) {
    MixedProfile next = profile;
    bool deviates = false;
    if (!profile.uses_genai(i)) {
      next.set_genai(i);
      deviates = utility_inclusive(g0, next, i) > utility_inclusive(g0, profile, i) + config.tie_eps;
    } else {
      const int others_genai = static_cast<int>(profile.genai_count()) - 1;
      const VectorXd br = best_response(g0, i, profile.efforts(), others_genai, config);
      next.set_effort(i, br);
      deviates = utility_inclusive(g0, next, i) > utility_inclusive(g0, profile, i) + config.tie_eps;
    }
    if (!deviates)
      continue;

    const SubgameResult sub = subgame_solve(g0, next, humans_except(next, i), config);
    CheckResult out;
    out.updated = next;
    for (Index j = 0; j < game.n(); ++j)
      if (j != i && !next.uses_genai(j))
        out.updated.set_effort(j, sub.efforts.row(j).transpose());
    out.deviator = i;
    out.inner_converged = sub.converged;
    return out;
  }
  return CheckResult{true, profile, std::nullopt, true};
}

EquilibriumReport targeted_inclusive_pne(const Game& game, const SolverConfig& config)
{
  if (game.K() != 1)
    throw std::invalid_argument("targeted_inclusive_pne: requires a single topic");
  config.validate();
  const Game g0 = game.with_multiplier(0);
  const Index n = game.n();

  std::vector<Index> humans = game.cost_order(); // ascending cost
  std::vector<bool> free(static_cast<std::size_t>(n), true);
  MixedProfile y(n, 1);
  SubgameResult sub = subgame_solve(g0, y, free, config);
  bool all_converged = sub.converged;
  int iterations = sub.iterations;
  y = MixedProfile::all_human(sub.efforts);

  while (!humans.empty()) {
    const Index i = humans.back();
    MixedProfile trial = y;
    trial.set_genai(i);
    if (!(utility_inclusive(g0, trial, i) > utility_inclusive(g0, y, i) + config.tie_eps))
      break;
    humans.pop_back();
    free[static_cast<std::size_t>(i)] = false;
    sub = subgame_solve(g0, trial, free, config);
    all_converged = all_converged && sub.converged;
    iterations += sub.iterations;
    y = trial;
    for (const Index j : humans)
      y.set_effort(j, sub.efforts.row(j).transpose());
  }

  EquilibriumReport rep = make_inclusive_report(g0, y);
  rep.converged = all_converged;
  rep.status = all_converged ? SolveStatus::Converged : SolveStatus::NonConvergence;
  rep.iterations = iterations;
  rep.residual = sub.residual;
  rep.step_used = sub.step_used;
  const auto& t = game.topic(0);
  rep.guaranteed_regime = t.beta_tilde() + t.gamma_tilde() >= 1.0;
  rep.verified = inclusive_pne_check(g0, y, config).is_pne;
  return rep;
}

ArbitraryResult arbitrary_inclusive_pne(const Game& game, std::uint64_t seed,
                                        const SolverConfig& config, int round_cap,
                                        std::optional<MixedProfile> initial)
{
  config.validate();
  if (round_cap <= 0)
    throw std::invalid_argument("arbitrary_inclusive_pne: round_cap must be positive");
  const Game g0 = game.with_multiplier(0);
  const Index n = game.n();

  ArbitraryResult out;
  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(out.order);

  bool all_converged = true;
  MixedProfile y;
  if (initial) {
    y = *initial;
    check_profile(g0, y.efforts());
  } else {
    const std::vector<bool> free(static_cast<std::size_t>(n), true);
    const SubgameResult sub = subgame_solve(g0, MixedProfile(n, game.K()), free, config);
    all_converged = sub.converged;
    y = MixedProfile::all_human(sub.efforts);
  }

  constexpr std::size_t kWindow = 12;
  std::deque<std::pair<std::vector<long long>, MixedProfile>> recent;
  recent.emplace_back(profile_key(y), y);

  auto finish = [&](SolveStatus status) {
    out.report = make_inclusive_report(g0, y);
    out.report.status = status;
    out.report.converged = status == SolveStatus::Converged && all_converged;
    out.report.iterations = out.rounds;
    out.report.verified = status == SolveStatus::Converged;
    if (status == SolveStatus::Converged && !all_converged)
      out.report.status = SolveStatus::NonConvergence;
    return out;
  };

  while (out.rounds < round_cap) {
    CheckResult chk = inclusive_pne_check(g0, y, config, out.order);
    if (chk.is_pne)
      return finish(SolveStatus::Converged);
    ++out.rounds;
    all_converged = all_converged && chk.inner_converged;
    y = std::move(chk.updated);
    const auto key = profile_key(y);
    for (std::size_t r = 0; r < recent.size(); ++r) {
      if (recent[r].first == key) {
        for (std::size_t q = r; q < recent.size(); ++q)
          out.cycle.push_back(recent[q].second);
        return finish(SolveStatus::CycleSuspected);
      }
    }
    recent.emplace_back(key, y);
    if (recent.size() > kWindow)
      recent.pop_front();
  }
  for (const auto& [key, p] : recent)
    out.cycle.push_back(p);
  return finish(SolveStatus::CycleSuspected);
}

} // namespace tullock
