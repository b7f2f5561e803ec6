#pragma once

// Game instances and payoff evaluation for the human-vs-GenAI Tullock contest.
//
// Everything here is header-only and templated on the scalar type so the same
// expressions can be evaluated in double (solvers) or long double (test
// oracles). A profile is an n x K Eigen matrix: row i is creator i's effort
// vector, column k is topic k.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tullock {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

inline constexpr double kDefaultGradClip = 1e6;

/// Reduced exponents (beta, gamma) from raw GenAI convergence rate and
/// traffic growth rate: beta = beta~ - gamma~, gamma = 1 - gamma~.
template <typename Scalar>
std::pair<Scalar, Scalar> reduce_exponents(Scalar beta_tilde, Scalar gamma_tilde)
{
  if (!(beta_tilde >= 0 && beta_tilde <= 1) || !(gamma_tilde >= 0 && gamma_tilde <= 1))
    throw std::invalid_argument("reduce_exponents: raw exponents must lie in [0,1]");
  return {beta_tilde - gamma_tilde, Scalar(1) - gamma_tilde};
}

/// Inverse of reduce_exponents: (beta~, gamma~) = (beta + 1 - gamma, 1 - gamma).
template <typename Scalar>
std::pair<Scalar, Scalar> raw_exponents(Scalar beta, Scalar gamma)
{
  return {beta + (Scalar(1) - gamma), Scalar(1) - gamma};
}

/// Per-topic contest constants in reduced form.
template <typename Scalar = double>
struct TopicParams
{
  Scalar alpha{1};  // GenAI data-usage efficiency
  Scalar beta{0.5}; // reduced GenAI exponent, in [-1, 1]
  Scalar gamma{0.9};
  Scalar mu{100}; // trendiness

  Scalar beta_tilde() const { return beta + (Scalar(1) - gamma); }
  Scalar gamma_tilde() const { return Scalar(1) - gamma; }

  void validate() const
  {
    if (!(alpha >= 0))
      throw std::invalid_argument("topic: alpha must be >= 0");
    if (!(mu > 0))
      throw std::invalid_argument("topic: mu must be > 0");
    if (!(gamma >= 0 && gamma <= 1))
      throw std::invalid_argument("topic: gamma must lie in [0,1]");
    if (!(beta >= -1 && beta <= 1))
      throw std::invalid_argument("topic: beta must lie in [-1,1]");
    const Scalar bt = beta_tilde();
    if (!(bt >= 0 && bt <= 1))
      throw std::invalid_argument("topic: raw exponent beta + 1 - gamma must lie in [0,1]");
  }

  template <typename T>
  TopicParams<T> cast() const
  {
    return {T(alpha), T(beta), T(gamma), T(mu)};
  }
};

/// GenAI body of content alpha * s^beta~ on a topic with human total s.
template <typename Scalar>
Scalar genai_output(Scalar s, const TopicParams<Scalar>& topic)
{
  if (!(s >= 0))
    throw std::invalid_argument("genai_output: s must be >= 0");
  return topic.alpha * std::pow(s, topic.beta_tilde());
}

/// Total user traffic mu * s^gamma~ attracted by a topic.
template <typename Scalar>
Scalar topic_traffic(Scalar s, const TopicParams<Scalar>& topic)
{
  if (!(s >= 0))
    throw std::invalid_argument("topic_traffic: s must be >= 0");
  return topic.mu * std::pow(s, topic.gamma_tilde());
}

// Contest denominator g(s) = m*alpha*s^beta + s^gamma and its derivatives.
// Only meaningful for s > 0.

template <typename Scalar>
Scalar denominator(const TopicParams<Scalar>& t, Scalar m, Scalar s)
{
  return m * t.alpha * std::pow(s, t.beta) + std::pow(s, t.gamma);
}

template <typename Scalar>
Scalar denominator_d1(const TopicParams<Scalar>& t, Scalar m, Scalar s)
{
  return m * t.alpha * t.beta * std::pow(s, t.beta - 1) + t.gamma * std::pow(s, t.gamma - 1);
}

template <typename Scalar>
Scalar denominator_d2(const TopicParams<Scalar>& t, Scalar m, Scalar s)
{
  return m * t.alpha * t.beta * (t.beta - 1) * std::pow(s, t.beta - 2) +
         t.gamma * (t.gamma - 1) * std::pow(s, t.gamma - 2);
}

/// x * mu / g(s): the traffic a creator with effort x captures on a topic.
/// Zero when the topic holds no human content.
template <typename Scalar>
Scalar traffic_gain(const TopicParams<Scalar>& t, Scalar m, Scalar s, Scalar x)
{
  if (s <= 0)
    return Scalar(0);
  return x * t.mu / denominator(t, m, s);
}

/// d/dx of traffic_gain with s moving one-for-one with x, clipped to +-clip.
///
/// At s = 0 the one-sided limit mu / g(0+) is used; it is +inf (clipped) when
/// g vanishes at the origin.
template <typename Scalar>
Scalar traffic_partial(const TopicParams<Scalar>& t, Scalar m, Scalar s, Scalar x,
                       Scalar clip = Scalar(kDefaultGradClip))
{
  Scalar d;
  if (s <= 0) {
    Scalar g0 = t.gamma == 0 ? Scalar(1) : Scalar(0);
    const Scalar ma = m * t.alpha;
    if (ma > 0) {
      if (t.beta < 0)
        return Scalar(0); // g(0+) = +inf
      if (t.beta == 0)
        g0 += ma;
    }
    d = g0 > 0 ? t.mu / g0 : clip;
  } else {
    const Scalar g = denominator(t, m, s);
    d = t.mu / g - t.mu * x * denominator_d1(t, m, s) / (g * g);
  }
  if (!std::isfinite(d))
    d = d > 0 ? clip : -clip;
  return std::clamp(d, -clip, clip);
}

enum class CostKind
{
  SeparablePower, // sum_k c_i * x_ik^rho
  L1Power         // c_i * (sum_k x_ik)^rho
};

/// Creator cost family with per-creator capability c_i and common exponent rho.
template <typename Scalar = double>
struct CostModel
{
  CostKind kind{CostKind::SeparablePower};
  Vector<Scalar> c;
  Scalar rho{1.5};

  Index size() const { return c.size(); }

  void validate() const
  {
    if (c.size() == 0)
      throw std::invalid_argument("cost: at least one creator required");
    for (Index i = 0; i < c.size(); ++i)
      if (!(c[i] > 0) || !std::isfinite(static_cast<double>(c[i])))
        throw std::invalid_argument("cost: every c_i must be positive and finite");
    if (!(rho >= 1))
      throw std::invalid_argument("cost: rho must be >= 1");
  }

  template <typename Derived>
  Scalar value(Index i, const Eigen::MatrixBase<Derived>& x) const
  {
    if (kind == CostKind::SeparablePower) {
      Scalar total = 0;
      for (Index k = 0; k < x.size(); ++k)
        total += std::pow(Scalar(x[k]), rho);
      return c[i] * total;
    }
    return c[i] * std::pow(Scalar(x.sum()), rho);
  }

  template <typename Derived>
  Vector<Scalar> gradient(Index i, const Eigen::MatrixBase<Derived>& x) const
  {
    Vector<Scalar> g(x.size());
    if (kind == CostKind::SeparablePower) {
      for (Index k = 0; k < x.size(); ++k)
        g[k] = c[i] * rho * std::pow(Scalar(x[k]), rho - 1);
    } else {
      g.setConstant(c[i] * rho * std::pow(Scalar(x.sum()), rho - 1));
    }
    return g;
  }

  template <typename Derived>
  Matrix<Scalar> hessian(Index i, const Eigen::MatrixBase<Derived>& x) const
  {
    const Index K = x.size();
    const Scalar curv = c[i] * rho * (rho - 1);
    if (kind == CostKind::SeparablePower) {
      Matrix<Scalar> h = Matrix<Scalar>::Zero(K, K);
      for (Index k = 0; k < K; ++k)
        h(k, k) = rho == 1 ? Scalar(0) : curv * std::pow(Scalar(x[k]), rho - 2);
      return h;
    }
    const Scalar v = rho == 1 ? Scalar(0) : curv * std::pow(Scalar(x.sum()), rho - 2);
    return Matrix<Scalar>::Constant(K, K, v);
  }

  template <typename T>
  CostModel<T> cast() const
  {
    return {kind, c.template cast<T>(), T(rho)};
  }
};

/// Exclusive-competition game instance: n creators, K topics and
/// `genai_multiplier` GenAI agents sharing each topic's contest denominator.
template <typename Scalar = double>
class ExclusiveGame
{
public:
  ExclusiveGame(std::vector<TopicParams<Scalar>> topics, CostModel<Scalar> costs,
                unsigned genai_multiplier = 1)
      : topics_(std::move(topics)), costs_(std::move(costs)), multiplier_(genai_multiplier)
  {
    if (topics_.empty())
      throw std::invalid_argument("game: at least one topic required");
    for (const auto& t : topics_)
      t.validate();
    costs_.validate();
    order_.resize(static_cast<std::size_t>(costs_.size()));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [this](Index a, Index b) { return costs_.c[a] < costs_.c[b]; });
  }

  Index n() const { return costs_.size(); }
  Index K() const { return static_cast<Index>(topics_.size()); }
  const std::vector<TopicParams<Scalar>>& topics() const { return topics_; }
  const TopicParams<Scalar>& topic(Index k) const { return topics_[static_cast<std::size_t>(k)]; }
  const CostModel<Scalar>& costs() const { return costs_; }
  unsigned genai_multiplier() const { return multiplier_; }

  /// Creator indices sorted by ascending cost (stable for ties).
  const std::vector<Index>& cost_order() const { return order_; }

  ExclusiveGame with_multiplier(unsigned m) const
  {
    ExclusiveGame g = *this;
    g.multiplier_ = m;
    return g;
  }

  ExclusiveGame with_costs(Vector<Scalar> c) const
  {
    CostModel<Scalar> cm = costs_;
    cm.c = std::move(c);
    return ExclusiveGame(topics_, std::move(cm), multiplier_);
  }

  template <typename T>
  ExclusiveGame<T> cast() const
  {
    std::vector<TopicParams<T>> ts;
    for (const auto& t : topics_)
      ts.push_back(t.template cast<T>());
    return ExclusiveGame<T>(std::move(ts), costs_.template cast<T>(), multiplier_);
  }

private:
  std::vector<TopicParams<Scalar>> topics_;
  CostModel<Scalar> costs_;
  unsigned multiplier_;
  std::vector<Index> order_;
};

/// K identical topics and a cost model; the common construction in experiments.
template <typename Scalar = double>
ExclusiveGame<Scalar> make_uniform_game(Index K, const TopicParams<Scalar>& topic,
                                        Vector<Scalar> c, Scalar rho,
                                        CostKind kind = CostKind::SeparablePower,
                                        unsigned genai_multiplier = 1)
{
  return ExclusiveGame<Scalar>(std::vector<TopicParams<Scalar>>(static_cast<std::size_t>(K), topic),
                               CostModel<Scalar>{kind, std::move(c), rho}, genai_multiplier);
}

template <typename Scalar>
void check_profile(const ExclusiveGame<Scalar>& game, const Matrix<Scalar>& x)
{
  if (x.rows() != game.n() || x.cols() != game.K())
    throw std::invalid_argument("profile dimensions do not match the game (expected " +
                                std::to_string(game.n()) + "x" + std::to_string(game.K()) +
                                ")");
}

/// s_k = sum_i x_ik.
template <typename Derived>
auto topic_totals(const Eigen::MatrixBase<Derived>& x)
{
  return x.colwise().sum().transpose().eval();
}

/// Inclusive-game profile: each creator either produces an effort vector or
/// takes the GenAI action. Rows of GenAI creators are kept at zero.
template <typename Scalar = double>
class InclusiveProfile
{
public:
  InclusiveProfile() = default;
  InclusiveProfile(Index n, Index K) : efforts_(Matrix<Scalar>::Zero(n, K)), genai_(static_cast<std::size_t>(n), false) {}

  static InclusiveProfile all_human(Matrix<Scalar> efforts)
  {
    InclusiveProfile p;
    p.genai_.assign(static_cast<std::size_t>(efforts.rows()), false);
    p.efforts_ = std::move(efforts);
    return p;
  }

  Index n() const { return efforts_.rows(); }
  Index K() const { return efforts_.cols(); }

  bool uses_genai(Index i) const { return genai_[static_cast<std::size_t>(i)]; }
  const std::vector<bool>& genai_flags() const { return genai_; }
  const Matrix<Scalar>& efforts() const { return efforts_; }

  void set_genai(Index i)
  {
    genai_[static_cast<std::size_t>(i)] = true;
    efforts_.row(i).setZero();
  }

  template <typename Derived>
  void set_effort(Index i, const Eigen::MatrixBase<Derived>& x)
  {
    genai_[static_cast<std::size_t>(i)] = false;
    efforts_.row(i) = x.transpose();
  }

  /// n^bot, the number of GenAI creators.
  Index genai_count() const
  {
    return static_cast<Index>(std::count(genai_.begin(), genai_.end(), true));
  }

  /// Human-only totals; GenAI content never feeds back into s_k.
  Vector<Scalar> human_totals() const { return topic_totals(efforts_); }

private:
  Matrix<Scalar> efforts_;
  std::vector<bool> genai_;
};

/// Exclusive-game utility of creator i.
template <typename Scalar>
Scalar utility_exclusive(const ExclusiveGame<Scalar>& game, const Matrix<Scalar>& x, Index i)
{
  check_profile(game, x);
  const Scalar m(game.genai_multiplier());
  Scalar u = 0;
  for (Index k = 0; k < game.K(); ++k)
    u += traffic_gain(game.topic(k), m, Scalar(x.col(k).sum()), Scalar(x(i, k)));
  return u - game.costs().value(i, x.row(i).transpose());
}

/// Inclusive-game utility of creator i. The game's own multiplier is ignored;
/// the number of GenAI creators in the profile takes its place.
template <typename Scalar>
Scalar utility_inclusive(const ExclusiveGame<Scalar>& game, const InclusiveProfile<Scalar>& y,
                         Index i)
{
  check_profile(game, y.efforts());
  const Scalar m(y.genai_count());
  const Vector<Scalar> s = y.human_totals();
  Scalar u = 0;
  if (y.uses_genai(i)) {
    for (Index k = 0; k < game.K(); ++k) {
      if (s[k] <= 0)
        continue;
      const auto& t = game.topic(k);
      const Scalar ai = t.alpha * std::pow(s[k], t.beta);
      u += ai * t.mu / denominator(t, m, s[k]);
    }
    return u;
  }
  for (Index k = 0; k < game.K(); ++k)
    u += traffic_gain(game.topic(k), m, s[k], y.efforts()(i, k));
  return u - game.costs().value(i, y.efforts().row(i).transpose());
}

/// Gradient of creator i's exclusive utility in its own efforts, each
/// component clipped to +-clip.
template <typename Scalar>
Vector<Scalar> grad_exclusive(const ExclusiveGame<Scalar>& game, const Matrix<Scalar>& x, Index i,
                              Scalar clip = Scalar(kDefaultGradClip))
{
  check_profile(game, x);
  const Scalar m(game.genai_multiplier());
  Vector<Scalar> g = -game.costs().gradient(i, x.row(i).transpose());
  for (Index k = 0; k < game.K(); ++k)
    g[k] += traffic_partial(game.topic(k), m, Scalar(x.col(k).sum()), Scalar(x(i, k)), clip);
  for (Index k = 0; k < g.size(); ++k)
    g[k] = std::clamp(g[k], -clip, clip);
  return g;
}

template <typename Scalar>
Vector<Scalar> utilities_exclusive(const ExclusiveGame<Scalar>& game, const Matrix<Scalar>& x)
{
  Vector<Scalar> u(game.n());
  for (Index i = 0; i < game.n(); ++i)
    u[i] = utility_exclusive(game, x, i);
  return u;
}

template <typename Scalar>
Vector<Scalar> utilities_inclusive(const ExclusiveGame<Scalar>& game,
                                   const InclusiveProfile<Scalar>& y)
{
  Vector<Scalar> u(game.n());
  for (Index i = 0; i < game.n(); ++i)
    u[i] = utility_inclusive(game, y, i);
  return u;
}

/// W = sum_i u_i.
template <typename Scalar>
Scalar welfare(const ExclusiveGame<Scalar>& game, const Matrix<Scalar>& x)
{
  return utilities_exclusive(game, x).sum();
}

template <typename Scalar>
Scalar welfare(const ExclusiveGame<Scalar>& game, const InclusiveProfile<Scalar>& y)
{
  return utilities_inclusive(game, y).sum();
}

} // namespace tullock
