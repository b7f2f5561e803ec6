#include "tullock/experiments.hpp"

#include "tullock/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace tullock {

const char* to_string(SweepKind kind)
{
  switch (kind) {
  case SweepKind::Q1Exclusive: return "Q1_exclusive";
  case SweepKind::Q2InclusiveTargeted: return "Q2_inclusive_targeted";
  case SweepKind::Q2InclusiveArbitrary: return "Q2_inclusive_arbitrary";
  case SweepKind::Q3Inclusive: return "Q3_inclusive";
  case SweepKind::Q4Multitopic: return "Q4_multitopic";
  }
  return "?";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name)
{
  for (SweepKind k : {SweepKind::Q1Exclusive, SweepKind::Q2InclusiveTargeted,
                      SweepKind::Q2InclusiveArbitrary, SweepKind::Q3Inclusive,
                      SweepKind::Q4Multitopic})
    if (name == to_string(k))
      return k;
  return std::nullopt;
}

bool is_inclusive(SweepKind kind)
{
  return kind == SweepKind::Q2InclusiveTargeted || kind == SweepKind::Q2InclusiveArbitrary ||
         kind == SweepKind::Q3Inclusive;
}

const char* to_string(OccupationMetric metric)
{
  return metric == OccupationMetric::EffortShare ? "effort_share" : "human_traffic_share";
}

std::optional<OccupationMetric> parse_occupation_metric(std::string_view name)
{
  if (name == "effort_share")
    return OccupationMetric::EffortShare;
  if (name == "human_traffic_share")
    return OccupationMetric::HumanTrafficShare;
  return std::nullopt;
}

void GameTemplate::validate() const
{
  if (n < 1 || K < 1)
    throw std::invalid_argument("game template: n and K must be positive");
  if (!(cost_lo > 0 && cost_lo < cost_hi))
    throw std::invalid_argument("game template: need 0 < cost_lo < cost_hi");
  if (!(rho > 1))
    throw std::invalid_argument("game template: rho must exceed 1");
  for (const auto* v : {&topic_alpha, &topic_beta, &topic_gamma, &topic_mu})
    if (!v->empty() && static_cast<int>(v->size()) != K)
      throw std::invalid_argument("game template: per-topic override length must equal K");
  for (const auto& t : topics())
    t.validate();
}

std::vector<TopicParams<double>> GameTemplate::topics() const
{
  auto pick = [](const std::vector<double>& over, std::size_t k, double fallback) {
    return over.empty() ? fallback : over[k];
  };
  std::vector<TopicParams<double>> out;
  for (std::size_t k = 0; k < static_cast<std::size_t>(std::max(K, 0)); ++k)
    out.push_back({pick(topic_alpha, k, alpha), pick(topic_beta, k, beta),
                   pick(topic_gamma, k, gamma), pick(topic_mu, k, mu)});
  return out;
}

const std::vector<std::string>& sweepable_parameters()
{
  static const std::vector<std::string> names{"n",  "K",       "alpha",  "beta", "gamma",
                                              "rho", "mu",     "cost_lo", "cost_hi"};
  return names;
}

std::vector<std::uint64_t> default_seeds(std::uint64_t base, int count)
{
  std::vector<std::uint64_t> s(static_cast<std::size_t>(std::max(count, 0)));
  std::iota(s.begin(), s.end(), base);
  return s;
}

namespace {

void set_parameter(GameTemplate& t, const std::string& name, double v)
{
  auto as_int = [&](const char* what) {
    if (v != std::floor(v) || v < 1)
      throw std::invalid_argument(std::string("sweep: ") + what + " must be a positive integer");
    return static_cast<int>(v);
  };
  if (name == "n") t.n = as_int("n");
  else if (name == "K") t.K = as_int("K");
  else if (name == "alpha") t.alpha = v;
  else if (name == "beta") t.beta = v;
  else if (name == "gamma") t.gamma = v;
  else if (name == "rho") t.rho = v;
  else if (name == "mu") t.mu = v;
  else if (name == "cost_lo") t.cost_lo = v;
  else if (name == "cost_hi") t.cost_hi = v;
  else throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
}

} // namespace

void SweepSpec::validate() const
{
  if (seeds.empty())
    throw std::invalid_argument("sweep: seed list is empty");
  if (round_cap < 1)
    throw std::invalid_argument("sweep: round_cap must be positive");
  solver.validate();
  const auto& names = sweepable_parameters();
  for (const auto& a : axes) {
    if (std::find(names.begin(), names.end(), a.name) == names.end())
      throw std::invalid_argument("sweep: unknown parameter '" + a.name + "'");
    if (a.values.empty())
      throw std::invalid_argument("sweep: axis '" + a.name + "' has no values");
  }
  for (std::size_t p = 0; p < grid_size(); ++p) {
    const GameTemplate t = instantiate(p);
    t.validate();
    if (kind != SweepKind::Q4Multitopic && kind != SweepKind::Q1Exclusive && t.K != 1)
      throw std::invalid_argument("sweep: inclusive kinds require K = 1");
  }
}

std::size_t SweepSpec::grid_size() const
{
  std::size_t total = 1;
  for (const auto& a : axes)
    total *= a.values.size();
  return total;
}

std::vector<double> SweepSpec::grid_point(std::size_t index) const
{
  std::vector<double> v(axes.size());
  for (std::size_t r = axes.size(); r-- > 0;) {
    const std::size_t len = axes[r].values.size();
    v[r] = axes[r].values[index % len];
    index /= len;
  }
  return v;
}

GameTemplate SweepSpec::instantiate(std::size_t index) const
{
  GameTemplate t = base;
  const auto v = grid_point(index);
  for (std::size_t r = 0; r < axes.size(); ++r)
    set_parameter(t, axes[r].name, v[r]);
  return t;
}

VectorXd sample_costs(Index n, double lo, double hi, std::uint64_t seed)
{
  if (n < 0 || !(lo > 0 && lo < hi))
    throw std::invalid_argument("sample_costs: need n >= 0 and 0 < lo < hi");
  Rng rng(seed);
  VectorXd c(n);
  for (Index i = 0; i < n; ++i)
    c[i] = rng.uniform(lo, hi);
  return c;
}

Game build_instance(const GameTemplate& tmpl, std::uint64_t seed)
{
  tmpl.validate();
  const VectorXd c = sample_costs(tmpl.n, tmpl.cost_lo, tmpl.cost_hi, seed);
  return Game(tmpl.topics(), CostModel<double>{tmpl.cost_kind, c, tmpl.rho}, 1);
}

std::optional<VectorXd> occupation_ratio(const Profile& x, const Game& game,
                                         OccupationMetric metric)
{
  check_profile(game, x);
  const VectorXd s = topic_totals(x);
  if (!(s.sum() > 0))
    return std::nullopt;
  VectorXd out(game.K());
  if (metric == OccupationMetric::EffortShare) {
    double mu_total = 0;
    for (const auto& t : game.topics())
      mu_total += t.mu;
    for (Index k = 0; k < game.K(); ++k)
      out[k] = (s[k] / s.sum()) / (game.topic(k).mu / mu_total);
  } else {
    const double m = game.genai_multiplier();
    for (Index k = 0; k < game.K(); ++k) {
      const auto& t = game.topic(k);
      out[k] = s[k] > 0 ? std::pow(s[k], t.gamma) / denominator(t, m, s[k]) : 0.0;
    }
  }
  return out;
}

VectorXd per_topic_gain(const Profile& x, const Game& game)
{
  check_profile(game, x);
  const VectorXd s = topic_totals(x);
  VectorXd out = VectorXd::Zero(game.K());
  for (Index k = 0; k < game.K(); ++k)
    for (Index i = 0; i < game.n(); ++i)
      out[k] += traffic_gain(game.topic(k), double(game.genai_multiplier()), s[k], x(i, k));
  return out / static_cast<double>(game.n());
}

std::vector<double> cost_group_adoption(const Game& game, const std::vector<bool>& genai,
                                        int groups)
{
  if (groups < 1 || static_cast<Index>(genai.size()) != game.n())
    throw std::invalid_argument("cost_group_adoption: bad arguments");
  const auto& order = game.cost_order();
  const std::size_t n = order.size();
  std::vector<double> out(static_cast<std::size_t>(groups), 0.0);
  std::vector<int> sizes(out.size(), 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t g = r * static_cast<std::size_t>(groups) / n;
    sizes[g] += 1;
    out[g] += genai[static_cast<std::size_t>(order[r])] ? 1.0 : 0.0;
  }
  for (std::size_t g = 0; g < out.size(); ++g)
    out[g] = sizes[g] > 0 ? out[g] / sizes[g] : 0.0;
  return out;
}

namespace {

void fill_topics(SweepRow& row, const EquilibriumReport& rep, const Game& game,
                 OccupationMetric metric)
{
  row.topic_s.assign(rep.topic_totals.data(), rep.topic_totals.data() + rep.topic_totals.size());
  const auto occ = occupation_ratio(rep.efforts, game, metric);
  row.topic_occ.assign(static_cast<std::size_t>(game.K()), std::nullopt);
  if (occ)
    for (Index k = 0; k < game.K(); ++k)
      row.topic_occ[static_cast<std::size_t>(k)] = (*occ)[k];
  const VectorXd gain = per_topic_gain(rep.efforts, game);
  row.topic_gain.assign(gain.data(), gain.data() + gain.size());
}

void split_utilities(SweepRow& row, const EquilibriumReport& rep)
{
  row.human_utility = 0;
  row.genai_utility = 0;
  for (Index i = 0; i < rep.utilities.size(); ++i)
    (rep.genai[static_cast<std::size_t>(i)] ? row.genai_utility : row.human_utility) +=
        rep.utilities[i];
}

} // namespace

SweepRow run_instance(const SweepSpec& spec, std::size_t point, std::size_t seed_index)
{
  SweepRow row;
  row.instance_id = point;
  row.seed = spec.seeds.at(seed_index);
  row.swept = spec.grid_point(point);
  try {
    const GameTemplate tmpl = spec.instantiate(point);
    const Game game = build_instance(tmpl, row.seed);
    EquilibriumReport rep;
    switch (spec.kind) {
    case SweepKind::Q1Exclusive:
    case SweepKind::Q4Multitopic:
      rep = mmd_solve(game, spec.solver);
      break;
    case SweepKind::Q2InclusiveTargeted:
    case SweepKind::Q3Inclusive:
      rep = targeted_inclusive_pne(game, spec.solver);
      break;
    case SweepKind::Q2InclusiveArbitrary: {
      auto res = arbitrary_inclusive_pne(game, row.seed, spec.solver, spec.round_cap);
      rep = std::move(res.report);
      row.decile_adoption = cost_group_adoption(game, rep.genai, 10);
      break;
    }
    }
    row.s_star = rep.topic_totals.sum();
    row.welfare = rep.welfare;
    row.genai_fraction = static_cast<double>(rep.genai_count) / game.n();
    row.iterations = rep.iterations;
    row.residual = rep.residual;
    row.verified = rep.verified;
    row.status = rep.status;
    if (is_inclusive(spec.kind)) {
      split_utilities(row, rep);
      row.genai = rep.genai;
    }
    else
      row.human_utility = rep.welfare;
    if (spec.kind == SweepKind::Q4Multitopic)
      fill_topics(row, rep, game, spec.metric);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.verified = false;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs)
{
  spec.validate();
  const std::size_t per_point = spec.seeds.size();
  const std::size_t total = spec.grid_size() * per_point;
  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < total; r = next++)
      rows[r] = run_instance(spec, r / per_point, r % per_point);
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(total, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  return rows;
}

namespace {

PointSummary::Stat stat(const std::vector<double>& v)
{
  PointSummary::Stat s;
  if (v.empty())
    return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v)
      ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    s.sem = s.std / std::sqrt(static_cast<double>(v.size()));
  }
  return s;
}

} // namespace

std::vector<PointSummary> summarize(const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
  std::vector<PointSummary> out;
  for (std::size_t p = 0; p < spec.grid_size(); ++p) {
    PointSummary ps;
    ps.instance_id = p;
    ps.swept = spec.grid_point(p);
    std::vector<double> s, w, f, hu, gu;
    std::vector<std::vector<double>> occ, gain;
    for (const auto& r : rows) {
      if (r.instance_id != p)
        continue;
      ps.count += 1;
      ps.verified += r.verified ? 1 : 0;
      s.push_back(r.s_star);
      w.push_back(r.welfare);
      f.push_back(r.genai_fraction);
      hu.push_back(r.human_utility);
      gu.push_back(r.genai_utility);
      occ.resize(std::max(occ.size(), r.topic_occ.size()));
      gain.resize(std::max(gain.size(), r.topic_gain.size()));
      for (std::size_t k = 0; k < r.topic_occ.size(); ++k)
        if (r.topic_occ[k])
          occ[k].push_back(*r.topic_occ[k]);
      for (std::size_t k = 0; k < r.topic_gain.size(); ++k)
        gain[k].push_back(r.topic_gain[k]);
    }
    ps.s_star = stat(s);
    ps.welfare = stat(w);
    ps.genai_fraction = stat(f);
    ps.human_utility = stat(hu);
    ps.genai_utility = stat(gu);
    for (const auto& v : occ)
      ps.topic_occ.push_back(stat(v));
    for (const auto& v : gain)
      ps.topic_gain.push_back(stat(v));
    out.push_back(std::move(ps));
  }
  return out;
}

std::vector<double> mean_decile_adoption(const std::vector<SweepRow>& rows)
{
  std::vector<double> out;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.decile_adoption.empty())
      continue;
    out.resize(std::max(out.size(), r.decile_adoption.size()), 0.0);
    for (std::size_t g = 0; g < r.decile_adoption.size(); ++g)
      out[g] += r.decile_adoption[g];
    count += 1;
  }
  for (double& v : out)
    v /= static_cast<double>(count);
  return out;
}

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

int topic_count(const SweepSpec& spec)
{
  if (spec.kind != SweepKind::Q4Multitopic)
    return 0;
  int K = 0;
  for (std::size_t p = 0; p < spec.grid_size(); ++p)
    K = std::max(K, spec.instantiate(p).K);
  return K;
}

void write_line(std::ostream& os, const std::vector<std::string>& fields)
{
  for (std::size_t j = 0; j < fields.size(); ++j)
    os << (j ? "," : "") << fields[j];
  os << '\n';
}

} // namespace

std::vector<std::string> csv_header(const SweepSpec& spec)
{
  std::vector<std::string> h{"instance_id", "seed"};
  for (const auto& a : spec.axes)
    h.push_back(a.name);
  for (const char* c : {"s_star", "welfare", "genai_fraction", "iterations", "residual", "verified"})
    h.emplace_back(c);
  if (is_inclusive(spec.kind)) {
    h.emplace_back("human_utility");
    h.emplace_back("genai_utility");
  }
  for (int k = 1; k <= topic_count(spec); ++k)
    for (const char* c : {"_s", "_occ", "_gain"})
      h.push_back("topic" + std::to_string(k) + c);
  return h;
}

void write_rows_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
  write_line(os, csv_header(spec));
  const auto K = static_cast<std::size_t>(topic_count(spec));
  for (const auto& r : rows) {
    std::vector<std::string> f{std::to_string(r.instance_id), std::to_string(r.seed)};
    for (double v : r.swept)
      f.push_back(format_double(v));
    f.push_back(format_double(r.s_star));
    f.push_back(format_double(r.welfare));
    f.push_back(format_double(r.genai_fraction));
    f.push_back(std::to_string(r.iterations));
    f.push_back(format_double(r.residual));
    f.emplace_back(r.verified ? "1" : "0");
    if (is_inclusive(spec.kind)) {
      f.push_back(format_double(r.human_utility));
      f.push_back(format_double(r.genai_utility));
    }
    for (std::size_t k = 0; k < K; ++k) {
      const bool have = k < r.topic_s.size();
      f.push_back(have ? format_double(r.topic_s[k]) : "");
      f.push_back(have && r.topic_occ[k] ? format_double(*r.topic_occ[k]) : "");
      f.push_back(have ? format_double(r.topic_gain[k]) : "");
    }
    write_line(os, f);
  }
}

void write_summary_csv(std::ostream& os, const SweepSpec& spec,
                       const std::vector<PointSummary>& summary)
{
  std::vector<std::string> h{"instance_id"};
  for (const auto& a : spec.axes)
    h.push_back(a.name);
  h.emplace_back("count");
  h.emplace_back("verified");
  const std::vector<std::string> metrics{"s_star", "welfare", "genai_fraction", "human_utility",
                                         "genai_utility"};
  auto add_stat_cols = [&](const std::string& m) {
    for (const char* suffix : {"_mean", "_std", "_sem"})
      h.push_back(m + suffix);
  };
  for (const auto& m : metrics)
    add_stat_cols(m);
  const int K = topic_count(spec);
  for (int k = 1; k <= K; ++k) {
    add_stat_cols("topic" + std::to_string(k) + "_occ");
    add_stat_cols("topic" + std::to_string(k) + "_gain");
  }
  write_line(os, h);

  for (const auto& ps : summary) {
    std::vector<std::string> f{std::to_string(ps.instance_id)};
    for (double v : ps.swept)
      f.push_back(format_double(v));
    f.push_back(std::to_string(ps.count));
    f.push_back(std::to_string(ps.verified));
    auto put = [&](const PointSummary::Stat& s) {
      f.push_back(format_double(s.mean));
      f.push_back(format_double(s.std));
      f.push_back(format_double(s.sem));
    };
    for (const auto* s : {&ps.s_star, &ps.welfare, &ps.genai_fraction, &ps.human_utility,
                          &ps.genai_utility})
      put(*s);
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
      put(k < ps.topic_occ.size() ? ps.topic_occ[k] : PointSummary::Stat{});
      put(k < ps.topic_gain.size() ? ps.topic_gain[k] : PointSummary::Stat{});
    }
    write_line(os, f);
  }
}

void write_decile_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
  write_line(os, {"decile", "adoption_frequency", "instances"});
  const auto freq = mean_decile_adoption(rows);
  const auto instances = std::count_if(rows.begin(), rows.end(),
                                       [](const SweepRow& r) { return !r.decile_adoption.empty(); });
  for (std::size_t g = 0; g < freq.size(); ++g)
    write_line(os, {std::to_string(g + 1), format_double(freq[g]), std::to_string(instances)});
}

const std::vector<std::string>& preset_names()
{
  static const std::vector<std::string> names{"q1", "q2t", "q2a", "q3", "q4"};
  return names;
}

std::vector<SweepSpec> preset(std::string_view name, std::uint64_t base_seed)
{
  const std::vector<double> three_alpha{0.1, 1.0, 10.0};
  const std::vector<double> three_beta{0.1, 0.5, 0.9};
  const std::vector<double> three_mu{1e2, 1e3, 1e4};
  const std::vector<double> beta_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  SolverConfig slow;
  slow.max_iters = 5000;
  SolverConfig slower;
  slower.max_iters = 20000;

  auto make = [&](std::string spec_name, SweepKind kind, GameTemplate base,
                  std::vector<SweepAxis> axes, SolverConfig solver = {}) {
    SweepSpec s;
    s.name = std::move(spec_name);
    s.kind = kind;
    s.base = std::move(base);
    s.axes = std::move(axes);
    s.seeds = default_seeds(base_seed, 10);
    s.solver = solver;
    return s;
  };

  std::vector<SweepSpec> out;
  if (name == "q1") {
    out.push_back(make("q1_mu_n", SweepKind::Q1Exclusive, {},
                       {{"mu", three_mu}, {"n", {10, 100}}}, slow));
    out.push_back(make("q1_alpha_beta", SweepKind::Q1Exclusive, {},
                       {{"alpha", three_alpha}, {"beta", three_beta}}));
  } else if (name == "q2t") {
    GameTemplate big;
    big.n = 100;
    big.mu = 1000;
    out.push_back(make("q2t_alpha_beta", SweepKind::Q2InclusiveTargeted, big,
                       {{"alpha", three_alpha}, {"beta", three_beta}}, slow));
    out.push_back(make("q2t_mu_n", SweepKind::Q2InclusiveTargeted, big,
                       {{"mu", three_mu}, {"n", {10, 100}}}, slow));
  } else if (name == "q2a") {
    GameTemplate big;
    big.n = 100;
    big.mu = 1000;
    auto s = make("q2a_deciles", SweepKind::Q2InclusiveArbitrary, big, {}, slow);
    s.seeds = default_seeds(base_seed, 100);
    out.push_back(std::move(s));
  } else if (name == "q3") {
    GameTemplate t;
    t.mu = 1000;
    out.push_back(make("q3_beta", SweepKind::Q3Inclusive, t, {{"beta", beta_grid}}, slow));
    out.push_back(make("q3_beta_mu100", SweepKind::Q3Inclusive, {}, {{"beta", beta_grid}}));
  } else if (name == "q4") {
    for (double alpha : {0.1, 1.0})
      for (auto [lo, hi] : {std::pair{0.1, 1.0}, std::pair{1.0, 10.0}}) {
        GameTemplate t;
        t.K = 5;
        t.alpha = alpha;
        t.topic_mu = {200, 100, 50, 20, 10};
        t.cost_kind = CostKind::L1Power;
        t.cost_lo = lo;
        t.cost_hi = hi;
        const std::string tag = "q4_alpha" + std::string(alpha < 1 ? "0.1" : "1") + "_cost" +
                                std::string(lo < 1 ? "0.1-1" : "1-10");
        out.push_back(make(tag, SweepKind::Q4Multitopic, t, {{"beta", beta_grid}}, slower));
      }
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return out;
}

} // namespace tullock
