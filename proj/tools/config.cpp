#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tullock::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw)
{
  const std::string v = trim(raw);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("'" + key + "': expected a number, got '" + raw + "'");
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& raw)
{
  const std::string v = trim(raw);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("'" + key + "': expected an integer, got '" + raw + "'");
  return out;
}

CostKind parse_cost_kind(const std::string& raw)
{
  const std::string v = trim(raw);
  if (v == "separable")
    return CostKind::SeparablePower;
  if (v == "l1")
    return CostKind::L1Power;
  throw ConfigError("'game.cost_kind': expected separable or l1, got '" + raw + "'");
}

const char* cost_kind_name(CostKind k) { return k == CostKind::L1Power ? "l1" : "separable"; }

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::map<std::string, std::map<std::string, Setter>> make_schema()
{
  auto dbl = [](double GameTemplate::*f, const char* key) -> Setter {
    return [f, key](RunConfig& c, const std::string& v) { c.game.*f = parse_double(key, v); };
  };
  auto list = [](std::vector<double> GameTemplate::*f) -> Setter {
    return [f](RunConfig& c, const std::string& v) { c.game.*f = parse_list(v); };
  };
  auto sdbl = [](double SolverConfig::*f, const char* key) -> Setter {
    return [f, key](RunConfig& c, const std::string& v) { c.solver.*f = parse_double(key, v); };
  };
  auto sint = [](int SolverConfig::*f, const char* key) -> Setter {
    return [f, key](RunConfig& c, const std::string& v) { c.solver.*f = parse_int<int>(key, v); };
  };
  auto sweep = [](RunConfig& c) -> SweepSection& {
    if (!c.sweep)
      c.sweep.emplace();
    return *c.sweep;
  };

  std::map<std::string, std::map<std::string, Setter>> s;
  s["game"] = {
      {"n", [](RunConfig& c, const std::string& v) { c.game.n = parse_int<int>("game.n", v); }},
      {"K", [](RunConfig& c, const std::string& v) { c.game.K = parse_int<int>("game.K", v); }},
      {"alpha", dbl(&GameTemplate::alpha, "game.alpha")},
      {"beta", dbl(&GameTemplate::beta, "game.beta")},
      {"gamma", dbl(&GameTemplate::gamma, "game.gamma")},
      {"rho", dbl(&GameTemplate::rho, "game.rho")},
      {"mu", dbl(&GameTemplate::mu, "game.mu")},
      {"cost_lo", dbl(&GameTemplate::cost_lo, "game.cost_lo")},
      {"cost_hi", dbl(&GameTemplate::cost_hi, "game.cost_hi")},
      {"topic_alpha", list(&GameTemplate::topic_alpha)},
      {"topic_beta", list(&GameTemplate::topic_beta)},
      {"topic_gamma", list(&GameTemplate::topic_gamma)},
      {"topic_mu", list(&GameTemplate::topic_mu)},
      {"cost_kind", [](RunConfig& c, const std::string& v) { c.game.cost_kind = parse_cost_kind(v); }},
      {"costs", [](RunConfig& c, const std::string& v) { c.costs = parse_list(v); }},
  };
  s["solver"] = {
      {"max_iters", sint(&SolverConfig::max_iters, "solver.max_iters")},
      {"step", sdbl(&SolverConfig::step, "solver.step")},
      {"tol", sdbl(&SolverConfig::tol, "solver.tol")},
      {"init", sdbl(&SolverConfig::init, "solver.init")},
      {"grad_clip", sdbl(&SolverConfig::grad_clip, "solver.grad_clip")},
      {"tie_eps", sdbl(&SolverConfig::tie_eps, "solver.tie_eps")},
      {"stall_window", sint(&SolverConfig::stall_window, "solver.stall_window")},
      {"max_halvings", sint(&SolverConfig::max_halvings, "solver.max_halvings")},
  };
  s["run"] = {
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("run.seed", v); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = trim(v); }},
      {"jobs", [](RunConfig& c, const std::string& v) { c.jobs = parse_int<int>("run.jobs", v); }},
      {"instances",
       [](RunConfig& c, const std::string& v) { c.instances = parse_int<int>("run.instances", v); }},
      {"mode", [](RunConfig& c, const std::string& v) { c.mode = trim(v); }},
      {"round_cap",
       [](RunConfig& c, const std::string& v) { c.round_cap = parse_int<int>("run.round_cap", v); }},
  };
  s["sweep"] = {
      {"name", [sweep](RunConfig& c, const std::string& v) { sweep(c).name = trim(v); }},
      {"kind",
       [sweep](RunConfig& c, const std::string& v) {
         const auto k = parse_sweep_kind(trim(v));
         if (!k)
           throw ConfigError("'sweep.kind': unknown kind '" + v + "'");
         sweep(c).kind = *k;
       }},
      {"seed_count",
       [sweep](RunConfig& c, const std::string& v) {
         sweep(c).seed_count = parse_int<int>("sweep.seed_count", v);
       }},
      {"metric",
       [sweep](RunConfig& c, const std::string& v) {
         const auto m = parse_occupation_metric(trim(v));
         if (!m)
           throw ConfigError("'sweep.metric': unknown metric '" + v + "'");
         sweep(c).metric = *m;
       }},
  };
  return s;
}

void validate(const RunConfig& c)
{
  try {
    c.game.validate();
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!c.costs.empty() && static_cast<int>(c.costs.size()) != c.game.n)
    throw ConfigError("'game.costs': expected " + std::to_string(c.game.n) + " values");
  for (double v : c.costs)
    if (!(v > 0))
      throw ConfigError("'game.costs': costs must be positive");
  if (c.jobs < 1)
    throw ConfigError("'run.jobs': must be at least 1");
  if (c.instances < 1)
    throw ConfigError("'run.instances': must be at least 1");
  if (c.round_cap < 1)
    throw ConfigError("'run.round_cap': must be at least 1");
  if (c.mode != "targeted" && c.mode != "arbitrary")
    throw ConfigError("'run.mode': expected targeted or arbitrary, got '" + c.mode + "'");
  if (c.sweep) {
    try {
      c.make_sweep().validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

// Shortest text that reads back to the same double.
std::string shortest(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + shortest(v[i]);
  return s;
}

} // namespace

std::vector<double> parse_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double("list", item));
  if (out.empty())
    throw ConfigError("empty list");
  return out;
}

Game RunConfig::build_game() const
{
  if (costs.empty())
    return build_instance(game, seed);
  game.validate();
  VectorXd c = Eigen::Map<const VectorXd>(costs.data(), static_cast<Index>(costs.size()));
  return Game(game.topics(), CostModel<double>{game.cost_kind, c, game.rho}, 1);
}

SweepSpec RunConfig::make_sweep() const
{
  if (!sweep)
    throw ConfigError("config has no [sweep] section");
  SweepSpec s;
  s.name = sweep->name;
  s.kind = sweep->kind;
  s.base = game;
  s.axes = sweep->axes;
  s.seeds = default_seeds(seed, sweep->seed_count);
  s.solver = solver;
  s.metric = sweep->metric;
  s.round_cap = round_cap;
  return s;
}

RunConfig parse_config(const std::string& text)
{
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  static const auto schema = make_schema();
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty())
      throw ConfigError("key '" + section + "' outside a section");
    if (section == "axes") {
      if (!c.sweep)
        c.sweep.emplace();
      for (const auto& [key, value] : body)
        c.sweep->axes.push_back({key, parse_list(value.data())});
      continue;
    }
    const auto sec = schema.find(section);
    if (sec == schema.end())
      throw ConfigError("unknown section [" + section + "]");
    if (section == "sweep" && !c.sweep)
      c.sweep.emplace();
    for (const auto& [key, value] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end())
        throw ConfigError("unknown key '" + section + "." + key + "'");
      setter->second(c, value.data());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(RunConfig& c, const Overrides& o)
{
  if (o.seed)
    c.seed = *o.seed;
  if (o.out)
    c.out = *o.out;
  if (o.jobs)
    c.jobs = *o.jobs;
  if (o.tol)
    c.solver.tol = *o.tol;
  if (o.max_iters)
    c.solver.max_iters = *o.max_iters;
  if (o.mode)
    c.mode = *o.mode;
  validate(c);
}

std::string to_ini(const RunConfig& c)
{
  std::ostringstream os;
  const auto& g = c.game;
  os << "[game]\n"
     << "n = " << g.n << "\nK = " << g.K << "\nalpha = " << shortest(g.alpha)
     << "\nbeta = " << shortest(g.beta) << "\ngamma = " << shortest(g.gamma)
     << "\nrho = " << shortest(g.rho) << "\nmu = " << shortest(g.mu)
     << "\ncost_kind = " << cost_kind_name(g.cost_kind) << "\ncost_lo = " << shortest(g.cost_lo)
     << "\ncost_hi = " << shortest(g.cost_hi) << "\n";
  for (const auto& [key, v] : {std::pair{"topic_alpha", &g.topic_alpha},
                               {"topic_beta", &g.topic_beta},
                               {"topic_gamma", &g.topic_gamma},
                               {"topic_mu", &g.topic_mu},
                               {"costs", &c.costs}})
    if (!v->empty())
      os << key << " = " << join(*v) << "\n";
  const auto& s = c.solver;
  os << "\n[solver]\n"
     << "max_iters = " << s.max_iters << "\nstep = " << shortest(s.step)
     << "\ntol = " << shortest(s.tol) << "\ninit = " << shortest(s.init)
     << "\ngrad_clip = " << shortest(s.grad_clip) << "\ntie_eps = " << shortest(s.tie_eps)
     << "\nstall_window = " << s.stall_window << "\nmax_halvings = " << s.max_halvings << "\n";
  os << "\n[run]\n"
     << "seed = " << c.seed << "\nout = " << c.out << "\njobs = " << c.jobs
     << "\ninstances = " << c.instances << "\nmode = " << c.mode << "\nround_cap = " << c.round_cap
     << "\n";
  if (c.sweep) {
    os << "\n[sweep]\n"
       << "name = " << c.sweep->name << "\nkind = " << to_string(c.sweep->kind)
       << "\nseed_count = " << c.sweep->seed_count << "\nmetric = " << to_string(c.sweep->metric)
       << "\n";
    if (!c.sweep->axes.empty()) {
      os << "\n[axes]\n";
      for (const auto& a : c.sweep->axes)
        os << a.name << " = " << join(a.values) << "\n";
    }
  }
  return os.str();
}

} // namespace tullock::cli
