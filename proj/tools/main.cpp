#include "config.hpp"

#include "tullock/experiments.hpp"
#include "tullock/random.hpp"
#include "tullock/theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace tullock;
using namespace tullock::cli;

namespace {

struct Options
{
  std::string config_path;
  Overrides overrides;
  std::string preset;
  std::string profile_path;
  bool inclusive = false;
};

RunConfig resolve(const Options& opt)
{
  RunConfig c = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  apply_overrides(c, opt.overrides);
  return c;
}

fs::path prepare_out(const std::string& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot write '" + path.string() + "'");
  return os;
}

void finish(std::ofstream& os, const fs::path& path)
{
  os.flush();
  if (!os)
    throw IoError("write failed for '" + path.string() + "'");
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& body)
{
  const fs::path path = dir / "run-manifest";
  auto os = open_out(path);
  os << "# command: " << command << "\n" << body;
  finish(os, path);
}

std::string fmt(double v, int digits = 6)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_profile_csv(const fs::path& path, const Game& game, const EquilibriumReport& rep)
{
  auto os = open_out(path);
  os << "creator,cost,genai";
  for (Index k = 1; k <= game.K(); ++k)
    os << ",x" << k;
  os << ",utility\n";
  for (Index i = 0; i < game.n(); ++i) {
    const bool g = !rep.genai.empty() && rep.genai[static_cast<std::size_t>(i)];
    os << i << "," << format_double(game.costs().c[i]) << "," << (g ? 1 : 0);
    for (Index k = 0; k < game.K(); ++k)
      os << "," << format_double(rep.efforts(i, k));
    os << "," << format_double(rep.utilities[i]) << "\n";
  }
  finish(os, path);
}

void print_report(const EquilibriumReport& rep, bool inclusive)
{
  std::cout << "status: " << to_string(rep.status) << "\n"
            << "iterations: " << rep.iterations << "\n"
            << "residual: " << fmt(rep.residual) << "\n"
            << "step: " << fmt(rep.step_used) << "\n"
            << "verified: " << (rep.verified ? "yes" : "no") << "\n"
            << "welfare: " << fmt(rep.welfare, 10) << "\n";
  if (inclusive)
    std::cout << "guaranteed regime: " << (rep.guaranteed_regime ? "yes" : "no") << "\n"
              << "genai creators: " << rep.genai_count << "\n";
  for (Index k = 0; k < rep.topic_totals.size(); ++k)
    std::cout << "s[" << k + 1 << "]: " << fmt(rep.topic_totals[k], 10) << "\n";
}

int solve_ex(const Options& opt)
{
  const RunConfig c = resolve(opt);
  const Game game = c.build_game();
  const EquilibriumReport rep = mmd_solve(game, c.solver);
  print_report(rep, false);
  const fs::path dir = prepare_out(c.out);
  write_profile_csv(dir / "solve-ex.csv", game, rep);
  write_manifest(dir, "solve-ex", to_ini(c));
  return rep.converged ? kExitOk : kExitNonConvergence;
}

int solve_in(const Options& opt)
{
  const RunConfig c = resolve(opt);
  const Game game = c.build_game();
  EquilibriumReport rep;
  if (c.mode == "targeted") {
    rep = targeted_inclusive_pne(game, c.solver);
  } else {
    auto res = arbitrary_inclusive_pne(game, c.seed, c.solver, c.round_cap);
    std::cout << "rounds: " << res.rounds << "\n";
    rep = std::move(res.report);
  }
  print_report(rep, true);
  const fs::path dir = prepare_out(c.out);
  write_profile_csv(dir / "solve-in.csv", game, rep);
  write_manifest(dir, "solve-in", to_ini(c));
  return rep.status == SolveStatus::Converged ? kExitOk : kExitNonConvergence;
}

struct StoredProfile
{
  std::vector<double> costs;
  std::vector<bool> genai;
  MatrixXd efforts;
};

StoredProfile read_profile_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read profile '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("profile '" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
      header.push_back(f);
  }
  int cost_col = -1, genai_col = -1;
  std::vector<int> x_cols;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    const auto& h = header[static_cast<std::size_t>(j)];
    if (h == "cost")
      cost_col = j;
    else if (h == "genai")
      genai_col = j;
    else if (h.size() > 1 && h[0] == 'x')
      x_cols.push_back(j);
  }
  if (x_cols.empty())
    throw ConfigError("profile '" + path + "' has no x columns");

  StoredProfile p;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
      f.push_back(item);
    if (f.size() != header.size())
      throw ConfigError("profile '" + path + "': ragged row");
    std::vector<double> x;
    for (int j : x_cols)
      x.push_back(parse_list(f[static_cast<std::size_t>(j)]).at(0));
    rows.push_back(std::move(x));
    if (cost_col >= 0)
      p.costs.push_back(parse_list(f[static_cast<std::size_t>(cost_col)]).at(0));
    p.genai.push_back(genai_col >= 0 && parse_list(f[static_cast<std::size_t>(genai_col)]).at(0) != 0);
  }
  if (rows.empty())
    throw ConfigError("profile '" + path + "' has no rows");
  p.efforts.resize(static_cast<Index>(rows.size()), static_cast<Index>(x_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < x_cols.size(); ++k)
      p.efforts(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  return p;
}

int verify(const Options& opt)
{
  if (opt.profile_path.empty())
    throw ConfigError("verify requires --profile");
  RunConfig c = resolve(opt);
  const StoredProfile p = read_profile_csv(opt.profile_path);
  c.game.n = static_cast<int>(p.efforts.rows());
  c.game.K = static_cast<int>(p.efforts.cols());
  if (!p.costs.empty())
    c.costs = p.costs;
  Game game = [&] {
    try {
      return c.build_game();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();

  bool inclusive = opt.inclusive;
  for (bool g : p.genai)
    inclusive = inclusive || g;

  if (!inclusive) {
    const double r = verify_first_order(game, p.efforts, c.solver.grad_clip);
    const bool ok = r < c.solver.tol;
    std::cout << "exclusive first-order residual: " << fmt(r) << " (tol " << fmt(c.solver.tol)
              << ") " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
  }
  MixedProfile y(game.n(), game.K());
  for (Index i = 0; i < game.n(); ++i) {
    if (p.genai[static_cast<std::size_t>(i)])
      y.set_genai(i);
    else
      y.set_effort(i, p.efforts.row(i).transpose());
  }
  const CheckResult res = inclusive_pne_check(game.with_multiplier(0), y, c.solver);
  if (res.is_pne)
    std::cout << "inclusive deviation check: PASS\n";
  else
    std::cout << "inclusive deviation check: FAIL (creator " << *res.deviator
              << " strictly improves)\n";
  return res.is_pne ? kExitOk : kExitCheckFailed;
}

bool print_bound(const BoundReport& b)
{
  std::cout << (b.pass ? "PASS " : "FAIL ") << b.name << ": " << fmt(b.value, 8) << " in ("
            << fmt(b.lower, 8) << ", " << fmt(b.upper, 8) << ")"
            << (b.informative ? "" : " [vacuous]") << "  " << b.context << "\n";
  return b.pass;
}

int theory_check(const Options& opt)
{
  const RunConfig c = resolve(opt);
  bool all_pass = true, all_converged = true;
  for (int j = 0; j < c.instances; ++j) {
    RunConfig inst = c;
    inst.seed = c.seed + static_cast<std::uint64_t>(j);
    const Game game = inst.build_game();
    std::cout << "-- instance seed " << inst.seed << "\n";
    const EquilibriumReport rep = mmd_solve(game, c.solver);
    all_converged = all_converged && rep.converged;
    std::cout << "exclusive solve: " << to_string(rep.status) << " after " << rep.iterations
              << " iterations, first-order residual "
              << fmt(verify_first_order(game, rep.efforts, c.solver.grad_clip)) << "\n";

    if ((rep.efforts.array() > 0).all()) {
      BoundReport dsc;
      dsc.name = "dsc-min-eigenvalue";
      dsc.value = dsc_min_eigenvalue(game, rep.efforts);
      dsc.lower = 0;
      dsc.pass = dsc.value > kBoundSlack;
      dsc.context = "at the equilibrium";
      all_pass = print_bound(dsc) && all_pass;
    }
    Rng rng(inst.seed);
    for (int r = 0; r < 5; ++r) {
      MatrixXd x(game.n(), game.K());
      for (Index i = 0; i < x.size(); ++i)
        x.data()[i] = rng.uniform(0.01, 10.0);
      BoundReport dsc;
      dsc.name = "dsc-min-eigenvalue";
      dsc.value = dsc_min_eigenvalue(game, x);
      dsc.lower = 0;
      dsc.pass = dsc.value > kBoundSlack;
      dsc.context = "random positive profile " + std::to_string(r);
      all_pass = print_bound(dsc) && all_pass;
    }
    if (game.K() != 1)
      continue;

    all_pass = print_bound(check_theorem3(rep, game)) && all_pass;
    for (const auto& b : check_prop1(rep, game))
      all_pass = print_bound(b) && all_pass;
    all_pass = print_bound(check_max_share(rep)) && all_pass;

    const MonotonicityChecks mono = check_theorem2_properties(game, c.solver);
    all_converged = all_converged && mono.all_converged;
    std::cout << (mono.sorted ? "PASS" : "FAIL") << " sorted by cost\n"
              << (mono.cost_bump_hurts ? "PASS" : "FAIL") << " cost bump lowers utility\n"
              << (mono.entrant_shrinks ? "PASS" : "FAIL") << " entrant shrinks incumbents\n";
    all_pass = all_pass && mono.sorted && mono.cost_bump_hurts && mono.entrant_shrinks;

    const EquilibriumReport in = targeted_inclusive_pne(game, c.solver);
    all_converged = all_converged && in.converged;
    all_pass = print_bound(theorem5_bound(in.genai_count, static_cast<int>(game.n()), game)) && all_pass;
    std::cout << "targeted inclusive profile verified: " << (in.verified ? "yes" : "no")
              << (in.guaranteed_regime ? "" : " [outside guaranteed regime]") << "\n";
  }
  if (!all_converged)
    return kExitNonConvergence;
  return all_pass ? kExitOk : kExitCheckFailed;
}

std::string describe(const MixedProfile& p)
{
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < p.n(); ++i) {
    os << (i ? ", " : "");
    if (p.uses_genai(i)) {
      os << "bot";
      continue;
    }
    os << "[";
    for (Index k = 0; k < p.K(); ++k)
      os << (k ? ", " : "") << fmt(p.efforts()(i, k), 5);
    os << "]";
  }
  os << ")";
  return os.str();
}

int counterexample(const Options& opt)
{
  const RunConfig c = resolve(opt);
  const CounterexampleTrace t = run_counterexample(c.solver);
  std::cout << "all-human equilibrium per creator: [" << fmt(t.all_human_effort[0], 5) << ", "
            << fmt(t.all_human_effort[1], 5) << "]\n"
            << "utility at all-human equilibrium: " << fmt(t.all_human_utility, 5) << "\n"
            << "utility after switching to bot: " << fmt(t.genai_deviation_utility, 5) << "\n\n";
  for (std::size_t j = 0; j < t.steps.size(); ++j) {
    const auto& s = t.steps[j];
    std::cout << "step " << j + 1 << ": creator " << s.mover + 1 << " at " << describe(s.before)
              << "\n  best human response [" << fmt(s.human_response[0], 5) << ", "
              << fmt(s.human_response[1], 5) << "] pays " << fmt(s.human_utility, 5)
              << ", bot pays " << fmt(s.genai_utility, 5) << "\n  -> " << describe(s.after) << "\n";
  }
  std::cout << "\nloop " << (t.loop_found ? "found" : "not found") << " with " << t.loop.size()
            << " states:\n";
  for (const auto& p : t.loop)
    std::cout << "  " << describe(p) << "\n";
  std::cout << "arbitrary solver status: " << to_string(t.arbitrary_status) << "\n";
  const bool ok = t.loop_found && t.arbitrary_status == SolveStatus::CycleSuspected;
  return ok ? kExitOk : kExitCheckFailed;
}

std::string spec_ini(const SweepSpec& s)
{
  std::ostringstream os;
  os << "\n[sweep " << s.name << "]\n"
     << "kind = " << to_string(s.kind) << "\nseeds = " << s.seeds.front() << ".." << s.seeds.back()
     << "\nmetric = " << to_string(s.metric) << "\nmax_iters = " << s.solver.max_iters
     << "\ntol = " << format_double(s.solver.tol) << "\nround_cap = " << s.round_cap
     << "\nn = " << s.base.n << "\nK = " << s.base.K << "\nalpha = " << format_double(s.base.alpha)
     << "\nbeta = " << format_double(s.base.beta) << "\ngamma = " << format_double(s.base.gamma)
     << "\nrho = " << format_double(s.base.rho) << "\nmu = " << format_double(s.base.mu)
     << "\ncost = U[" << format_double(s.base.cost_lo) << ", " << format_double(s.base.cost_hi)
     << "]\n";
  for (const auto& a : s.axes) {
    os << "axis." << a.name << " =";
    for (std::size_t j = 0; j < a.values.size(); ++j)
      os << (j ? "," : " ") << format_double(a.values[j]);
    os << "\n";
  }
  return os.str();
}

int sweep(const Options& opt)
{
  const RunConfig c = resolve(opt);
  std::vector<SweepSpec> specs;
  if (!opt.preset.empty()) {
    try {
      specs = preset(opt.preset, c.seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    for (auto& s : specs) {
      if (opt.overrides.tol)
        s.solver.tol = *opt.overrides.tol;
      if (opt.overrides.max_iters)
        s.solver.max_iters = *opt.overrides.max_iters;
    }
  } else if (c.sweep) {
    specs.push_back(c.make_sweep());
  } else {
    throw ConfigError("sweep requires --preset or a config with a [sweep] section");
  }
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  const fs::path dir = prepare_out(c.out);
  std::string manifest = to_ini(c);
  if (!opt.preset.empty())
    manifest += "\n# preset: " + opt.preset + "\n";
  for (const auto& spec : specs) {
    const auto rows = run_sweep(spec, c.jobs);
    const auto summary = summarize(spec, rows);
    std::size_t verified = 0;
    for (const auto& r : rows)
      verified += r.verified ? 1 : 0;
    std::cout << spec.name << ": " << rows.size() << " rows, " << verified << " verified\n";

    const fs::path rows_path = dir / (spec.name + ".csv");
    auto os = open_out(rows_path);
    write_rows_csv(os, spec, rows);
    finish(os, rows_path);

    const fs::path sum_path = dir / (spec.name + "_summary.csv");
    auto ss = open_out(sum_path);
    write_summary_csv(ss, spec, summary);
    finish(ss, sum_path);

    if (spec.kind == SweepKind::Q2InclusiveArbitrary) {
      const fs::path dec_path = dir / (spec.name + "_deciles.csv");
      auto ds = open_out(dec_path);
      write_decile_csv(ds, rows);
      finish(ds, dec_path);
    }
    manifest += spec_ini(spec);
  }
  write_manifest(dir, "sweep", manifest);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Equilibrium solver for content-creation contests with generative AI"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "INI config file");
    sub->add_option("--seed", opt.overrides.seed, "Base seed");
    sub->add_option("--out", opt.overrides.out, "Output directory");
    sub->add_option("--jobs", opt.overrides.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", opt.overrides.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", opt.overrides.max_iters, "Solver iteration cap")
        ->check(CLI::PositiveNumber);
  };

  auto* ex = app.add_subcommand("solve-ex", "Solve the exclusive game");
  auto* in = app.add_subcommand("solve-in", "Solve the inclusive 1-D game");
  in->add_option("--mode", opt.overrides.mode, "targeted | arbitrary");
  auto* ver = app.add_subcommand("verify", "Re-check a stored profile");
  ver->add_option("--profile", opt.profile_path, "Profile CSV")->required();
  ver->add_flag("--inclusive", opt.inclusive, "Check as an inclusive profile");
  auto* th = app.add_subcommand("theory-check", "Check the theoretical bounds on an instance family");
  auto* ce = app.add_subcommand("counterexample", "Best-response loop of the no-PNE instance");
  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("--preset", opt.preset, "q1 | q2t | q2a | q3 | q4");
  for (auto* sub : {ex, in, ver, th, ce, sw})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ex) return solve_ex(opt);
    if (*in) return solve_in(opt);
    if (*ver) return verify(opt);
    if (*th) return theory_check(opt);
    if (*ce) return counterexample(opt);
    if (*sw) return sweep(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
