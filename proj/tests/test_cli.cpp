#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch()
{
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tullock-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args)
{
  const std::string cmd = std::string(TULLOCK_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write(const std::string& name, const std::string& text)
{
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("solve-ex writes a profile that verifies")
{
  const fs::path out = scratch() / "ex";
  REQUIRE(run("solve-ex --out " + out.string()) == 0);
  CHECK(fs::exists(out / "solve-ex.csv"));
  CHECK(fs::exists(out / "run-manifest"));
  CHECK(run("verify --profile " + (out / "solve-ex.csv").string()) == 0);

  // Doubling one effort breaks the first-order conditions.
  std::string csv = slurp(out / "solve-ex.csv");
  std::istringstream lines(csv);
  std::string header, row, rest;
  std::getline(lines, header);
  std::getline(lines, row);
  std::stringstream remaining;
  remaining << lines.rdbuf();
  // creator,cost,genai,x1,utility
  std::vector<std::string> f;
  std::stringstream rs(row);
  for (std::string cell; std::getline(rs, cell, ',');)
    f.push_back(cell);
  REQUIRE(f.size() == 5);
  f[3] = std::to_string(2 * std::stod(f[3]) + 0.5);
  std::string tampered = header + "\n" + f[0];
  for (std::size_t i = 1; i < f.size(); ++i)
    tampered += "," + f[i];
  tampered += "\n" + remaining.str();
  const std::string bad = write("tampered.csv", tampered);
  CHECK(run("verify --profile " + bad) == 3);
}

TEST_CASE("solve-in in both modes")
{
  const std::string cfg = write("in.ini", "[game]\nn = 20\nmu = 1000\n");
  CHECK(run("solve-in --config " + cfg + " --out " + (scratch() / "in").string()) == 0);
  CHECK(run("solve-in --mode arbitrary --config " + cfg + " --out " + (scratch() / "in2").string()) == 0);
  CHECK(run("verify --inclusive --config " + cfg + " --profile " +
            (scratch() / "in2" / "solve-in.csv").string()) == 0);
}

TEST_CASE("counterexample exits cleanly")
{
  CHECK(run("counterexample --out " + (scratch() / "ce").string()) == 0);
}

TEST_CASE("sweep with a config and a fixed seed is reproducible")
{
  const std::string cfg = write("sweep.ini", "[game]\nn = 5\n[sweep]\nname = tiny\nseed_count = 2\n"
                                             "[axes]\nalpha = 0.5,2\n");
  const fs::path a = scratch() / "sa", b = scratch() / "sb";
  REQUIRE(run("sweep --config " + cfg + " --out " + a.string()) == 0);
  REQUIRE(run("sweep --config " + cfg + " --jobs 2 --out " + b.string()) == 0);
  CHECK(slurp(a / "tiny.csv") == slurp(b / "tiny.csv"));
  CHECK(fs::exists(a / "tiny_summary.csv"));
}

TEST_CASE("exit codes")
{
  CHECK(run("solve-ex --config " + write("bad.ini", "[game]\nwidth = 1\n")) == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("sweep --preset q9") == 1);
  CHECK(run("solve-ex --max-iters 3 --out " + (scratch() / "nc").string()) == 2);
  CHECK(run("solve-ex --config /nonexistent.ini") == 4);
  CHECK(run("solve-ex --out /proc/forbidden") == 4);
}
