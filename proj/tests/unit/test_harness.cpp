#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pldo/harness/config.hpp"
#include "pldo/harness/runner.hpp"
#include "pldo/harness/trace.hpp"

using namespace pldo;
using namespace pldo::harness;

namespace {

const std::string kConfigDir = PLDO_CONFIG_DIR;

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
  auto dir = std::filesystem::temp_directory_path() / "pldo_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write_config(const std::string& name, const std::string& text)
{
  const auto path = scratch(name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("parse errors point at the offending line")
{
  const std::string text = "problem:\n  kind: quadratic\n  n: two\n";
  try {
    parse_config(text, "cfg.yaml");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("cfg.yaml:3") == 0);
  }
}

TEST_CASE("unknown keys are rejected")
{
  try {
    parse_config("problem:\n  kind: quadratic\n  bogus: 1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("grph:\n  kind: static\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("graph:\n  kind: sometimes\n"), ConfigError);
}

TEST_CASE("cross-field checks")
{
  CHECK_THROWS_AS(parse_config("problem: {kind: robust_ls}\nalgorithm: {kind: dgd}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem: {kind: quadratic}\nalgorithm: {kind: mgda}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("theory: {auto: true, delta_prime: 0}\n"), ConfigError);
  const auto c = parse_config("seeds: 3\n");
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("axes")
{
  auto c = parse_config("problem: {kind: quadratic}\n");
  set_axis(c, "sigma", 0.25);
  CHECK(c.oracle.sigma == 0.25);
  set_axis(c, "problem.n", 7);
  CHECK(c.problem.n == 7);
  CHECK_THROWS_AS(set_axis(c, "colour", 1.0), ConfigError);
  CHECK_THROWS_AS(set_axis(c, "n", 2.5), ConfigError);
}

TEST_CASE("minimal config: ten rows with a falling gap")
{
  auto c = load_config(kConfigDir + "/minimal.yaml");
  const auto res = run_experiment(c);
  REQUIRE(res.ok());
  const auto rows = trace_rows(res);
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].point.f_gap <= rows[i - 1].point.f_gap);
  CHECK(rows.front().point.f_gap < res.runs[0].record.initial_f_gap);
}

TEST_CASE("run command writes identical files twice")
{
  CommandOptions opts;
  opts.config_path = kConfigDir + "/minimal.yaml";
  std::ostringstream out, err;
  opts.output = scratch("a.csv").string();
  REQUIRE(cmd_run(opts, out, err) == 0);
  opts.output = scratch("b.csv").string();
  REQUIRE(cmd_run(opts, out, err) == 0);
  const auto a = slurp(scratch("a.csv").string());
  CHECK(a == slurp(scratch("b.csv").string()));
  CHECK(a.rfind(kTraceHeader, 0) == 0);
  std::istringstream in(a);
  const auto table = read_csv(in);
  CHECK(table.rows.size() == 10);
  CHECK(std::filesystem::exists(scratch("a.json")));
}

TEST_CASE("multi-seed runs are independent of the thread count")
{
  auto c = parse_config(
      "problem: {kind: least_squares, n: 4, d: 3}\ngraph: {base: ring}\n"
      "algorithm: {kind: dgd, N: 20}\noracle: {delta: 0.1, sigma: 0.1}\nseeds: 4\n");
  c.threads = 1;
  std::ostringstream a, b;
  write_trace(a, trace_rows(run_experiment(c)));
  c.threads = 4;
  write_trace(b, trace_rows(run_experiment(c)));
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep writes one row per value and seed")
{
  const auto cfg = write_config("sweep.yaml",
                                "problem: {kind: quadratic, n: 3, d: 2}\ngraph: {base: ring}\n"
                                "algorithm: {kind: dgd, gamma: 0.5, N: 5}\nseeds: [0, 1]\n");
  CommandOptions opts;
  opts.config_path = cfg;
  opts.output = scratch("sweep.csv").string();
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(opts, "sigma", {0.0, 0.1, 0.2}, out, err) == 0);
  std::istringstream in(slurp(*opts.output));
  const auto t = read_csv(in);
  CHECK(t.rows.size() == 6);
  CHECK(cmd_sweep(opts, "colour", {1.0}, out, err) == 2);
}

TEST_CASE("validate reports an alpha that breaks concavity")
{
  const auto cfg = write_config("alpha.yaml", "problem: {kind: robust_ls, alpha: 0.5}\nalgorithm: {kind: mgda}\n");
  CommandOptions opts;
  opts.config_path = cfg;
  std::ostringstream out, err;
  CHECK(cmd_validate(opts, out, err) == 1);
  CHECK(out.str().find("FAIL problem") != std::string::npos);
}

TEST_CASE("validate reports a disconnected graph")
{
  const auto cfg = write_config("empty.yaml", "graph: {base: empty}\n");
  CommandOptions opts;
  opts.config_path = cfg;
  std::ostringstream out, err;
  CHECK(cmd_validate(opts, out, err) == 1);
  CHECK(out.str().find("FAIL graph") != std::string::npos);
}

TEST_CASE("validate passes the shipped configs")
{
  for (const char* name : {"minimal.yaml", "budget_dgd.yaml", "noise_floor.yaml"}) {
    CommandOptions opts;
    opts.config_path = kConfigDir + "/" + name;
    std::ostringstream out, err;
    CHECK_MESSAGE(cmd_validate(opts, out, err) == 0, name, "\n", out.str());
  }
}

TEST_CASE("overlay bound column holds on an exact run")
{
  auto c = load_config(kConfigDir + "/budget_dgd.yaml");
  const auto res = run_experiment(c);
  REQUIRE(res.ok());
  for (const auto& row : trace_rows(res)) {
    REQUIRE(row.bound.has_value());
    CHECK(row.point.f_gap <= *row.bound * (1 + 1e-9) + 1e-13);
  }
}

TEST_CASE("theory report")
{
  CommandOptions opts;
  opts.config_path = kConfigDir + "/budget_dgd.yaml";
  std::ostringstream out, err;
  CHECK(cmd_theory(opts, false, out, err) == 0);
  CHECK(out.str().find("budget") != std::string::npos);
  std::ostringstream js;
  CHECK(cmd_theory(opts, true, js, err) == 0);
  CHECK(js.str().front() == '{');
}

TEST_CASE("number formatting round-trips")
{
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
  CHECK(format_optional(std::nullopt).empty());
}
