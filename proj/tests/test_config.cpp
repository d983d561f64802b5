#include "disco/config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace disco;
namespace fs = std::filesystem;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment(in, "t.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DISCO_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("disco-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config values land on their fields") {
  const auto spec = parse(
      "# comment\n"
      "model = cubic:3   # trailing comment\n"
      "edge_tol = 0.25\n"
      "off_axis_tol=0.125\n"
      "max_edge_points = 10\n"
      "pa_orders = 1, 2,3\n"
      "C_grid = 0.5, 50\n"
      "max_runtime = inf\n"
      "targets = 0.01,0.001\n"
      "\n"
      "seed = 18446744073709551615\n");
  CHECK(spec.model == "cubic:3");
  CHECK(spec.detector.refine.edge_tol == 0.25);
  CHECK(spec.detector.refine.off_axis_tol == 0.125);
  CHECK(spec.detector.refine.max_edge_points == 10);
  CHECK(spec.detector.refine.orders == std::vector<int>{1, 2, 3});
  CHECK(spec.detector.C_grid == std::vector<double>{0.5, 50.0});
  CHECK(std::isinf(spec.detector.max_runtime));
  CHECK(spec.targets == std::vector<double>{0.01, 0.001});
  CHECK(spec.detector.seed == 18446744073709551615ULL);
}

TEST_CASE("config errors name the line and key") {
  CHECK(error_of("model = surf1\nfoo = 3\n").find("t.cfg:2: unknown key 'foo'") != std::string::npos);
  CHECK(error_of("edge_tol = abc\n").find("t.cfg:1: edge_tol") != std::string::npos);
  CHECK(error_of("seed = 1\nseed = 2\n").find("duplicate key 'seed'") != std::string::npos);
  CHECK(error_of("just words\n").find("t.cfg:1: expected 'key = value'") != std::string::npos);
  CHECK(error_of("n_add =\n").find("missing value") != std::string::npos);
  CHECK(error_of("pa_orders = 1,,2\n").find("empty list entry") != std::string::npos);
  CHECK(error_of("epsilon = 5\n").find("epsilon") != std::string::npos);
  CHECK(error_of("n_runs = 0\n").find("n_runs") != std::string::npos);
  CHECK_THROWS_AS(load_experiment("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("every shipped config parses") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(DISCO_CONFIGS)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const auto spec = load_experiment(entry.path());
    CHECK_NOTHROW(make_problem(spec.model));
    ++count;
  }
  CHECK(count >= 5);
}

TEST_CASE("every documented key is accepted") {
  for (const auto& key : config_keys()) {
    CAPTURE(key);
    const std::string value = key == "model" ? "surf2" : key.find("grid") != std::string::npos ? "1,2" : "3";
    std::string text = key + " = " + value + "\n";
    if (key == "epsilon") text += "delta_t = 4\n";
    CHECK_NOTHROW(parse(text));
  }
}

TEST_CASE("command line: models") {
  const fs::path dir = scratch("models");
  const std::string out = (dir / "list.txt").string();
  REQUIRE(std::system((std::string(DISCO_CLI) + " models > " + out).c_str()) == 0);
  const std::string text = slurp(out);
  for (const char* name : {"surf1", "surf2", "surf3", "surf4", "burgers", "cubic", "toggle", "sphere20"})
    CHECK(text.find(name) != std::string::npos);
  CHECK(text.find("d=20") != std::string::npos);
}

TEST_CASE("command line: detect on surface 1") {
  const fs::path dir = scratch("detect");
  {
    std::ofstream cfg(dir / "s.cfg");
    cfg << "model = surf1\nedge_tol = 0.5\noff_axis_tol = 0.5\ndelta_t = 2\nepsilon = 0.01\n";
  }
  const std::string args = "detect --config " + (dir / "s.cfg").string() + " --seed 7 --quiet --out ";
  REQUIRE(run_cli(args + (dir / "a").string()) == 0);
  for (const char* f : {"trace.csv", "classifier.txt", "points.csv"}) CHECK(fs::exists(dir / "a" / f));

  std::ifstream trace(dir / "a" / "trace.csv");
  std::string line, last;
  std::getline(trace, line);
  CHECK(line == "iter,evals,labeled,misclass,sigma,C");
  while (std::getline(trace, line)) last = line;
  std::stringstream row(last);
  std::string cell;
  for (int i = 0; i < 4; ++i) std::getline(row, cell, ',');
  CHECK(std::stod(cell) < 0.01);

  REQUIRE(run_cli(args + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "classifier.txt") == slurp(dir / "b" / "classifier.txt"));
  CHECK(slurp(dir / "a" / "points.csv") == slurp(dir / "b" / "points.csv"));
}

TEST_CASE("command line: errors") {
  const fs::path dir = scratch("errors");
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "model = surf1\nwibble = 1\n";
    std::ofstream smooth(dir / "init.cfg");
    smooth << "model = surf1\njump_threshold = 1e9\n";
  }
  const std::string err = (dir / "err.txt").string();
  const std::string cmd = std::string(DISCO_CLI) + " detect --config " + (dir / "bad.cfg").string() +
                          " --out " + (dir / "o").string() + " 2> " + err;
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 1);
  CHECK(slurp(err).find("wibble") != std::string::npos);

  CHECK(run_cli("detect --out " + (dir / "o").string() + " --config " + (dir / "init.cfg").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "o" / "trace.csv"));
  CHECK(run_cli("frobnicate") == 1);
}
