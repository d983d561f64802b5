// disco: run discontinuity detection or convergence studies from a config file.

#include "disco/config.hpp"
#include "disco/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2 };

struct CliConfig {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Files written so far; removed again if the run fails part way.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    written_.push_back(p);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw disco::Error("cannot write " + p.string());
    return f;
  }
  void discard() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

disco::ExperimentSpec load(const CliConfig& cli) {
  disco::ExperimentSpec spec;
  if (!cli.config.empty()) spec = disco::load_experiment(cli.config);
  if (cli.seed) spec.detector.seed = *cli.seed;
  disco::make_problem(spec.model);  // rejects unknown model names early
  return spec;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw disco::ConfigError("output directory '" + dir.string() + "' is not usable");
  const fs::path probe = dir / ".disco-write-test";
  if (!std::ofstream(probe)) throw disco::ConfigError("output directory '" + dir.string() + "' is not writable");
  fs::remove(probe, ec);
}

double stop_level(const disco::ExperimentSpec& spec) {
  if (spec.stop_target >= 0.0 || spec.targets.empty()) return spec.stop_target;
  return *std::min_element(spec.targets.begin(), spec.targets.end());
}

void run_detect(const disco::ExperimentSpec& spec, Outputs& out, bool quiet) {
  const auto problem = disco::make_problem(spec.model);
  const auto test = disco::study_test_set(spec, problem);
  const disco::Monitor monitor{
      [&](const disco::Classifier& clf) { return disco::misclassification(clf, test); },
      stop_level(spec)};
  const auto det = disco::detect(problem.model, spec.detector, &monitor);

  auto trace = out.open("trace.csv");
  disco::write_trace_csv(trace, det.trace);
  auto clf = out.open("classifier.txt");
  disco::write_classifier(clf, det.classifier);
  auto pts = out.open("points.csv");
  disco::write_points_csv(pts, det.labeled);

  if (!quiet) {
    const auto& last = det.trace.records.back();
    std::cout << spec.model << ": " << det.trace.edge_points << " edge points, "
              << last.evals << " evals (" << det.trace.init_evals << " in initialisation), "
              << last.iteration << " iterations, error " << last.misclass << ", stopped on "
              << det.trace.exit_reason << '\n';
  }
}

void run_study(const disco::ExperimentSpec& spec, Outputs& out, bool quiet) {
  const auto study = disco::convergence_study(spec);
  auto rows = out.open("study.csv");
  disco::write_study_csv(rows, study);
  auto summary = out.open("summary.csv");
  disco::write_summary_csv(summary, study);

  if (!quiet) {
    std::cout << spec.model << ": " << spec.n_runs << " runs, final error " << study.mean_final
              << " +- " << study.std_final << '\n';
    for (const auto& t : study.targets)
      std::cout << "  target " << t.target << ": reached " << t.reached << '/' << spec.n_runs
                << ", evals " << t.mean_evals << " +- " << t.std_evals << '\n';
    for (const auto& r : study.runs)
      if (r.failed) std::cout << "  run " << r.run << " failed: " << r.error << '\n';
  }
}

void list() {
  for (const auto& m : disco::list_models()) {
    if (m.dim < 0) {
      std::cout << m.name << "  d=2..  [-1,1]^d\n";
      continue;
    }
    const bool cube = (m.domain.lower.array() == m.domain.lower[0]).all() &&
                      (m.domain.upper.array() == m.domain.upper[0]).all();
    if (cube && m.dim > 2) {
      std::cout << m.name << "  d=" << m.dim << "  [" << m.domain.lower[0] << ','
                << m.domain.upper[0] << "]^" << m.dim << '\n';
      continue;
    }
    std::cout << m.name << "  d=" << m.dim << "  [";
    for (int i = 0; i < m.dim; ++i) {
      if (i) std::cout << " x ";
      std::cout << '[' << m.domain.lower[i] << ',' << m.domain.upper[i] << ']';
    }
    std::cout << "]\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discontinuity detection with polynomial annihilation and SVM uncertainty sampling"};
  app.require_subcommand(1);
  CliConfig cli;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config, "key = value experiment file")->check(CLI::ExistingFile);
    sub->add_option("--out", cli.out, "output directory");
    sub->add_option("--seed", cli.seed, "overrides the config seed");
    sub->add_flag("--quiet", cli.quiet, "no summary on stdout");
  };
  auto* detect = app.add_subcommand("detect", "one detection run: trace.csv, classifier.txt, points.csv");
  add_common(detect);
  auto* study = app.add_subcommand("study", "repeated-seed study: study.csv, summary.csv");
  add_common(study);
  app.add_subcommand("models", "list the benchmark models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (app.got_subcommand("models")) {
    list();
    return kOk;
  }

  disco::ExperimentSpec spec;
  try {
    spec = load(cli);
    prepare_dir(cli.out);
  } catch (const disco::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }

  Outputs out(cli.out);
  try {
    if (detect->parsed())
      run_detect(spec, out, cli.quiet);
    else
      run_study(spec, out, cli.quiet);
  } catch (const disco::ConfigError& e) {
    out.discard();
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    out.discard();
    std::cerr << "run failed: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
