#include "disco/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <ostream>

namespace disco {

Eigen::MatrixXd uniform_sample(const Box& domain, int n, Rng& rng) {
  Eigen::MatrixXd pts(domain.dim(), n);
  for (int i = 0; i < n; ++i) pts.col(i) = domain.sample(rng);
  return pts;
}

Eigen::MatrixXd near_surface_sample(int n, double band, Rng& rng) {
  if (!(band > 0.0)) throw ConfigError("near-surface band must be positive");
  const Box box = Box::cube(20, -1.0, 1.0);
  Eigen::MatrixXd pts(20, n);
  for (int i = 0; i < n;) {
    const Point x = box.sample(rng);
    if (std::abs(x.head<3>().norm() - kSphereRadius) < band) pts.col(i++) = x;
  }
  return pts;
}

TestSet make_test_set(const TruthOracle& truth, Eigen::MatrixXd points) {
  TestSet t{std::move(points), Eigen::VectorXi(0)};
  t.truth.resize(t.points.cols());
  for (Eigen::Index i = 0; i < t.points.cols(); ++i) t.truth[i] = truth(t.points.col(i));
  return t;
}

double misclassification(const Classifier& clf, const TestSet& test) {
  if (test.points.cols() == 0) return 0.0;
  const Eigen::VectorXd d = decision_values(clf, test.points);
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) wrong += (d[i] >= 0.0 ? 1 : -1) != test.truth[i];
  return static_cast<double>(wrong) / static_cast<double>(d.size());
}

double misclassification(const Classifier& clf, const TruthOracle& truth,
                         const Eigen::MatrixXd& points) {
  return misclassification(clf, make_test_set(truth, points));
}

std::uint64_t run_seed(std::uint64_t base, int run) {
  return derive_seed(base, static_cast<std::uint64_t>(run));
}

TestSet study_test_set(const ExperimentSpec& spec, const TestProblem& problem) {
  Rng rng(spec.test_seed);
  Eigen::MatrixXd pts = spec.test_band > 0.0
                            ? near_surface_sample(spec.n_test, spec.test_band, rng)
                            : uniform_sample(problem.model.domain(), spec.n_test, rng);
  return make_test_set(problem.truth, std::move(pts));
}

namespace {

struct RunResult {
  RunOutcome outcome;
  std::vector<StudyRow> rows;
};

RunResult run_once(const ExperimentSpec& spec, const TestSet& test, int run) {
  RunResult res;
  res.outcome.run = run;
  res.outcome.seed = run_seed(spec.detector.seed, run);
  res.outcome.evals_to_target.assign(spec.targets.size(), -1);
  const TestProblem problem = make_problem(spec.model);
  DetectorConfig cfg = spec.detector;
  cfg.seed = res.outcome.seed;
  double stop = spec.stop_target;
  if (stop < 0.0 && !spec.targets.empty())
    stop = *std::min_element(spec.targets.begin(), spec.targets.end());
  const Monitor monitor{[&](const Classifier& clf) { return misclassification(clf, test); }, stop};
  try {
    const Detection det = detect(problem.model, cfg, &monitor);
    for (const auto& r : det.trace.records) {
      res.rows.push_back({run, r.iteration, r.evals, r.misclass});
      for (std::size_t k = 0; k < spec.targets.size(); ++k)
        if (res.outcome.evals_to_target[k] < 0 && r.misclass <= spec.targets[k])
          res.outcome.evals_to_target[k] = r.evals;
    }
    res.outcome.init_evals = det.trace.init_evals;
    res.outcome.total_evals = det.trace.records.back().evals;
    res.outcome.final_misclass = det.trace.records.back().misclass;
  } catch (const Error& e) {
    res.outcome.failed = true;
    res.outcome.error = e.what();
    res.outcome.total_evals = problem.model.evaluations();
  }
  return res;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace

StudyResult convergence_study(const ExperimentSpec& spec) {
  if (spec.n_test < 1 || spec.n_runs < 1) throw ConfigError("study needs n_test >= 1 and n_runs >= 1");
  spec.detector.validate();
  const TestProblem problem = make_problem(spec.model);
  const TestSet test = study_test_set(spec, problem);

  std::vector<RunResult> results(static_cast<std::size_t>(spec.n_runs));
  const int threads = std::max(1, spec.threads);
  for (int first = 0; first < spec.n_runs; first += threads) {
    std::vector<std::future<RunResult>> batch;
    const int last = std::min(spec.n_runs, first + threads);
    for (int r = first; r < last; ++r)
      batch.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                 [&, r] { return run_once(spec, test, r); }));
    for (int r = first; r < last; ++r) results[static_cast<std::size_t>(r)] = batch[r - first].get();
  }

  StudyResult study;
  study.n_test = spec.n_test;
  std::vector<double> finals;
  for (auto& r : results) {
    study.rows.insert(study.rows.end(), r.rows.begin(), r.rows.end());
    finals.push_back(r.outcome.failed ? 1.0 : r.outcome.final_misclass);
    study.runs.push_back(std::move(r.outcome));
  }
  std::tie(study.mean_final, study.std_final) = mean_std(finals);
  const double p = study.mean_final;
  study.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / spec.n_test);
  for (std::size_t k = 0; k < spec.targets.size(); ++k) {
    std::vector<double> hit;
    for (const auto& r : study.runs)
      if (r.evals_to_target[k] >= 0) hit.push_back(static_cast<double>(r.evals_to_target[k]));
    const auto [mean, sd] = mean_std(hit);
    study.targets.push_back({spec.targets[k], static_cast<int>(hit.size()), mean, sd});
  }
  return study;
}

double best_mean_error_within(const StudyResult& study, std::int64_t max_evals) {
  std::map<int, std::vector<const StudyRow*>> by_run;
  for (const auto& row : study.rows) by_run[row.run].push_back(&row);
  std::vector<std::int64_t> checkpoints;
  for (const auto& row : study.rows)
    if (row.evals <= max_evals) checkpoints.push_back(row.evals);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  double best = 1.0;
  for (std::int64_t e : checkpoints) {
    double sum = 0.0;
    for (const auto& run : study.runs) {
      double err = 1.0;
      if (auto it = by_run.find(run.run); it != by_run.end())
        for (const StudyRow* row : it->second)
          if (row->evals <= e) err = row->misclass;
      sum += err;
    }
    best = std::min(best, sum / static_cast<double>(study.runs.size()));
  }
  return best;
}

void write_study_csv(std::ostream& out, const StudyResult& study) {
  out << "run,iteration,evals,misclass\n";
  for (const auto& r : study.rows)
    out << r.run << ',' << r.iteration << ',' << r.evals << ',' << format_double(r.misclass) << '\n';
}

void write_summary_csv(std::ostream& out, const StudyResult& study) {
  out << "kind,key,value\n";
  for (const auto& r : study.runs) {
    const std::string run = "run" + std::to_string(r.run);
    out << "run," << run << "_seed," << r.seed << '\n';
    out << "run," << run << "_failed," << (r.failed ? 1 : 0) << '\n';
    out << "run," << run << "_init_evals," << r.init_evals << '\n';
    out << "run," << run << "_total_evals," << r.total_evals << '\n';
    out << "run," << run << "_final_misclass," << format_double(r.final_misclass) << '\n';
    for (std::size_t k = 0; k < r.evals_to_target.size(); ++k)
      out << "run," << run << "_evals_to_" << format_double(study.targets[k].target) << ','
          << r.evals_to_target[k] << '\n';
  }
  out << "summary,mean_final_misclass," << format_double(study.mean_final) << '\n';
  out << "summary,std_final_misclass," << format_double(study.std_final) << '\n';
  out << "summary,std_error," << format_double(study.std_error) << '\n';
  out << "summary,mean_final_accuracy," << format_double(1.0 - study.mean_final) << '\n';
  for (const auto& t : study.targets) {
    const std::string key = format_double(t.target);
    out << "summary,reached_" << key << ',' << t.reached << '\n';
    out << "summary,mean_evals_to_" << key << ',' << format_double(t.mean_evals) << '\n';
    out << "summary,std_evals_to_" << key << ',' << format_double(t.std_evals) << '\n';
  }
}

}  // namespace disco
