#pragma once

// Monte-Carlo scoring and repeated-seed convergence studies.

#include "disco/detector.hpp"
#include "disco/models.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace disco {

/// Test points (d x n) with their ground-truth classes.
struct TestSet {
  Eigen::MatrixXd points;
  Eigen::VectorXi truth;
};

Eigen::MatrixXd uniform_sample(const Box& domain, int n, Rng& rng);

/// Uniform points of [-1,1]^20 whose first three coordinates lie within
/// `band` of the sphere of radius kSphereRadius, by rejection.
Eigen::MatrixXd near_surface_sample(int n, double band, Rng& rng);

TestSet make_test_set(const TruthOracle& truth, Eigen::MatrixXd points);

/// Fraction of points where sign(decision) disagrees with the truth; a zero
/// decision counts as +1.
double misclassification(const Classifier& clf, const TestSet& test);
double misclassification(const Classifier& clf, const TruthOracle& truth,
                         const Eigen::MatrixXd& points);

struct ExperimentSpec {
  std::string model = "surf1";
  DetectorConfig detector;
  int n_test = 10000;
  double test_band = 0.0;  // > 0: near-surface band (sphere20 only)
  int n_runs = 10;
  std::vector<double> targets{0.01, 0.001};
  /// Stop-short level; defaults to the smallest target.
  double stop_target = -1.0;
  std::uint64_t test_seed = 12345;
  int threads = 1;
};

struct StudyRow {
  int run = 0;
  int iteration = 0;
  std::int64_t evals = 0;
  double misclass = 0.0;
};

struct RunOutcome {
  int run = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::int64_t init_evals = 0;
  std::int64_t total_evals = 0;
  double final_misclass = 1.0;
  std::vector<std::int64_t> evals_to_target;  // -1 when not reached
};

struct TargetSummary {
  double target = 0.0;
  int reached = 0;
  double mean_evals = 0.0;
  double std_evals = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<RunOutcome> runs;
  std::vector<TargetSummary> targets;
  double mean_final = 0.0;
  double std_final = 0.0;
  double std_error = 0.0;  // sqrt(p(1-p)/n_test) at the mean final error
  int n_test = 0;
};

/// Run-specific seed derived from the study seed.
std::uint64_t run_seed(std::uint64_t base, int run);

TestSet study_test_set(const ExperimentSpec& spec, const TestProblem& problem);

StudyResult convergence_study(const ExperimentSpec& spec);

/// Mean misclassification across runs as a function of model evaluations,
/// each run held at its latest value: smallest value reached at or below
/// `max_evals`.
double best_mean_error_within(const StudyResult& study, std::int64_t max_evals);

void write_study_csv(std::ostream& out, const StudyResult& study);
void write_summary_csv(std::ostream& out, const StudyResult& study);

}  // namespace disco
