#pragma once

// Discontinuity detection driver: annihilation-based initialisation and
// labeling, then alternating SVM training and uncertainty sampling.

#include "disco/models.hpp"
#include "disco/refine.hpp"
#include "disco/sampler.hpp"
#include "disco/svm.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace disco {

struct DetectorConfig {
  int initial_points = 0;  // 0: the domain centre; n > 0: n uniform draws
  RefineConfig refine;
  SamplerConfig sampler;
  double max_runtime = std::numeric_limits<double>::infinity();  // T, seconds
  std::int64_t max_evals = std::numeric_limits<std::int64_t>::max();
  int max_iterations = std::numeric_limits<int>::max();
  std::uint64_t seed = 0;
  std::vector<double> sigma_grid;  // empty: scaled by the median pairwise distance
  std::vector<double> C_grid;      // empty: 10^-1 .. 10^4
  int folds = 5;
  int cv_every = 5;  // re-run cross-validation every this many retrains
  SvmOptions svm;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  std::int64_t evals = 0;  // model calls since detect() started
  int labeled = 0;
  double misclass = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  double C = 0.0;
  int support_vectors = 0;
  long us_ties = 0;
  int label_conflicts = 0;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  std::int64_t init_evals = 0;
  int edge_points = 0;
  std::string exit_reason;
};

/// Optional scoring hook: `error` measures misclassification against a truth
/// oracle; the run stops short once it drops to `target` or below.
struct Monitor {
  std::function<double(const Classifier&)> error;
  double target = -1.0;
};

struct Detection {
  Classifier classifier;
  RunTrace trace;
  std::vector<LabeledSample> labeled;
};

std::vector<Point> initial_point_set(const Box& domain, int count, Rng& rng);

/// Runs the full pipeline. Exits when no candidate is accepted, the runtime,
/// eval or iteration budget is exhausted, or the monitor target is met.
/// Throws InitFailure when initial labeling yields a single class.
Detection detect(const Model& model, const DetectorConfig& cfg, const Monitor* monitor = nullptr);

/// CSV with header iter,evals,labeled,misclass,sigma,C.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// One row per labeled point: x1,...,xd,f,label.
void write_points_csv(std::ostream& out, const std::vector<LabeledSample>& points);

}  // namespace disco
