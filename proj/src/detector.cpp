#include "disco/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace disco {

void DetectorConfig::validate() const {
  std::ostringstream err;
  if (initial_points < 0) err << "initial_points must be >= 0; ";
  if (!(refine.edge_tol > 0.0)) err << "edge_tol must be positive; ";
  if (!(refine.off_axis_tol > 0.0)) err << "off_axis_tol must be positive; ";
  if (refine.max_edge_points < 1) err << "max_edge_points must be >= 1; ";
  if (refine.orders.empty()) err << "pa_orders is empty; ";
  for (int m : refine.orders)
    if (m < 1) err << "pa_orders entries must be >= 1; ";
  if (refine.jump_threshold && !(*refine.jump_threshold > 0.0)) err << "jump_threshold must be positive; ";
  if (!(sampler.epsilon > 0.0) || !(sampler.delta_t > sampler.epsilon))
    err << "need 0 < epsilon < delta_t; ";
  if (sampler.n_add < 1) err << "n_add must be >= 1; ";
  if (sampler.itermax < 1) err << "itermax must be >= 1; ";
  if (max_runtime < 0.0) err << "max_runtime must be >= 0; ";
  if (folds < 2) err << "folds must be >= 2; ";
  if (cv_every < 1) err << "cv_every must be >= 1; ";
  for (double s : sigma_grid)
    if (!(s > 0.0)) err << "sigma_grid entries must be positive; ";
  for (double c : C_grid)
    if (!(c > 0.0)) err << "C_grid entries must be positive; ";
  if (!(svm.kkt_tol > 0.0) || svm.max_passes < 1) err << "kkt_tol and max_passes must be positive; ";
  if (const auto msg = err.str(); !msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

std::vector<Point> initial_point_set(const Box& domain, int count, Rng& rng) {
  if (count <= 0) return {domain.center()};
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) pts.push_back(domain.sample(rng));
  return pts;
}

namespace {

class Trainer {
 public:
  Trainer(const DetectorConfig& cfg) : cfg_(cfg) {}

  Classifier fit(const std::vector<LabeledSample>& labeled, int retrain) {
    const TrainingSet set = make_training_set(labeled);
    // Below kSmallSet points the choice is cheap and unstable, so redo it each time.
    if (choice_ && retrain % cfg_.cv_every != 0 && set.size() >= kSmallSet)
      return train(set, choice_->C, choice_->sigma, cfg_.svm);
    const int folds = std::min(cfg_.folds, set.size());
    const auto sigmas = cfg_.sigma_grid.empty() ? default_sigma_grid(set) : cfg_.sigma_grid;
    const auto Cs = cfg_.C_grid.empty() ? default_C_grid() : cfg_.C_grid;
    Rng cv_rng(derive_seed(cfg_.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(retrain)));
    choice_ = cross_validate(set, sigmas, Cs, folds, cv_rng, cfg_.svm);
    return train(set, choice_->C, choice_->sigma, cfg_.svm);
  }

 private:
  static constexpr int kSmallSet = 50;
  const DetectorConfig& cfg_;
  std::optional<CvChoice> choice_;
};

}  // namespace

Detection detect(const Model& model, const DetectorConfig& cfg, const Monitor* monitor) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const std::int64_t evals0 = model.evaluations();
  const auto evals = [&] { return model.evaluations() - evals0; };

  Rng rng(cfg.seed);
  const auto initial = initial_point_set(model.domain(), cfg.initial_points, rng);
  const RefineState init = refinement_initialization(model, initial, cfg.refine, rng);

  Detection out;
  out.trace.init_evals = evals();
  out.trace.edge_points = static_cast<int>(init.edges().size());
  if (init.edges().empty())
    throw InitFailure("initialisation found no edge point (" + std::to_string(init.eval_count()) +
                      " evaluations); enlarge the initial set or reduce tolerances");
  LabelingStats stats;
  out.labeled = label_initial(init, cfg.refine.edge_tol, &stats);
  const bool pos = std::any_of(out.labeled.begin(), out.labeled.end(),
                               [](const LabeledSample& s) { return s.label > 0; });
  const bool neg = std::any_of(out.labeled.begin(), out.labeled.end(),
                               [](const LabeledSample& s) { return s.label < 0; });
  if (!pos || !neg)
    throw InitFailure("initial labeling produced a single class (" +
                      std::to_string(out.labeled.size()) + " labeled, " +
                      std::to_string(init.edges().size()) + " edge points); increase N_E");

  Trainer trainer(cfg);
  long ties = 0;
  int retrain = 0;
  out.classifier = trainer.fit(out.labeled, retrain);

  const auto record = [&](int iteration) {
    IterationRecord r;
    r.iteration = iteration;
    r.evals = evals();
    r.labeled = static_cast<int>(out.labeled.size());
    r.sigma = out.classifier.sigma;
    r.C = out.classifier.C;
    r.support_vectors = out.classifier.support_count();
    r.us_ties = ties;
    r.label_conflicts = stats.conflicts;
    if (monitor && monitor->error) r.misclass = monitor->error(out.classifier);
    out.trace.records.push_back(r);
    return monitor && monitor->error && r.misclass <= monitor->target;
  };

  if (record(0)) {
    out.trace.exit_reason = "target";
    return out;
  }
  for (int iteration = 1;; ++iteration) {
    if (elapsed() >= cfg.max_runtime) {
      out.trace.exit_reason = "runtime";
      break;
    }
    if (evals() >= cfg.max_evals) {
      out.trace.exit_reason = "evals";
      break;
    }
    if (iteration > cfg.max_iterations) {
      out.trace.exit_reason = "iterations";
      break;
    }
    SamplerConfig sampler = cfg.sampler;
    sampler.n_add = static_cast<int>(
        std::min<std::int64_t>(sampler.n_add, cfg.max_evals - evals()));
    const auto fresh =
        find_points_on_boundary(out.classifier, out.labeled, model.domain(), sampler, rng);
    if (fresh.empty()) {
      out.trace.exit_reason = "saturated";
      break;
    }
    // Labels use the set as it stood before this batch.
    const std::size_t before = out.labeled.size();
    for (const auto& x : fresh) {
      const double fx = model(x);
      const int label = label_us_point(std::span(out.labeled.data(), before), x, fx,
                                       cfg.sampler.delta_t, &ties);
      out.labeled.push_back({x, fx, label});
    }
    out.classifier = trainer.fit(out.labeled, ++retrain);
    if (record(iteration)) {
      out.trace.exit_reason = "target";
      break;
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "iter,evals,labeled,misclass,sigma,C\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << r.evals << ',' << r.labeled << ',';
    if (!std::isnan(r.misclass)) out << format_double(r.misclass);
    out << ',' << format_double(r.sigma) << ',' << format_double(r.C) << '\n';
  }
}

void write_points_csv(std::ostream& out, const std::vector<LabeledSample>& points) {
  for (const auto& s : points) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << format_double(s.x[i]) << ',';
    out << format_double(s.value) << ',' << s.label << '\n';
  }
}

}  // namespace disco
