#pragma once

// Gaussian-kernel soft-margin SVM trained by sequential minimal optimisation.
//
// Point sets are stored column-wise (d x n). The box constraint C relates to
// the regularisation weight lambda of the hinge-loss functional through
// lambda = 1 / (2 n C).

#include "disco/types.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace disco {

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar gaussian_kernel(const Eigen::MatrixBase<DerivedA>& x,
                                          const Eigen::MatrixBase<DerivedB>& y,
                                          typename DerivedA::Scalar sigma) {
  using std::exp;
  return exp(-(x - y).squaredNorm() / (2 * sigma * sigma));
}

/// Pairwise squared distances between the columns of `a` and `b`.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct TrainingSet {
  Eigen::MatrixXd points;  // d x n
  Eigen::VectorXd labels;  // +-1

  int size() const { return static_cast<int>(labels.size()); }
  int dim() const { return static_cast<int>(points.rows()); }

  /// Throws SingleClass or InvalidTrainingSet when the set cannot be trained on.
  void validate() const;
  TrainingSet subset(std::span<const int> rows) const;
};

TrainingSet make_training_set(std::span<const LabeledSample> samples);

struct Classifier {
  Eigen::MatrixXd support;  // d x n_sv
  Eigen::VectorXd weights;  // alpha_i * y_i
  double bias = 0.0;
  double sigma = 1.0;
  double C = 1.0;
  int training_size = 0;
  bool converged = true;

  int dim() const { return static_cast<int>(support.rows()); }
  int support_count() const { return static_cast<int>(weights.size()); }
};

double decision(const Classifier& clf, const Point& x);
Point decision_gradient(const Classifier& clf, const Point& x);
/// Decision values at every column of `points`.
Eigen::VectorXd decision_values(const Classifier& clf, const Eigen::MatrixXd& points);
/// sign(decision) with zero mapped to +1.
inline int classify(const Classifier& clf, const Point& x) { return decision(clf, x) >= 0.0 ? 1 : -1; }

struct SvmOptions {
  double kkt_tol = 1e-3;
  int max_passes = 500;  // iteration cap = max_passes * n
};

/// Solution of the dual  max sum(alpha) - 1/2 alpha' Q alpha,
/// 0 <= alpha <= C, y' alpha = 0, with Q_ij = y_i y_j K_ij.
struct DualSolution {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  double objective = 0.0;
  long iterations = 0;
  bool converged = true;
};

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels,
                      const Eigen::VectorXd& alpha);

/// SMO with second-order working-set selection on a precomputed Gram matrix.
/// `warm`, when given, must be feasible for C (box and equality constraints).
DualSolution solve_dual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double C,
                        const SvmOptions& opts = {}, const Eigen::VectorXd* warm = nullptr);

Classifier train(const TrainingSet& set, double C, double sigma, const SvmOptions& opts = {});

struct CvChoice {
  double sigma = 1.0;
  double C = 1.0;
  double accuracy = 0.0;
};

/// Grid search maximising mean held-out accuracy over stratified folds.
/// Ties go to higher training-set accuracy, then larger sigma, then smaller C.
CvChoice cross_validate(const TrainingSet& set, std::span<const double> sigma_grid,
                        std::span<const double> C_grid, int folds, Rng& rng,
                        const SvmOptions& opts = {});

double median_pairwise_distance(const Eigen::MatrixXd& points);
/// sigma = 2^k * median pairwise distance for k in [-3, 3].
std::vector<double> default_sigma_grid(const TrainingSet& set);
/// C = 10^k for k in [-1, 4].
std::vector<double> default_C_grid();

/// Plain-text record: "d n_sv sigma C bias" then one line per support vector
/// with its coordinates followed by its signed weight, 17 significant digits.
void write_classifier(std::ostream& out, const Classifier& clf);
Classifier read_classifier(std::istream& in);

/// Shortest decimal text that round-trips a double at 17 significant digits.
std::string format_double(double v);

}  // namespace disco
