#include "disco/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace disco {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd gram_from_distances(const Eigen::MatrixXd& sq_dist, double sigma) {
  return (-sq_dist.array() / (2.0 * sigma * sigma)).exp().matrix();
}

Classifier assemble(const TrainingSet& set, const DualSolution& sol, double C, double sigma) {
  std::vector<int> sv;
  for (int i = 0; i < set.size(); ++i)
    if (sol.alpha[i] > 0.0) sv.push_back(i);
  Classifier clf;
  clf.support.resize(set.dim(), static_cast<Eigen::Index>(sv.size()));
  clf.weights.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    clf.support.col(k) = set.points.col(sv[k]);
    clf.weights[k] = sol.alpha[sv[k]] * set.labels[sv[k]];
  }
  clf.bias = sol.bias;
  clf.sigma = sigma;
  clf.C = C;
  clf.training_size = set.size();
  clf.converged = sol.converged;
  return clf;
}

}  // namespace

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d = (-2.0 * a.transpose() * b).eval();
  d.colwise() += a.colwise().squaredNorm().transpose();
  d.rowwise() += b.colwise().squaredNorm();
  return d.cwiseMax(0.0);
}

// ---------------------------------------------------------------------------

void TrainingSet::validate() const {
  if (points.cols() != labels.size()) throw InvalidTrainingSet("points and labels differ in count");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1.0)
      pos = true;
    else if (labels[i] == -1.0)
      neg = true;
    else
      throw InvalidTrainingSet("labels must be +1 or -1");
  }
  if (!(pos && neg)) throw SingleClass("training set holds a single class");
  const Eigen::MatrixXd d2 = squared_distances(points, points);
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    for (Eigen::Index j = i + 1; j < labels.size(); ++j)
      if (d2(i, j) == 0.0 && labels[i] != labels[j] && points.col(i) == points.col(j))
        throw InvalidTrainingSet("duplicate point with conflicting labels");
}

TrainingSet TrainingSet::subset(std::span<const int> rows) const {
  TrainingSet out;
  out.points.resize(points.rows(), static_cast<Eigen::Index>(rows.size()));
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.points.col(k) = points.col(rows[k]);
    out.labels[k] = labels[rows[k]];
  }
  return out;
}

TrainingSet make_training_set(std::span<const LabeledSample> samples) {
  TrainingSet set;
  const Eigen::Index d = samples.empty() ? 0 : samples.front().x.size();
  set.points.resize(d, static_cast<Eigen::Index>(samples.size()));
  set.labels.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    set.points.col(i) = samples[i].x;
    set.labels[i] = samples[i].label;
  }
  return set;
}

// ---------------------------------------------------------------------------

double decision(const Classifier& clf, const Point& x) {
  const double inv = 1.0 / (2.0 * clf.sigma * clf.sigma);
  double sum = clf.bias;
  for (int i = 0; i < clf.support_count(); ++i)
    sum += clf.weights[i] * std::exp(-(clf.support.col(i) - x).squaredNorm() * inv);
  return sum;
}

Point decision_gradient(const Classifier& clf, const Point& x) {
  const double s2 = clf.sigma * clf.sigma;
  Point grad = Point::Zero(x.size());
  for (int i = 0; i < clf.support_count(); ++i) {
    const Point diff = clf.support.col(i) - x;
    grad += (clf.weights[i] * std::exp(-diff.squaredNorm() / (2.0 * s2)) / s2) * diff;
  }
  return grad;
}

Eigen::VectorXd decision_values(const Classifier& clf, const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.cols());
  constexpr Eigen::Index kBlock = 2048;
  for (Eigen::Index start = 0; start < points.cols(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, points.cols() - start);
    const Eigen::MatrixXd k =
        gram_from_distances(squared_distances(clf.support, points.middleCols(start, len)), clf.sigma);
    out.segment(start, len) = (k.transpose() * clf.weights).array() + clf.bias;
  }
  return out;
}

// ---------------------------------------------------------------------------

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels,
                      const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd ya = labels.cwiseProduct(alpha);
  return alpha.sum() - 0.5 * ya.dot(gram * ya);
}

DualSolution solve_dual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double C,
                        const SvmOptions& opts, const Eigen::VectorXd* warm) {
  const int n = static_cast<int>(y.size());
  DualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  // Gradient of the minimisation form 1/2 a'Qa - e'a.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  if (warm) {
    if (warm->size() != n || (warm->array() < 0.0).any() || (warm->array() > C).any())
      throw InvalidTrainingSet("warm start is infeasible");
    sol.alpha = *warm;
    grad = y.cwiseProduct(gram * y.cwiseProduct(sol.alpha)).array() - 1.0;
  }
  Eigen::VectorXd& a = sol.alpha;
  auto at_upper = [&](int t) { return a[t] >= C; };
  auto at_lower = [&](int t) { return a[t] <= 0.0; };
  auto in_up = [&](int t) { return y[t] > 0 ? !at_upper(t) : !at_lower(t); };
  auto in_low = [&](int t) { return y[t] > 0 ? !at_lower(t) : !at_upper(t); };

  // Shrinking: bounded variables that cannot re-enter the working set are
  // dropped from the active list; the full gradient is rebuilt before the
  // final optimality check.
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  const int shrink_every = std::min(n, 1000);
  int countdown = shrink_every;

  const long max_iter = static_cast<long>(opts.max_passes) * std::max(n, 1);
  for (;; ++sol.iterations) {
    // First index: maximal violator in I_up.
    double gmax = -kInf;
    int i = -1;
    for (int t : active) {
      if (in_up(t)) {
        const double v = -y[t] * grad[t];
        if (v >= gmax) {
          gmax = v;
          i = t;
        }
      }
    }
    // Second index: largest objective decrease within I_low.
    double gmax2 = -kInf;
    double best = kInf;
    int j = -1;
    for (int t : active) {
      if (i >= 0 && in_low(t)) {
        const double v = y[t] * grad[t];
        gmax2 = std::max(gmax2, v);
        const double diff = gmax + v;
        if (diff > 0.0) {
          double quad = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < opts.kkt_tol) {
      if (static_cast<int>(active.size()) == n) break;
      grad = y.cwiseProduct(gram * y.cwiseProduct(a)).array() - 1.0;
      active.resize(static_cast<std::size_t>(n));
      std::iota(active.begin(), active.end(), 0);
      countdown = shrink_every;
      continue;
    }
    if (sol.iterations >= max_iter) {
      sol.converged = false;
      break;
    }
    if (--countdown == 0) {
      countdown = shrink_every;
      std::erase_if(active, [&](int t) {
        const double g = grad[t];
        if (at_upper(t)) return y[t] > 0 ? -g > gmax : -g > gmax2;
        if (at_lower(t)) return y[t] > 0 ? g > gmax2 : g > gmax;
        return false;
      });
    }

    const double ai = a[i], aj = a[j];
    const double qij = y[i] * y[j] * gram(i, j);
    if (y[i] != y[j]) {
      double quad = gram(i, i) + gram(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        }
      } else if (a[j] > C) {
        a[j] = C;
        a[i] = C + diff;
      }
    } else {
      double quad = gram(i, i) + gram(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = sum - C;
        }
        if (a[j] > C) {
          a[j] = C;
          a[i] = sum - C;
        }
      } else {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = sum;
        }
        if (a[i] < 0.0) {
          a[i] = 0.0;
          a[j] = sum;
        }
      }
    }
    const double dai = (a[i] - ai) * y[i], daj = (a[j] - aj) * y[j];
    // grad_k += Q_ki dai' + Q_kj daj' with Q_ki = y_k y_i K_ki.
    const double* ki = gram.col(i).data();
    const double* kj = gram.col(j).data();
    for (int t : active) grad[t] += y[t] * (ki[t] * dai + kj[t] * daj);
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  sol.bias = -rho;
  sol.objective = dual_objective(gram, y, a);
  return sol;
}

Classifier train(const TrainingSet& set, double C, double sigma, const SvmOptions& opts) {
  if (!(C > 0.0) || !(sigma > 0.0)) throw ConfigError("svm: C and sigma must be positive");
  set.validate();
  const Eigen::MatrixXd gram = gram_from_distances(squared_distances(set.points, set.points), sigma);
  return assemble(set, solve_dual(gram, set.labels, C, opts), C, sigma);
}

// ---------------------------------------------------------------------------

double median_pairwise_distance(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  if (n < 2) return 1.0;
  const Eigen::MatrixXd d2 = squared_distances(points, points);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) dist.push_back(d2(i, j));
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  const double m = std::sqrt(*mid);
  return m > 0.0 ? m : 1.0;
}

std::vector<double> default_sigma_grid(const TrainingSet& set) {
  const double base = median_pairwise_distance(set.points);
  std::vector<double> grid;
  for (int k = -3; k <= 3; ++k) grid.push_back(std::ldexp(base, k));
  return grid;
}

std::vector<double> default_C_grid() { return {0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0}; }

CvChoice cross_validate(const TrainingSet& set, std::span<const double> sigma_grid,
                        std::span<const double> C_grid, int folds, Rng& rng,
                        const SvmOptions& opts) {
  if (folds < 2 || set.size() < folds) throw ConfigError("cross-validation needs 2 <= folds <= n");
  if (sigma_grid.empty() || C_grid.empty()) throw ConfigError("cross-validation grids are empty");
  set.validate();
  const int n = set.size();

  // Stratified assignment: shuffle each class, deal round-robin.
  std::vector<int> fold_of(n);
  int dealt = 0;
  for (double cls : {1.0, -1.0}) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (set.labels[i] == cls) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i : idx) fold_of[i] = dealt++ % folds;
  }
  std::vector<std::vector<int>> train_idx(folds), test_idx(folds);
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < folds; ++f) (fold_of[i] == f ? test_idx : train_idx)[f].push_back(i);

  const Eigen::MatrixXd d2 = squared_distances(set.points, set.points);
  // C ascending so each fold warm-starts from the previous, smaller box.
  std::vector<std::size_t> c_order(C_grid.size());
  std::iota(c_order.begin(), c_order.end(), std::size_t{0});
  std::stable_sort(c_order.begin(), c_order.end(),
                   [&](std::size_t a, std::size_t b) { return C_grid[a] < C_grid[b]; });
  std::vector<CvChoice> scored;
  for (double sigma : sigma_grid) {
    const Eigen::MatrixXd gram = gram_from_distances(d2, sigma);
    std::vector<int> correct(C_grid.size(), 0);
    for (int f = 0; f < folds; ++f) {
      const auto& tr = train_idx[f];
      const auto& te = test_idx[f];
      if (te.empty()) continue;
      const Eigen::VectorXd ytr = set.labels(tr);
      const bool mixed = (ytr.array() > 0).any() && (ytr.array() < 0).any();
      if (!mixed) {
        // A one-class fold predicts its only class.
        for (int t : te)
          for (auto& c : correct) c += set.labels[t] == ytr[0];
        continue;
      }
      const Eigen::MatrixXd sub = gram(tr, tr);
      const Eigen::MatrixXd cross = gram(tr, te);
      Eigen::VectorXd alpha;
      for (std::size_t ci : c_order) {
        const DualSolution sol =
            solve_dual(sub, ytr, C_grid[ci], opts, alpha.size() ? &alpha : nullptr);
        alpha = sol.alpha;
        const Eigen::VectorXd f_val =
            (cross.transpose() * sol.alpha.cwiseProduct(ytr)).array() + sol.bias;
        for (std::size_t k = 0; k < te.size(); ++k)
          correct[ci] += (f_val[static_cast<Eigen::Index>(k)] >= 0.0 ? 1.0 : -1.0) ==
                         set.labels[te[k]];
      }
    }
    for (std::size_t ci = 0; ci < C_grid.size(); ++ci)
      scored.push_back({sigma, C_grid[ci], static_cast<double>(correct[ci]) / n});
  }

  double top = -1.0;
  for (const auto& c : scored) top = std::max(top, c.accuracy);
  std::vector<CvChoice> tied;
  for (const auto& c : scored)
    if (c.accuracy >= top - 1e-12) tied.push_back(c);
  // Held-out ties are common on small sets; resubstitution accuracy separates
  // models that fit the data from ones that collapse to a single class.
  std::vector<double> fit(tied.size(), 1.0);
  if (tied.size() > 1) {
    for (std::size_t k = 0; k < tied.size(); ++k) {
      const Eigen::MatrixXd gram = gram_from_distances(d2, tied[k].sigma);
      const DualSolution sol = solve_dual(gram, set.labels, tied[k].C, opts);
      const Eigen::VectorXd f_val =
          (gram * sol.alpha.cwiseProduct(set.labels)).array() + sol.bias;
      int ok = 0;
      for (int i = 0; i < n; ++i) ok += (f_val[i] >= 0.0 ? 1.0 : -1.0) == set.labels[i];
      fit[k] = static_cast<double>(ok) / n;
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < tied.size(); ++k) {
    const auto& a = tied[k];
    const auto& b = tied[best];
    if (fit[k] > fit[best] + 1e-12 ||
        (std::abs(fit[k] - fit[best]) <= 1e-12 &&
         (a.sigma > b.sigma || (a.sigma == b.sigma && a.C < b.C))))
      best = k;
  }
  return tied[best];
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_classifier(std::ostream& out, const Classifier& clf) {
  out << clf.dim() << ' ' << clf.support_count() << ' ' << format_double(clf.sigma) << ' '
      << format_double(clf.C) << ' ' << format_double(clf.bias) << '\n';
  for (int i = 0; i < clf.support_count(); ++i) {
    for (int k = 0; k < clf.dim(); ++k) out << format_double(clf.support(k, i)) << ' ';
    out << format_double(clf.weights[i]) << '\n';
  }
}

namespace {

double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ConfigError("classifier: bad number '" + tok + "'");
  return v;
}

}  // namespace

Classifier read_classifier(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("classifier: missing header");
  std::istringstream header(line);
  int d = 0, nsv = 0;
  std::string sigma, C, bias;
  if (!(header >> d >> nsv >> sigma >> C >> bias) || d < 1 || nsv < 0)
    throw ConfigError("classifier: malformed header");
  Classifier clf;
  clf.sigma = parse_double(sigma);
  clf.C = parse_double(C);
  clf.bias = parse_double(bias);
  clf.support.resize(d, nsv);
  clf.weights.resize(nsv);
  for (int i = 0; i < nsv; ++i) {
    if (!std::getline(in, line)) throw ConfigError("classifier: truncated support vectors");
    std::istringstream row(line);
    std::string tok;
    for (int k = 0; k <= d; ++k) {
      if (!(row >> tok)) throw ConfigError("classifier: short support-vector line");
      (k < d ? clf.support(k, i) : clf.weights[i]) = parse_double(tok);
    }
  }
  return clf;
}

}  // namespace disco
