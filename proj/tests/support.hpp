#pragma once

#include "disco/models.hpp"
#include "disco/svm.hpp"

#include <initializer_list>
#include <vector>

namespace disco::test {

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

inline Sample sample(std::initializer_list<double> x, double value) { return {pt(x), value}; }

// One-dimensional model on [lo, hi].
inline Model line_model(std::function<double(double)> f, double lo = -1.0, double hi = 1.0) {
  return Model("line", Box::cube(1, lo, hi), [f](const Point& x) { return f(x[0]); });
}

inline TrainingSet training_set(const Eigen::MatrixXd& points, const Eigen::VectorXd& labels) {
  return {points, labels};
}

}  // namespace disco::test
