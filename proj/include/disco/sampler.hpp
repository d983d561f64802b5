#pragma once

// Active-learning refinement: candidates are pulled onto the zero level set of
// the classifier and accepted only where both classes are locally known.

#include "disco/svm.hpp"
#include "disco/types.hpp"

#include <span>
#include <vector>

namespace disco {

struct DescentOptions {
  int max_steps = 200;
  double step_tol = 1e-10;
  double value_tol = 1e-8;
  double armijo = 1e-4;
};

struct SamplerConfig {
  int n_add = 10;
  double delta_t = 2.0;   // variation radius
  double epsilon = 0.01;  // minimum spacing
  int itermax = 1000;     // candidate attempts per call
  DescentOptions descent;
};

/// Projected gradient descent on decision(x)^2 with backtracking from `start`.
/// Never increases |decision|.
Point descend_to_boundary(const Classifier& clf, const Box& domain, Point start,
                          const DescentOptions& opt = {});

/// Uniform draw over the box followed by descend_to_boundary.
Point boundary_candidate(const Classifier& clf, const Box& domain, Rng& rng,
                         const DescentOptions& opt = {});

/// True when x is farther than epsilon from every point in `existing` and has
/// labeled neighbours of both classes strictly within delta_t.
bool acceptable(const Point& x, std::span<const LabeledSample> labeled,
                std::span<const Point> accepted, double delta_t, double epsilon);

/// Up to n_add accepted candidates within itermax attempts. An empty result
/// means the spacing criterion has saturated.
std::vector<Point> find_points_on_boundary(const Classifier& clf,
                                           std::span<const LabeledSample> labeled,
                                           const Box& domain, const SamplerConfig& cfg, Rng& rng);

/// Nearest-value labeling against the nearest labeled neighbour of each class.
/// Exact ties go to +1 and bump `ties` when given.
int label_us_point(std::span<const LabeledSample> labeled, const Point& x, double fx,
                   double delta_t, long* ties = nullptr);

}  // namespace disco
