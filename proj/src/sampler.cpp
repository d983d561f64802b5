#include "disco/sampler.hpp"

#include <cmath>
#include <limits>

namespace disco {

Point descend_to_boundary(const Classifier& clf, const Box& domain, Point x,
                          const DescentOptions& opt) {
  x = domain.project(x);
  double d = decision(clf, x);
  const double max_len = domain.diameter();
  for (int step = 0; step < opt.max_steps && std::abs(d) >= opt.value_tol; ++step) {
    const Point dgrad = decision_gradient(clf, x);
    const double dnorm2 = dgrad.squaredNorm();
    if (dnorm2 == 0.0) break;
    const Point grad = 2.0 * d * dgrad;
    // Start from the Gauss-Newton length, which lands on the linearised root.
    double t = 1.0 / (2.0 * dnorm2);
    t = std::min(t, max_len / grad.norm());
    const double g = d * d;
    bool moved = false;
    while (true) {
      const Point trial = domain.project(x - t * grad);
      const Point s = trial - x;
      if (s.norm() < opt.step_tol) break;
      const double dt = decision(clf, trial);
      // Overshooting the zero set must at least halve |d|, otherwise backtrack.
      const bool crossed = (dt > 0.0) != (d > 0.0) && std::abs(dt) > 0.5 * std::abs(d);
      if (!crossed && dt * dt <= g + opt.armijo * grad.dot(s)) {
        x = trial;
        d = dt;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

Point boundary_candidate(const Classifier& clf, const Box& domain, Rng& rng,
                         const DescentOptions& opt) {
  return descend_to_boundary(clf, domain, domain.sample(rng), opt);
}

bool acceptable(const Point& x, std::span<const LabeledSample> labeled,
                std::span<const Point> accepted, double delta_t, double epsilon) {
  bool near_pos = false, near_neg = false;
  for (const auto& s : labeled) {
    const double dist = (s.x - x).norm();
    if (dist <= epsilon) return false;
    if (dist < delta_t) (s.label > 0 ? near_pos : near_neg) = true;
  }
  for (const auto& p : accepted)
    if ((p - x).norm() <= epsilon) return false;
  return near_pos && near_neg;
}

std::vector<Point> find_points_on_boundary(const Classifier& clf,
                                           std::span<const LabeledSample> labeled,
                                           const Box& domain, const SamplerConfig& cfg, Rng& rng) {
  std::vector<Point> accepted;
  for (int attempt = 0; attempt < cfg.itermax && static_cast<int>(accepted.size()) < cfg.n_add;
       ++attempt) {
    Point x = boundary_candidate(clf, domain, rng, cfg.descent);
    if (acceptable(x, labeled, accepted, cfg.delta_t, cfg.epsilon)) accepted.push_back(std::move(x));
  }
  return accepted;
}

int label_us_point(std::span<const LabeledSample> labeled, const Point& x, double fx,
                   double delta_t, long* ties) {
  const LabeledSample* nearest[2] = {nullptr, nullptr};  // +1, -1
  double best[2] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (const auto& s : labeled) {
    const int c = s.label > 0 ? 0 : 1;
    const double dist = (s.x - x).norm();
    if (dist < best[c]) {
      best[c] = dist;
      nearest[c] = &s;
    }
  }
  if (!nearest[0] || !nearest[1] || best[0] >= delta_t || best[1] >= delta_t)
    throw MissingNeighbor("no labeled neighbour of each class within delta_t");
  const double to_pos = std::abs(fx - nearest[0]->value);
  const double to_neg = std::abs(fx - nearest[1]->value);
  if (to_pos == to_neg && ties) ++*ties;
  return to_pos <= to_neg ? 1 : -1;
}

}  // namespace disco
