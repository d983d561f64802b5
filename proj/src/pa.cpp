#include "disco/pa.hpp"

#include <algorithm>
#include <limits>

namespace disco {

namespace {

constexpr double kTieEps = 1e-12;

struct Candidate {
  const Sample* sample;
  double offset;     // signed displacement along the direction
  double euclidean;  // full distance to the poi
};

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieEps * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Shuffles each run of exactly tied entries so tie resolution follows the rng.
template <typename It, typename Tied>
void shuffle_ties(It first, It last, Tied tied, Rng& rng) {
  while (first != last) {
    It run_end = std::next(first);
    while (run_end != last && tied(*first, *run_end)) ++run_end;
    if (std::distance(first, run_end) > 1) std::shuffle(first, run_end, rng);
    first = run_end;
  }
}

// One representative per distinct coordinate along the direction, ordered
// nearest first.
std::vector<Candidate> semi_axial_candidates(std::span<const Sample> evaluated, const Point& poi,
                                             int direction, double tol, Rng& rng) {
  std::vector<Candidate> all;
  for (const auto& s : evaluated) {
    const Point diff = s.x - poi;
    const double offset = diff[direction];
    if (std::abs(offset) <= kTieEps) continue;
    bool semi_axial = true;
    for (Eigen::Index i = 0; i < diff.size() && semi_axial; ++i)
      if (i != direction && std::abs(diff[i]) > tol + kTieEps) semi_axial = false;
    if (semi_axial) all.push_back({&s, offset, diff.norm()});
  }

  // Group by coordinate along the direction, keep the closest per group.
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.offset != b.offset ? a.offset < b.offset : a.euclidean < b.euclidean;
  });
  std::vector<Candidate> reps;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && nearly_equal(all[j].offset, all[i].offset)) ++j;
    std::size_t k = i + 1;
    while (k < j && nearly_equal(all[k].euclidean, all[i].euclidean)) ++k;
    if (k - i > 1) {
      std::uniform_int_distribution<std::size_t> pick(i, k - 1);
      reps.push_back(all[pick(rng)]);
    } else {
      reps.push_back(all[i]);
    }
    i = j;
  }

  std::sort(reps.begin(), reps.end(), [](const Candidate& a, const Candidate& b) {
    const double da = std::abs(a.offset), db = std::abs(b.offset);
    return da != db ? da < db : a.euclidean < b.euclidean;
  });
  shuffle_ties(
      reps.begin(), reps.end(),
      [](const Candidate& a, const Candidate& b) {
        return nearly_equal(std::abs(a.offset), std::abs(b.offset)) &&
               nearly_equal(a.euclidean, b.euclidean);
      },
      rng);
  return reps;
}

Stencil build_stencil(const std::vector<Candidate>& ordered, const Point& poi, int direction,
                      int order) {
  const auto below = std::find_if(ordered.begin(), ordered.end(),
                                  [](const Candidate& c) { return c.offset < 0; });
  const auto above = std::find_if(ordered.begin(), ordered.end(),
                                  [](const Candidate& c) { return c.offset > 0; });
  if (below == ordered.end() || above == ordered.end())
    throw InsufficientStencil("no semi-axial point on one side of the point of interest");
  if (static_cast<int>(ordered.size()) < order + 1)
    throw InsufficientStencil("too few semi-axial points for the requested order");

  std::vector<Candidate> chosen{*below, *above};
  for (auto it = ordered.begin();
       it != ordered.end() && static_cast<int>(chosen.size()) < order + 1; ++it)
    if (it != below && it != above) chosen.push_back(*it);

  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) { return a.offset < b.offset; });
  Stencil st{poi, direction, order, {}};
  st.members.reserve(chosen.size());
  for (const auto& c : chosen) st.members.push_back(*c.sample);
  return st;
}

}  // namespace

Eigen::VectorXd Stencil::nodes() const {
  Eigen::VectorXd out(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out[i] = members[i].x[direction];
  return out;
}

Eigen::VectorXd Stencil::values() const {
  Eigen::VectorXd out(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out[i] = members[i].value;
  return out;
}

double annihilate(const Stencil& stencil) {
  const auto coeffs = pa_coefficients(stencil.nodes(), stencil.poi[stencil.direction], stencil.order);
  return coeffs.c.dot(stencil.values()) / coeffs.q;
}

double minmod(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const bool positive = values.front() > 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v == 0.0 || (v > 0.0) != positive) return 0.0;
    best = std::min(best, std::abs(v));
  }
  return positive ? best : -best;
}

double stencil_spacing(const Eigen::VectorXd& sorted_nodes) {
  double h = 0.0;
  for (Eigen::Index i = 1; i < sorted_nodes.size(); ++i)
    h = std::max(h, sorted_nodes[i] - sorted_nodes[i - 1]);
  return h;
}

Stencil select_stencil(std::span<const Sample> evaluated, const Point& poi, int direction,
                       double tol, int order, Rng& rng) {
  if (order < 1) throw DegenerateStencil("order must be positive");
  return build_stencil(semi_axial_candidates(evaluated, poi, direction, tol, rng), poi, direction,
                       order);
}

JumpEstimate jump_estimate(std::span<const Stencil> family) {
  if (family.empty()) throw InsufficientStencil("empty stencil family");
  JumpEstimate est{family.front().poi, family.front().direction, 0.0, {}, 0.0};
  std::vector<double> raw;
  for (const auto& st : family) {
    const double value = annihilate(st);
    est.per_order[st.order] = value;
    raw.push_back(value);
    est.h = std::max(est.h, stencil_spacing(st.nodes()));
  }
  est.magnitude = minmod(raw);
  return est;
}

JumpEstimate estimate_jump(std::span<const Sample> evaluated, const Point& poi, int direction,
                           double tol, std::span<const int> orders, Rng& rng) {
  const auto ordered = semi_axial_candidates(evaluated, poi, direction, tol, rng);
  std::vector<Stencil> family;
  for (int m : orders) {
    if (m < 1 || static_cast<int>(ordered.size()) < m + 1) continue;
    family.push_back(build_stencil(ordered, poi, direction, m));
  }
  if (family.empty()) {
    // Reports which side is missing.
    build_stencil(ordered, poi, direction, 1);
    throw InsufficientStencil("no annihilation order admits a stencil");
  }
  return jump_estimate(family);
}

}  // namespace disco
