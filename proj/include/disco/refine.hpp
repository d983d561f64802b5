#pragma once

// Divide-and-conquer initialisation: recursive midpoint refinement driven by
// one-dimensional annihilation, and value-based labeling around edge points.

#include "disco/models.hpp"
#include "disco/pa.hpp"
#include "disco/types.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace disco {

struct EdgePoint {
  Point location;
  double jump = 0.0;
  int direction = 0;
};

struct RefineConfig {
  int max_edge_points = std::numeric_limits<int>::max();  // N_E
  double edge_tol = 0.5;                                   // delta
  double off_axis_tol = 0.5;                               // tol
  std::vector<int> orders{1, 2, 3, 4, 5};
  /// Absolute jump threshold; when unset it tracks 0.1 x the observed value range.
  std::optional<double> jump_threshold;
};

/// Evaluated points, values and edge points gathered during initialisation.
class RefineState {
 public:
  explicit RefineState(Box domain) : domain_(std::move(domain)) {}

  const Box& domain() const { return domain_; }
  const std::vector<Sample>& evaluated() const { return evaluated_; }
  const std::vector<EdgePoint>& edges() const { return edges_; }
  std::int64_t eval_count() const { return eval_count_; }

  /// Index of an evaluated point with identical coordinates (within 1e-12).
  std::optional<std::size_t> find(const Point& x) const;
  /// Evaluates `model` at `x` unless already present; returns the sample index.
  std::size_t evaluate(const Model& model, const Point& x);
  /// Appends an edge point unless one already sits at the same location.
  bool add_edge(EdgePoint e);

  /// 0.1 x (max - min of observed values), floored at 1e-8.
  double default_jump_threshold() const;

 private:
  using Key = std::vector<std::int64_t>;
  Key key(const Point& x) const;

  Box domain_;
  std::vector<Sample> evaluated_;
  std::vector<EdgePoint> edges_;
  std::map<Key, std::size_t> index_;
  std::int64_t eval_count_ = 0;
  double vmin_ = std::numeric_limits<double>::infinity();
  double vmax_ = -std::numeric_limits<double>::infinity();
};

/// Evaluates the two projections of `x` onto the faces of the domain along
/// coordinate `k`, skipping any already present.
void ensure_boundary_parents(RefineState& state, const Model& model, const Point& x, int k);

/// Refines around `x` along coordinate `j`. Returns true once the edge-point
/// budget is exhausted.
bool refine_1d(RefineState& state, const Model& model, const Point& x, int j,
               const RefineConfig& cfg, Rng& rng);

RefineState refinement_initialization(const Model& model, std::span<const Point> initial,
                                      const RefineConfig& cfg, Rng& rng);

struct LabelingStats {
  int conflicts = 0;  // points whose candidate labels disagree across edge points
  int labeled = 0;
  int one_sided = 0;  // edge points skipped because no neighbour lies a jump below the maximum
};

/// Labels every evaluated point within `delta` of an edge point. The largest
/// value in each neighbourhood anchors class +1; a point joins +1 when its
/// value is within |jump| of that maximum, otherwise -1. Points seen from
/// several edge points keep the label of the nearest one. An edge point whose
/// neighbourhood has no -1 candidate labels nothing.
std::vector<LabeledSample> label_initial(const RefineState& state, double delta,
                                         LabelingStats* stats = nullptr);

}  // namespace disco
