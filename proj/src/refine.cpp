#include "disco/refine.hpp"

#include <algorithm>
#include <cmath>

namespace disco {

namespace {

constexpr double kSameCoordinate = 1e-12;
constexpr double kMinGap = 1e-9;

// Nearest semi-axial evaluated neighbour of x on one side along j.
const Sample* nearest_on_side(const RefineState& state, const Point& x, int j, double tol,
                              int side) {
  const Sample* best = nullptr;
  double best_gap = 0.0, best_dist = 0.0;
  for (const auto& s : state.evaluated()) {
    const double gap = side * (s.x[j] - x[j]);
    if (gap <= kSameCoordinate) continue;
    bool semi_axial = true;
    for (Eigen::Index i = 0; i < x.size() && semi_axial; ++i)
      if (i != j && std::abs(s.x[i] - x[i]) > tol + kSameCoordinate) semi_axial = false;
    if (!semi_axial) continue;
    const double dist = (s.x - x).squaredNorm();
    if (!best || gap < best_gap || (gap == best_gap && dist < best_dist)) {
      best = &s;
      best_gap = gap;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

RefineState::Key RefineState::key(const Point& x) const {
  Key k(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    k[static_cast<std::size_t>(i)] = std::llround(x[i] / kSameCoordinate);
  return k;
}

std::optional<std::size_t> RefineState::find(const Point& x) const {
  if (auto it = index_.find(key(x)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t RefineState::evaluate(const Model& model, const Point& x) {
  if (auto hit = find(x)) return *hit;
  const double v = model(x);
  ++eval_count_;
  vmin_ = std::min(vmin_, v);
  vmax_ = std::max(vmax_, v);
  evaluated_.push_back({x, v});
  index_.emplace(key(x), evaluated_.size() - 1);
  return evaluated_.size() - 1;
}

bool RefineState::add_edge(EdgePoint e) {
  for (const auto& other : edges_)
    if ((other.location - e.location).cwiseAbs().maxCoeff() <= kSameCoordinate) return false;
  edges_.push_back(std::move(e));
  return true;
}

double RefineState::default_jump_threshold() const {
  if (evaluated_.empty()) return 1e-8;
  return std::max(0.1 * (vmax_ - vmin_), 1e-8);
}

void ensure_boundary_parents(RefineState& state, const Model& model, const Point& x, int k) {
  Point lo = x, hi = x;
  lo[k] = state.domain().lower[k];
  hi[k] = state.domain().upper[k];
  state.evaluate(model, lo);
  state.evaluate(model, hi);
}

bool refine_1d(RefineState& state, const Model& model, const Point& x, int j,
               const RefineConfig& cfg, Rng& rng) {
  const auto done = [&] { return static_cast<int>(state.edges().size()) >= cfg.max_edge_points; };
  if (done()) return true;

  const Sample* plus = nearest_on_side(state, x, j, cfg.off_axis_tol, +1);
  const Sample* minus = nearest_on_side(state, x, j, cfg.off_axis_tol, -1);
  if (!plus || !minus) {
    ensure_boundary_parents(state, model, x, j);
    plus = nearest_on_side(state, x, j, cfg.off_axis_tol, +1);
    minus = nearest_on_side(state, x, j, cfg.off_axis_tol, -1);
  }

  struct Probe {
    Point y;
    bool jump = false;
    double magnitude = 0.0;
  };
  std::vector<Probe> probes;
  for (const Sample* nb : {plus, minus}) {
    if (!nb || (nb->x - x).norm() < kMinGap) continue;
    probes.push_back({0.5 * (x + nb->x)});
  }
  // Both jump estimates are taken before either midpoint is evaluated.
  for (auto& p : probes) {
    const double threshold = cfg.jump_threshold.value_or(state.default_jump_threshold());
    try {
      const auto est = estimate_jump(state.evaluated(), p.y, j, cfg.off_axis_tol, cfg.orders, rng);
      p.magnitude = est.magnitude;
      p.jump = jump_exists(est, threshold);
    } catch (const InsufficientStencil&) {
      p.jump = false;
    }
  }

  for (const auto& p : probes) {
    if (!p.jump) continue;
    if ((p.y - x).norm() <= cfg.edge_tol) {
      state.add_edge({p.y, p.magnitude, j});
      if (done()) return true;
      continue;
    }
    if (state.find(p.y)) continue;
    state.evaluate(model, p.y);
    for (int l = 0; l < state.domain().dim(); ++l) {
      ensure_boundary_parents(state, model, p.y, l);
      if (refine_1d(state, model, p.y, l, cfg, rng)) return true;
    }
  }
  return done();
}

RefineState refinement_initialization(const Model& model, std::span<const Point> initial,
                                      const RefineConfig& cfg, Rng& rng) {
  if (initial.empty()) throw ConfigError("initialisation needs at least one initial point");
  if (cfg.max_edge_points < 1 || !(cfg.edge_tol > 0.0) || !(cfg.off_axis_tol > 0.0))
    throw ConfigError("initialisation needs N_E >= 1, delta > 0 and tol > 0");
  RefineState state(model.domain());
  for (const auto& x : initial) {
    if (!state.domain().contains(x)) throw ConfigError("initial point outside the domain");
    state.evaluate(model, x);
  }
  for (const auto& x : initial) {
    for (int j = 0; j < model.dim(); ++j) {
      ensure_boundary_parents(state, model, x, j);
      if (refine_1d(state, model, x, j, cfg, rng)) return state;
    }
  }
  return state;
}

std::vector<LabeledSample> label_initial(const RefineState& state, double delta,
                                         LabelingStats* stats) {
  const auto& pts = state.evaluated();
  const double radius = delta * (1.0 + 1e-12);
  std::vector<int> label(pts.size(), 0);
  std::vector<double> owner_dist(pts.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> conflicted(pts.size(), false);
  int skipped = 0;

  for (const auto& edge : state.edges()) {
    std::vector<std::size_t> hood;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if ((pts[i].x - edge.location).norm() <= radius) hood.push_back(i);
    if (hood.size() < 2)
      throw EmptyNeighborhood("edge point has fewer than two evaluated points within delta");
    const auto top = *std::max_element(hood.begin(), hood.end(), [&](std::size_t a, std::size_t b) {
      return pts[a].value < pts[b].value;
    });
    const double jump = std::abs(edge.jump);
    // A neighbourhood entirely on one side carries no class information.
    const bool straddles = std::any_of(hood.begin(), hood.end(), [&](std::size_t i) {
      return pts[top].value - pts[i].value >= jump;
    });
    if (!straddles) {
      ++skipped;
      continue;
    }
    for (std::size_t i : hood) {
      const int l = (i == top || pts[top].value - pts[i].value < jump) ? 1 : -1;
      const double dist = (pts[i].x - edge.location).norm();
      if (label[i] != 0 && label[i] != l) conflicted[i] = true;
      if (label[i] == 0 || dist < owner_dist[i]) {
        label[i] = l;
        owner_dist[i] = dist;
      }
    }
  }

  std::vector<LabeledSample> out;
  LabelingStats local;
  local.one_sided = skipped;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (label[i] == 0) continue;
    out.push_back({pts[i].x, pts[i].value, label[i]});
    ++local.labeled;
    local.conflicts += conflicted[i];
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace disco
