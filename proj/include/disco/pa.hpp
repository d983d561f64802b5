#pragma once

// One-dimensional polynomial annihilation along a coordinate direction of a
// scattered point set.

#include "disco/types.hpp"

#include <cmath>
#include <map>
#include <span>
#include <vector>

namespace disco {

/// Ordered set of semi-axial neighbours used for one annihilation of order m.
/// Members are sorted by their coordinate along `direction`.
struct Stencil {
  Point poi;
  int direction = 0;
  int order = 1;
  std::vector<Sample> members;

  Eigen::VectorXd nodes() const;
  Eigen::VectorXd values() const;
};

struct JumpEstimate {
  Point location;
  int direction = 0;
  double magnitude = 0.0;
  std::map<int, double> per_order;
  double h = 0.0;
};

template <typename Scalar>
struct PaCoefficients {
  PointT<Scalar> c;
  Scalar q;
};

/// Annihilation coefficients c_l = m! / prod_{i != l}(x_l - x_i) and the
/// normalisation q_m = sum of c_l over nodes strictly right of `poi`.
template <typename Derived>
PaCoefficients<typename Derived::Scalar> pa_coefficients(const Eigen::MatrixBase<Derived>& nodes,
                                                         typename Derived::Scalar poi, int order) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = nodes.size();
  if (order < 1 || n != order + 1) throw DegenerateStencil("stencil size must equal order + 1");
  if (!(nodes.minCoeff() < poi && poi < nodes.maxCoeff()))
    throw DegenerateStencil("point of interest outside the stencil hull");

  Scalar factorial(1);
  for (int k = 2; k <= order; ++k) factorial *= Scalar(k);

  PaCoefficients<Scalar> out{PointT<Scalar>(n), Scalar(0)};
  for (Eigen::Index l = 0; l < n; ++l) {
    Scalar denom(1);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == l) continue;
      const Scalar gap = nodes[l] - nodes[i];
      if (gap == Scalar(0)) throw DegenerateStencil("repeated stencil node");
      denom *= gap;
    }
    out.c[l] = factorial / denom;
    if (nodes[l] > poi) out.q += out.c[l];
  }
  if (out.q == Scalar(0)) throw DegenerateStencil("zero normalisation");
  return out;
}

/// Raw annihilation value (1/q_m) sum c_l f(x_l) for one stencil.
double annihilate(const Stencil& stencil);

/// Zero when the inputs disagree in sign, otherwise the smallest magnitude
/// carrying the common sign.
double minmod(std::span<const double> values);

/// Largest gap between neighbouring sorted nodes.
double stencil_spacing(const Eigen::VectorXd& sorted_nodes);

/// Picks the order+1 semi-axial points nearest to `poi` along `direction`,
/// at least one strictly on each side. Points sharing a coordinate along
/// `direction` compete for one slot; the one closer to `poi` wins and exact
/// ties are broken with `rng`.
Stencil select_stencil(std::span<const Sample> evaluated, const Point& poi, int direction,
                       double tol, int order, Rng& rng);

/// Minmod combination of the per-order annihilations of a stencil family.
JumpEstimate jump_estimate(std::span<const Stencil> family);

/// Builds the stencil family for every order in `orders` that admits a valid
/// stencil and combines them. Orders without enough points are dropped;
/// throws InsufficientStencil when no order is usable.
JumpEstimate estimate_jump(std::span<const Sample> evaluated, const Point& poi, int direction,
                           double tol, std::span<const int> orders, Rng& rng);

inline bool jump_exists(const JumpEstimate& estimate, double threshold) {
  return std::abs(estimate.magnitude) > threshold;
}

}  // namespace disco
