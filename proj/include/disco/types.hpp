#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace disco {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A location in parameter space.
using Point = PointT<double>;

/// Run-wide random generator. Every stochastic step draws from one of these
/// so that a fixed seed reproduces a run exactly.
using Rng = std::mt19937_64;

/// Derive an independent generator seed from a base seed and a stream index
/// (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Axis-aligned box. All domains handled here are finite.
struct Box {
  Point lower;
  Point upper;

  static Box cube(int dim, double lo, double hi) {
    return {Point::Constant(dim, lo), Point::Constant(dim, hi)};
  }

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Point& x, double slack = 1e-12) const {
    return ((x - lower).array() >= -slack).all() &&
           ((upper - x).array() >= -slack).all();
  }
  Point project(const Point& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  Point center() const { return 0.5 * (lower + upper); }
  double diameter() const { return (upper - lower).norm(); }
  Point sample(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point x(dim());
    for (int i = 0; i < dim(); ++i) x[i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
    return x;
  }
};

/// An evaluated model location.
struct Sample {
  Point x;
  double value = 0.0;
};

/// An evaluated location with a class label (+1 or -1).
struct LabeledSample {
  Point x;
  double value = 0.0;
  int label = 0;
};

// Error types. Each names the contract that was violated.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientStencil : Error {
  using Error::Error;
};
struct DegenerateStencil : Error {
  using Error::Error;
};
struct EmptyNeighborhood : Error {
  using Error::Error;
};
struct SingleClass : Error {
  using Error::Error;
};
struct InvalidTrainingSet : Error {
  using Error::Error;
};
struct MissingNeighbor : Error {
  using Error::Error;
};
struct NonSteady : Error {
  using Error::Error;
};
struct InitFailure : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

struct ModelFailure : Error {
  ModelFailure(const std::string& what, Point where)
      : Error(what), point(std::move(where)) {}
  Point point;
};

}  // namespace disco
