#pragma once

// Benchmark models with ground-truth side oracles.

#include "disco/types.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace disco {

/// Counting wrapper around a deterministic black-box function on a box.
class Model {
 public:
  using Function = std::function<double(const Point&)>;

  Model(std::string name, Box domain, Function f);

  /// Evaluates the model once. Non-finite outputs and exceptions thrown by the
  /// function surface as ModelFailure carrying the offending point.
  double operator()(const Point& x) const;

  std::int64_t evaluations() const { return counter_->load(); }
  void reset_counter() const { counter_->store(0); }
  const Box& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Box domain_;
  Function f_;
  std::shared_ptr<std::atomic<std::int64_t>> counter_;
};

/// Side function: +1 for the locally larger-valued region, -1 otherwise.
using TruthOracle = std::function<int(const Point&)>;

struct TestProblem {
  Model model;
  TruthOracle truth;
};

// Analytic surfaces on [-1,1]^2; the value is +1 above the curve, -1 below.
double surface_curve(int which, double x1);
bool in_surface4_box(const Point& x);
TestProblem surface_problem(int which);
std::vector<TestProblem> surface_models();

struct BurgersConfig {
  int cells = 512;
  double cfl = 0.4;
  double steady_tol = 1e-8;
  long max_steps = 4'000'000;
};

/// Steady state of u_t + (u^2/2)_x = (sin^2 x / 2)_x on [0, pi] with
/// u(0) = u(pi) = 0 and u(x, 0) = y sin x, integrated with a conservative
/// Godunov scheme. Cell averages for each y are memoised.
class BurgersSolver {
 public:
  explicit BurgersSolver(BurgersConfig cfg = {});

  /// Cell-centred steady profile for parameter y.
  std::shared_ptr<const Eigen::VectorXd> steady_state(double y) const;
  /// Steady u at spatial coordinate x (linear interpolation of cell values).
  double value(double x, double y) const;
  const BurgersConfig& config() const { return cfg_; }

 private:
  BurgersConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const Eigen::VectorXd>> cache_;
};

/// Shock position of the steady Burgers profile: cos(x_s) = -y.
double burgers_shock_location(double y);
TestProblem burgers_model(BurgersConfig cfg = {});

/// f(x) = |x|^2 + 10 above the cubic surface x_d = sum_{i<d} x_i^3, |x|^2 - 10 below.
TestProblem cubic_model(int dim);

struct ToggleConfig {
  double dt = 0.05;
  double steady_tol = 1e-8;
  double max_time = 1e5;
  // Starts on the low-v branch so the bistable part of the box settles there.
  double u0 = 156.25;
  double v0 = 0.0;
};

/// Physical toggle-switch parameters (alpha1, alpha2, eta, K).
struct ToggleParameters {
  double alpha1, alpha2, eta, K;
};

inline constexpr double kToggleIptg = 4.0e-5;
inline constexpr double kToggleBeta = 2.5;
inline constexpr double kToggleGamma = 1.0;
inline const ToggleParameters kToggleNominal{156.25, 15.6, 2.0015, 2.9618e-5};

/// Maps a point of [-1,1]^4 onto the +-10% box around the nominal parameters.
ToggleParameters toggle_parameters(const Point& unit);
/// Steady state (u, v) reached from the configured initial state by RK4.
Eigen::Vector2d toggle_steady_state(const ToggleParameters& p, const ToggleConfig& cfg = {});
/// v-threshold separating the two steady regimes.
inline constexpr double kToggleRegimeSplit = 6.0;
TestProblem toggle_model(ToggleConfig cfg = {});

inline constexpr double kSphereRadius = 0.125;
TestProblem sphere20_model();

struct ModelInfo {
  std::string name;
  int dim;
  Box domain;
};

/// Resolves surf1|surf2|surf3|surf4|burgers|cubic:<d>|toggle|sphere20.
TestProblem make_problem(const std::string& name);
std::vector<ModelInfo> list_models();

}  // namespace disco
