#include "disco/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace disco {

using std::numbers::pi;

Model::Model(std::string name, Box domain, Function f)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      f_(std::move(f)),
      counter_(std::make_shared<std::atomic<std::int64_t>>(0)) {}

double Model::operator()(const Point& x) const {
  counter_->fetch_add(1);
  double value = 0.0;
  try {
    value = f_(x);
  } catch (const std::exception& e) {
    throw ModelFailure(name_ + ": " + e.what(), x);
  }
  if (!std::isfinite(value)) throw ModelFailure(name_ + ": non-finite model output", x);
  return value;
}

// ---------------------------------------------------------------------------
// Analytic surfaces

double surface_curve(int which, double x1) {
  switch (which) {
    case 1:
      return 0.3 + 0.4 * std::sin(pi * x1);
    case 2:
    case 4:
      return 0.3 + 0.4 * std::sin(pi * x1) + x1;
    case 3:
      return 0.3 + 0.4 * std::sin(2.0 * pi * x1) + x1;
    default:
      throw ConfigError("unknown surface " + std::to_string(which));
  }
}

bool in_surface4_box(const Point& x) {
  return x[0] > 0.25 && x[0] < 0.75 && x[1] > -0.75 && x[1] < -0.25;
}

TestProblem surface_problem(int which) {
  surface_curve(which, 0.0);
  auto side = [which](const Point& x) {
    int s = x[1] > surface_curve(which, x[0]) ? 1 : -1;
    if (which == 4 && in_surface4_box(x)) s = -s;
    return s;
  };
  Model model("surf" + std::to_string(which), Box::cube(2, -1.0, 1.0),
              [side](const Point& x) { return static_cast<double>(side(x)); });
  return {std::move(model), side};
}

std::vector<TestProblem> surface_models() {
  std::vector<TestProblem> out;
  for (int k = 1; k <= 4; ++k) out.push_back(surface_problem(k));
  return out;
}

// ---------------------------------------------------------------------------
// Burgers

namespace {

// Godunov flux for the convex flux u^2/2.
inline double godunov(double ul, double ur) {
  const double a = std::max(ul, 0.0);
  const double b = std::min(ur, 0.0);
  return 0.5 * std::max(a * a, b * b);
}

}  // namespace

BurgersSolver::BurgersSolver(BurgersConfig cfg) : cfg_(cfg) {
  if (cfg_.cells < 2 || cfg_.cfl <= 0.0 || cfg_.cfl > 0.5)
    throw ConfigError("burgers: need cells >= 2 and 0 < cfl <= 0.5");
}

std::shared_ptr<const Eigen::VectorXd> BurgersSolver::steady_state(double y) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second;
  }
  const int n = cfg_.cells;
  const double dx = pi / n;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = y * std::sin((i + 0.5) * dx);
  // The source is folded into the flux: (u^2/2 - sin^2 x / 2)_x = 0.
  Eigen::VectorXd source_flux(n + 1);
  for (int k = 0; k <= n; ++k) source_flux[k] = 0.5 * std::pow(std::sin(k * dx), 2);
  Eigen::VectorXd flux(n + 1);

  long step = 0;
  for (;; ++step) {
    if (step >= cfg_.max_steps) {
      std::ostringstream msg;
      msg << "burgers: no steady state within " << cfg_.max_steps << " steps (y=" << y << ")";
      throw NonSteady(msg.str());
    }
    for (int k = 0; k <= n; ++k) {
      const double ul = k == 0 ? 0.0 : u[k - 1];
      const double ur = k == n ? 0.0 : u[k];
      flux[k] = godunov(ul, ur) - source_flux[k];
    }
    double rate = 0.0;
    for (int i = 0; i < n; ++i) rate = std::max(rate, std::abs(flux[i + 1] - flux[i]));
    rate /= dx;
    if (rate < cfg_.steady_tol) break;
    const double speed = std::max(u.cwiseAbs().maxCoeff(), 1e-3);
    const double dt = cfg_.cfl * dx / speed;
    for (int i = 0; i < n; ++i) u[i] -= dt / dx * (flux[i + 1] - flux[i]);
  }

  auto result = std::make_shared<const Eigen::VectorXd>(std::move(u));
  std::lock_guard lock(mutex_);
  return cache_.emplace(y, std::move(result)).first->second;
}

double BurgersSolver::value(double x, double y) const {
  const auto profile = steady_state(y);
  const int n = cfg_.cells;
  const double dx = pi / n;
  // Boundary values pin the ends of the interpolant.
  const double s = x / dx - 0.5;
  if (s <= 0.0) {
    const double w = std::clamp(x / (0.5 * dx), 0.0, 1.0);
    return w * (*profile)[0];
  }
  if (s >= n - 1) {
    const double w = std::clamp((pi - x) / (0.5 * dx), 0.0, 1.0);
    return w * (*profile)[n - 1];
  }
  const int i = static_cast<int>(std::floor(s));
  const double t = s - i;
  return (1.0 - t) * (*profile)[i] + t * (*profile)[i + 1];
}

double burgers_shock_location(double y) { return std::acos(-std::clamp(y, -1.0, 1.0)); }

TestProblem burgers_model(BurgersConfig cfg) {
  if (cfg.cells < 256) throw ConfigError("burgers: grid needs at least 256 cells");
  auto solver = std::make_shared<BurgersSolver>(cfg);
  Box domain{Point(Eigen::Vector2d(0.0, 0.0)), Point(Eigen::Vector2d(pi, 1.0))};
  Model model("burgers", domain, [solver](const Point& p) { return solver->value(p[0], p[1]); });
  TruthOracle truth = [](const Point& p) { return p[0] < burgers_shock_location(p[1]) ? 1 : -1; };
  return {std::move(model), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Cubic surface

TestProblem cubic_model(int dim) {
  if (dim < 2) throw ConfigError("cubic: dimension must be at least 2");
  auto side = [dim](const Point& x) {
    const double s = x.head(dim - 1).array().cube().sum();
    return x[dim - 1] > s ? 1 : -1;
  };
  Model model("cubic:" + std::to_string(dim), Box::cube(dim, -1.0, 1.0),
              [side](const Point& x) { return x.squaredNorm() + 10.0 * side(x); });
  return {std::move(model), side};
}

// ---------------------------------------------------------------------------
// Genetic toggle switch

ToggleParameters toggle_parameters(const Point& unit) {
  auto scale = [&](int i, double nominal) { return nominal * (1.0 + 0.1 * unit[i]); };
  return {scale(0, kToggleNominal.alpha1), scale(1, kToggleNominal.alpha2),
          scale(2, kToggleNominal.eta), scale(3, kToggleNominal.K)};
}

Eigen::Vector2d toggle_steady_state(const ToggleParameters& p, const ToggleConfig& cfg) {
  const double repression = std::pow(1.0 + kToggleIptg / p.K, p.eta);
  auto rhs = [&](const Eigen::Vector2d& s) {
    const double w = s[0] / repression;
    return Eigen::Vector2d(p.alpha1 / (1.0 + std::pow(s[1], kToggleBeta)) - s[0],
                           p.alpha2 / (1.0 + std::pow(w, kToggleGamma)) - s[1]);
  };
  Eigen::Vector2d s(cfg.u0, cfg.v0);
  const double h = cfg.dt;
  for (double t = 0.0; t < cfg.max_time; t += h) {
    const Eigen::Vector2d k1 = rhs(s);
    if (k1.lpNorm<Eigen::Infinity>() < cfg.steady_tol) return s;
    const Eigen::Vector2d k2 = rhs(s + 0.5 * h * k1);
    const Eigen::Vector2d k3 = rhs(s + 0.5 * h * k2);
    const Eigen::Vector2d k4 = rhs(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  throw NonSteady("toggle: no steady state within the time budget");
}

TestProblem toggle_model(ToggleConfig cfg) {
  Model model("toggle", Box::cube(4, -1.0, 1.0), [cfg](const Point& x) {
    return toggle_steady_state(toggle_parameters(x), cfg)[1];
  });
  TruthOracle truth = [cfg](const Point& x) {
    return toggle_steady_state(toggle_parameters(x), cfg)[1] > kToggleRegimeSplit ? 1 : -1;
  };
  return {std::move(model), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Extruded sphere

TestProblem sphere20_model() {
  auto side = [](const Point& x) {
    return x.head<3>().squaredNorm() < kSphereRadius * kSphereRadius ? 1 : -1;
  };
  Model model("sphere20", Box::cube(20, -1.0, 1.0),
              [side](const Point& x) { return static_cast<double>(side(x)); });
  return {std::move(model), side};
}

// ---------------------------------------------------------------------------

TestProblem make_problem(const std::string& name) {
  if (name.size() == 5 && name.starts_with("surf") && name[4] >= '1' && name[4] <= '4')
    return surface_problem(name[4] - '0');
  if (name == "burgers") return burgers_model();
  if (name == "toggle") return toggle_model();
  if (name == "sphere20") return sphere20_model();
  if (name.starts_with("cubic:")) {
    const std::string arg = name.substr(6);
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) throw ConfigError("bad cubic dimension in '" + name + "'");
    return cubic_model(d);
  }
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<ModelInfo> list_models() {
  std::vector<ModelInfo> out;
  for (const char* name : {"surf1", "surf2", "surf3", "surf4", "burgers", "toggle", "sphere20"}) {
    if (std::string(name) == "burgers") {
      out.push_back({name, 2, Box{Point(Eigen::Vector2d(0.0, 0.0)), Point(Eigen::Vector2d(pi, 1.0))}});
      continue;
    }
    auto p = make_problem(name);
    out.push_back({p.model.name(), p.model.dim(), p.model.domain()});
  }
  out.insert(out.begin() + 5, ModelInfo{"cubic:<d>", -1, Box::cube(2, -1.0, 1.0)});
  return out;
}

}  // namespace disco
