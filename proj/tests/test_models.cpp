#include "disco/models.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace disco;
using disco::test::pt;
using std::numbers::pi;

TEST_CASE("analytic surfaces") {
  const auto s1 = surface_problem(1);
  CHECK(s1.truth(pt({0.0, 0.8})) == 1);
  CHECK(s1.model(pt({0.0, 0.8})) == 1.0);
  CHECK(s1.truth(pt({0.0, 0.3})) == -1);  // on the curve
  CHECK(surface_curve(3, 0.5) == doctest::Approx(0.8));
  CHECK(surface_problem(3).truth(pt({0.5, 0.9})) == 1);
  CHECK(surface_problem(2).truth(pt({0.5, 0.0})) == -1);

  const auto s4 = surface_problem(4);
  CHECK(s4.truth(pt({0.5, -0.5})) == 1);  // inside the rectangle, below the curve
  CHECK(s4.truth(pt({0.5, -0.9})) == -1);
  CHECK(s4.truth(pt({-0.5, 0.9})) == 1);
  CHECK_THROWS_AS(surface_problem(5), ConfigError);
}

TEST_CASE("model counts calls and reports bad output") {
  const Model m("bad", Box::cube(1, 0.0, 1.0), [](const Point& x) {
    if (x[0] > 0.5) throw std::runtime_error("diverged");
    return x[0] > 0.25 ? std::nan("") : 1.0;
  });
  CHECK(m(pt({0.1})) == 1.0);
  CHECK_THROWS_AS(m(pt({0.3})), ModelFailure);
  try {
    m(pt({0.75}));
  } catch (const ModelFailure& e) {
    CHECK(e.point[0] == 0.75);
  }
  CHECK(m.evaluations() == 3);
  m.reset_counter();
  CHECK(m.evaluations() == 0);
}

TEST_CASE("burgers shock and steady balance") {
  const BurgersSolver solver;
  const double dx = pi / solver.config().cells;
  for (double y : {0.2, 0.5, 0.8}) {
    CAPTURE(y);
    const auto u = solver.steady_state(y);
    const double xs = burgers_shock_location(y);
    for (int i = 0; i < u->size(); ++i) {
      const double x = (i + 0.5) * dx;
      if (std::abs(x - xs) < 3 * dx) continue;
      const double s = std::sin(x);
      CHECK(std::abs((*u)[i] * (*u)[i] - s * s) < 2 * dx);
      CHECK(((*u)[i] > 0) == (x < xs));
    }
  }
}

TEST_CASE("burgers values along the shock") {
  const auto problem = burgers_model();
  // jump ~0.5 close to the y = 1 end, ~1.4 about half a unit further along
  for (auto [half, tol] : {std::pair{0.25, 0.03}, std::pair{0.7, 0.03}}) {
    const double xs = pi - std::asin(half);
    const double y = -std::cos(xs);
    CHECK(std::abs(problem.model(pt({xs - 0.02, y})) - half) < tol);
    CHECK(std::abs(problem.model(pt({xs + 0.02, y})) + half) < tol);
    CHECK(problem.truth(pt({xs - 0.02, y})) == 1);
    CHECK(problem.truth(pt({xs + 0.02, y})) == -1);
  }
}

TEST_CASE("burgers grid convergence away from the shock") {
  const BurgersSolver fine(BurgersConfig{1024});
  double prev = 0.0;
  for (int cells : {64, 128}) {
    const BurgersSolver coarse(BurgersConfig{cells});
    double err = 0.0;
    for (double y : {0.3, 0.6}) {
      const double xs = burgers_shock_location(y);
      for (double x = 0.05; x < pi - 0.05; x += 0.01)
        if (std::abs(x - xs) > 0.2) err = std::max(err, std::abs(coarse.value(x, y) - fine.value(x, y)));
    }
    if (cells == 128) CHECK(prev / err >= 1.5);
    prev = err;
  }
}

TEST_CASE("burgers solves are memoised") {
  const BurgersSolver solver;
  CHECK(solver.steady_state(0.4) == solver.steady_state(0.4));
}

TEST_CASE("cubic surface function") {
  const auto c2 = cubic_model(2);
  CHECK(c2.model(pt({0.0, 0.5})) == doctest::Approx(10.25));
  for (int d : {2, 3, 5}) {
    const auto c = cubic_model(d);
    CHECK(c.model(Point::Zero(d)) == -10.0);
    Rng rng(static_cast<std::uint64_t>(d));
    for (int k = 0; k < 20; ++k) {
      Point x = c.model.domain().sample(rng);
      x[d - 1] = x.head(d - 1).array().cube().sum();
      Point up = x, down = x;
      up[d - 1] += 1e-9;
      down[d - 1] -= 1e-9;
      CHECK(c.model(up) - c.model(down) == doctest::Approx(20.0).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(cubic_model(1), ConfigError);
}

TEST_CASE("toggle parameter map") {
  const auto z = toggle_parameters(Point::Zero(4));
  CHECK(z.alpha1 == kToggleNominal.alpha1);
  CHECK(z.alpha2 == kToggleNominal.alpha2);
  CHECK(z.eta == kToggleNominal.eta);
  CHECK(z.K == kToggleNominal.K);
  const auto hi = toggle_parameters(Point::Ones(4));
  CHECK(hi.alpha1 == doctest::Approx(1.1 * kToggleNominal.alpha1));
}

TEST_CASE("toggle steady states match the reference integration") {
  // implicit integration at 1e-12 tolerances, Newton-polished
  CHECK(toggle_steady_state(toggle_parameters(Point::Zero(4)))[1] ==
        doctest::Approx(15.1201456587).epsilon(1e-6));
  CHECK(toggle_steady_state(toggle_parameters(Point::Constant(4, -1.0)))[1] ==
        doctest::Approx(0.691424535605).epsilon(1e-6));
  CHECK(toggle_steady_state(toggle_parameters(Point::Ones(4)))[1] ==
        doctest::Approx(16.7297538176).epsilon(1e-6));
}

TEST_CASE("toggle steady state does not depend on the step size") {
  ToggleConfig half;
  half.dt = 0.025;
  Rng rng(3);
  const Box box = Box::cube(4, -1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const auto p = toggle_parameters(box.sample(rng));
    CHECK(toggle_steady_state(p)[1] == doctest::Approx(toggle_steady_state(p, half)[1]).epsilon(1e-6));
  }
}

TEST_CASE("toggle regimes are well separated") {
  const auto problem = toggle_model();
  Rng rng(5);
  double lo_min = 1e9, lo_max = -1e9, hi_min = 1e9, hi_max = -1e9;
  for (int k = 0; k < 60; ++k) {
    const Point x = problem.model.domain().sample(rng);
    const double v = problem.model(x);
    if (problem.truth(x) > 0) {
      hi_min = std::min(hi_min, v);
      hi_max = std::max(hi_max, v);
    } else {
      lo_min = std::min(lo_min, v);
      lo_max = std::max(lo_max, v);
    }
  }
  REQUIRE(hi_max > hi_min);
  REQUIRE(lo_max > lo_min);
  const double gap = hi_min - lo_max;
  CHECK(gap > 2.0 * (hi_max - hi_min));
  CHECK(gap > 2.0 * (lo_max - lo_min));
}

TEST_CASE("extruded sphere") {
  const auto s = sphere20_model();
  Point x = Point::Zero(20);
  CHECK(s.truth(x) == 1);
  x[0] = 0.125;
  CHECK(s.truth(x) == -1);
  Rng rng(1);
  Point y = s.model.domain().sample(rng);
  y.head<3>().setConstant(0.05);
  CHECK(s.truth(y) == 1);
  CHECK(s.model(y) == 1.0);
}

TEST_CASE("model registry") {
  const auto models = list_models();
  CHECK(models.size() == 8);
  CHECK(make_problem("cubic:4").model.dim() == 4);
  CHECK(make_problem("toggle").model.dim() == 4);
  CHECK(make_problem("sphere20").model.dim() == 20);
  CHECK_THROWS_AS(make_problem("cubic:x"), ConfigError);
  CHECK_THROWS_AS(make_problem("nope"), ConfigError);
}
