#include "disco/refine.hpp"
#include "disco/detector.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace disco;
using disco::test::line_model;
using disco::test::pt;

namespace {

RefineConfig config(double delta, int budget = std::numeric_limits<int>::max()) {
  RefineConfig cfg;
  cfg.edge_tol = cfg.off_axis_tol = delta;
  cfg.max_edge_points = budget;
  return cfg;
}

double step(double x, double at) { return x > at ? 1.0 : 0.0; }

// Model whose values are looked up by first coordinate.
Model table_model(std::map<double, double> values) {
  return Model("table", Box::cube(2, -1.0, 1.0), [values](const Point& x) { return values.at(x[0]); });
}

}  // namespace

TEST_CASE("boundary parents project onto the faces") {
  const auto model = surface_problem(1).model;
  RefineState state(model.domain());
  ensure_boundary_parents(state, model, pt({0.2, 0.3}), 0);
  REQUIRE(state.evaluated().size() == 2);
  CHECK(state.evaluated()[0].x == pt({-1.0, 0.3}));
  CHECK(state.evaluated()[1].x == pt({1.0, 0.3}));

  ensure_boundary_parents(state, model, pt({0.2, 0.3}), 0);
  CHECK(state.eval_count() == 2);

  state.evaluate(model, pt({1.0, -0.4}));
  ensure_boundary_parents(state, model, pt({1.0, -0.4}), 0);
  CHECK(state.eval_count() == 4);  // the +face parent is the point itself
}

TEST_CASE("smooth model yields no edge points") {
  const Model model("flat", Box::cube(2, -1.0, 1.0), [](const Point&) { return 3.0; });
  Rng rng(1);
  const std::vector<Point> m0{pt({0.0, 0.0})};
  const auto state = refinement_initialization(model, m0, config(0.125), rng);
  CHECK(state.edges().empty());
  CHECK(state.eval_count() == 5);  // origin and four boundary parents
}

TEST_CASE("edge budget of one stops at the first edge") {
  const auto model = surface_problem(1).model;
  Rng rng(1);
  const std::vector<Point> m0{pt({0.0, 0.0})};
  const auto state = refinement_initialization(model, m0, config(0.125, 1), rng);
  CHECK(state.edges().size() == 1);
}

TEST_CASE("midpoint within delta becomes an edge without evaluation") {
  const auto model = line_model([](double x) { return step(x, 0.1); });
  RefineState state(model.domain());
  for (double x : {-1.0, 0.0, 0.2, 1.0}) state.evaluate(model, pt({x}));
  Rng rng(1);
  refine_1d(state, model, pt({0.0}), 0, config(0.125), rng);
  CHECK(state.eval_count() == 4);
  REQUIRE(state.edges().size() == 1);
  CHECK(state.edges()[0].location[0] == doctest::Approx(0.1));
  CHECK(state.edges()[0].jump == doctest::Approx(1.0));
}

TEST_CASE("no jump at either midpoint leaves the state alone") {
  const auto model = line_model([](double x) { return 2.0 * x; });
  RefineState state(model.domain());
  for (double x : {-1.0, 0.0, 1.0}) state.evaluate(model, pt({x}));
  Rng rng(1);
  refine_1d(state, model, pt({0.0}), 0, config(0.125), rng);
  CHECK(state.eval_count() == 3);
  CHECK(state.edges().empty());
}

TEST_CASE("distant midpoint with a jump is evaluated and refined") {
  const auto model = line_model([](double x) { return step(x, 0.3); });
  RefineState state(model.domain());
  for (double x : {-1.0, 0.0, 1.0}) state.evaluate(model, pt({x}));
  Rng rng(1);
  refine_1d(state, model, pt({0.0}), 0, config(0.125), rng);
  CHECK(state.find(pt({0.5})).has_value());
  REQUIRE_FALSE(state.edges().empty());
  for (const auto& e : state.edges()) CHECK(std::abs(e.location[0] - 0.3) <= 0.125);
}

TEST_CASE("labeling by value relative to the neighbourhood maximum") {
  const auto model = table_model({{0.0, 10.1}, {0.1, 9.9}, {0.2, -10.0}});
  RefineState state(model.domain());
  for (double x : {0.0, 0.1, 0.2}) state.evaluate(model, pt({x, 0.0}));
  state.add_edge({pt({0.1, 0.0}), 20.0, 0});
  LabelingStats stats;
  const auto labels = label_initial(state, 0.125, &stats);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0].label == 1);
  CHECK(labels[1].label == 1);
  CHECK(labels[2].label == -1);
  CHECK(stats.labeled == 3);
  CHECK(stats.one_sided == 0);
}

TEST_CASE("two points across a unit jump") {
  const auto model = table_model({{0.0, 1.0}, {0.2, 0.0}});
  RefineState state(model.domain());
  state.evaluate(model, pt({0.0, 0.0}));
  state.evaluate(model, pt({0.2, 0.0}));
  state.add_edge({pt({0.1, 0.0}), -1.0, 0});
  const auto labels = label_initial(state, 0.125);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].label == 1);
  CHECK(labels[1].label == -1);
}

TEST_CASE("one-sided neighbourhood labels nothing") {
  const auto model = table_model({{0.0, 1.0}, {0.1, 0.95}, {0.2, 0.9}});
  RefineState state(model.domain());
  for (double x : {0.0, 0.1, 0.2}) state.evaluate(model, pt({x, 0.0}));
  state.add_edge({pt({0.1, 0.0}), 1.0, 0});
  LabelingStats stats;
  const auto labels = label_initial(state, 0.125, &stats);
  CHECK(labels.empty());
  CHECK(stats.one_sided == 1);
}

TEST_CASE("edge with fewer than two neighbours is an error") {
  const auto model = table_model({{0.0, 1.0}});
  RefineState state(model.domain());
  state.evaluate(model, pt({0.0, 0.0}));
  state.add_edge({pt({0.1, 0.0}), 1.0, 0});
  CHECK_THROWS_AS(label_initial(state, 0.125), EmptyNeighborhood);
}

TEST_CASE("nearest edge point wins a labeling conflict") {
  // The shared point 0.3 is -1 seen from the left edge and +1 from the right.
  const auto model = table_model({{0.0, 5.0}, {0.3, 0.0}, {0.55, -5.0}});
  RefineState state(model.domain());
  for (double x : {0.0, 0.3, 0.55}) state.evaluate(model, pt({x, 0.0}));
  state.add_edge({pt({0.15, 0.0}), 5.0, 0});
  state.add_edge({pt({0.4, 0.0}), 5.0, 0});
  LabelingStats stats;
  const auto labels = label_initial(state, 0.3, &stats);
  REQUIRE(labels.size() == 3);
  CHECK(labels[1].label == 1);  // 0.1 from the right edge, 0.15 from the left
  CHECK(stats.conflicts == 1);
}

TEST_CASE("initialisation from the origin puts edge points on the curve") {
  // From the origin alone, surface 1 is crossed twice between evaluated points
  // on every horizontal line, so only the vertical pass finds it.
  for (auto [which, min_edges] : {std::pair{1, 1}, std::pair{2, 5}, std::pair{3, 5}}) {
    CAPTURE(which);
    const auto problem = surface_problem(which);
    Rng rng(1);
    const std::vector<Point> m0{pt({0.0, 0.0})};
    const auto state = refinement_initialization(problem.model, m0, config(0.125), rng);
    CHECK(static_cast<int>(state.edges().size()) >= min_edges);
    for (const auto& e : state.edges()) {
      Point lo = e.location, hi = e.location;
      lo[e.direction] -= 0.125;
      hi[e.direction] += 0.125;
      CHECK(problem.truth(lo) != problem.truth(hi));
    }
  }
}

TEST_CASE("initialisation invariants on the analytic surfaces") {
  for (int which = 1; which <= 4; ++which) {
    const auto problem = surface_problem(which);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      for (int m0_size : {0, 20}) {
        for (int budget : {5, std::numeric_limits<int>::max()}) {
          CAPTURE(which);
          CAPTURE(seed);
          CAPTURE(m0_size);
          Rng rng(seed);
          const auto m0 = initial_point_set(problem.model.domain(), m0_size, rng);
          problem.model.reset_counter();
          const auto cfg = config(0.5, budget);
          const auto state = refinement_initialization(problem.model, m0, cfg, rng);

          CHECK(static_cast<int>(state.edges().size()) <= budget);
          CHECK(state.eval_count() == problem.model.evaluations());
          std::set<std::pair<double, double>> seen;
          for (const auto& s : state.evaluated()) seen.insert({s.x[0], s.x[1]});
          CHECK(seen.size() == state.evaluated().size());

          for (const auto& e : state.edges()) {
            int close = 0;
            for (const auto& s : state.evaluated()) close += (s.x - e.location).norm() <= 0.5 + 1e-12;
            CHECK(close >= 2);
          }
          for (const auto& l : label_initial(state, cfg.edge_tol))
            CHECK(l.label == problem.truth(l.x));
        }
      }
    }
  }
}
