#include "doctest.h"

#include <cmath>
#include <random>

#include "fliess/error.hpp"
#include "fliess/io.hpp"
#include "fliess/planner.hpp"

using namespace fliess;

namespace {

ObstacleMap bundled_map() { return io::map_from_json(io::read_json(FLIESS_DATA_DIR "/bundled_map.json")); }

ObstacleMap empty_map(Point start, Point goal) {
  ObstacleMap m;
  m.xmin = -2;
  m.ymin = -2;
  m.xmax = 2;
  m.ymax = 2;
  m.start = start;
  m.goal = goal;
  return m;
}

// Independent obstacle test: ray casting for polygons, distance to edges for
// the margin band.
bool blocked(const ObstacleMap& m, const Point& p, double margin) {
  if (p.x() < m.xmin || p.x() > m.xmax || p.y() < m.ymin || p.y() > m.ymax) return true;
  for (const Obstacle& o : m.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      if ((p - c->center).norm() < c->radius + margin) return true;
      continue;
    }
    const auto& v = std::get<Polygon>(o).vertices;
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if ((v[i].y() > p.y()) != (v[j].y() > p.y()) &&
          p.x() < (v[j].x() - v[i].x()) * (p.y() - v[i].y()) / (v[j].y() - v[i].y()) + v[i].x())
        in = !in;
      const Point e = v[i] - v[j];
      const double t = std::clamp((p - v[j]).dot(e) / e.squaredNorm(), 0.0, 1.0);
      if ((p - (v[j] + t * e)).norm() < margin) return true;
    }
    if (in) return true;
  }
  return false;
}

bool sampled_free(const ObstacleMap& m, const Point& a, const Point& b, double margin) {
  for (int i = 0; i <= 400; ++i) {
    if (blocked(m, a + (b - a) * (i / 400.0), margin)) return false;
  }
  return true;
}

double length(const std::vector<Point>& path) {
  double l = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) l += (path[i] - path[i - 1]).norm();
  return l;
}

}  // namespace

TEST_CASE("segment checks agree with the sampling oracle") {
  const ObstacleMap m = bundled_map();
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> x(-5.5, 5.5), y(-3.5, 12.5);
  int free_count = 0;
  for (int i = 0; i < 2000; ++i) {
    const Point a(x(rng), y(rng));
    const Point b = a + Point(x(rng), y(rng)) * 0.3;
    for (double margin : {0.0, 0.3}) {
      const bool fast = m.segment_free(a, b, margin);
      if (fast) {
        ++free_count;
        CHECK(sampled_free(m, a, b, margin));
      }
      CHECK(m.point_free(a, margin) == !blocked(m, a, margin));
    }
  }
  CHECK(free_count > 200);
}

TEST_CASE("map validation") {
  ObstacleMap m = bundled_map();
  CHECK_NOTHROW(m.validate());
  m.goal = Point(2.5, 3.0);
  CHECK_THROWS_AS(m.validate(), PlanningError);
  ObstacleMap e = empty_map(Point(0, 0), Point(0, 1));
  e.xmax = e.xmin;
  CHECK_THROWS_AS(e.validate(), PlanningError);
  ObstacleMap out = empty_map(Point(0, 0), Point(5, 0));
  CHECK_THROWS_AS(out.validate(), PlanningError);
}

TEST_CASE("rrt on an empty map") {
  const ObstacleMap m = empty_map(Point(0, 0), Point(0, 1));
  const RrtTree tree = rrt_plan(m, RrtParams{}, 1);
  REQUIRE(tree.goal_node >= 0);
  CHECK(tree.nodes.size() < 50);
  const auto path = extract_path(tree);
  CHECK(path.front() == m.start);
  CHECK(path.back() == m.goal);
}

TEST_CASE("rrt rejects blocked goals and gives up after max_iters") {
  ObstacleMap m = bundled_map();
  m.goal = Point(2.5, 3.0);
  CHECK_THROWS_AS(rrt_plan(m, RrtParams{}, 1), PlanningError);
  RrtParams few;
  few.max_iters = 3;
  CHECK_THROWS_AS(rrt_plan(bundled_map(), few, 1), PlanningError);
  RrtParams bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(rrt_plan(bundled_map(), bad, 1), std::invalid_argument);
}

TEST_CASE("rrt is deterministic per seed and collision-free") {
  const ObstacleMap m = bundled_map();
  const RrtTree a = rrt_plan(m, RrtParams{}, 42);
  const RrtTree b = rrt_plan(m, RrtParams{}, 42);
  const RrtTree c = rrt_plan(m, RrtParams{}, 43);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i] == b.nodes[i]);
  CHECK(a.parent == b.parent);
  CHECK(a.nodes.size() != c.nodes.size());
  for (std::size_t i = 1; i < a.nodes.size(); ++i) {
    const Point& p = a.nodes[static_cast<std::size_t>(a.parent[i])];
    CHECK(sampled_free(m, p, a.nodes[i], 0.0));
  }
  const auto path = extract_path(a);
  CHECK(path.front() == m.start);
  CHECK(path.back() == m.goal);
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(sampled_free(m, path[i - 1], path[i], 0.0));
}

TEST_CASE("extract path") {
  RrtTree two;
  two.nodes = {Point(0, 0), Point(1, 1)};
  two.parent = {-1, 0};
  two.goal_node = 1;
  CHECK(extract_path(two) == two.nodes);

  RrtTree chain;
  for (int i = 0; i < 5; ++i) chain.nodes.emplace_back(i, 0);
  chain.nodes.emplace_back(9, 9);
  chain.parent = {-1, 0, 1, 2, 3, 0};
  chain.goal_node = 4;
  const auto p = extract_path(chain);
  REQUIRE(p.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(p[static_cast<std::size_t>(i)] == Point(i, 0));

  RrtTree none = two;
  none.goal_node = -1;
  CHECK_THROWS_AS(extract_path(none), PlanningError);
}

TEST_CASE("shortcut smoothing keeps endpoints and clearance and never lengthens") {
  const ObstacleMap m = bundled_map();
  for (std::uint64_t seed : {1u, 42u, 7u}) {
    const auto raw = extract_path(rrt_plan(m, RrtParams{}, seed));
    for (double margin : {0.0, 0.2}) {
      SmoothParams sp;
      sp.seed = seed;
      sp.margin = margin;
      const auto s = shortcut_smooth(raw, m, sp);
      CHECK(s.front() == raw.front());
      CHECK(s.back() == raw.back());
      CHECK(length(s) <= length(raw) + 1e-12);
      CHECK(s.size() <= raw.size());
      for (std::size_t i = 1; i < s.size(); ++i) CHECK(sampled_free(m, s[i - 1], s[i], 0.0));
    }
  }
}

TEST_CASE("corner rounding") {
  const std::vector<Point> l{Point(0, 0), Point(4, 0), Point(4, 4)};
  const auto r = round_corners(l, nullptr, 1.0, 0.0);
  CHECK(r.front() == l.front());
  CHECK(r.back() == l.back());
  CHECK(r.size() > 4);
  // Arc points lie on the fillet circle centred at (3, 1).
  for (std::size_t i = 1; i + 1 < r.size(); ++i) CHECK((r[i] - Point(3, 1)).norm() == doctest::Approx(1.0));
  CHECK(round_corners(l, nullptr, 0.0, 0.0) == l);

  const ObstacleMap m = bundled_map();
  SmoothParams sp;
  sp.seed = 42;
  const auto s = shortcut_smooth(extract_path(rrt_plan(m, RrtParams{}, 42)), m, sp);
  const auto rs = round_corners(s, &m, 1.5, 0.1);
  CHECK(m.path_free(rs, 0.0));
  CHECK(rs.front() == s.front());
  CHECK(rs.back() == s.back());
  CHECK(length(rs) <= length(s) + 1e-9);
}

TEST_CASE("section convention") {
  SplineSection s;
  s.duration = 0.02;
  s.outputs = {{{-1.5, 10.75, -28.15, 185.15}, {9.5, 14.40, 13.07, -24.89}}};
  const double t = 0.02;
  CHECK(s.position(t).x() == doctest::Approx(-1.5 + 10.75 * t - 28.15 * t * t / 2 + 185.15 * t * t * t / 6));
  CHECK(s.velocity(0).y() == doctest::Approx(14.40));
}

TEST_CASE("straight path gives a linear spline") {
  const std::vector<Point> path{Point(0, 0), Point(3, 4)};
  SplineParams sp;
  sp.section_duration = 1.0;
  const PathSpline one = fit_spline(path, sp, CarParams{});
  REQUIRE(one.sections.size() == 1);
  for (const auto& o : one.sections[0].outputs) {
    CHECK(std::abs(o[2]) < 1e-9);
    CHECK(std::abs(o[3]) < 1e-9);
  }
  CHECK(one.sections[0].outputs[0][1] == doctest::Approx(3.0));
  CHECK(one.sections[0].init.z3 == doctest::Approx(std::atan2(4.0, 3.0)));
  CHECK(std::abs(one.sections[0].init.z4) < 1e-12);
  CHECK(one.sections[0].init.z5 == doctest::Approx(5.0));
}

TEST_CASE("spline continuity and end points") {
  const ObstacleMap m = bundled_map();
  const auto raw = extract_path(rrt_plan(m, RrtParams{}, 42));
  for (bool c2 : {false, true}) {
    SplineParams sp;
    sp.c2 = c2;
    const PathSpline s = fit_spline(round_corners(raw, nullptr, 1.0, 0.0), sp, CarParams{});
    REQUIRE(s.sections.size() == 50);
    CHECK(s.total_time() == doctest::Approx(1.0));
    CHECK(s.sections.front().position(0).isApprox(m.start));
    CHECK((s.sections.back().position(s.sections.back().duration) - m.goal).norm() < 1e-9);
    for (std::size_t j = 0; j + 1 < s.sections.size(); ++j) {
      const SplineSection& a = s.sections[j];
      const SplineSection& b = s.sections[j + 1];
      CHECK(a.position(a.duration) == b.position(0));
      CHECK((a.velocity(a.duration) - b.velocity(0)).norm() < 1e-6 * std::max(1.0, b.velocity(0).norm()));
      CHECK(b.start_time == doctest::Approx(a.start_time + a.duration));
    }
    for (const SplineSection& sec : s.sections) {
      CHECK(sec.init.z5 * std::cos(sec.init.z3 + sec.init.z4) == doctest::Approx(sec.outputs[0][1]));
      CHECK(sec.init.z5 * std::sin(sec.init.z3 + sec.init.z4) == doctest::Approx(sec.outputs[1][1]));
      CHECK(sec.init.z1 == sec.outputs[0][0]);
    }
  }
}

TEST_CASE("smoothed spline avoids obstacles") {
  const ObstacleMap m = bundled_map();
  const auto raw = extract_path(rrt_plan(m, RrtParams{}, 42));
  SmoothParams smooth;
  smooth.seed = 42;
  smooth.margin = 0.2;
  const PathSpline s = smooth_and_spline(raw, &m, smooth, SplineParams{}, CarParams{});
  const auto pts = s.sample(8);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(sampled_free(m, pts[i - 1], pts[i], 0.0));
}

TEST_CASE("section count and argument checks") {
  SplineParams sp;
  CHECK(section_count(sp) == 50);
  sp.section_duration = 0.25;
  CHECK(section_count(sp) == 4);
  sp.section_duration = -1.0;
  CHECK_THROWS_AS(section_count(sp), std::invalid_argument);
  CHECK_THROWS_AS(fit_spline({Point(0, 0)}, SplineParams{}, CarParams{}), PlanningError);
  CHECK_THROWS_AS(fit_spline({Point(0, 0), Point(0, 0)}, SplineParams{}, CarParams{}), PlanningError);
}
