#include "fliess/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fliess/error.hpp"

namespace fliess {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on = [](const Point& p, const Point& q, const Point& r, double o) {
    return o == 0.0 && std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  return on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4);
}

double segment_distance(const Point& a, const Point& b, const Point& c, const Point& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool inside(const Polygon& poly, const Point& p) {
  bool in = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

bool segment_hits(const Obstacle& obs, const Point& a, const Point& b, double margin) {
  if (const auto* c = std::get_if<Circle>(&obs)) {
    return point_segment_distance(c->center, a, b) <= c->radius + margin;
  }
  const Polygon& poly = std::get<Polygon>(obs);
  if (inside(poly, a) || inside(poly, b)) return true;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (segment_distance(a, b, v[j], v[i]) <= margin) return true;
  }
  return false;
}

std::string fmt(const Point& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
}

}  // namespace

bool ObstacleMap::in_bounds(const Point& p) const {
  return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
}

bool ObstacleMap::point_free(const Point& p, double margin) const { return segment_free(p, p, margin); }

bool ObstacleMap::segment_free(const Point& a, const Point& b, double margin) const {
  if (!in_bounds(a) || !in_bounds(b)) return false;
  return std::none_of(obstacles.begin(), obstacles.end(),
                      [&](const Obstacle& o) { return segment_hits(o, a, b, margin); });
}

bool ObstacleMap::path_free(const std::vector<Point>& path, double margin) const {
  if (path.size() == 1) return point_free(path.front(), margin);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!segment_free(path[i - 1], path[i], margin)) return false;
  }
  return true;
}

void ObstacleMap::validate(double margin) const {
  if (!(xmax > xmin) || !(ymax > ymin)) throw PlanningError("map: empty bounds");
  for (const Obstacle& o : obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      if (!(c->radius > 0.0)) throw PlanningError("map: circle with non-positive radius");
    } else if (std::get<Polygon>(o).vertices.size() < 3) {
      throw PlanningError("map: polygon with fewer than 3 vertices");
    }
  }
  if (!point_free(start, margin)) throw PlanningError("map: start " + fmt(start) + " is blocked or out of bounds");
  if (!point_free(goal, margin)) throw PlanningError("map: goal " + fmt(goal) + " is blocked or out of bounds");
}

// ---------------------------------------------------------------------------
// RRT

RrtTree rrt_plan(const ObstacleMap& map, const RrtParams& params, std::uint64_t seed) {
  if (!(params.step > 0.0)) throw std::invalid_argument("rrt_plan: step must be positive");
  if (params.goal_bias < 0.0 || params.goal_bias > 1.0) throw std::invalid_argument("rrt_plan: goal_bias outside [0, 1]");
  map.validate(params.margin);

  RrtTree tree;
  tree.nodes.push_back(map.start);
  tree.parent.push_back(-1);
  auto try_goal = [&](int from) {
    const Point& p = tree.nodes[static_cast<std::size_t>(from)];
    if ((p - map.goal).norm() <= params.step && map.segment_free(p, map.goal, params.margin)) {
      tree.nodes.push_back(map.goal);
      tree.parent.push_back(from);
      tree.goal_node = static_cast<int>(tree.nodes.size()) - 1;
      return true;
    }
    return false;
  };
  if (try_goal(0)) return tree;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(map.xmin, map.xmax);
  std::uniform_real_distribution<double> uy(map.ymin, map.ymax);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int it = 0; it < params.max_iters; ++it) {
    Point sample = map.goal;
    if (coin(rng) >= params.goal_bias) sample = Point(ux(rng), uy(rng));
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const double d = (tree.nodes[i] - sample).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    const Point& near = tree.nodes[static_cast<std::size_t>(best)];
    const double dist = std::sqrt(best_d);
    if (dist == 0.0) continue;
    const Point next = dist <= params.step ? sample : Point(near + (sample - near) * (params.step / dist));
    if (!map.segment_free(near, next, params.margin)) continue;
    tree.nodes.push_back(next);
    tree.parent.push_back(best);
    if (try_goal(static_cast<int>(tree.nodes.size()) - 1)) return tree;
  }
  throw PlanningError("rrt_plan: no path found after " + std::to_string(params.max_iters) + " iterations");
}

std::vector<Point> extract_path(const RrtTree& tree) {
  if (tree.goal_node < 0 || tree.goal_node >= static_cast<int>(tree.nodes.size())) {
    throw PlanningError("extract_path: goal is not attached to the tree");
  }
  std::vector<Point> out;
  for (int i = tree.goal_node; i >= 0; i = tree.parent[static_cast<std::size_t>(i)]) {
    out.push_back(tree.nodes[static_cast<std::size_t>(i)]);
    if (out.size() > tree.nodes.size()) throw PlanningError("extract_path: parent links form a cycle");
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Point> shortcut_smooth(const std::vector<Point>& path, const ObstacleMap& map,
                                   const SmoothParams& params) {
  std::vector<Point> p = path;
  if (p.size() < 3) return p;
  std::mt19937_64 rng(params.seed);
  for (int a = 0; a < params.attempts && p.size() > 2; ++a) {
    std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
    std::size_t i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    if (j < i + 2) continue;
    if (map.segment_free(p[i], p[j], params.margin)) {
      p.erase(p.begin() + static_cast<std::ptrdiff_t>(i) + 1, p.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  std::vector<Point> out{p.front()};
  std::size_t i = 0;
  while (i + 1 < p.size()) {
    std::size_t j = p.size() - 1;
    while (j > i + 1 && !map.segment_free(p[i], p[j], params.margin)) --j;
    out.push_back(p[j]);
    i = j;
  }
  return out;
}

namespace {

// Arc from b - d1 t to b + d2 t tangent to both legs, sampled about every 5 degrees.
std::vector<Point> fillet(const Point& b, const Point& d1, const Point& d2, double radius) {
  const double turn = std::atan2(cross(d1, d2), d1.dot(d2));
  const double t = radius * std::tan(std::abs(turn) / 2.0);
  const Point p1 = b - d1 * t;
  const Point normal = turn > 0 ? Point(-d1.y(), d1.x()) : Point(d1.y(), -d1.x());
  const Point center = p1 + normal * radius;
  const int pieces = std::max(2, static_cast<int>(std::ceil(std::abs(turn) / (5.0 * std::numbers::pi / 180.0))));
  std::vector<Point> out;
  for (int k = 0; k <= pieces; ++k) {
    const double a = turn * k / pieces;
    const Eigen::Rotation2Dd rot(a);
    out.push_back(center + rot * (p1 - center));
  }
  return out;
}

}  // namespace

std::vector<Point> round_corners(const std::vector<Point>& path, const ObstacleMap* map, double radius,
                                 double margin) {
  if (path.size() < 3 || !(radius > 0.0)) return path;
  std::vector<Point> out{path.front()};
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const Point a = path[i - 1], b = path[i], c = path[i + 1];
    const double l1 = (b - a).norm(), l2 = (c - b).norm();
    if (l1 == 0.0 || l2 == 0.0) continue;
    const Point d1 = (b - a) / l1, d2 = (c - b) / l2;
    const double turn = std::abs(std::atan2(cross(d1, d2), d1.dot(d2)));
    if (turn < 1e-9) {
      out.push_back(b);
      continue;
    }
    const double half = std::tan(turn / 2.0);
    // Leave half of each leg for the neighbouring corner.
    double r = std::min(radius, 0.5 * std::min(l1, l2) / half);
    std::vector<Point> arc;
    for (; r > 0.05 * radius; r *= 0.5) {
      arc = fillet(b, d1, d2, r);
      std::vector<Point> check{out.back()};
      check.insert(check.end(), arc.begin(), arc.end());
      check.push_back(c);
      if (map == nullptr || map->path_free(check, margin)) break;
      arc.clear();
    }
    if (arc.empty()) {
      out.push_back(b);
    } else {
      out.insert(out.end(), arc.begin(), arc.end());
    }
  }
  out.push_back(path.back());
  return out;
}

// ---------------------------------------------------------------------------
// Spline

Point SplineSection::position(double tau) const {
  Point out;
  for (int i = 0; i < 2; ++i) {
    const auto& c = outputs[static_cast<std::size_t>(i)];
    out(i) = c[0] + tau * (c[1] + tau * (c[2] / 2.0 + tau * c[3] / 6.0));
  }
  return out;
}

Point SplineSection::velocity(double tau) const {
  Point out;
  for (int i = 0; i < 2; ++i) {
    const auto& c = outputs[static_cast<std::size_t>(i)];
    out(i) = c[1] + tau * (c[2] + tau * c[3] / 2.0);
  }
  return out;
}

double PathSpline::total_time() const {
  return sections.empty() ? 0.0 : sections.back().start_time + sections.back().duration;
}

Point PathSpline::position(double t) const {
  if (sections.empty()) throw std::logic_error("PathSpline: no sections");
  t = std::clamp(t, 0.0, total_time());
  auto it = std::upper_bound(sections.begin(), sections.end(), t,
                             [](double v, const SplineSection& s) { return v < s.start_time; });
  const SplineSection& s = it == sections.begin() ? sections.front() : *std::prev(it);
  return s.position(std::min(t - s.start_time, s.duration));
}

std::vector<Point> PathSpline::sample(int per_section) const {
  std::vector<Point> out;
  for (const SplineSection& s : sections) {
    for (int k = 0; k <= per_section; ++k) out.push_back(s.position(s.duration * k / per_section));
  }
  return out;
}

int section_count(const SplineParams& params) {
  if (!(params.section_duration > 0.0) || !(params.total_time > 0.0)) {
    throw std::invalid_argument("spline: durations must be positive");
  }
  const int n = static_cast<int>(std::lround(params.total_time / params.section_duration));
  if (n < 1) throw std::invalid_argument("spline: total time shorter than one section");
  return n;
}

namespace {

// Point at arc-length fraction s in [0, 1] along the polyline.
class ArcLength {
 public:
  explicit ArcLength(const std::vector<Point>& path) : path_(path), cum_{0.0} {
    for (std::size_t i = 1; i < path.size(); ++i) cum_.push_back(cum_.back() + (path[i] - path[i - 1]).norm());
    if (!(cum_.back() > 0.0)) throw PlanningError("spline: path has zero length");
  }

  Point at(double s) const {
    const double d = std::clamp(s, 0.0, 1.0) * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), d);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cum_.begin()));
    i = std::min(i, path_.size() - 1);
    const double seg = cum_[i] - cum_[i - 1];
    const double f = seg > 0.0 ? (d - cum_[i - 1]) / seg : 0.0;
    return path_[i - 1] + f * (path_[i] - path_[i - 1]);
  }

 private:
  const std::vector<Point>& path_;
  std::vector<double> cum_;
};

}  // namespace

PathSpline fit_spline(const std::vector<Point>& path, const SplineParams& params, const CarParams& car,
                      Branch branch) {
  if (path.size() < 2) throw PlanningError("spline: need at least two path points");
  if (params.samples < 4) throw std::invalid_argument("spline: need at least 4 samples per section");
  const int n = section_count(params);
  const double h = params.total_time / n;
  const ArcLength arc(path);

  // Unknowns per section and output: b0..b3 with y(tau) = sum b_k (tau / h)^k.
  const int unknowns = 4 * n;
  const int rows = n * params.samples;
  const int cons = 2 + (n - 1) * (params.c2 ? 3 : 2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, unknowns);
  Eigen::MatrixXd rhs(rows, 2);
  for (int s = 0; s < n; ++s) {
    for (int q = 0; q < params.samples; ++q) {
      const double u = (q + 0.5) / params.samples;
      const int r = s * params.samples + q;
      double pw = 1.0;
      for (int k = 0; k < 4; ++k, pw *= u) a(r, 4 * s + k) = pw;
      const Point p = arc.at((s + u) / n);
      rhs(r, 0) = p.x();
      rhs(r, 1) = p.y();
    }
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cons, unknowns);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(cons, 2);
  int row = 0;
  c(row, 0) = 1.0;
  d.row(row++) = path.front().transpose();
  for (int s = 0; s + 1 < n; ++s) {
    const int o = 4 * s, p = 4 * (s + 1);
    for (int k = 0; k < 4; ++k) c(row, o + k) = 1.0;  // value
    c(row++, p) = -1.0;
    for (int k = 1; k < 4; ++k) c(row, o + k) = k;  // slope (equal h)
    c(row++, p + 1) = -1.0;
    if (params.c2) {
      c(row, o + 2) = 2.0;
      c(row, o + 3) = 6.0;
      c(row++, p + 2) = -2.0;
    }
  }
  for (int k = 0; k < 4; ++k) c(row, 4 * (n - 1) + k) = 1.0;
  d.row(row++) = path.back().transpose();

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(unknowns + cons, unknowns + cons);
  kkt.topLeftCorner(unknowns, unknowns) = 2.0 * a.transpose() * a;
  kkt.topRightCorner(unknowns, cons) = c.transpose();
  kkt.bottomLeftCorner(cons, unknowns) = c;
  Eigen::MatrixXd b(unknowns + cons, 2);
  b.topRows(unknowns) = 2.0 * a.transpose() * rhs;
  b.bottomRows(cons) = d;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) throw PlanningError("spline: degenerate least-squares system");
  const Eigen::MatrixXd x = lu.solve(b);
  if (!x.allFinite()) throw PlanningError("spline: non-finite fit");

  PathSpline out;
  for (int s = 0; s < n; ++s) {
    SplineSection sec;
    sec.start_time = s * h;
    sec.duration = h;
    for (int i = 0; i < 2; ++i) {
      auto& o = sec.outputs[static_cast<std::size_t>(i)];
      const double hk[4] = {1.0, h, h * h, h * h * h};
      const double fact[4] = {1.0, 1.0, 2.0, 6.0};
      for (int k = 0; k < 4; ++k) o[static_cast<std::size_t>(k)] = x(4 * s + k, i) * fact[k] / hk[k];
    }
    if (s > 0) {
      const Point end = out.sections.back().position(h);
      sec.outputs[0][0] = end.x();
      sec.outputs[1][0] = end.y();
    }
    out.sections.push_back(sec);
  }
  for (SplineSection& sec : out.sections) {
    const Point v = sec.velocity(0.0);
    sec.init.z1 = sec.outputs[0][0];
    sec.init.z2 = sec.outputs[1][0];
    sec.init.z3 = std::atan2(v.y(), v.x());
    const SteerSpeed m = solve_first_order_match(v.x(), v.y(), sec.init.z3, car, branch);
    sec.init.z4 = m.z4;
    sec.init.z5 = m.z5;
  }
  return out;
}

PathSpline smooth_and_spline(const std::vector<Point>& path, const ObstacleMap* map,
                             const SmoothParams& smooth, const SplineParams& params, const CarParams& car,
                             Branch branch) {
  if (map == nullptr) return fit_spline(path, params, car, branch);
  const double clearance = smooth.margin / 2.0;
  const std::vector<Point> shortcut = shortcut_smooth(path, *map, smooth);
  const std::vector<Point> rounded = round_corners(shortcut, map, smooth.corner_radius, clearance);
  for (const auto& candidate : {rounded, shortcut, path}) {
    PathSpline spline = fit_spline(candidate, params, car, branch);
    if (map->path_free(spline.sample(8), clearance)) return spline;
  }
  throw PlanningError("spline: fitted spline intersects an obstacle");
}

}  // namespace fliess
