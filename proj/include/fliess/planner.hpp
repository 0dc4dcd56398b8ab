#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fliess/vehicle.hpp"

namespace fliess {

using Point = Eigen::Vector2d;

struct Circle {
  Point center;
  double radius;
};

/// Simple polygon (convex or not), vertices in either orientation.
struct Polygon {
  std::vector<Point> vertices;
};

using Obstacle = std::variant<Polygon, Circle>;

struct ObstacleMap {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
  std::vector<Obstacle> obstacles;
  Point start = Point::Zero();
  Point goal = Point::Zero();

  bool in_bounds(const Point& p) const;
  /// Point outside every obstacle inflated by `margin`, and inside the bounds.
  bool point_free(const Point& p, double margin = 0.0) const;
  /// Segment clear of every obstacle inflated by `margin`, and inside the bounds.
  bool segment_free(const Point& a, const Point& b, double margin = 0.0) const;
  /// Polyline check, edge by edge.
  bool path_free(const std::vector<Point>& path, double margin = 0.0) const;
  /// Throws PlanningError when bounds are empty or start/goal are blocked.
  void validate(double margin = 0.0) const;
};

struct RrtParams {
  double step = 0.5;
  double goal_bias = 0.1;
  int max_iters = 5000;
  double margin = 0.0;
};

struct RrtTree {
  std::vector<Point> nodes;
  std::vector<int> parent;  // -1 for the root
  int goal_node = -1;
};

/// Goal-biased RRT from map.start. Deterministic for a given seed. Throws
/// PlanningError when no path is found within max_iters.
RrtTree rrt_plan(const ObstacleMap& map, const RrtParams& params, std::uint64_t seed);

/// Root-to-goal node sequence of a tree that reached the goal.
std::vector<Point> extract_path(const RrtTree& tree);

struct SmoothParams {
  int attempts = 300;
  std::uint64_t seed = 0;
  double margin = 0.0;
  /// Fillet radius for round_corners; 0 disables rounding.
  double corner_radius = 1.5;
};

/// Shortcut smoothing: random pairs of vertices are joined directly when the
/// segment is free, then one greedy pass from the start.
std::vector<Point> shortcut_smooth(const std::vector<Point>& path, const ObstacleMap& map,
                                   const SmoothParams& params);

/// Replaces each interior vertex by a sampled circular arc of radius up to
/// `radius`, shrunk so that neighbouring arcs do not overlap and the result
/// stays clear of the map by `margin`. Corners whose arc cannot be made free
/// are kept.
std::vector<Point> round_corners(const std::vector<Point>& path, const ObstacleMap* map, double radius,
                                 double margin);

/// One spline section. outputs[i][k] is (c_y_i, x0^k), so that
/// y_i(tau) = sum_k outputs[i][k] tau^k / k! for tau in [0, duration].
struct SplineSection {
  double start_time = 0.0;
  double duration = 0.0;
  std::array<std::array<double, 4>, 2> outputs{};
  SectionInit init;

  Point position(double tau) const;
  Point velocity(double tau) const;
};

struct PathSpline {
  std::vector<SplineSection> sections;

  double total_time() const;
  /// Position at global time t, clamped to [0, total_time()].
  Point position(double t) const;
  /// Dense samples (per section, including both ends).
  std::vector<Point> sample(int per_section) const;
};

struct SplineParams {
  double section_duration = 0.02;
  double total_time = 1.0;
  /// Least-squares samples per section.
  int samples = 16;
  bool c2 = false;
};

/// Constrained least-squares cubic spline through an arc-length parameterized
/// polyline. Every section starts exactly where the previous one ends, slopes
/// agree (C1, optionally C2), and the first and last values are the polyline
/// end points. Section inits carry the planned heading (spline tangent) and
/// the matching (z4, z5) from solve_first_order_match.
PathSpline fit_spline(const std::vector<Point>& path, const SplineParams& params, const CarParams& car,
                      Branch branch = Branch::kMinimal);

/// Shortcut smoothing and corner rounding followed by fit_spline. With a map,
/// the sampled spline must stay clear of obstacles by `smooth.margin / 2`;
/// otherwise the fit is retried without rounding, then on the raw path, before
/// failing with PlanningError.
PathSpline smooth_and_spline(const std::vector<Point>& path, const ObstacleMap* map,
                             const SmoothParams& smooth, const SplineParams& params, const CarParams& car,
                             Branch branch = Branch::kMinimal);

/// Number of sections implied by params (total_time / section_duration, rounded).
int section_count(const SplineParams& params);

}  // namespace fliess
