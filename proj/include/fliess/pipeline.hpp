#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fliess/inversion.hpp"
#include "fliess/io.hpp"
#include "fliess/planner.hpp"
#include "fliess/realization.hpp"
#include "fliess/vehicle.hpp"

namespace fliess {

enum class Handoff {
  kMeasured,  // next section starts from the simulated end state
  kPlanned,   // every section starts from its planned init (spline tangent heading)
};

struct PipelineConfig {
  int series_degree = 8;
  int inversion_degree = 6;
  SplineParams spline;
  RrtParams rrt;
  int smooth_attempts = 300;
  std::uint64_t seed = 42;
  int rk4_steps = 40;
  CarParams car;
  Handoff handoff = Handoff::kMeasured;
  Branch branch = Branch::kMinimal;
  /// Distance to the goal counted as arrival.
  double arrival_tolerance = 0.2;

  void validate() const;
};

/// The augmented car's symbolic generating series, built once and evaluated
/// at every section's initial state.
class CarSeries {
 public:
  CarSeries(const CarParams& car, int series_degree);
  VectorSeries at(const SectionInit& init) const { return table_.evaluate(init.state()); }
  const CarParams& car() const noexcept { return car_; }

 private:
  CarParams car_;
  GeneratingSeriesTable table_;
};

/// Letter order of the inputs: x1 is u2 (steering rate), x2 is ubar1 (speed rate).
struct SectionInputs {
  SectionInit init;
  double duration = 0.0;
  TaylorOutput c_u;

  const std::vector<double>& u2() const { return c_u.outputs.at(0); }
  const std::vector<double>& ubar1() const { return c_u.outputs.at(1); }
};

/// Section target as a TaylorOutput.
TaylorOutput section_target(const SplineSection& section);

/// Inverts one spline section from `init`, whose (z4, z5) must satisfy the
/// first-order match with the section's linear coefficients.
SectionInputs invert_section(const CarSeries& series, const SplineSection& section, const SectionInit& init,
                             int inversion_degree);

/// RK4 of the augmented car driven by the section inputs.
Trajectory simulate_section(const CarParams& car, const SectionInputs& inputs, int steps);

struct SectionReport {
  int index = 0;
  SectionInit init;
  double z4_jump = 0.0;
  double z5_jump = 0.0;
  TaylorOutput c_u;
  /// (c_y - c o c_u, x0^k) for k = 0..series_degree.
  TaylorOutput error_series;
  /// max_{k <= inversion degree} |error_k| / max(1, max_k |(c_y, x0^k)|).
  double identity_residual = 0.0;
  Point endpoint = Point::Zero();
  double endpoint_deviation = 0.0;
  double rms_error = 0.0;
  double max_error = 0.0;
};

/// Runs one section: generating series at init, inversion, RK4, and error
/// measures against `reference` (the unshifted spline section).
SectionReport run_section(const CarSeries& series, const SplineSection& target, const SplineSection& reference,
                          const SectionInit& init, const PipelineConfig& cfg, Trajectory* piece = nullptr);

struct PipelineResult {
  ObstacleMap map;
  std::size_t tree_size = 0;
  std::vector<Point> raw_path;
  PathSpline spline;
  std::vector<SectionReport> sections;
  Trajectory trajectory;
  double total_rms = 0.0;
  double max_section_rms = 0.0;
  Point final_position = Point::Zero();
  double goal_distance = 0.0;
  bool reached_goal = false;
  bool collision_free = false;
};

/// Sections of an existing spline, chained according to cfg.handoff.
PipelineResult track_spline(const PathSpline& spline, const PipelineConfig& cfg);

/// plan -> extract -> smooth and spline -> per-section inversion and simulation.
/// Stage failures are rethrown with a "stage: " prefix and the original type.
PipelineResult run_pipeline(const ObstacleMap& map, const PipelineConfig& cfg);

io::json report_json(const PipelineResult& r, const PipelineConfig& cfg);
std::string overlay_svg(const PipelineResult& r);
/// traj.csv, report.json and overlay.svg in `dir` (created if missing).
void write_outputs(const PipelineResult& r, const PipelineConfig& cfg, const std::string& dir);

}  // namespace fliess
