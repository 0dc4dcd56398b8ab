#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fliess/error.hpp"
#include "fliess/pipeline.hpp"

using namespace fliess;

namespace {

ObstacleMap bundled_map() { return io::map_from_json(io::read_json(FLIESS_DATA_DIR "/bundled_map.json")); }

const PipelineResult& bundled_run() {
  static const PipelineResult r = run_pipeline(bundled_map(), PipelineConfig{});
  return r;
}

}  // namespace

TEST_CASE("config validation") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.inversion_degree = 9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.spline.section_duration = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.rk4_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("straight constant-speed section is tracked exactly") {
  SplineSection sec;
  sec.duration = 0.02;
  sec.outputs = {{{1.0, 3.0, 0.0, 0.0}, {2.0, 4.0, 0.0, 0.0}}};
  sec.init = SectionInit{1.0, 2.0, std::atan2(4.0, 3.0), 0.0, 5.0};
  const PipelineConfig cfg;
  const CarSeries series(cfg.car, cfg.series_degree);
  const SectionReport rep = run_section(series, sec, sec, sec.init, cfg);
  for (const auto& u : rep.c_u.outputs)
    for (double v : u) CHECK(std::abs(v) < 1e-9);
  CHECK(rep.endpoint_deviation < 1e-6);
  CHECK(rep.identity_residual < 1e-12);
}

TEST_CASE("section one inputs and error onset") {
  const PipelineConfig cfg;
  const CarSeries series(cfg.car, cfg.series_degree);
  SplineSection sec;
  sec.duration = 0.02;
  sec.outputs = {{{-1.5, 14.40, 13.07, -24.89}, {9.5, 10.75, -28.15, 185.15}}};
  SectionInit init{-1.5, 9.5, 1.5, 0.0, 0.0};
  const SteerSpeed m = solve_first_order_match(14.40, 10.75, 1.5, cfg.car, Branch::kNegativeSpeed);
  init.z4 = m.z4;
  init.z5 = m.z5;
  const SectionInputs in = invert_section(series, sec, init, 6);
  CHECK(in.u2().front() == doctest::Approx(7.74).epsilon(0.01));
  CHECK(in.ubar1().front() == doctest::Approx(6.36).epsilon(0.01));
  const SectionReport rep = run_section(series, sec, sec, init, cfg);
  CHECK(rep.identity_residual < 1e-6);
  for (const auto& o : rep.error_series.outputs)
    for (std::size_t k = 0; k <= 6; ++k) CHECK(std::abs(o[k]) < 1e-6 * 185.15);
  CHECK(rep.endpoint_deviation < 1e-4);
}

TEST_CASE("empty map gives an exactly tracked straight line") {
  ObstacleMap m;
  m.xmin = -1;
  m.ymin = -1;
  m.xmax = 5;
  m.ymax = 5;
  m.start = Point(0, 0);
  m.goal = Point(4, 3);
  const PipelineResult r = run_pipeline(m, PipelineConfig{});
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    const Point y(r.trajectory.outputs[k](0), r.trajectory.outputs[k](1));
    CHECK((y - r.spline.position(r.trajectory.times[k])).norm() < 1e-3);
  }
  CHECK(r.reached_goal);
}

TEST_CASE("bundled map run") {
  const PipelineResult& r = bundled_run();
  CHECK(r.collision_free);
  CHECK(r.reached_goal);
  CHECK(r.goal_distance < 0.2);
  CHECK(r.sections.size() == 50);
  CHECK(r.max_section_rms < 0.1);
  CHECK(r.trajectory.outputs.front()(0) == -1.5);
  CHECK(r.trajectory.outputs.front()(1) == 9.5);
  for (std::size_t s = 0; s < r.sections.size(); ++s) {
    const SectionReport& rep = r.sections[s];
    CHECK(rep.identity_residual < 1e-6);
    if (s > 0) {
      const SectionReport& prev = r.sections[s - 1];
      const Eigen::VectorXd& end = r.trajectory.states[static_cast<std::size_t>(s) * 40];
      CHECK(rep.init.z1 == end(0));
      CHECK(rep.init.z2 == end(1));
      CHECK(rep.init.z3 == end(2));
      CHECK(rep.init.z1 == prev.endpoint.x());
      CHECK(rep.z5_jump == doctest::Approx(rep.init.z5 - end(4)));
    }
  }
}

TEST_CASE("runs are deterministic") {
  const PipelineConfig cfg;
  const PipelineResult again = run_pipeline(bundled_map(), cfg);
  CHECK(report_json(again, cfg).dump() == report_json(bundled_run(), cfg).dump());
  CHECK(overlay_svg(again) == overlay_svg(bundled_run()));
}

TEST_CASE("raising the inversion degree reduces tracking error") {
  double prev = 1e300;
  double first = 0.0;
  for (int d = 3; d <= 6; ++d) {
    PipelineConfig cfg;
    cfg.inversion_degree = d;
    const double rms = run_pipeline(bundled_map(), cfg).total_rms;
    CHECK(rms <= prev);
    if (d == 3) first = rms;
    prev = rms;
  }
  CHECK(prev < first);
}

TEST_CASE("planned handoff") {
  PipelineConfig cfg;
  cfg.handoff = Handoff::kPlanned;
  const PipelineResult r = track_spline(bundled_run().spline, cfg);
  CHECK(r.sections.size() == 50);
  for (const SectionReport& rep : r.sections) CHECK(rep.max_error < 0.05);
}

TEST_CASE("stage failures keep their type") {
  ObstacleMap m = bundled_map();
  m.goal = Point(2.5, 3.0);
  try {
    run_pipeline(m, PipelineConfig{});
    FAIL("expected PlanningError");
  } catch (const PlanningError& e) {
    CHECK(std::string(e.what()).rfind("map: ", 0) == 0);
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "fliess_pipeline_test";
  std::filesystem::remove_all(dir);
  write_outputs(bundled_run(), PipelineConfig{}, dir.string());
  for (const char* f : {"traj.csv", "report.json", "overlay.svg"}) CHECK(std::filesystem::exists(dir / f));
  std::ifstream csv(dir / "traj.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,z1,z2,z3,z4,z5,y1,y2");
  const io::json rep = io::read_json((dir / "report.json").string());
  CHECK(rep.at("sections").size() == 50);
  std::ifstream svg(dir / "overlay.svg");
  std::stringstream ss;
  ss << svg.rdbuf();
  CHECK(ss.str().find("<svg") != std::string::npos);
  std::filesystem::remove_all(dir);
}
