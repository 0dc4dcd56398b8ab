#include "fliess/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fliess/error.hpp"

namespace fliess {

void PipelineConfig::validate() const {
  if (series_degree < 1) throw std::invalid_argument("config: series_degree must be >= 1");
  if (inversion_degree < 0) throw std::invalid_argument("config: inversion_degree must be >= 0");
  if (inversion_degree > series_degree) {
    throw std::invalid_argument("config: inversion_degree exceeds series_degree");
  }
  if (rk4_steps < 1) throw std::invalid_argument("config: rk4_steps must be >= 1");
  if (!(arrival_tolerance > 0.0)) throw std::invalid_argument("config: arrival_tolerance must be positive");
  section_count(spline);
  car.validate();
}

CarSeries::CarSeries(const CarParams& car, int series_degree)
    : car_(car), table_(augmented_realization(car, SectionInit{0, 0, 0, 0, 1}), series_degree) {}

TaylorOutput section_target(const SplineSection& section) {
  TaylorOutput t;
  for (const auto& o : section.outputs) t.outputs.emplace_back(o.begin(), o.end());
  return t;
}

SectionInputs invert_section(const CarSeries& series, const SplineSection& section, const SectionInit& init,
                             int inversion_degree) {
  const VectorSeries c = series.at(init);
  SectionInputs out;
  out.init = init;
  out.duration = section.duration;
  out.c_u = left_invert(c, section_target(section), inversion_degree);
  return out;
}

Trajectory simulate_section(const CarParams& car, const SectionInputs& inputs, int steps) {
  const Realization model = augmented_realization(car, inputs.init);
  return rk4_simulate(model, ControlSignal::polynomial(inputs.c_u.outputs, inputs.duration), inputs.duration,
                      steps);
}

SectionReport run_section(const CarSeries& series, const SplineSection& target, const SplineSection& reference,
                          const SectionInit& init, const PipelineConfig& cfg, Trajectory* piece) {
  SectionReport rep;
  rep.init = init;
  const VectorSeries c = series.at(init);
  const TaylorOutput c_y = section_target(target);
  rep.c_u = left_invert(c, c_y, cfg.inversion_degree);
  rep.error_series = tracking_error_series(c, rep.c_u, c_y, cfg.series_degree);

  double scale = 1.0;
  for (const auto& o : c_y.outputs) {
    for (double v : o) scale = std::max(scale, std::abs(v));
  }
  for (const auto& o : rep.error_series.outputs) {
    for (std::size_t k = 0; k < o.size() && k <= static_cast<std::size_t>(cfg.inversion_degree); ++k) {
      rep.identity_residual = std::max(rep.identity_residual, std::abs(o[k]) / scale);
    }
  }

  SectionInputs inputs{init, target.duration, rep.c_u};
  Trajectory tr = simulate_section(series.car(), inputs, cfg.rk4_steps);
  double sum = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const Point y(tr.outputs[k](0), tr.outputs[k](1));
    const double e = (y - reference.position(tr.times[k])).norm();
    sum += e * e;
    rep.max_error = std::max(rep.max_error, e);
  }
  rep.rms_error = std::sqrt(sum / static_cast<double>(tr.size()));
  rep.endpoint = Point(tr.outputs.back()(0), tr.outputs.back()(1));
  rep.endpoint_deviation = (rep.endpoint - reference.position(reference.duration)).norm();
  if (piece != nullptr) *piece = std::move(tr);
  return rep;
}

namespace {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  const std::string p = name + ": ";
  try {
    return f();
  } catch (const PlanningError& e) {
    throw PlanningError(p + e.what());
  } catch (const InversionError& e) {
    throw InversionError(e.kind(), p + e.what());
  } catch (const SingularDecouplingError& e) {
    throw SingularDecouplingError(p + e.what());
  } catch (const SingularityError& e) {
    throw SingularityError(p + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(p + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(p + e.what());
  }
}

void append(Trajectory& all, const Trajectory& piece, double t0) {
  const std::size_t first = all.size() == 0 ? 0 : 1;
  for (std::size_t k = first; k < piece.size(); ++k) {
    all.times.push_back(t0 + piece.times[k]);
    all.states.push_back(piece.states[k]);
    all.outputs.push_back(piece.outputs[k]);
    all.inputs.push_back(piece.inputs[k]);
  }
}

std::vector<Point> trajectory_points(const Trajectory& tr) {
  std::vector<Point> out;
  for (const auto& y : tr.outputs) out.emplace_back(y(0), y(1));
  return out;
}

}  // namespace

PipelineResult track_spline(const PathSpline& spline, const PipelineConfig& cfg) {
  cfg.validate();
  if (spline.sections.empty()) throw std::invalid_argument("track_spline: empty spline");
  PipelineResult r;
  r.spline = spline;
  const CarSeries series(cfg.car, cfg.series_degree);
  double sum_sq = 0.0;
  std::size_t samples = 0;
  Eigen::VectorXd end_state;
  for (std::size_t s = 0; s < spline.sections.size(); ++s) {
    const SplineSection& ref = spline.sections[s];
    SplineSection target = ref;
    SectionInit init = ref.init;
    double jump4 = 0.0, jump5 = 0.0;
    if (cfg.handoff == Handoff::kMeasured && s > 0) {
      init.z1 = end_state(0);
      init.z2 = end_state(1);
      init.z3 = end_state(2);
      target.outputs[0][0] = init.z1;
      target.outputs[1][0] = init.z2;
      const SteerSpeed m = solve_first_order_match(target.outputs[0][1], target.outputs[1][1], init.z3, cfg.car,
                                                   cfg.branch);
      init.z4 = m.z4;
      init.z5 = m.z5;
      jump4 = init.z4 - end_state(3);
      jump5 = init.z5 - end_state(4);
    } else if (s == 0 || cfg.handoff == Handoff::kPlanned) {
      const SteerSpeed m =
          solve_first_order_match(ref.outputs[0][1], ref.outputs[1][1], init.z3, cfg.car, cfg.branch);
      init.z4 = m.z4;
      init.z5 = m.z5;
    }
    Trajectory piece;
    SectionReport rep = stage("section " + std::to_string(s), [&] {
      return run_section(series, target, ref, init, cfg, &piece);
    });
    rep.index = static_cast<int>(s);
    rep.z4_jump = jump4;
    rep.z5_jump = jump5;
    sum_sq += rep.rms_error * rep.rms_error * static_cast<double>(piece.size());
    samples += piece.size();
    r.max_section_rms = std::max(r.max_section_rms, rep.rms_error);
    end_state = piece.states.back();
    append(r.trajectory, piece, ref.start_time);
    r.sections.push_back(std::move(rep));
  }
  r.total_rms = std::sqrt(sum_sq / static_cast<double>(samples));
  const auto& y = r.trajectory.outputs.back();
  r.final_position = Point(y(0), y(1));
  return r;
}

PipelineResult run_pipeline(const ObstacleMap& map, const PipelineConfig& cfg) {
  cfg.validate();
  stage("map", [&] {
    map.validate(cfg.rrt.margin);
    return 0;
  });
  const RrtTree tree = stage("rrt", [&] { return rrt_plan(map, cfg.rrt, cfg.seed); });
  const std::vector<Point> path = stage("extract", [&] { return extract_path(tree); });
  const PathSpline spline = stage("spline", [&] {
    const SmoothParams smooth{cfg.smooth_attempts, cfg.seed, cfg.rrt.margin};
    return smooth_and_spline(path, &map, smooth, cfg.spline, cfg.car, cfg.branch);
  });
  PipelineResult r = track_spline(spline, cfg);
  r.map = map;
  r.tree_size = tree.nodes.size();
  r.raw_path = path;
  r.goal_distance = (r.final_position - map.goal).norm();
  r.reached_goal = r.goal_distance <= cfg.arrival_tolerance;
  r.collision_free = map.path_free(trajectory_points(r.trajectory));
  return r;
}

io::json report_json(const PipelineResult& r, const PipelineConfig& cfg) {
  using io::json;
  json secs = json::array();
  for (const SectionReport& s : r.sections) {
    secs.push_back({{"index", s.index},
                    {"init", io::to_json(s.init)},
                    {"z4_jump", s.z4_jump},
                    {"z5_jump", s.z5_jump},
                    {"inputs", {{"ubar1", s.c_u.outputs.at(1)}, {"u2", s.c_u.outputs.at(0)}, {"convention", "series"}}},
                    {"error_series", io::to_json(s.error_series)},
                    {"identity_residual", s.identity_residual},
                    {"endpoint", {s.endpoint.x(), s.endpoint.y()}},
                    {"endpoint_deviation", s.endpoint_deviation},
                    {"rms_error", s.rms_error},
                    {"max_error", s.max_error}});
  }
  json path = json::array();
  for (const Point& p : r.raw_path) path.push_back({p.x(), p.y()});
  return {{"config",
           {{"series_degree", cfg.series_degree},
            {"inversion_degree", cfg.inversion_degree},
            {"section_duration", cfg.spline.section_duration},
            {"total_time", cfg.spline.total_time},
            {"seed", cfg.seed},
            {"rk4_steps", cfg.rk4_steps},
            {"margin", cfg.rrt.margin},
            {"handoff", cfg.handoff == Handoff::kMeasured ? "measured" : "planned"},
            {"car", io::to_json(cfg.car)}}},
          {"tree_size", r.tree_size},
          {"path", path},
          {"spline", io::to_json(r.spline)},
          {"sections", secs},
          {"summary",
           {{"total_rms", r.total_rms},
            {"max_section_rms", r.max_section_rms},
            {"final_position", {r.final_position.x(), r.final_position.y()}},
            {"goal_distance", r.goal_distance},
            {"reached_goal", r.reached_goal},
            {"collision_free", r.collision_free}}}};
}

std::string overlay_svg(const PipelineResult& r) {
  const ObstacleMap& m = r.map;
  const double w = m.xmax - m.xmin, h = m.ymax - m.ymin;
  const double scale = 600.0 / std::max(w, h);
  char buf[96];
  auto px = [&](const Point& p) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", (p.x() - m.xmin) * scale, (m.ymax - p.y()) * scale);
    return std::string(buf);
  };
  auto polyline = [&](const std::vector<Point>& pts, const char* style) {
    std::string s = "<polyline fill=\"none\" " + std::string(style) + " points=\"";
    for (const Point& p : pts) s += px(p) + " ";
    return s + "\"/>\n";
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * scale << "\" height=\"" << h * scale
     << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << w * scale << "\" height=\"" << h * scale
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const Obstacle& o : m.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      const std::string xy = px(c->center);
      const auto comma = xy.find(',');
      os << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1) << "\" r=\""
         << c->radius * scale << "\" fill=\"#888\"/>\n";
    } else {
      os << "<polygon fill=\"#888\" points=\"";
      for (const Point& p : std::get<Polygon>(o).vertices) os << px(p) << ' ';
      os << "\"/>\n";
    }
  }
  if (!r.raw_path.empty()) os << polyline(r.raw_path, "stroke=\"#bbb\" stroke-width=\"1\"");
  if (!r.spline.sections.empty()) {
    os << polyline(r.spline.sample(8), "stroke=\"blue\" stroke-width=\"2\"");
  }
  std::vector<Point> sim;
  for (const auto& y : r.trajectory.outputs) sim.emplace_back(y(0), y(1));
  if (!sim.empty()) os << polyline(sim, "stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"4 2\"");
  const std::string s = px(m.start), g = px(m.goal);
  os << "<circle cx=\"" << s.substr(0, s.find(',')) << "\" cy=\"" << s.substr(s.find(',') + 1)
     << "\" r=\"4\" fill=\"green\"/>\n";
  os << "<circle cx=\"" << g.substr(0, g.find(',')) << "\" cy=\"" << g.substr(g.find(',') + 1)
     << "\" r=\"4\" fill=\"black\"/>\n";
  os << "</svg>\n";
  return os.str();
}

void write_outputs(const PipelineResult& r, const PipelineConfig& cfg, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ostringstream csv;
  write_csv(csv, r.trajectory);
  io::write_text((base / "traj.csv").string(), csv.str());
  io::write_json((base / "report.json").string(), report_json(r, cfg));
  io::write_text((base / "overlay.svg").string(), overlay_svg(r));
}

}  // namespace fliess
