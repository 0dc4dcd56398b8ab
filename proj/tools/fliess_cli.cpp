#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fliess/composition.hpp"
#include "fliess/error.hpp"
#include "fliess/io.hpp"
#include "fliess/pipeline.hpp"

using namespace fliess;
using io::json;

namespace {

void emit(const std::string& out, const json& j) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_json(out, j);
  }
}

Branch parse_branch(const std::string& s) {
  if (s == "minimal") return Branch::kMinimal;
  if (s == "positive") return Branch::kPositiveSpeed;
  if (s == "negative") return Branch::kNegativeSpeed;
  throw std::invalid_argument("unknown branch \"" + s + "\" (minimal, positive, negative)");
}

const std::vector<std::string> kBranches{"minimal", "positive", "negative"};

struct PlanOpts {
  std::string map, out;
  std::uint64_t seed = 42;
  RrtParams rrt;
};

struct SplineOpts {
  std::string path, map, out;
  int sections = 50;
  double total_time = 1.0;
  bool c2 = false;
  int samples = 16;
  double margin = 0.0;
  double corner_radius = 1.5;
  int attempts = 300;
  std::uint64_t seed = 42;
  std::string branch = "minimal";
  CarParams car;
};

struct InvertOpts {
  std::string spline, out;
  int degree = 6;
  int series_degree = 8;
  std::string branch = "minimal";
  CarParams car;
};

struct SimulateOpts {
  std::string inputs, out;
  int steps = 40;
};

struct PipelineOpts {
  std::string map, outdir = "out";
  PipelineConfig cfg;
  int sections = 50;
  std::string handoff = "measured";
  std::string branch = "minimal";
};

struct SeriesOpts {
  std::string op, in, in2, out;
  int degree = 8;
};

int run_plan(const PlanOpts& o) {
  const ObstacleMap map = io::map_from_json(io::read_json(o.map));
  const RrtTree tree = rrt_plan(map, o.rrt, o.seed);
  json j = io::path_to_json(extract_path(tree));
  j["tree_size"] = tree.nodes.size();
  j["seed"] = o.seed;
  j["map"] = io::to_json(map);
  emit(o.out, j);
  return 0;
}

int run_spline(const SplineOpts& o) {
  const json pj = io::read_json(o.path);
  const std::vector<Point> path = io::path_from_json(pj);
  std::optional<ObstacleMap> map;
  if (!o.map.empty()) {
    map = io::map_from_json(io::read_json(o.map));
  } else if (pj.contains("map")) {
    map = io::map_from_json(pj.at("map"));
  }
  if (o.sections < 1) throw std::invalid_argument("--sections must be >= 1");
  SplineParams sp;
  sp.total_time = o.total_time;
  sp.section_duration = o.total_time / o.sections;
  sp.c2 = o.c2;
  sp.samples = o.samples;
  const SmoothParams smooth{o.attempts, o.seed, o.margin, o.corner_radius};
  const PathSpline spline =
      smooth_and_spline(path, map ? &*map : nullptr, smooth, sp, o.car, parse_branch(o.branch));
  json j = io::to_json(spline);
  j["car"] = io::to_json(o.car);
  emit(o.out, j);
  return 0;
}

int run_invert(const InvertOpts& o) {
  const json sj = io::read_json(o.spline);
  const PathSpline spline = io::spline_from_json(sj);
  const CarParams car = sj.contains("car") ? io::car_from_json(sj.at("car")) : o.car;
  if (o.degree > o.series_degree) throw std::invalid_argument("--degree exceeds --series-degree");
  const CarSeries series(car, o.series_degree);
  json secs = json::array();
  for (const SplineSection& sec : spline.sections) {
    SectionInit init = sec.init;
    const SteerSpeed m = solve_first_order_match(sec.outputs[0][1], sec.outputs[1][1], init.z3, car,
                                                 parse_branch(o.branch));
    init.z4 = m.z4;
    init.z5 = m.z5;
    const SectionInputs in = invert_section(series, sec, init, o.degree);
    secs.push_back({{"start_time", sec.start_time},
                    {"duration", sec.duration},
                    {"init", io::to_json(init)},
                    {"ubar1", in.ubar1()},
                    {"u2", in.u2()}});
  }
  emit(o.out, {{"car", io::to_json(car)}, {"convention", "series"}, {"degree", o.degree}, {"sections", secs}});
  return 0;
}

int run_simulate(const SimulateOpts& o) {
  const json ij = io::read_json(o.inputs);
  const CarParams car = ij.contains("car") ? io::car_from_json(ij.at("car")) : CarParams{};
  Trajectory all;
  for (const json& s : ij.at("sections")) {
    SectionInputs in;
    in.init = io::init_from_json(s.at("init"));
    in.duration = s.at("duration").get<double>();
    in.c_u.outputs = {s.at("u2").get<std::vector<double>>(), s.at("ubar1").get<std::vector<double>>()};
    const Trajectory piece = simulate_section(car, in, o.steps);
    const double t0 = s.contains("start_time") ? s.at("start_time").get<double>() : 0.0;
    for (std::size_t k = all.size() == 0 ? 0 : 1; k < piece.size(); ++k) {
      all.times.push_back(t0 + piece.times[k]);
      all.states.push_back(piece.states[k]);
      all.outputs.push_back(piece.outputs[k]);
    }
  }
  std::ostringstream csv;
  write_csv(csv, all);
  if (o.out.empty() || o.out == "-") {
    std::cout << csv.str();
  } else {
    io::write_text(o.out, csv.str());
  }
  return 0;
}

int run_pipeline_cmd(PipelineOpts o) {
  const ObstacleMap map = io::map_from_json(io::read_json(o.map));
  if (o.sections < 1) throw std::invalid_argument("--sections must be >= 1");
  o.cfg.spline.section_duration = o.cfg.spline.total_time / o.sections;
  o.cfg.handoff = o.handoff == "planned" ? Handoff::kPlanned : Handoff::kMeasured;
  o.cfg.branch = parse_branch(o.branch);
  const PipelineResult r = run_pipeline(map, o.cfg);
  write_outputs(r, o.cfg, o.outdir);
  std::printf("sections %zu  total rms %.3g  final (%.4f, %.4f)  goal distance %.4g  %s  %s\n", r.sections.size(),
              r.total_rms, r.final_position.x(), r.final_position.y(), r.goal_distance,
              r.reached_goal ? "reached" : "NOT reached", r.collision_free ? "collision-free" : "COLLISION");
  return r.reached_goal && r.collision_free ? 0 : 2;
}

int run_series(const SeriesOpts& o) {
  const json a = io::read_json(o.in);
  auto second = [&] {
    if (o.in2.empty()) throw std::invalid_argument("series " + o.op + " needs --in2");
    return io::read_json(o.in2);
  };
  const int n = o.degree;
  if (o.op == "shuffle") {
    const Series d = io::series_from_json(second());
    if (a.contains("components")) {
      emit(o.out, io::to_json(shuffle(io::vector_from_json(a), d, n)));
    } else {
      emit(o.out, io::to_json(shuffle(io::series_from_json(a), d, n)));
    }
  } else if (o.op == "compose") {
    const VectorSeries d = io::vector_from_json(second());
    emit(o.out, io::to_json(compose(io::vector_from_json(a), d, n)));
  } else if (o.op == "ginverse") {
    emit(o.out, io::to_json(group_inverse(io::vector_from_json(a), n)));
  } else if (o.op == "shinverse") {
    if (a.contains("rows")) {
      emit(o.out, io::to_json(shuffle_inverse(io::matrix_from_json(a), n)));
    } else {
      emit(o.out, io::to_json(shuffle_inverse(io::series_from_json(a), n)));
    }
  } else if (o.op == "invert-op") {
    const TaylorOutput c_y = io::taylor_from_json(second());
    emit(o.out, io::to_json(left_invert(io::vector_from_json(a), c_y, n)));
  } else if (o.op == "generate") {
    const Realization model = io::realization_from_json(a);
    emit(o.out, io::to_json(generating_series(model, n)));
  } else {
    throw std::invalid_argument("unknown series operation \"" + o.op + "\"");
  }
  return 0;
}

void car_options(CLI::App* cmd, CarParams& car) {
  cmd->add_option("--L", car.L, "Wheelbase length")->capture_default_str();
  cmd->add_option("--k", car.k, "Rear steering gain")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chen-Fliess series toolkit and left-inversion path tracker"};
  app.require_subcommand(1);

  PlanOpts plan;
  auto* c_plan = app.add_subcommand("plan", "RRT path on an obstacle map");
  c_plan->add_option("--map", plan.map, "Map JSON")->required()->check(CLI::ExistingFile);
  c_plan->add_option("--seed", plan.seed, "RNG seed")->capture_default_str();
  c_plan->add_option("--out", plan.out, "Path JSON (stdout if omitted)");
  c_plan->add_option("--step", plan.rrt.step, "Extension step")->capture_default_str();
  c_plan->add_option("--goal-bias", plan.rrt.goal_bias, "Goal sampling probability")->capture_default_str();
  c_plan->add_option("--max-iters", plan.rrt.max_iters, "Iteration limit")->capture_default_str();
  c_plan->add_option("--margin", plan.rrt.margin, "Obstacle inflation")->capture_default_str();

  SplineOpts spl;
  auto* c_spline = app.add_subcommand("spline", "Smooth a path and fit cubic sections");
  c_spline->add_option("--path", spl.path, "Path JSON")->required()->check(CLI::ExistingFile);
  c_spline->add_option("--sections", spl.sections, "Number of sections")->capture_default_str();
  c_spline->add_option("--out", spl.out, "Spline JSON (stdout if omitted)");
  c_spline->add_option("--map", spl.map, "Map JSON for collision-checked smoothing");
  c_spline->add_option("--total-time", spl.total_time, "Normalized duration")->capture_default_str();
  c_spline->add_flag("--c2", spl.c2, "Also enforce C2 at section joints");
  c_spline->add_option("--margin", spl.margin, "Obstacle inflation")->capture_default_str();
  c_spline->add_option("--corner-radius", spl.corner_radius, "Fillet radius, 0 disables")->capture_default_str();
  c_spline->add_option("--seed", spl.seed, "Smoothing seed")->capture_default_str();
  c_spline->add_option("--branch", spl.branch, "Steer/speed branch")->check(CLI::IsMember(kBranches))->capture_default_str();
  car_options(c_spline, spl.car);

  InvertOpts inv;
  auto* c_invert = app.add_subcommand("invert", "Left-invert every spline section");
  c_invert->add_option("--spline", inv.spline, "Spline JSON")->required()->check(CLI::ExistingFile);
  c_invert->add_option("--degree", inv.degree, "Inversion degree")->capture_default_str();
  c_invert->add_option("--series-degree", inv.series_degree, "Generating series degree")->capture_default_str();
  c_invert->add_option("--out", inv.out, "Inputs JSON (stdout if omitted)");
  c_invert->add_option("--branch", inv.branch, "Steer/speed branch")->check(CLI::IsMember(kBranches))->capture_default_str();
  car_options(c_invert, inv.car);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "RK4 of the car driven by computed inputs");
  c_sim->add_option("--inputs", sim.inputs, "Inputs JSON")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out, "Trajectory CSV (stdout if omitted)");
  c_sim->add_option("--steps", sim.steps, "RK4 steps per section")->capture_default_str();

  PipelineOpts pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "Plan, fit, invert and simulate");
  c_pipe->add_option("--map", pipe.map, "Map JSON")->required()->check(CLI::ExistingFile);
  c_pipe->add_option("--seed", pipe.cfg.seed, "RNG seed")->capture_default_str();
  c_pipe->add_option("--outdir", pipe.outdir, "Output directory")->capture_default_str();
  c_pipe->add_option("--degree", pipe.cfg.inversion_degree, "Inversion degree")->capture_default_str();
  c_pipe->add_option("--series-degree", pipe.cfg.series_degree, "Generating series degree")->capture_default_str();
  c_pipe->add_option("--sections", pipe.sections, "Number of sections")->capture_default_str();
  c_pipe->add_option("--steps", pipe.cfg.rk4_steps, "RK4 steps per section")->capture_default_str();
  c_pipe->add_option("--margin", pipe.cfg.rrt.margin, "Obstacle inflation")->capture_default_str();
  c_pipe->add_option("--tolerance", pipe.cfg.arrival_tolerance, "Arrival tolerance")->capture_default_str();
  c_pipe->add_option("--handoff", pipe.handoff, "measured or planned")
      ->check(CLI::IsMember({"measured", "planned"}))
      ->capture_default_str();
  c_pipe->add_option("--branch", pipe.branch, "Steer/speed branch")->check(CLI::IsMember(kBranches))->capture_default_str();
  car_options(c_pipe, pipe.cfg.car);

  SeriesOpts ser;
  auto* c_series = app.add_subcommand("series", "Series algebra on JSON files");
  c_series->add_option("op", ser.op, "shuffle | compose | ginverse | shinverse | invert-op | generate")
      ->required()
      ->check(CLI::IsMember({"shuffle", "compose", "ginverse", "shinverse", "invert-op", "generate"}));
  c_series->add_option("--in", ser.in, "First operand")->required()->check(CLI::ExistingFile);
  c_series->add_option("--in2", ser.in2, "Second operand")->check(CLI::ExistingFile);
  c_series->add_option("--degree", ser.degree, "Truncation degree")->capture_default_str();
  c_series->add_option("--out", ser.out, "Result JSON (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_plan) return run_plan(plan);
    if (*c_spline) return run_spline(spl);
    if (*c_invert) return run_invert(inv);
    if (*c_sim) return run_simulate(sim);
    if (*c_pipe) return run_pipeline_cmd(pipe);
    if (*c_series) return run_series(ser);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
