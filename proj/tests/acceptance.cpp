#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fliess/composition.hpp"
#include "fliess/inversion.hpp"
#include "fliess/io.hpp"
#include "fliess/pipeline.hpp"
#include "fliess/realization.hpp"
#include "fliess/series.hpp"
#include "fliess/vehicle.hpp"
#include "support.hpp"

using namespace fliess;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome shuffle_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<testing::Letters> words = testing::all_words(3, 6);
  std::size_t pairs = 0;
  bool exact = true;
  for (const auto& a : words) {
    for (const auto& b : words) {
      if (a.size() + b.size() > 6) continue;
      const Series sa = Series::word(3, 6, Word(a));
      const Series sb = Series::word(3, 6, Word(b));
      if (testing::to_naive(shuffle(sa, sb, 6)) != testing::interleavings(a, b)) exact = false;
      ++pairs;
    }
  }
  const double secs = elapsed(t0);
  return {exact && secs < 10.0, fmt("%.0f pairs, exact match, %.2f s (limit 10 s)", double(pairs), secs)};
}

Outcome inverse_round_trips() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c0(0.5, 2.0);
  double sh = 0.0, grp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double k = (i % 2 ? 1.0 : -1.0) * c0(rng);
    const Series c = testing::random_series(rng, 3, 6, 0.6, k);
    const Series one = Series::constant(3, 6, 1.0);
    sh = std::max(sh, testing::max_diff(shuffle(c, shuffle_inverse(c, 6), 6), one));

    const VectorSeries d({testing::random_series(rng, 3, 6, 0.4), testing::random_series(rng, 3, 6, 0.4)});
    const DeltaSeries id = compose(DeltaSeries{d}, DeltaSeries{group_inverse(d, 6)}, 6);
    const VectorSeries zero({Series(3, 6), Series(3, 6)});
    grp = std::max(grp, testing::max_diff(id.base, zero));
  }
  return {sh < 1e-9 && grp < 1e-9, fmt("shuffle residual %.2e, group residual %.2e (limit 1e-9)", sh, grp)};
}

Outcome operator_laws() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double horizon = 0.5;
  const auto grid = uniform_grid(horizon, 2000);
  double sh_err = 0.0, comp_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<std::vector<double>> coeffs{{d(rng), d(rng), d(rng)}, {d(rng), d(rng)}};
    const ControlSignal u = ControlSignal::polynomial(coeffs, horizon);

    const Series a = testing::random_series(rng, 3, 4);
    const Series b = testing::random_series(rng, 3, 4);
    const std::vector<double> ya = fliess_eval(a, u, grid), yb = fliess_eval(b, u, grid);
    const std::vector<double> yab = fliess_eval(shuffle(a, b, 8), u, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) sh_err = std::max(sh_err, std::abs(yab[i] - ya[i] * yb[i]));

    // Words of c o d grow past degree 4; the tail beyond degree 10 is below
    // 0.5^11 / 11! times combinatorial factors.
    const VectorSeries inner({testing::random_series(rng, 3, 4), testing::random_series(rng, 3, 4)});
    const Series outer = testing::random_series(rng, 3, 4);
    const Trajectory v = fliess_eval(inner, u, grid);
    std::vector<std::vector<double>> samples(2, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      samples[0][i] = v.outputs[i](0);
      samples[1][i] = v.outputs[i](1);
    }
    const std::vector<double> cascade = fliess_eval(outer, ControlSignal::sampled(samples, horizon), grid);
    const std::vector<double> direct = fliess_eval(compose(outer, inner, 10), u, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) comp_err = std::max(comp_err, std::abs(cascade[i] - direct[i]));
  }
  return {sh_err < 1e-3 && comp_err < 1e-3,
          fmt("shuffle law %.2e, composition law %.2e (limit 1e-3)", sh_err, comp_err)};
}

Outcome car_series_vs_rk4() {
  const auto t0 = std::chrono::steady_clock::now();
  const Realization car = car_realization(CarParams{}, Eigen::Vector4d(0, 0, 0, 0.2));
  const VectorSeries c = generating_series(car, 8);
  const double horizon = 0.6;
  const int steps = 4800;
  const auto grid = uniform_grid(horizon, steps + 1);
  const ControlSignal u = ControlSignal::constant({1.5, 0.8}, horizon);
  const Trajectory f = fliess_eval(c, u, grid);
  const Trajectory r = rk4_simulate(car, u, horizon, steps);
  std::vector<double> err(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) err[i] = (f.outputs[i] - r.outputs[i]).cwiseAbs().maxCoeff();
  double inside = 0.0;
  std::size_t k = 0;
  for (; k < grid.size() && grid[k] <= 0.25 + 1e-12; ++k) inside = std::max(inside, err[k]);
  // Beyond the horizon, check growth on a 0.05 spaced sequence of times.
  bool monotone = true;
  double prev = inside;
  for (double t = 0.3; t <= horizon + 1e-12; t += 0.05) {
    const std::size_t i = static_cast<std::size_t>(std::lround(t / horizon * steps));
    if (err[i] <= prev) monotone = false;
    prev = err[i];
  }
  const double secs = elapsed(t0);
  return {inside < 5e-2 && monotone && secs < 60.0,
          fmt("sup error on [0,0.25] %.2e (limit 5e-2), error at t=0.6 %.2e, %.2f s", inside, prev, secs) +
              (monotone ? ", growing beyond 0.25" : ", NOT monotone beyond 0.25")};
}

Outcome double_integrator() {
  const io::json model = io::json::parse(R"({"z0":[0,0],"fields":[["z2","0"],["0","1"]],"outputs":["z1"]})");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double y0 = d(rng), y1 = d(rng), y2 = d(rng), y3 = d(rng);
    io::json m = model;
    m["z0"] = {y0, y1};
    const VectorSeries c = generating_series(io::realization_from_json(m), 8);
    const TaylorOutput cu = left_invert(c, TaylorOutput{{{y0, y1, y2, y3}}}, 6);
    // u = y'' = y2 + y3 t.
    for (std::size_t k = 0; k < cu.outputs[0].size(); ++k) {
      const double expect = k == 0 ? y2 : k == 1 ? y3 : 0.0;
      worst = std::max(worst, std::abs(cu.at(0, k) - expect));
    }
  }
  return {worst < 1e-10, fmt("max coefficient error %.2e over 50 cubics (limit 1e-10)", worst)};
}

Outcome car_round_trip() {
  const CarParams p;
  const TaylorOutput cy{{{-1.5, 14.40, 13.07, -24.89}, {9.5, 10.75, -28.15, 185.15}}};
  double scale = 0.0;
  for (const auto& o : cy.outputs)
    for (double v : o) scale = std::max(scale, std::abs(v));

  SectionInit init{-1.5, 9.5, 1.5, 0.0, 0.0};
  const SteerSpeed m = solve_first_order_match(14.40, 10.75, 1.5, p);
  init.z4 = m.z4;
  init.z5 = m.z5;
  VectorSeries c = generating_series(augmented_realization(p, init), 8);
  TaylorOutput cu = left_invert(c, cy, 6);
  const TaylorOutput pred = predicted_output(c, cu, 6);
  const TaylorOutput err = tracking_error_series(c, cu, cy, 6);
  double rel = 0.0, onset = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k <= 6; ++k) {
      rel = std::max(rel, std::abs(pred.at(i, k) - cy.at(i, k)) / scale);
      onset = std::max(onset, std::abs(err.at(i, k)) / scale);
    }

  // Printed branch. Its first input channel (letter x1, steering rate) carries
  // the value printed as ubar1, the second (letter x2, speed rate) the value
  // printed as u2.
  const SteerSpeed n = solve_first_order_match(14.40, 10.75, 1.5, p, Branch::kNegativeSpeed);
  SectionInit printed{-1.5, 9.5, 1.5, n.z4, n.z5};
  c = generating_series(augmented_realization(p, printed), 8);
  cu = left_invert(c, cy, 6);
  const double a = cu.at(0, 0), b = cu.at(1, 0);
  const bool close = std::abs(a - 7.74) <= 0.02 * 7.74 && std::abs(b - 6.36) <= 0.02 * 6.36;
  return {rel < 1e-6 && onset < 1e-6 && close,
          fmt("relative residual %.2e, error through degree 6 %.2e (limit 1e-6); ", rel, onset) +
              fmt("printed branch z4=%.5f z5=%.4f gives ", n.z4, n.z5) +
              fmt("inputs (%.4f, %.4f) vs (7.74, 6.36) within 2%%", a, b)};
}

Outcome first_order_match() {
  const CarParams p;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> v(-25.0, 25.0), th(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double v1 = v(rng), v2 = v(rng), z3 = th(rng);
    const SteerSpeed s = solve_first_order_match(v1, v2, z3, p);
    worst = std::max({worst, std::abs(s.z5 * std::cos(z3 + s.z4) - v1), std::abs(s.z5 * std::sin(z3 + s.z4) - v2)});
  }
  const SteerSpeed s = solve_first_order_match(14.40, 10.75, 1.5, p, Branch::kNegativeSpeed);
  const bool ok = worst < 1e-9 && std::abs(std::abs(s.z5) - 17.97) < 0.01;
  return {ok, fmt("round trip %.2e (limit 1e-9), branch z5=%.4f z4=%.5f", worst, s.z5, s.z4)};
}

ObstacleMap bundled_map() { return io::map_from_json(io::read_json(FLIESS_DATA_DIR "/bundled_map.json")); }

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg;
  const PipelineResult r = run_pipeline(bundled_map(), cfg);
  const double secs = elapsed(t0);
  const PipelineResult again = run_pipeline(bundled_map(), cfg);
  const bool same = report_json(r, cfg).dump() == report_json(again, cfg).dump();
  const Eigen::VectorXd& y0 = r.trajectory.outputs.front();
  const bool start = y0(0) == -1.5 && y0(1) == 9.5;
  const bool ok = r.collision_free && start && r.goal_distance < 0.2 && r.max_section_rms < 0.1 && secs < 300.0 && same;
  return {ok, fmt("goal distance %.2e (limit 0.2), max section rms %.2e (limit 0.1), %.2f s", r.goal_distance,
                  r.max_section_rms, secs) +
                  (r.collision_free ? ", collision-free" : ", COLLISION") + (same ? ", identical reports" : ", REPORTS DIFFER")};
}

Outcome degree_monotonicity() {
  std::string detail = "total rms";
  bool ok = true;
  double prev = INFINITY;
  for (int d = 3; d <= 6; ++d) {
    PipelineConfig cfg;
    cfg.inversion_degree = d;
    const double rms = run_pipeline(bundled_map(), cfg).total_rms;
    if (rms > prev) ok = false;
    prev = rms;
    detail += fmt(" d%.0f=%.3e", d, rms);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  criterion(1, "shuffle vs interleaving enumeration", shuffle_oracle);
  criterion(2, "shuffle and group inverse round trips", inverse_round_trips);
  criterion(3, "operator laws under fliess_eval", operator_laws);
  criterion(4, "car series vs RK4", car_series_vs_rk4);
  criterion(5, "double integrator inversion", double_integrator);
  criterion(6, "car section round trip", car_round_trip);
  criterion(7, "first-order match solver", first_order_match);
  criterion(8, "end-to-end pipeline", end_to_end);
  criterion(9, "inversion degree monotonicity", degree_monotonicity);
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
