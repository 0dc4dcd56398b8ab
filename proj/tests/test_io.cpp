#include "doctest.h"

#include <filesystem>
#include <random>

#include "fliess/io.hpp"
#include "fliess/vehicle.hpp"
#include "support.hpp"

using namespace fliess;
using io::json;

namespace {

json round_trip(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST_CASE("series round trips") {
  std::mt19937_64 rng(71);
  const Series c = testing::random_series(rng, 3, 4);
  const Series back = io::series_from_json(round_trip(io::to_json(c)));
  CHECK(back.alphabet_size() == 3);
  CHECK(back.max_degree() == 4);
  CHECK(back.approx_equal(c, 0.0));

  const VectorSeries v({c, testing::random_series(rng, 3, 4)});
  CHECK(testing::max_diff(io::vector_from_json(round_trip(io::to_json(v))), v) == 0.0);
  CHECK(io::vector_from_json(io::to_json(c)).size() == 1);

  const MatrixSeries m(2, {c, c, v[1], c});
  const MatrixSeries mb = io::matrix_from_json(round_trip(io::to_json(m)));
  REQUIRE(mb.dim() == 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(mb.entries()[i].approx_equal(m.entries()[i], 0.0));
}

TEST_CASE("malformed series are rejected") {
  CHECK_THROWS_AS(io::series_from_json(json::parse(R"({"alphabet_size":2,"terms":[]})")), std::invalid_argument);
  CHECK_THROWS_AS(io::series_from_json(json::parse(R"({"alphabet_size":2,"max_degree":2,"terms":[{"word":[2],"coeff":1}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      io::series_from_json(json::parse(R"({"alphabet_size":2,"max_degree":1,"terms":[{"word":[1,1],"coeff":1}]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(io::series_from_json(json::parse(R"({"alphabet_size":0,"max_degree":1,"terms":[]})")),
                  std::invalid_argument);
}

TEST_CASE("taylor outputs in both conventions") {
  const TaylorOutput t{{{1.0, 2.0, 6.0}, {0.5}}};
  const TaylorOutput back = io::taylor_from_json(round_trip(io::to_json(t)));
  CHECK(back.outputs == t.outputs);
  const TaylorOutput mono = io::taylor_from_json(json::parse(R"({"convention":"monomial","outputs":[[1,2,3]]})"));
  CHECK(mono.outputs[0] == std::vector<double>{1.0, 2.0, 6.0});
  CHECK_THROWS_AS(io::taylor_from_json(json::parse(R"({"convention":"other","outputs":[[1]]})")),
                  std::invalid_argument);
}

TEST_CASE("maps, paths and parameters") {
  const ObstacleMap m = io::map_from_json(io::read_json(FLIESS_DATA_DIR "/bundled_map.json"));
  CHECK(m.obstacles.size() == 5);
  CHECK(m.start == Point(-1.5, 9.5));
  CHECK(m.goal == Point(0.0, -1.0));
  const ObstacleMap back = io::map_from_json(round_trip(io::to_json(m)));
  CHECK(io::to_json(back) == io::to_json(m));
  CHECK_THROWS_AS(io::map_from_json(json::parse(
                      R"({"bounds":[0,0,1,1],"start":[0,0],"goal":[1,1],"obstacles":[{"type":"ellipse"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::map_from_json(json::parse(R"({"bounds":[0,0,1],"start":[0,0],"goal":[1,1]})")),
                  std::invalid_argument);

  const std::vector<Point> path{Point(0, 0), Point(1.25, -2)};
  CHECK(io::path_from_json(round_trip(io::path_to_json(path))) == path);

  const CarParams p{1.5, -0.3};
  const CarParams pb = io::car_from_json(round_trip(io::to_json(p)));
  CHECK(pb.L == 1.5);
  CHECK(pb.k == -0.3);
  CHECK(io::car_from_json(json::object()).k == -0.7);

  const SectionInit s{1, 2, 3, 4, 5};
  const SectionInit sb = io::init_from_json(round_trip(io::to_json(s)));
  CHECK(sb.z5 == 5.0);
  CHECK(sb.z3 == 3.0);
}

TEST_CASE("spline round trip") {
  const PathSpline s = fit_spline({Point(0, 0), Point(1, 1), Point(2, 0)}, SplineParams{0.25, 1.0, 16, false}, CarParams{});
  const PathSpline b = io::spline_from_json(round_trip(io::to_json(s)));
  REQUIRE(b.sections.size() == s.sections.size());
  for (std::size_t i = 0; i < s.sections.size(); ++i) {
    CHECK(b.sections[i].outputs == s.sections[i].outputs);
    CHECK(b.sections[i].duration == s.sections[i].duration);
    CHECK(b.sections[i].init.z4 == s.sections[i].init.z4);
  }
}

TEST_CASE("realization from json") {
  const json j = json::parse(R"js({
    "z0": [0, 0, 0, 0.2],
    "fields": [["0", "0", "0", "0"],
               ["cos(z3 + z4)", "sin(z3 + z4)", "sin(1.7*z4)/cos(0.7*z4)", "0"],
               ["0", "0", "0", "1"]],
    "outputs": ["z1", "z2"]})js");
  const Realization r = io::realization_from_json(j);
  const VectorSeries a = generating_series(r, 5);
  const VectorSeries b = generating_series(car_realization(CarParams{}, Eigen::Vector4d(0, 0, 0, 0.2)), 5);
  CHECK(testing::max_diff(a, b) < 1e-14);
  json bad = j;
  bad["outputs"] = json::array({"z7"});
  CHECK_THROWS_AS(io::realization_from_json(bad), std::invalid_argument);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "fliess_io_test";
  std::filesystem::create_directories(dir);
  const std::string f = (dir / "a.json").string();
  io::write_json(f, json{{"x", 1}});
  CHECK(io::read_json(f).at("x") == 1);
  CHECK_THROWS(io::read_json((dir / "missing.json").string()));
  io::write_text((dir / "t.txt").string(), "hello");
  CHECK(std::filesystem::file_size(dir / "t.txt") == 5);
  std::filesystem::remove_all(dir);
}
