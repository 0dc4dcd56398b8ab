#include "fliess/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fliess::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("json: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Point point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("expected a point [x, y]");
  return Point(j[0].get<double>(), j[1].get<double>());
}

json point_to(const Point& p) { return json::array({p.x(), p.y()}); }

}  // namespace

json to_json(const Series& c) {
  json terms = json::array();
  for (const auto& [w, v] : c.to_word_terms()) terms.push_back({{"word", w.letters()}, {"coeff", v}});
  return {{"alphabet_size", c.alphabet_size()}, {"max_degree", c.max_degree()}, {"terms", terms}};
}

Series series_from_json(const json& j) {
  const int a = field(j, "alphabet_size").get<int>();
  const int n = field(j, "max_degree").get<int>();
  if (a < 1) bad("alphabet_size must be >= 1");
  if (n < 0) bad("max_degree must be >= 0");
  std::vector<std::pair<Word, double>> terms;
  for (const json& t : field(j, "terms")) {
    std::vector<int> letters = field(t, "word").get<std::vector<int>>();
    for (int l : letters) {
      if (l < 0 || l >= a) bad("letter " + std::to_string(l) + " outside the alphabet");
    }
    if (static_cast<int>(letters.size()) > n) bad("word longer than max_degree");
    terms.emplace_back(Word(std::move(letters)), field(t, "coeff").get<double>());
  }
  return Series::from_terms(a, n, terms);
}

json to_json(const VectorSeries& c) {
  json comps = json::array();
  for (const Series& s : c.components()) comps.push_back(to_json(s));
  return {{"components", comps}};
}

VectorSeries vector_from_json(const json& j) {
  if (j.is_object() && j.contains("terms")) return VectorSeries({series_from_json(j)});
  std::vector<Series> comps;
  for (const json& s : field(j, "components")) comps.push_back(series_from_json(s));
  return VectorSeries(std::move(comps));
}

json to_json(const MatrixSeries& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < c.dim(); ++k) row.push_back(to_json(c(i, k)));
    rows.push_back(row);
  }
  return {{"rows", rows}};
}

MatrixSeries matrix_from_json(const json& j) {
  const json& rows = field(j, "rows");
  std::vector<Series> entries;
  for (const json& row : rows) {
    if (row.size() != rows.size()) bad("matrix series must be square");
    for (const json& s : row) entries.push_back(series_from_json(s));
  }
  return MatrixSeries(rows.size(), std::move(entries));
}

json to_json(const TaylorOutput& t) { return {{"outputs", t.outputs}, {"convention", "series"}}; }

TaylorOutput taylor_from_json(const json& j) {
  TaylorOutput t;
  t.outputs = field(j, "outputs").get<std::vector<std::vector<double>>>();
  if (j.contains("convention")) {
    const std::string conv = j.at("convention").get<std::string>();
    if (conv == "monomial") {
      for (auto& o : t.outputs) o = TaylorOutput::from_monomial(o);
    } else if (conv != "series") {
      bad("unknown convention \"" + conv + "\"");
    }
  }
  return t;
}

json to_json(const ObstacleMap& map) {
  json obs = json::array();
  for (const Obstacle& o : map.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      obs.push_back({{"type", "circle"}, {"center", point_to(c->center)}, {"radius", c->radius}});
    } else {
      json verts = json::array();
      for (const Point& p : std::get<Polygon>(o).vertices) verts.push_back(point_to(p));
      obs.push_back({{"type", "polygon"}, {"vertices", verts}});
    }
  }
  return {{"bounds", {map.xmin, map.ymin, map.xmax, map.ymax}},
          {"obstacles", obs},
          {"start", point_to(map.start)},
          {"goal", point_to(map.goal)}};
}

ObstacleMap map_from_json(const json& j) {
  ObstacleMap map;
  const auto b = field(j, "bounds").get<std::vector<double>>();
  if (b.size() != 4) bad("bounds must be [xmin, ymin, xmax, ymax]");
  map.xmin = b[0];
  map.ymin = b[1];
  map.xmax = b[2];
  map.ymax = b[3];
  if (j.contains("obstacles")) {
    for (const json& o : j.at("obstacles")) {
      const std::string type = field(o, "type").get<std::string>();
      if (type == "circle") {
        map.obstacles.emplace_back(Circle{point_from(field(o, "center")), field(o, "radius").get<double>()});
      } else if (type == "polygon") {
        Polygon poly;
        for (const json& v : field(o, "vertices")) poly.vertices.push_back(point_from(v));
        map.obstacles.emplace_back(std::move(poly));
      } else {
        bad("unknown obstacle type \"" + type + "\"");
      }
    }
  }
  map.start = point_from(field(j, "start"));
  map.goal = point_from(field(j, "goal"));
  return map;
}

json path_to_json(const std::vector<Point>& path) {
  json pts = json::array();
  for (const Point& p : path) pts.push_back(point_to(p));
  return {{"points", pts}};
}

std::vector<Point> path_from_json(const json& j) {
  std::vector<Point> out;
  for (const json& p : field(j, "points")) out.push_back(point_from(p));
  return out;
}

json to_json(const CarParams& p) { return {{"L", p.L}, {"k", p.k}}; }

CarParams car_from_json(const json& j) {
  CarParams p;
  if (j.contains("L")) p.L = j.at("L").get<double>();
  if (j.contains("k")) p.k = j.at("k").get<double>();
  p.validate();
  return p;
}

json to_json(const SectionInit& s) {
  return {{"z1", s.z1}, {"z2", s.z2}, {"z3", s.z3}, {"z4", s.z4}, {"z5", s.z5}};
}

SectionInit init_from_json(const json& j) {
  return SectionInit{field(j, "z1").get<double>(), field(j, "z2").get<double>(), field(j, "z3").get<double>(),
                     field(j, "z4").get<double>(), field(j, "z5").get<double>()};
}

json to_json(const PathSpline& s) {
  json secs = json::array();
  for (const SplineSection& sec : s.sections) {
    secs.push_back({{"start_time", sec.start_time},
                    {"duration", sec.duration},
                    {"outputs", {sec.outputs[0], sec.outputs[1]}},
                    {"init", to_json(sec.init)}});
  }
  return {{"convention", "series"}, {"total_time", s.total_time()}, {"sections", secs}};
}

PathSpline spline_from_json(const json& j) {
  PathSpline s;
  for (const json& sec : field(j, "sections")) {
    SplineSection out;
    out.start_time = field(sec, "start_time").get<double>();
    out.duration = field(sec, "duration").get<double>();
    const auto outs = field(sec, "outputs").get<std::vector<std::vector<double>>>();
    if (outs.size() != 2) bad("spline sections need two outputs");
    for (std::size_t i = 0; i < 2; ++i) {
      if (outs[i].size() != 4) bad("spline outputs need four coefficients");
      for (std::size_t k = 0; k < 4; ++k) out.outputs[i][k] = outs[i][k];
    }
    out.init = init_from_json(field(sec, "init"));
    s.sections.push_back(out);
  }
  if (s.sections.empty()) bad("spline has no sections");
  return s;
}

Realization realization_from_json(const json& j) {
  const auto z0 = field(j, "z0").get<std::vector<double>>();
  const int n = j.contains("state_dim") ? j.at("state_dim").get<int>() : static_cast<int>(z0.size());
  if (n != static_cast<int>(z0.size())) bad("z0 length differs from state_dim");
  std::vector<std::vector<sym::Expr>> fields;
  for (const json& g : field(j, "fields")) {
    std::vector<sym::Expr> comps;
    for (const json& e : g) comps.push_back(sym::parse(e.get<std::string>(), n));
    fields.push_back(std::move(comps));
  }
  std::vector<sym::Expr> outputs;
  for (const json& e : field(j, "outputs")) outputs.push_back(sym::parse(e.get<std::string>(), n));
  return Realization(std::move(fields), std::move(outputs),
                     Eigen::Map<const Eigen::VectorXd>(z0.data(), static_cast<Eigen::Index>(z0.size())));
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fliess::io
