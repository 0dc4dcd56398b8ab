#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fliess/inversion.hpp"
#include "fliess/planner.hpp"
#include "fliess/realization.hpp"
#include "fliess/series.hpp"

namespace fliess::io {

using nlohmann::json;

json to_json(const Series& c);
Series series_from_json(const json& j);

json to_json(const VectorSeries& c);
VectorSeries vector_from_json(const json& j);

json to_json(const MatrixSeries& c);
MatrixSeries matrix_from_json(const json& j);

json to_json(const TaylorOutput& t);
TaylorOutput taylor_from_json(const json& j);

json to_json(const ObstacleMap& map);
ObstacleMap map_from_json(const json& j);

json path_to_json(const std::vector<Point>& path);
std::vector<Point> path_from_json(const json& j);

json to_json(const CarParams& p);
CarParams car_from_json(const json& j);

json to_json(const SectionInit& s);
SectionInit init_from_json(const json& j);

json to_json(const PathSpline& s);
PathSpline spline_from_json(const json& j);

/// {"state_dim": n, "fields": [[g0 strings], [g1 strings], ...],
///  "outputs": [h strings], "z0": [...]} in the textual expression syntax.
Realization realization_from_json(const json& j);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace fliess::io
