#pragma once

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "swl/grid.hpp"

namespace swl {

using nlohmann::json;

// JSON has no infinity; unbounded constants are written as the string "inf".
inline json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json("nan");
  return json(v);
}

inline double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
  }
  return j.get<double>();
}

inline json cube_json(const Cube& q, int dim) {
  json j;
  j["center"] = std::vector<double>(q.center.begin(), q.center.begin() + dim);
  j["side"] = q.side;
  j["lo"] = std::vector<int>(q.lo.begin(), q.lo.begin() + dim);
  j["hi"] = std::vector<int>(q.hi.begin(), q.hi.begin() + dim);
  return j;
}

inline json spec_json(const GridSpec& spec) {
  return {{"dim", spec.dim()}, {"points_per_axis", spec.points()}, {"half_width", spec.half_width()}};
}

}  // namespace swl
