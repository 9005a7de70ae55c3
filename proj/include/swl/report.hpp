#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "swl/json_io.hpp"

namespace swl {

/// Uniform record for every measured inequality lhs <= C * rhs: the worst
/// instance's two sides, their ratio, and whether the ratio stays under the
/// configured ceiling.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  json worst = json::object();
  std::size_t suite_size = 0;
  double ceiling = std::numeric_limits<double>::infinity();
  bool pass = true;

  // 0 <= 0 counts as ratio 0; x/0 with x > 0 is infinite.
  static double safe_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }

  void finalize() {
    if (!std::isfinite(ratio) && ratio != 0.0) pass = false;
    else pass = ratio <= ceiling;
  }

  /// Folds one instance in, keeping the worst ratio.
  void observe(double l, double r, const json& instance = json::object()) {
    const double q = safe_ratio(l, r);
    ++suite_size;
    if (suite_size == 1 || q > ratio) {
      lhs = l;
      rhs = r;
      ratio = q;
      worst = instance;
    }
    finalize();
  }

  static InequalityReport single(std::string name, double lhs, double rhs,
                                 double ceiling = std::numeric_limits<double>::infinity()) {
    InequalityReport r;
    r.name = std::move(name);
    r.ceiling = ceiling;
    r.observe(lhs, rhs);
    return r;
  }

  static InequalityReport empty(std::string name, double ceiling = std::numeric_limits<double>::infinity()) {
    InequalityReport r;
    r.name = std::move(name);
    r.ceiling = ceiling;
    return r;
  }
};

inline json to_json_value(const InequalityReport& r) {
  return {{"name", r.name},         {"lhs", number_or_inf(r.lhs)},       {"rhs", number_or_inf(r.rhs)},
          {"ratio", number_or_inf(r.ratio)}, {"worst", r.worst},        {"suite_size", r.suite_size},
          {"ceiling", number_or_inf(r.ceiling)}, {"pass", r.pass}};
}

inline std::string csv_header() { return "name,lhs,rhs,ratio,suite_size,ceiling,pass"; }

inline std::string csv_row(const InequalityReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.name << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ',' << r.suite_size << ',' << r.ceiling << ','
     << (r.pass ? "true" : "false");
  return os.str();
}

}  // namespace swl
