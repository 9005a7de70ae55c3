#pragma once

// Run configuration for the command-line tool: flat JSON keys that mirror the
// flag names, defaults, and field-level validation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "swl/error.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"

namespace swl {

struct RunConfig {
  int n = 2;
  int N = 64;
  double L = 2.0;
  std::string potential = "one";  // one | square | path to a GFD manifest
  double p = 2.0;
  double q = 2.0;
  double r = 2.0;
  double theta = 1.0;
  double delta = 0.5;
  double eta = 1.0;
  double l0 = 1.0;
  std::optional<double> exponent;  // maximal: defaults to theta (eta for phi)
  std::optional<double> lambda;    // czd: defaults to 4x the root average
  std::optional<double> A;         // rdf: defaults to the measured norm
  int K = 40;
  double tol = 1e-9;
  std::string variant = "cube";
  double ladder_ratio = 0x1.306fe0a31b715p+0;  // 2^{1/4}
  std::string weight = "one";      // one | decay | power | path
  double gamma = 0.5;              // decay weight (1+|x|)^{-(n+gamma)}
  double a = -1.0;                 // power weight (1+|x|)^a
  std::string input;               // GFD manifest for f / h; empty = generated
  std::string out = "swl_out";
  std::uint64_t seed = 0;
  double scale = 1.0;

  GridSpec spec() const { return GridSpec(n, L, N); }
};

inline json to_json_value(const RunConfig& c) {
  json j{{"n", c.n},         {"N", c.N},           {"L", c.L},         {"potential", c.potential},
         {"p", c.p},         {"q", c.q},           {"r", c.r},         {"theta", c.theta},
         {"delta", c.delta}, {"eta", c.eta},       {"l0", c.l0},       {"K", c.K},
         {"tol", c.tol},     {"variant", c.variant}, {"ladder_ratio", c.ladder_ratio},
         {"weight", c.weight}, {"gamma", c.gamma}, {"a", c.a},         {"input", c.input},
         {"seed", c.seed},   {"scale", c.scale}};
  j["exponent"] = c.exponent ? json(*c.exponent) : json(nullptr);
  j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  j["A"] = c.A ? json(*c.A) : json(nullptr);
  return j;
}

namespace detail {

inline Error field_error(const std::string& key, const std::string& what) {
  return Error("config field '" + key + "': " + what);
}

template <typename T>
T get_field(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw field_error(key, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) throw field_error(key, "expected an integer");
    } else {
      if (!v.is_number()) throw field_error(key, "expected a number");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw field_error(key, e.what());
  }
}

}  // namespace detail

/// Applies the keys of a flat JSON object on top of `c`.
inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw Error("config: top level must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    using detail::get_field;
    if (k == "n") c.n = get_field<int>(v, k);
    else if (k == "N") c.N = get_field<int>(v, k);
    else if (k == "L") c.L = get_field<double>(v, k);
    else if (k == "potential") c.potential = get_field<std::string>(v, k);
    else if (k == "p") c.p = get_field<double>(v, k);
    else if (k == "q") c.q = get_field<double>(v, k);
    else if (k == "r") c.r = get_field<double>(v, k);
    else if (k == "theta") c.theta = get_field<double>(v, k);
    else if (k == "delta") c.delta = get_field<double>(v, k);
    else if (k == "eta") c.eta = get_field<double>(v, k);
    else if (k == "l0") c.l0 = get_field<double>(v, k);
    else if (k == "exponent") c.exponent = v.is_null() ? std::nullopt : std::optional(get_field<double>(v, k));
    else if (k == "lambda") c.lambda = v.is_null() ? std::nullopt : std::optional(get_field<double>(v, k));
    else if (k == "A") c.A = v.is_null() ? std::nullopt : std::optional(get_field<double>(v, k));
    else if (k == "K") c.K = get_field<int>(v, k);
    else if (k == "tol") c.tol = get_field<double>(v, k);
    else if (k == "variant") c.variant = get_field<std::string>(v, k);
    else if (k == "ladder_ratio") c.ladder_ratio = get_field<double>(v, k);
    else if (k == "weight") c.weight = get_field<std::string>(v, k);
    else if (k == "gamma") c.gamma = get_field<double>(v, k);
    else if (k == "a") c.a = get_field<double>(v, k);
    else if (k == "input") c.input = get_field<std::string>(v, k);
    else if (k == "out") c.out = get_field<std::string>(v, k);
    else if (k == "seed") c.seed = get_field<std::uint64_t>(v, k);
    else if (k == "scale") c.scale = get_field<double>(v, k);
    else throw Error("config: unknown field '" + k + "'");
  }
}

/// Checks the grid and generic fields; command-specific checks live with the
/// commands.
inline void validate(const RunConfig& c) {
  using detail::field_error;
  if (c.n < 1 || c.n > kMaxDim) throw field_error("n", "must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (c.N < 4 || c.N % 2 != 0) throw field_error("N", "must be an even integer >= 4");
  if (!(c.L > 0.0) || !std::isfinite(c.L)) throw field_error("L", "must be positive");
  if (!(c.theta >= 0.0)) throw field_error("theta", "must be nonnegative");
  if (!(c.eta >= 0.0)) throw field_error("eta", "must be nonnegative");
  if (!(c.ladder_ratio > 1.0)) throw field_error("ladder_ratio", "must exceed 1");
  if (!(c.scale > 0.0)) throw field_error("scale", "must be positive");
  if (c.exponent && !(*c.exponent >= 0.0)) throw field_error("exponent", "must be nonnegative");
}

/// Defaults, then the file (an empty file means all defaults), then validation.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  RunConfig c;
  bool blank = true;
  for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
  if (!blank) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error("config: parse error: " + std::string(e.what()));
    }
    apply_json(c, j);
  }
  validate(c);
  return c;
}

}  // namespace swl
