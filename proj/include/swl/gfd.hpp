#pragma once

// GFD grid-function files: a JSON manifest
//   {"dim", "points_per_axis", "half_width", "dtype": "f64le", "payload"}
// plus row-major little-endian doubles. The payload is either a path to a raw
// file (relative paths resolve against the manifest's directory) or the bytes
// inline as "base64:<data>".

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swl/grid.hpp"

namespace swl::gfd {

namespace detail {

inline constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += (i + 1 < bytes.size()) ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r' || c == ' ') continue;
    const int v = value(c);
    require(v >= 0, "gfd: invalid base64 payload");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

inline std::vector<std::uint8_t> to_bytes(std::span<const double> values) {
  std::vector<std::uint8_t> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<std::uint8_t>(u >> (8 * b));
  }
  return bytes;
}

inline std::vector<double> from_bytes(const std::vector<std::uint8_t>& bytes) {
  require(bytes.size() % 8 == 0, "gfd: payload is not a whole number of f64 values");
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(u);
  }
  return values;
}

}  // namespace detail

inline nlohmann::json manifest(const GridSpec& spec) {
  return {{"dim", spec.dim()},
          {"points_per_axis", spec.points()},
          {"half_width", spec.half_width()},
          {"dtype", "f64le"}};
}

/// Manifest with the payload inlined as base64.
inline nlohmann::json to_inline_json(const GridFunction& f) {
  auto m = manifest(f.spec());
  m["payload"] = "base64:" + detail::base64_encode(detail::to_bytes(f.values()));
  return m;
}

inline GridFunction from_json(const nlohmann::json& m, const std::filesystem::path& base_dir = {}) {
  require(m.is_object(), "gfd: manifest must be a JSON object");
  for (const char* key : {"dim", "points_per_axis", "half_width", "dtype", "payload"})
    require(m.contains(key), std::string("gfd: manifest missing field '") + key + "'");
  require(m["dtype"] == "f64le", "gfd: unsupported dtype (expected f64le)");
  GridSpec spec(m["dim"].get<int>(), m["half_width"].get<double>(), m["points_per_axis"].get<int>());
  const std::string payload = m["payload"].get<std::string>();
  std::vector<std::uint8_t> bytes;
  if (payload.rfind("base64:", 0) == 0) {
    bytes = detail::base64_decode(std::string_view(payload).substr(7));
  } else {
    std::filesystem::path p(payload);
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), "gfd: cannot open payload " + p.string());
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  require(bytes.size() == spec.size() * 8,
          "gfd: payload length " + std::to_string(bytes.size()) + " bytes does not match grid of " +
              std::to_string(spec.size()) + " samples");
  return GridFunction(spec, detail::from_bytes(bytes));
}

/// Writes <stem>.gfd.json and <stem>.f64 next to each other. Extra fields
/// (e.g. the resolved run configuration) are merged into the manifest.
inline std::filesystem::path write(const GridFunction& f, const std::filesystem::path& stem,
                                   const nlohmann::json& extra = nlohmann::json::object()) {
  const std::filesystem::path raw = stem.string() + ".f64";
  const std::filesystem::path man = stem.string() + ".gfd.json";
  {
    const auto bytes = detail::to_bytes(f.values());
    std::ofstream out(raw, std::ios::binary);
    require(static_cast<bool>(out), "gfd: cannot write " + raw.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  auto m = manifest(f.spec());
  m["payload"] = raw.filename().string();
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(man);
  require(static_cast<bool>(out), "gfd: cannot write " + man.string());
  out << m.dump(2) << "\n";
  return man;
}

inline GridFunction read(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  require(static_cast<bool>(in), "gfd: cannot open " + manifest_path.string());
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("gfd: malformed manifest: " + std::string(e.what()));
  }
  return from_json(m, manifest_path.parent_path());
}

}  // namespace swl::gfd
