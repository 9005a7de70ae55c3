#pragma once

// Uniform cell-centered lattice on the box [-L, L]^n, grid functions living on
// it, axis-aligned cubes clipped to the box, and the dyadic lattice.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swl/error.hpp"

namespace swl {

inline constexpr int kMaxDim = 4;
using Index = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int dim, double half_width, int points_per_axis)
      : dim_(dim), half_width_(half_width), points_(points_per_axis) {
    require(dim >= 1 && dim <= kMaxDim, "grid: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    require(half_width > 0.0 && std::isfinite(half_width), "grid: half_width must be positive");
    require(points_per_axis >= 4 && points_per_axis % 2 == 0, "grid: points_per_axis must be even and >= 4");
    spacing_ = 2.0 * half_width_ / points_;
    size_ = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
      strides_[a] = size_;
      size_ *= static_cast<std::size_t>(points_);
    }
  }

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return std::pow(spacing_, dim_); }
  double volume() const { return std::pow(2.0 * half_width_, dim_); }
  double diameter() const { return 2.0 * half_width_ * std::sqrt(static_cast<double>(dim_)); }
  std::size_t stride(int axis) const { return strides_[axis]; }

  double coordinate(int i) const { return -half_width_ + (i + 0.5) * spacing_; }

  std::size_t flatten(const Index& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat += static_cast<std::size_t>(idx[a]) * strides_[a];
    return flat;
  }

  Index unflatten(std::size_t flat) const {
    Index idx{};
    for (int a = 0; a < dim_; ++a) {
      idx[a] = static_cast<int>(flat / strides_[a]);
      flat %= strides_[a];
    }
    return idx;
  }

  Point point(std::size_t flat) const {
    Index idx = unflatten(flat);
    Point x{};
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(idx[a]);
    return x;
  }

  double norm_of_point(std::size_t flat) const {
    Point x = point(flat);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += x[a] * x[a];
    return std::sqrt(s);
  }

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && points_ == o.points_;
  }

 private:
  int dim_ = 1;
  double half_width_ = 1.0;
  int points_ = 4;
  double spacing_ = 0.5;
  std::size_t size_ = 4;
  std::array<std::size_t, kMaxDim> strides_{};
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
  require(a == b, "grid: functions live on different grids");
}

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridSpec spec, std::vector<double> samples) : spec_(spec), samples_(std::move(samples)) {
    require(samples_.size() == spec_.size(), "grid function: sample count does not match grid");
    for (double v : samples_) require(std::isfinite(v), "grid function: non-finite sample");
  }

  static GridFunction constant(const GridSpec& spec, double c) {
    return GridFunction(spec, std::vector<double>(spec.size(), c));
  }

  // fn receives the cell-center coordinates of each sample.
  template <typename Fn>
  static GridFunction from_points(const GridSpec& spec, Fn&& fn) {
    std::vector<double> v(spec.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.point(i));
    return GridFunction(spec, std::move(v));
  }

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return samples_; }
  const std::vector<double>& data() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  template <typename Fn>
  GridFunction map(Fn&& fn) const {
    std::vector<double> v(samples_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(samples_[i]);
    return GridFunction(spec_, std::move(v));
  }

  GridFunction abs() const {
    return map([](double v) { return std::fabs(v); });
  }

  double max() const { return *std::max_element(samples_.begin(), samples_.end()); }
  double min() const { return *std::min_element(samples_.begin(), samples_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::fabs(v));
    return m;
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, std::plus<>());
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, std::minus<>());
  }
  friend GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    return zip(a, b, std::multiplies<>());
  }
  friend GridFunction operator*(double c, const GridFunction& a) {
    return a.map([c](double v) { return c * v; });
  }

  template <typename Op>
  static GridFunction zip(const GridFunction& a, const GridFunction& b, Op op) {
    require_same_grid(a.spec_, b.spec_);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a.samples_[i], b.samples_[i]);
    return GridFunction(a.spec_, std::move(v));
  }

 private:
  GridSpec spec_;
  std::vector<double> samples_;
};

class VectorGridFunction {
 public:
  explicit VectorGridFunction(std::vector<GridFunction> components) : components_(std::move(components)) {
    require(!components_.empty(), "vector grid function: needs at least one component");
    for (const auto& c : components_) require_same_grid(components_.front().spec(), c.spec());
  }

  const GridSpec& spec() const { return components_.front().spec(); }
  std::size_t count() const { return components_.size(); }
  const GridFunction& operator[](std::size_t k) const { return components_[k]; }
  const std::vector<GridFunction>& components() const { return components_; }

 private:
  std::vector<GridFunction> components_;
};

/// A strictly positive grid function.
class Weight {
 public:
  explicit Weight(GridFunction values) : values_(std::move(values)) {
    for (double v : values_.values()) require(v > 0.0, "weight: samples must be strictly positive");
  }
  static Weight unit(const GridSpec& spec) { return Weight(GridFunction::constant(spec, 1.0)); }

  const GridFunction& values() const { return values_; }
  const GridSpec& spec() const { return values_.spec(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  GridFunction values_;
};

/// Axis-aligned cube. lo/hi are the half-open cell ranges after clipping to
/// the domain; center and side keep the unclipped geometry.
struct Cube {
  Index lo{};
  Index hi{};
  Point center{};
  double side = 0.0;

  std::size_t cell_count(int dim) const {
    std::size_t c = 1;
    for (int a = 0; a < dim; ++a) {
      if (hi[a] <= lo[a]) return 0;
      c *= static_cast<std::size_t>(hi[a] - lo[a]);
    }
    return c;
  }

  bool empty(int dim) const { return cell_count(dim) == 0; }

  bool contains(const Index& idx, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (idx[a] < lo[a] || idx[a] >= hi[a]) return false;
    return true;
  }

  double clipped_volume(const GridSpec& spec) const {
    return static_cast<double>(cell_count(spec.dim())) * spec.cell_volume();
  }

  // Cube of side (2k+1)h centered on a cell center.
  static Cube centered(const GridSpec& spec, const Index& cell, int half_cells) {
    Cube q;
    q.side = (2 * half_cells + 1) * spec.spacing();
    for (int a = 0; a < spec.dim(); ++a) {
      q.lo[a] = std::max(0, cell[a] - half_cells);
      q.hi[a] = std::min(spec.points(), cell[a] + half_cells + 1);
      q.center[a] = spec.coordinate(cell[a]);
    }
    return q;
  }

  // Cells whose centers lie in the closed cube of the given center and side.
  static Cube from_box(const GridSpec& spec, const Point& center, double side) {
    Cube q;
    q.side = side;
    q.center = center;
    const double h = spec.spacing();
    const double L = spec.half_width();
    const double slack = 1e-9 * h;
    for (int a = 0; a < spec.dim(); ++a) {
      const double lo_x = center[a] - 0.5 * side - slack;
      const double hi_x = center[a] + 0.5 * side + slack;
      // cell i has center -L + (i + 0.5)h
      int lo = static_cast<int>(std::ceil((lo_x + L) / h - 0.5));
      int hi = static_cast<int>(std::floor((hi_x + L) / h - 0.5)) + 1;
      q.lo[a] = std::clamp(lo, 0, spec.points());
      q.hi[a] = std::clamp(hi, 0, spec.points());
    }
    return q;
  }

  Cube dilated(const GridSpec& spec, double factor) const { return from_box(spec, center, side * factor); }

  // Cell nearest the geometric center (ties resolved toward the upper cell).
  Index center_cell(const GridSpec& spec) const {
    Index c{};
    const double h = spec.spacing();
    for (int a = 0; a < spec.dim(); ++a) {
      int i = static_cast<int>(std::floor((center[a] + spec.half_width()) / h));
      c[a] = std::clamp(i, std::max(lo[a], 0), std::max(lo[a], hi[a] - 1));
    }
    return c;
  }

  template <typename Fn>
  void for_each_cell(const GridSpec& spec, Fn&& fn) const {
    if (empty(spec.dim())) return;
    Index idx = lo;
    const int n = spec.dim();
    while (true) {
      fn(spec.flatten(idx));
      int a = n - 1;
      while (a >= 0) {
        if (++idx[a] < hi[a]) break;
        idx[a] = lo[a];
        --a;
      }
      if (a < 0) return;
    }
  }
};

/// Dyadic cubes tiling the domain: level j has 2^j cubes per axis of side
/// 2L 2^-j. The depth stops where a cube would no longer be a whole number of
/// cells.
class DyadicLattice {
 public:
  explicit DyadicLattice(const GridSpec& spec, int max_depth = 64) : spec_(spec) {
    depth_ = 0;
    int m = spec.points();
    while (m % 2 == 0 && depth_ < max_depth) {
      m /= 2;
      ++depth_;
    }
  }

  const GridSpec& spec() const { return spec_; }
  int depth() const { return depth_; }
  int cells_per_side(int level) const { return spec_.points() >> level; }
  int cubes_per_axis(int level) const { return 1 << level; }
  std::size_t cubes_at(int level) const {
    return static_cast<std::size_t>(1) << (level * spec_.dim());
  }

  Cube cube(int level, const Index& block) const {
    const int m = cells_per_side(level);
    Cube q;
    q.side = m * spec_.spacing();
    for (int a = 0; a < spec_.dim(); ++a) {
      q.lo[a] = block[a] * m;
      q.hi[a] = q.lo[a] + m;
      q.center[a] = -spec_.half_width() + (q.lo[a] + 0.5 * m) * spec_.spacing();
    }
    return q;
  }

  Cube cube(int level, std::size_t ordinal) const { return cube(level, block_of(level, ordinal)); }

  Index block_of(int level, std::size_t ordinal) const {
    Index b{};
    const std::size_t per = static_cast<std::size_t>(cubes_per_axis(level));
    for (int a = spec_.dim() - 1; a >= 0; --a) {
      b[a] = static_cast<int>(ordinal % per);
      ordinal /= per;
    }
    return b;
  }

  std::size_t ordinal_of(int level, const Index& block) const {
    std::size_t o = 0;
    const std::size_t per = static_cast<std::size_t>(cubes_per_axis(level));
    for (int a = 0; a < spec_.dim(); ++a) o = o * per + static_cast<std::size_t>(block[a]);
    return o;
  }

  // Block of the level-j cube containing the given cell.
  Index block_containing(int level, const Index& cell) const {
    Index b{};
    const int m = cells_per_side(level);
    for (int a = 0; a < spec_.dim(); ++a) b[a] = cell[a] / m;
    return b;
  }

 private:
  GridSpec spec_;
  int depth_ = 0;
};

/// Geometric radii ladder from h up to the domain diameter.
inline std::vector<double> radii_ladder(const GridSpec& spec, double ratio = std::pow(2.0, 0.25)) {
  require(ratio > 1.0, "ladder: ratio must exceed 1");
  std::vector<double> radii;
  const double top = spec.diameter();
  for (double r = spec.spacing(); r < top * (1.0 + 1e-12); r *= ratio) radii.push_back(r);
  if (radii.back() < top * (1.0 - 1e-12)) radii.push_back(top);
  return radii;
}

/// Snaps lengths to odd cell counts: side (2k+1)h closest to r, deduplicated,
/// capped so a centered cube can span the whole domain.
inline std::vector<int> cube_half_widths(const GridSpec& spec, const std::vector<double>& lengths) {
  std::vector<int> ks;
  for (double r : lengths) {
    int k = static_cast<int>(std::lround((r / spec.spacing() - 1.0) / 2.0));
    k = std::clamp(k, 0, spec.points() - 1);
    ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

inline std::vector<int> default_half_widths(const GridSpec& spec) {
  return cube_half_widths(spec, radii_ladder(spec));
}

/// Finite cube family used for weight constants: every dyadic cube plus
/// ladder-sized cubes centered at every stride-th grid point.
struct CubeFamily {
  std::vector<int> half_widths;
  int center_stride = 4;
  bool include_dyadic = true;

  static CubeFamily standard(const GridSpec& spec) {
    CubeFamily fam;
    fam.half_widths = default_half_widths(spec);
    return fam;
  }

  std::vector<Cube> cubes(const GridSpec& spec) const {
    std::vector<Cube> out;
    if (include_dyadic) {
      DyadicLattice lattice(spec);
      for (int j = 0; j <= lattice.depth(); ++j)
        for (std::size_t o = 0; o < lattice.cubes_at(j); ++o) out.push_back(lattice.cube(j, o));
    }
    if (center_stride > 0 && !half_widths.empty()) {
      const int n = spec.dim();
      const int N = spec.points();
      Index c{};
      const int off = center_stride / 2;
      for (int a = 0; a < n; ++a) c[a] = off;
      while (true) {
        for (int k : half_widths) out.push_back(Cube::centered(spec, c, k));
        int a = n - 1;
        while (a >= 0) {
          c[a] += center_stride;
          if (c[a] < N) break;
          c[a] = off;
          --a;
        }
        if (a < 0) break;
      }
    }
    return out;
  }

  std::string describe() const {
    std::string s = "dyadic=" + std::string(include_dyadic ? "all" : "none") +
                    ";center_stride=" + std::to_string(center_stride) + ";half_widths=";
    for (std::size_t i = 0; i < half_widths.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(half_widths[i]);
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// Integration and norms (cell-centered Riemann sums).

inline double integrate(const GridFunction& f) {
  long double s = 0.0L;
  for (double v : f.values()) s += v;
  return static_cast<double>(s * f.spec().cell_volume());
}

inline double integrate(const GridFunction& f, const Cube& region) {
  const GridSpec& spec = f.spec();
  require(!region.empty(spec.dim()), "integrate: empty region");
  long double s = 0.0L;
  region.for_each_cell(spec, [&](std::size_t i) { s += f[i]; });
  return static_cast<double>(s * spec.cell_volume());
}

inline double cube_average(const GridFunction& f, const Cube& q) {
  const GridSpec& spec = f.spec();
  require(!q.empty(spec.dim()), "cube_average: empty region");
  long double s = 0.0L;
  q.for_each_cell(spec, [&](std::size_t i) { s += std::fabs(f[i]); });
  return static_cast<double>(s / static_cast<long double>(q.cell_count(spec.dim())));
}

enum class NormMode { Strong, Weak };

namespace detail {

inline double weight_at(const Weight* w, std::size_t i) { return w ? (*w)[i] : 1.0; }

}  // namespace detail

/// L^p(w) norm, or the L^{p,inf}(w) quasi-norm sup_t t * w({|f| > t})^{1/p}.
/// p = +inf gives the (weighted) essential supremum.
inline double norm(const GridFunction& f, double p, const Weight* weight, NormMode mode = NormMode::Strong) {
  require(p > 0.0, "norm: p must be positive");
  if (weight) require_same_grid(f.spec(), weight->spec());
  const double dv = f.spec().cell_volume();
  if (std::isinf(p)) return f.max_abs();
  if (mode == NormMode::Strong) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a = std::fabs(f[i]);
      if (a > 0.0) s += static_cast<long double>(std::pow(a, p)) * detail::weight_at(weight, i);
    }
    return static_cast<double>(std::pow(static_cast<double>(s * dv), 1.0 / p));
  }
  // Weak: the sup over t is attained as t increases to a sample magnitude v,
  // where the level set is {|f| >= v}.
  std::vector<std::pair<double, double>> mag(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mag[i] = {std::fabs(f[i]), detail::weight_at(weight, i)};
  std::sort(mag.begin(), mag.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  long double measure = 0.0L;
  double best = 0.0;
  std::size_t i = 0;
  while (i < mag.size() && mag[i].first > 0.0) {
    const double v = mag[i].first;
    while (i < mag.size() && mag[i].first == v) measure += mag[i++].second;
    best = std::max(best, v * std::pow(static_cast<double>(measure * dv), 1.0 / p));
  }
  return best;
}

inline double norm(const GridFunction& f, double p, NormMode mode = NormMode::Strong) {
  return norm(f, p, nullptr, mode);
}

inline double norm(const GridFunction& f, double p, const Weight& w, NormMode mode = NormMode::Strong) {
  return norm(f, p, &w, mode);
}

/// Pointwise l^r norm across components.
inline GridFunction vector_norm_pointwise(const VectorGridFunction& F, double r) {
  require(r > 0.0, "vector_norm_pointwise: r must be positive");
  const std::size_t n = F.spec().size();
  std::vector<double> out(n, 0.0);
  if (std::isinf(r)) {
    for (const auto& c : F.components())
      for (std::size_t i = 0; i < n; ++i) out[i] = std::max(out[i], std::fabs(c[i]));
    return GridFunction(F.spec(), std::move(out));
  }
  for (std::size_t i = 0; i < n; ++i) {
    // scale by the largest magnitude so large r cannot overflow
    double m = 0.0;
    for (const auto& c : F.components()) m = std::max(m, std::fabs(c[i]));
    if (m == 0.0) continue;
    double s = 0.0;
    for (const auto& c : F.components()) s += std::pow(std::fabs(c[i]) / m, r);
    out[i] = m * std::pow(s, 1.0 / r);
  }
  return GridFunction(F.spec(), std::move(out));
}

}  // namespace swl
