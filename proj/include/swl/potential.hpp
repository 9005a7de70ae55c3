#pragma once

// Potentials V >= 0, the reverse-Hoelder check, the critical radius
// rho(x) = 1/m_V(x) = sup{r : r^{2-n} int_{B(x,r)} V <= 1}, and the
// penalization factors built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "swl/box_sums.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/parallel.hpp"
#include "swl/random.hpp"

namespace swl {

enum class ClosedForm { Custom, One, SquareNorm };

inline const char* closed_form_name(ClosedForm c) {
  switch (c) {
    case ClosedForm::One: return "one";
    case ClosedForm::SquareNorm: return "square_norm";
    default: return "custom";
  }
}

class Potential {
 public:
  explicit Potential(GridFunction values, ClosedForm tag = ClosedForm::Custom)
      : values_(std::move(values)), tag_(tag) {
    bool nonzero = false;
    for (double v : values_.values()) {
      require(v >= 0.0, "potential: samples must be nonnegative");
      nonzero = nonzero || v > 0.0;
    }
    require(nonzero, "potential: must not vanish identically");
    if (tag_ != ClosedForm::Custom) {
      const GridFunction expected = sample(values_.spec(), tag_);
      for (std::size_t i = 0; i < values_.size(); ++i)
        require(std::fabs(values_[i] - expected[i]) <= 1e-10 * std::max(1.0, std::fabs(expected[i])),
                std::string("potential: samples disagree with closed form '") + closed_form_name(tag_) + "'");
    }
  }

  static Potential one(const GridSpec& spec) { return Potential(sample(spec, ClosedForm::One), ClosedForm::One); }
  static Potential square_norm(const GridSpec& spec) {
    return Potential(sample(spec, ClosedForm::SquareNorm), ClosedForm::SquareNorm);
  }
  static Potential constant(const GridSpec& spec, double c) {
    return Potential(GridFunction::constant(spec, c), c == 1.0 ? ClosedForm::One : ClosedForm::Custom);
  }

  const GridFunction& values() const { return values_; }
  const GridSpec& spec() const { return values_.spec(); }
  ClosedForm closed_form() const { return tag_; }

 private:
  static GridFunction sample(const GridSpec& spec, ClosedForm tag) {
    if (tag == ClosedForm::One) return GridFunction::constant(spec, 1.0);
    return GridFunction::from_points(spec, [&](const Point& x) {
      double s = 0.0;
      for (int a = 0; a < spec.dim(); ++a) s += x[a] * x[a];
      return s;
    });
  }

  GridFunction values_;
  ClosedForm tag_;
};

// ---------------------------------------------------------------------------
// Reverse Hoelder.

struct ReverseHolderReport {
  double q = 2.0;  // +inf encodes the B_inf check
  double constant = 1.0;
  Cube worst_ball;
};

inline json to_json_value(const ReverseHolderReport& r, int dim) {
  return {{"q", number_or_inf(r.q)}, {"constant", number_or_inf(r.constant)}, {"worst_ball", cube_json(r.worst_ball, dim)}};
}

/// sup over the family of (avg_Q V^q)^{1/q} / avg_Q V, balls realized as cubes.
inline ReverseHolderReport check_reverse_holder(const Potential& V, double q, const CubeFamily& family) {
  require(q > 1.0, "reverse holder: q must exceed 1");
  const GridSpec& spec = V.spec();
  const auto cubes = family.cubes(spec);
  require(!cubes.empty(), "reverse holder: empty cube family");
  const BoxSums sums(V.values());
  const bool sup_norm = std::isinf(q);
  std::optional<BoxSums> powered;
  if (!sup_norm) powered.emplace(V.values().map([q](double v) { return std::pow(v, q); }));

  std::vector<double> ratio(cubes.size(), 0.0);
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Cube& Q = cubes[c];
    const long double count = static_cast<long double>(Q.cell_count(spec.dim()));
    const double avg = static_cast<double>(sums.sum(Q) / count);
    double top;
    if (sup_norm) {
      top = 0.0;
      Q.for_each_cell(spec, [&](std::size_t i) { top = std::max(top, V.values()[i]); });
    } else {
      top = std::pow(static_cast<double>(powered->sum(Q) / count), 1.0 / q);
    }
    if (avg > 0.0) ratio[c] = top / avg;
    else if (top > 0.0) ratio[c] = std::numeric_limits<double>::infinity();
    else ratio[c] = 0.0;  // 0/0: V vanishes on the cube
  });
  ReverseHolderReport rep;
  rep.q = q;
  rep.constant = 0.0;
  std::size_t worst = 0;
  for (std::size_t c = 0; c < cubes.size(); ++c)
    if (ratio[c] > rep.constant) {
      rep.constant = ratio[c];
      worst = c;
    }
  rep.worst_ball = cubes[worst];
  return rep;
}

// ---------------------------------------------------------------------------
// Critical radius.

inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

struct CriticalRadiusOptions {
  double ladder_ratio = std::pow(2.0, 0.25);
  double tolerance = 1e-4;  // relative, for the bisection between rungs
};

struct CriticalRadiusField {
  GridFunction rho;
  std::vector<double> radii_ladder;
  double tolerance = 1e-4;
  std::vector<std::uint8_t> clamped;  // 1 where even the largest radius satisfied the constraint
  std::size_t clamped_count = 0;

  double at(std::size_t i) const { return rho[i]; }
  double operator[](std::size_t i) const { return rho[i]; }
  double m_V(std::size_t i) const { return 1.0 / rho[i]; }
  double min() const { return rho.min(); }
  double max() const { return rho.max(); }

  // rho at the grid point nearest to x
  double nearest(const Point& x) const {
    const GridSpec& spec = rho.spec();
    Index idx{};
    for (int a = 0; a < spec.dim(); ++a) {
      const int i = static_cast<int>(std::floor((x[a] + spec.half_width()) / spec.spacing()));
      idx[a] = std::clamp(i, 0, spec.points() - 1);
    }
    return rho[spec.flatten(idx)];
  }
};

namespace detail {

// Offsets around a cell, sorted by the distance at which a ball centered on
// the cell first reaches them.
struct BallStencil {
  struct Entry {
    Index offset;
    double near;   // distance - half support width: first contact
    double dist;   // center-to-center distance
    double half;   // half support width of the cell along the offset direction
    std::ptrdiff_t flat = 0;  // offset in flattened indexing
    int reach = 0;            // max |offset component|
  };
  std::vector<Entry> entries;

  explicit BallStencil(const GridSpec& spec) {
    const int n = spec.dim();
    const int N = spec.points();
    const double h = spec.spacing();
    Index o{};
    for (int a = 0; a < n; ++a) o[a] = -(N - 1);
    while (true) {
      double d2 = 0.0, l1 = 0.0;
      for (int a = 0; a < n; ++a) {
        d2 += static_cast<double>(o[a]) * o[a];
        l1 += std::abs(o[a]);
      }
      Entry e{o, 0.0, 0.0, 0.0};
      std::ptrdiff_t stride = 1;
      for (int a = n - 1; a >= 0; --a) {
        e.flat += o[a] * stride;
        stride *= N;
        e.reach = std::max(e.reach, std::abs(o[a]));
      }
      if (d2 > 0.0) {
        e.dist = h * std::sqrt(d2);
        e.half = 0.5 * h * l1 / std::sqrt(d2);
        e.near = e.dist - e.half;
      }
      entries.push_back(e);
      int a = n - 1;
      while (a >= 0) {
        if (++o[a] <= N - 1) break;
        o[a] = -(N - 1);
        --a;
      }
      if (a < 0) break;
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.near < y.near; });
  }
};

}  // namespace detail

/// Approximate V-mass of B(x, r), x a cell center. Partially covered cells
/// contribute through a linear ramp across their support width along the
/// radial direction; the center cell contributes min(1, |B|/h^n). The result
/// is nondecreasing in r. Summation stops early once it exceeds `stop_above`.
/// A closed-form tag lets the ball reach past the box: cells outside take
/// the analytic value at their (virtual) centers instead of zero.
inline double ball_mass(const GridFunction& V, const detail::BallStencil& stencil, std::size_t center, double r,
                        double stop_above = std::numeric_limits<double>::infinity(),
                        ClosedForm exterior = ClosedForm::Custom) {
  const GridSpec& spec = V.spec();
  const int n = spec.dim();
  const int N = spec.points();
  const double h = spec.spacing();
  const double dv = spec.cell_volume();
  const Index c = spec.unflatten(center);
  const double center_fraction = std::min(1.0, unit_ball_volume(n) * std::pow(r / h, n));
  int margin = N;  // offsets with reach <= margin stay inside the box
  for (int a = 0; a < n; ++a) margin = std::min({margin, c[a], N - 1 - c[a]});
  const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(center);
  double mass = 0.0;
  for (const auto& e : stencil.entries) {
    if (e.near >= r) break;
    bool inside = e.reach <= margin;
    if (!inside) {
      inside = true;
      for (int a = 0; a < n && inside; ++a) {
        const int i = c[a] + e.offset[a];
        inside = i >= 0 && i < N;
      }
    }
    double v;
    if (inside) {
      v = V[static_cast<std::size_t>(base + e.flat)];
    } else if (exterior == ClosedForm::One) {
      v = 1.0;
    } else if (exterior == ClosedForm::SquareNorm) {
      v = 0.0;
      for (int a = 0; a < n; ++a) {
        const double x = -spec.half_width() + (c[a] + e.offset[a] + 0.5) * h;
        v += x * x;
      }
    } else {
      continue;
    }
    if (v == 0.0) continue;
    double frac;
    if (e.dist == 0.0) frac = center_fraction;
    else frac = std::clamp((r - e.near) / (2.0 * e.half), 0.0, 1.0);
    mass += v * frac * dv;
    if (mass > stop_above) break;
  }
  return mass;
}

inline CriticalRadiusField critical_radius_field(const Potential& V, const CriticalRadiusOptions& opt = {}) {
  const GridSpec& spec = V.spec();
  const int n = spec.dim();
  const detail::BallStencil stencil(spec);
  const BoxSums sums(V.values());
  const int N = spec.points();
  const double h = spec.spacing();
  const double dv = spec.cell_volume();
  CriticalRadiusField out;
  out.radii_ladder = radii_ladder(spec, opt.ladder_ratio);
  out.tolerance = opt.tolerance;
  const auto& ladder = out.radii_ladder;
  const double top = ladder.back();

  // r^{2-n} * mass(r) <= 1  <=>  mass(r) <= r^{n-2}
  auto satisfied = [&](std::size_t x, double r) {
    const double budget = std::pow(r, n - 2);
    return ball_mass(V.values(), stencil, x, r, budget, V.closed_form()) <= budget;
  };

  std::vector<double> rho(spec.size());
  std::vector<std::uint8_t> clamped(spec.size(), 0);
  parallel_for(spec.size(), [&](std::size_t x) {
    // Largest satisfying rung. For n <= 2 the constraint is monotone in r.
    // For n >= 3 the mass is nondecreasing in r, so a failing rung with mass m
    // rules out every larger rung with r^{n-2} < m without scanning it.
    std::ptrdiff_t best = -1;
    const double cap = std::pow(top, n - 2);
    double known = 0.0;  // a lower bound on mass(r) for all r past the last failure
    const Index c = spec.unflatten(x);
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      const double budget = std::pow(ladder[k], n - 2);
      if (n <= 2) {
        if (satisfied(x, ladder[k])) best = static_cast<std::ptrdiff_t>(k);
        else break;
        continue;
      }
      if (budget < known) continue;
      // Cells entirely inside the inscribed cube count fully: an O(1) lower bound.
      const int j = static_cast<int>(std::floor(ladder[k] / (std::sqrt(static_cast<double>(n)) * h) - 0.5));
      if (j >= 0) {
        Index lo{}, hi{};
        for (int a = 0; a < n; ++a) {
          lo[a] = std::max(0, c[a] - j);
          hi[a] = std::min(N, c[a] + j + 1);
        }
        const double lower = static_cast<double>(sums.sum(lo, hi)) * dv;
        if (lower > budget) {
          known = std::max(known, lower);
          if (known > cap) break;
          continue;
        }
      }
      const double m = ball_mass(V.values(), stencil, x, ladder[k], budget, V.closed_form());
      if (m <= budget) best = static_cast<std::ptrdiff_t>(k);
      else known = std::max(known, m);
    }
    if (best == static_cast<std::ptrdiff_t>(ladder.size()) - 1) {
      rho[x] = top;
      clamped[x] = 1;
      return;
    }
    // Root of g(r) = mass(r) - r^{n-2} between the rungs: g is continuous,
    // g(lo) <= 0 < g(hi). Illinois-modified regula falsi, bisection fallback.
    double lo = best < 0 ? 0.0 : ladder[static_cast<std::size_t>(best)];
    double hi = ladder[static_cast<std::size_t>(best + 1)];
    auto g = [&](double r) {
      const double budget = std::pow(r, n - 2);
      return ball_mass(V.values(), stencil, x, r, std::numeric_limits<double>::infinity(), V.closed_form()) - budget;
    };
    double glo = lo > 0.0 ? g(lo) : -std::numeric_limits<double>::infinity();
    double ghi = g(hi);
    int side = 0;
    for (int iter = 0; iter < 200 && hi - lo > opt.tolerance * hi; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (std::isfinite(glo) && ghi > glo) {
        const double t = lo - glo * (hi - lo) / (ghi - glo);
        // stay strictly inside and away from the ends so the bracket shrinks
        if (t > lo + 0.01 * (hi - lo) && t < hi - 0.01 * (hi - lo)) mid = t;
      }
      const double gm = g(mid);
      if (gm <= 0.0) {
        lo = mid;
        glo = gm;
        if (side == -1) ghi *= 0.5;
        side = -1;
      } else {
        hi = mid;
        ghi = gm;
        if (side == 1) glo *= 0.5;
        side = 1;
      }
    }
    rho[x] = lo > 0.0 ? lo : 0.5 * hi;
  });
  out.rho = GridFunction(spec, std::move(rho));
  out.clamped = std::move(clamped);
  out.clamped_count = static_cast<std::size_t>(std::count(out.clamped.begin(), out.clamped.end(), 1));
  return out;
}

/// Field with the same value everywhere; used by the (1+r)-penalized operators
/// and by tests that need a known rho.
inline CriticalRadiusField constant_radius_field(const GridSpec& spec, double value) {
  CriticalRadiusField out;
  out.rho = GridFunction::constant(spec, value);
  out.radii_ladder = radii_ladder(spec);
  out.clamped.assign(spec.size(), 0);
  return out;
}

inline json to_json_value(const CriticalRadiusField& f) {
  return {{"radii_ladder", f.radii_ladder},
          {"tolerance", f.tolerance},
          {"clamped_count", f.clamped_count},
          {"rho_min", f.min()},
          {"rho_max", f.max()}};
}

// ---------------------------------------------------------------------------
// Penalization.

/// (1 + r / rho(x0))^theta, rho read at the grid point nearest x0.
inline double psi_ball(const Point& center, double r, const CriticalRadiusField& rho, double theta) {
  require(theta >= 0.0, "psi_ball: theta must be nonnegative");
  if (theta == 0.0) return 1.0;
  return std::pow(1.0 + r / rho.nearest(center), theta);
}

/// (1 + side / max_Q rho)^theta over the grid points of Q.
inline double psi_cube_dyadic(const Cube& Q, const CriticalRadiusField& rho, double theta) {
  require(theta >= 0.0, "psi_cube_dyadic: theta must be nonnegative");
  if (theta == 0.0) return 1.0;
  const GridSpec& spec = rho.rho.spec();
  double m = 0.0;
  Q.for_each_cell(spec, [&](std::size_t i) { m = std::max(m, rho.rho[i]); });
  require(m > 0.0, "psi_cube_dyadic: empty cube");
  return std::pow(1.0 + Q.side / m, theta);
}

// ---------------------------------------------------------------------------
// Regularity of m_V: (1/C0)(1+|x-y|m(x))^{-l0} <= m(x)/m(y) <= C0 (1+|x-y|m(x))^{l0/(l0+1)}.

struct RegularityEstimate {
  double C0 = 1.0;
  double l0 = 1.0;
  double max_violation = 0.0;  // log-scale; <= 0 means every pair is certified
  std::size_t pairs = 0;

  bool certified() const { return max_violation <= 0.0; }
};

inline json to_json_value(const RegularityEstimate& r) {
  return {{"C0", r.C0}, {"l0", r.l0}, {"max_violation", r.max_violation}, {"pairs", r.pairs}};
}

using PointPair = std::pair<std::size_t, std::size_t>;

inline std::vector<PointPair> sample_pairs(const GridSpec& spec, std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed, 0x21);
  std::vector<PointPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = rng.next_index(spec.size());
    const std::size_t b = rng.next_index(spec.size());
    pairs.emplace_back(a, b);
  }
  return pairs;
}

namespace detail {

struct PairGeometry {
  double log_ratio;  // log(m(x)/m(y))
  double log_dist;   // log(1 + |x-y| m(x))
};

inline std::vector<PairGeometry> pair_geometry(const CriticalRadiusField& rho, const std::vector<PointPair>& pairs) {
  const GridSpec& spec = rho.rho.spec();
  std::vector<PairGeometry> g;
  g.reserve(pairs.size() * 2);
  for (auto [a, b] : pairs) {
    for (int swap = 0; swap < 2; ++swap) {
      const std::size_t x = swap ? b : a;
      const std::size_t y = swap ? a : b;
      const Point px = spec.point(x), py = spec.point(y);
      double d2 = 0.0;
      for (int k = 0; k < spec.dim(); ++k) d2 += (px[k] - py[k]) * (px[k] - py[k]);
      const double mx = rho.m_V(x), my = rho.m_V(y);
      g.push_back({std::log(mx / my), std::log1p(std::sqrt(d2) * mx)});
    }
  }
  return g;
}

inline double max_violation(const std::vector<PairGeometry>& g, double C0, double l0) {
  const double logC = std::log(C0);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : g) {
    const double lower = -logC - l0 * p.log_dist;
    const double upper = logC + l0 / (l0 + 1.0) * p.log_dist;
    worst = std::max({worst, lower - p.log_ratio, p.log_ratio - upper});
  }
  return worst;
}

}  // namespace detail

inline RegularityEstimate lemma21_check(const CriticalRadiusField& rho, double C0, double l0,
                                        const std::vector<PointPair>& pairs) {
  require(C0 >= 1.0 && l0 > 0.0, "lemma21_check: need C0 >= 1 and l0 > 0");
  const auto g = detail::pair_geometry(rho, pairs);
  return {C0, l0, g.empty() ? 0.0 : detail::max_violation(g, C0, l0), pairs.size()};
}

inline const std::vector<double>& lemma21_l0_candidates() {
  static const std::vector<double> v = [] {
    std::vector<double> c;
    for (int i = 1; i <= 16; ++i) c.push_back(0.25 * i);
    return c;
  }();
  return v;
}

inline const std::vector<double>& lemma21_C0_candidates() {
  static const std::vector<double> v{1.1, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0};
  return v;
}

/// Smallest certifying (C0, l0) on the candidate grid, ordered by
/// C0^2 4^{l0} (the part of the covering constant these two control). When
/// nothing certifies, returns the least-violating pair.
inline RegularityEstimate fit_lemma21(const CriticalRadiusField& rho, const std::vector<PointPair>& pairs) {
  const auto g = detail::pair_geometry(rho, pairs);
  RegularityEstimate best{};
  double best_cost = std::numeric_limits<double>::infinity();
  RegularityEstimate least{};
  least.max_violation = std::numeric_limits<double>::infinity();
  for (double l0 : lemma21_l0_candidates()) {
    for (double C0 : lemma21_C0_candidates()) {
      const double v = g.empty() ? 0.0 : detail::max_violation(g, C0, l0);
      if (v < least.max_violation) least = {C0, l0, v, pairs.size()};
      if (v <= 0.0) {
        const double cost = 2.0 * std::log(C0) + l0 * std::log(4.0);
        if (cost < best_cost - 1e-12) {
          best_cost = cost;
          best = {C0, l0, v, pairs.size()};
        }
        break;  // larger C0 only costs more at this l0
      }
    }
  }
  return std::isfinite(best_cost) ? best : least;
}

}  // namespace swl
