#pragma once

// Penalized maximal operators on the lattice.
//
// Cube families: a cube of half-width k (side (2k+1)h) centered at any grid
// point. The uncentered operators take, for every k, the penalized average at
// every center and then a sliding-window max of radius k, which is exactly the
// sup over family cubes containing x. Box sums come from one summed-volume
// table per input.
//
// Sub-cell limit: a grid function is piecewise constant on cells, so cubes
// shrinking to a cell center have average |f(x)| and penalization -> 1. The
// Cube, Centered and Phi variants include this limit by default, which gives
// |f| <= M f pointwise. The dyadic operator never includes it.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swl/box_sums.hpp"
#include "swl/grid.hpp"
#include "swl/parallel.hpp"
#include "swl/potential.hpp"

namespace swl {

enum class MaximalVariant { Cube, Dyadic, Centered, Phi };

// Which rho the non-dyadic cube penalization reads: at the cube center (Psi)
// or the max over the cube (psi).
enum class PenaltyForm { CenterRho, MaxRho };

inline const char* variant_name(MaximalVariant v) {
  switch (v) {
    case MaximalVariant::Cube: return "cube";
    case MaximalVariant::Dyadic: return "dyadic";
    case MaximalVariant::Centered: return "centered";
    case MaximalVariant::Phi: return "phi";
  }
  return "?";
}

inline MaximalVariant parse_variant(const std::string& s) {
  if (s == "cube") return MaximalVariant::Cube;
  if (s == "dyadic") return MaximalVariant::Dyadic;
  if (s == "centered") return MaximalVariant::Centered;
  if (s == "phi") return MaximalVariant::Phi;
  throw Error("maximal: unknown variant '" + s + "'");
}

struct MaximalConfig {
  MaximalVariant variant = MaximalVariant::Cube;
  double exponent = 0.0;  // theta or eta
  std::shared_ptr<const CriticalRadiusField> rho;
  std::vector<int> half_widths;  // cube ladder for Cube / Centered / Phi
  PenaltyForm penalty = PenaltyForm::CenterRho;
  bool point_limit = true;

  static MaximalConfig make(MaximalVariant variant, double exponent, std::shared_ptr<const CriticalRadiusField> rho,
                            const GridSpec& spec) {
    MaximalConfig cfg;
    cfg.variant = variant;
    cfg.exponent = exponent;
    cfg.rho = std::move(rho);
    cfg.half_widths = default_half_widths(spec);
    return cfg;
  }

  MaximalConfig with_exponent(double e) const {
    MaximalConfig c = *this;
    c.exponent = e;
    return c;
  }

  MaximalConfig with_variant(MaximalVariant v) const {
    MaximalConfig c = *this;
    c.variant = v;
    return c;
  }

  void validate(const GridSpec& spec) const {
    require(exponent >= 0.0, "maximal: exponent must be nonnegative");
    const bool needs_rho = variant != MaximalVariant::Phi && exponent > 0.0;
    require(!needs_rho || rho, "maximal: variant requires a critical radius field");
    if (rho) require_same_grid(spec, rho->rho.spec());
    if (variant != MaximalVariant::Dyadic) require(!half_widths.empty(), "maximal: empty cube ladder");
  }
};

namespace detail {

inline double side_of(const GridSpec& spec, int k) { return (2 * k + 1) * spec.spacing(); }

inline double penalty(double side, double scale, double exponent) {
  return exponent == 0.0 ? 1.0 : std::pow(1.0 + side / scale, exponent);
}

inline Index box_lo(const GridSpec& spec, const Index& c, int k) {
  Index lo{};
  for (int a = 0; a < spec.dim(); ++a) lo[a] = std::max(0, c[a] - k);
  return lo;
}

inline Index box_hi(const GridSpec& spec, const Index& c, int k) {
  Index hi{};
  for (int a = 0; a < spec.dim(); ++a) hi[a] = std::min(spec.points(), c[a] + k + 1);
  return hi;
}

inline long double box_count(const GridSpec& spec, const Index& lo, const Index& hi) {
  long double c = 1.0L;
  for (int a = 0; a < spec.dim(); ++a) c *= static_cast<long double>(hi[a] - lo[a]);
  return c;
}

inline std::vector<double> dyadic_maximal(const GridFunction& absf, const MaximalConfig& cfg) {
  const GridSpec& spec = absf.spec();
  const DyadicLattice lattice(spec);
  std::vector<double> out(spec.size(), 0.0);
  const BoxSums sums(absf);
  for (int j = 0; j <= lattice.depth(); ++j) {
    const std::size_t count = lattice.cubes_at(j);
    std::vector<double> value(count);
    parallel_for(count, [&](std::size_t o) {
      const Cube Q = lattice.cube(j, o);
      const double avg = static_cast<double>(sums.sum(Q) / static_cast<long double>(Q.cell_count(spec.dim())));
      value[o] = avg / (cfg.exponent == 0.0 ? 1.0 : psi_cube_dyadic(Q, *cfg.rho, cfg.exponent));
    });
    parallel_for(spec.size(), [&](std::size_t i) {
      const auto o = lattice.ordinal_of(j, lattice.block_containing(j, spec.unflatten(i)));
      out[i] = std::max(out[i], value[o]);
    });
  }
  return out;
}

}  // namespace detail

/// Pointwise sup over the configured family of penalized averages of |f|.
inline GridFunction maximal(const GridFunction& f, const MaximalConfig& cfg) {
  const GridSpec& spec = f.spec();
  cfg.validate(spec);
  const GridFunction absf = f.abs();
  if (cfg.variant == MaximalVariant::Dyadic) return GridFunction(spec, detail::dyadic_maximal(absf, cfg));

  std::vector<double> out(spec.size(), 0.0);
  if (cfg.point_limit) out = absf.data();
  const BoxSums sums(absf);
  const bool penalized = cfg.exponent > 0.0;
  std::vector<double> vals(spec.size());
  std::vector<double> scale(spec.size(), 1.0);  // per-center rho (or 1 for Phi)

  for (int k : cfg.half_widths) {
    const double side = detail::side_of(spec, k);
    if (penalized && cfg.variant != MaximalVariant::Phi) {
      scale = cfg.rho->rho.data();
      if (cfg.variant == MaximalVariant::Cube && cfg.penalty == PenaltyForm::MaxRho) sliding_max(spec, scale, k);
    }
    parallel_for(spec.size(), [&](std::size_t c) {
      const Index ci = spec.unflatten(c);
      const Index lo = detail::box_lo(spec, ci, k), hi = detail::box_hi(spec, ci, k);
      const double avg = static_cast<double>(sums.sum(lo, hi) / detail::box_count(spec, lo, hi));
      vals[c] = penalized ? avg / detail::penalty(side, scale[c], cfg.exponent) : avg;
    });
    if (cfg.variant != MaximalVariant::Centered) sliding_max(spec, vals, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], vals[i]);
  }
  return GridFunction(spec, std::move(out));
}

/// maximal(|f|^delta)^{1/delta}, 0 < delta <= 1.
inline GridFunction maximal_power(const GridFunction& f, double delta, const MaximalConfig& cfg) {
  require(delta > 0.0 && delta <= 1.0, "maximal_power: delta must lie in (0, 1]");
  if (delta == 1.0) return maximal(f, cfg);
  const GridFunction powered = f.map([delta](double v) { return std::pow(std::fabs(v), delta); });
  return maximal(powered, cfg).map([delta](double v) { return std::pow(v, 1.0 / delta); });
}

/// M_w f(x) = sup over family cubes B containing x of (1/w(5B)) int_B |f| w,
/// with 5B clipped to the domain. The sub-cell limit contributes |f(x)|/5^n.
inline GridFunction maximal_weighted(const GridFunction& f, const Weight& w, const std::vector<int>& half_widths,
                                     bool point_limit = true) {
  const GridSpec& spec = f.spec();
  require_same_grid(spec, w.spec());
  require(!half_widths.empty(), "maximal_weighted: empty cube ladder");
  const GridFunction fw = f.abs() * w.values();
  const BoxSums num(fw);
  const BoxSums den(w.values());
  std::vector<double> out(spec.size(), 0.0);
  if (point_limit) {
    const double shrink = std::pow(5.0, -spec.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(f[i]) * shrink;
  }
  std::vector<double> vals(spec.size());
  for (int k : half_widths) {
    const int k5 = 5 * k + 2;  // side 5(2k+1)h
    parallel_for(spec.size(), [&](std::size_t c) {
      const Index ci = spec.unflatten(c);
      const long double mass = den.sum(detail::box_lo(spec, ci, k5), detail::box_hi(spec, ci, k5));
      require(mass > 0.0L, "maximal_weighted: w(5B) vanishes");
      vals[c] = static_cast<double>(num.sum(detail::box_lo(spec, ci, k), detail::box_hi(spec, ci, k)) / mass);
    });
    sliding_max(spec, vals, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], vals[i]);
  }
  return GridFunction(spec, std::move(out));
}

/// Sharp maximal operator: sup over family cubes with side < 1 containing x of
/// the mean oscillation, plus sup over family cubes with side >= 1 of
/// (1+side)^{-eta}-penalized averages of |f|. With delta, applies the
/// composition M#(|f|^delta)^{1/delta}.
inline GridFunction sharp_maximal(const GridFunction& f, double eta, std::optional<double> delta = std::nullopt,
                                  std::vector<int> half_widths = {}) {
  const GridSpec& spec = f.spec();
  require(spec.half_width() > 1.0, "sharp_maximal: no large-cube scale (need half_width > 1)");
  require(eta >= 0.0, "sharp_maximal: eta must be nonnegative");
  if (delta) {
    require(*delta > 0.0 && *delta <= 1.0, "sharp_maximal: delta must lie in (0, 1]");
    if (*delta != 1.0) {
      const double d = *delta;
      const GridFunction powered = f.map([d](double v) { return std::pow(std::fabs(v), d); });
      return sharp_maximal(powered, eta, std::nullopt, std::move(half_widths))
          .map([d](double v) { return std::pow(v, 1.0 / d); });
    }
  }
  if (half_widths.empty()) half_widths = default_half_widths(spec);
  const double h = spec.spacing();
  // smallest cube with side >= 1 always belongs to the large family
  const int k_unit = std::max(0, static_cast<int>(std::ceil((1.0 / h - 1.0) / 2.0 - 1e-12)));
  std::vector<int> small, large;
  for (int k : half_widths) (detail::side_of(spec, k) < 1.0 ? small : large).push_back(k);
  if (k_unit < spec.points()) large.push_back(k_unit);
  std::sort(large.begin(), large.end());
  large.erase(std::unique(large.begin(), large.end()), large.end());

  std::vector<double> osc(spec.size(), 0.0);
  std::vector<double> big(spec.size(), 0.0);
  std::vector<double> vals(spec.size());
  const BoxSums sums(f);
  for (int k : small) {
    parallel_for(spec.size(), [&](std::size_t c) {
      const Index ci = spec.unflatten(c);
      Cube Q;
      Q.lo = detail::box_lo(spec, ci, k);
      Q.hi = detail::box_hi(spec, ci, k);
      const long double cnt = detail::box_count(spec, Q.lo, Q.hi);
      const double mean = static_cast<double>(sums.sum(Q.lo, Q.hi) / cnt);
      long double dev = 0.0L;
      Q.for_each_cell(spec, [&](std::size_t i) { dev += std::fabs(f[i] - mean); });
      vals[c] = static_cast<double>(dev / cnt);
    });
    sliding_max(spec, vals, k);
    for (std::size_t i = 0; i < osc.size(); ++i) osc[i] = std::max(osc[i], vals[i]);
  }
  const BoxSums abs_sums(f.abs());
  for (int k : large) {
    const double pen = detail::penalty(detail::side_of(spec, k), 1.0, eta);
    parallel_for(spec.size(), [&](std::size_t c) {
      const Index ci = spec.unflatten(c);
      const Index lo = detail::box_lo(spec, ci, k), hi = detail::box_hi(spec, ci, k);
      vals[c] = static_cast<double>(abs_sums.sum(lo, hi) / detail::box_count(spec, lo, hi)) / pen;
    });
    sliding_max(spec, vals, k);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = std::max(big[i], vals[i]);
  }
  for (std::size_t i = 0; i < osc.size(); ++i) osc[i] += big[i];
  return GridFunction(spec, std::move(osc));
}

/// |M F|_r: the operator applied componentwise, then the pointwise l^r norm.
inline GridFunction maximal_vector(const VectorGridFunction& F, const MaximalConfig& cfg, double r) {
  require(r > 1.0, "maximal_vector: r must exceed 1");
  std::vector<GridFunction> parts;
  parts.reserve(F.count());
  for (const auto& c : F.components()) parts.push_back(maximal(c, cfg));
  return vector_norm_pointwise(VectorGridFunction(std::move(parts)), r);
}

}  // namespace swl
