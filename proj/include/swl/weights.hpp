#pragma once

// Schroedinger-adapted Muckenhoupt constants, duality, BMO_theta(rho), the
// product rule for weights, and the exponent bookkeeping of the vector-valued
// maximal theorem.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "swl/box_sums.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/maximal.hpp"
#include "swl/parallel.hpp"
#include "swl/potential.hpp"
#include "swl/report.hpp"

namespace swl {

using RhoPtr = std::shared_ptr<const CriticalRadiusField>;

struct ApReport {
  double p = 1.0;
  double theta = 0.0;
  double constant = 0.0;
  Cube worst_cube;
  std::string family;
};

inline json to_json_value(const ApReport& r, int dim) {
  return {{"p", r.p},
          {"theta", r.theta},
          {"constant", number_or_inf(r.constant)},
          {"worst_cube", cube_json(r.worst_cube, dim)},
          {"family", r.family}};
}

/// w^{-1/(p-1)}.
inline Weight dual_weight(const Weight& w, double p) {
  require(p >= 1.0, "dual_weight: p must be >= 1");
  require(p != 1.0, "dual_weight: dual undefined at p=1");
  const double e = -1.0 / (p - 1.0);
  return Weight(w.values().map([e](double v) { return std::pow(v, e); }));
}

inline double conjugate(double p) {
  require(p > 1.0, "conjugate exponent undefined for p <= 1");
  return p / (p - 1.0);
}

/// Psi_theta of a family cube: center-rho form.
inline double cube_penalty(const Cube& Q, const RhoPtr& rho, double theta) {
  if (theta == 0.0) return 1.0;
  require(static_cast<bool>(rho), "penalty: theta > 0 needs a critical radius field");
  return psi_ball(Q.center, Q.side, *rho, theta);
}

/// Per-cube A_p products (Psi^{-1} avg w)(Psi^{-1} avg w^{-1/(p-1)})^{p-1}.
inline std::vector<double> ap_products(const Weight& w, double p, double theta, const RhoPtr& rho,
                                       const std::vector<Cube>& cubes) {
  require(p > 1.0, "ap_products: p must exceed 1");
  const GridSpec& spec = w.spec();
  const Weight sigma = dual_weight(w, p);
  const BoxSums sw(w.values()), ss(sigma.values());
  std::vector<double> out(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Cube& Q = cubes[c];
    const long double cnt = static_cast<long double>(Q.cell_count(spec.dim()));
    const double psi = cube_penalty(Q, rho, theta);
    const double aw = static_cast<double>(sw.sum(Q) / cnt) / psi;
    const double as = static_cast<double>(ss.sum(Q) / cnt) / psi;
    out[c] = aw * std::pow(as, p - 1.0);
  });
  return out;
}

/// A_p^{rho,theta} constant over the family. For p = 1 this is
/// sup_x M_{V,theta} w(x) / w(x) with the family's ladder.
inline ApReport ap_constant(const Weight& w, double p, double theta, const RhoPtr& rho, const CubeFamily& family) {
  require(p >= 1.0, "ap_constant: p must be >= 1");
  require(theta >= 0.0, "ap_constant: theta must be nonnegative");
  const GridSpec& spec = w.spec();
  ApReport rep;
  rep.p = p;
  rep.theta = theta;
  rep.family = family.describe();
  if (p == 1.0) {
    MaximalConfig cfg;
    cfg.variant = MaximalVariant::Cube;
    cfg.exponent = theta;
    cfg.rho = rho;
    cfg.half_widths = family.half_widths.empty() ? default_half_widths(spec) : family.half_widths;
    const GridFunction mw = maximal(w.values(), cfg);
    std::size_t worst = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double q = mw[i] / w[i];
      if (q > rep.constant) {
        rep.constant = q;
        worst = i;
      }
    }
    rep.worst_cube = Cube::centered(spec, spec.unflatten(worst), 0);
    return rep;
  }
  const auto cubes = family.cubes(spec);
  require(!cubes.empty(), "ap_constant: empty cube family");
  const auto prod = ap_products(w, p, theta, rho, cubes);
  std::size_t worst = 0;
  for (std::size_t c = 0; c < prod.size(); ++c)
    if (prod[c] > rep.constant) {
      rep.constant = prod[c];
      worst = c;
    }
  rep.worst_cube = cubes[worst];
  return rep;
}

/// sup over the family of Psi_theta(Q)^{-1} (1/|Q|) int_Q |f - f_Q|.
inline double bmo_norm(const GridFunction& f, double theta, const RhoPtr& rho, const CubeFamily& family) {
  const GridSpec& spec = f.spec();
  const auto cubes = family.cubes(spec);
  const BoxSums sums(f);
  std::vector<double> osc(cubes.size(), 0.0);
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Cube& Q = cubes[c];
    const long double cnt = static_cast<long double>(Q.cell_count(spec.dim()));
    const double mean = static_cast<double>(sums.sum(Q) / cnt);
    long double dev = 0.0L;
    Q.for_each_cell(spec, [&](std::size_t i) { dev += std::fabs(f[i] - mean); });
    osc[c] = static_cast<double>(dev / cnt) / cube_penalty(Q, rho, theta);
  });
  return osc.empty() ? 0.0 : *std::max_element(osc.begin(), osc.end());
}

// ---------------------------------------------------------------------------
// Exponent budget.

struct ExponentBudget {
  // inputs
  double l0 = 1.0, theta = 0.0, p = 1.0, r = 2.0;
  int n = 1;
  // outputs
  double p0 = 0.0, theta0 = 0.0, eta = 0.0;
  double theta1 = 0.0, theta2 = 0.0;
  double eta_bar = 0.0, eta3 = 0.0, eta2 = 0.0, eta1 = 0.0;

  bool chain_ordered() const { return 0.0 < eta1 && eta1 < eta2 && eta2 < eta3 && eta3 < eta_bar && eta_bar < eta; }

  /// Same l0 chain rooted at a different eta_bar. The printed exponents are
  /// so large that every penalized average off the sub-cell limit underflows;
  /// a rescaled chain keeps the derived relations while staying visible.
  ExponentBudget rescaled(double new_eta_bar) const {
    require(new_eta_bar > 0.0, "budget: eta_bar must be positive");
    ExponentBudget b = *this;
    const double s = l0 + 1.0;
    b.eta_bar = new_eta_bar;
    b.eta = 2.0 * s * s * new_eta_bar;
    b.eta3 = new_eta_bar / s;
    b.eta2 = new_eta_bar / (s * s);
    b.eta1 = new_eta_bar / (s * s * s);
    return b;
  }
};

inline ExponentBudget exponent_budget(double l0, double theta, double p, double r, int n) {
  require(l0 > 0.0, "budget: l0 must be positive");
  require(p >= 1.0, "budget: p must be >= 1");
  require(r > 1.0, "budget: r must exceed 1 (conjugate of (r+1)/2 undefined)");
  require(theta >= 0.0, "budget: theta must be nonnegative");
  require(n >= 1, "budget: n must be >= 1");
  ExponentBudget b;
  b.l0 = l0;
  b.theta = theta;
  b.p = p;
  b.r = r;
  b.n = n;
  const double s = l0 + 1.0;
  const double half = (r + 1.0) / 2.0;
  b.p0 = 4.0 * std::pow(s, 5) * (p + conjugate(half));
  b.theta0 = p * ((3.0 * theta + n) * p + s * n);
  b.eta = b.p0 * b.theta0;
  b.theta1 = theta * s;
  b.theta2 = theta * s * s;
  b.eta_bar = b.eta / (2.0 * s * s);
  b.eta3 = b.eta_bar / s;
  b.eta2 = b.eta_bar / (s * s);
  b.eta1 = b.eta_bar / (s * s * s);
  return b;
}

inline json to_json_value(const ExponentBudget& b) {
  return {{"l0", b.l0},         {"theta", b.theta},   {"p", b.p},           {"r", b.r},
          {"n", b.n},           {"p0", b.p0},         {"theta0", b.theta0}, {"eta", b.eta},
          {"theta1", b.theta1}, {"theta2", b.theta2}, {"eta_bar", b.eta_bar}, {"eta3", b.eta3},
          {"eta2", b.eta2},     {"eta1", b.eta1}};
}

// ---------------------------------------------------------------------------
// Product rule: w1 in A_p^{rho,theta}, w2 in A_1(w1) => w1 w2 in A_p^{rho,theta p}.

/// sup_x M_{w1} w2(x) / w2(x).
inline double a1_relative_constant(const Weight& w1, const Weight& w2, const std::vector<int>& half_widths) {
  const GridFunction m = maximal_weighted(w2.values(), w1, half_widths);
  double c = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) c = std::max(c, m[i] / w2[i]);
  return c;
}

inline InequalityReport product_a1_check(const Weight& w1, const Weight& w2, double p, double theta, const RhoPtr& rho,
                                         const CubeFamily& family) {
  require_same_grid(w1.spec(), w2.spec());
  const int dim = w1.spec().dim();
  const auto ladder = family.half_widths.empty() ? default_half_widths(w1.spec()) : family.half_widths;
  const double a1 = a1_relative_constant(w1, w2, ladder);
  const ApReport base = ap_constant(w1, p, theta, rho, family);
  const Weight product(w1.values() * w2.values());
  const ApReport prod = ap_constant(product, p, theta * p, rho, family);
  auto rep = InequalityReport::empty("product_weight_ap");
  rep.observe(prod.constant, base.constant,
              {{"a1_relative_constant", number_or_inf(a1)},
               {"w1_ap_constant", number_or_inf(base.constant)},
               {"product_ap_constant", number_or_inf(prod.constant)},
               {"product_theta", theta * p},
               {"worst_cube", cube_json(prod.worst_cube, dim)}});
  return rep;
}

}  // namespace swl
