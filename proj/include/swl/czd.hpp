#pragma once

// Stopping-time Calderon-Zygmund decomposition over the dyadic lattice with
// the max-rho penalization psi_theta(Q) = (1 + side/max_Q rho)^theta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "swl/box_sums.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/maximal.hpp"
#include "swl/potential.hpp"
#include "swl/report.hpp"

namespace swl {

struct SelectedCube {
  Cube cube;
  int level = 0;
  std::size_t ordinal = 0;
  double psi = 1.0;          // psi_theta(Q)
  double psi_average = 0.0;  // (psi |Q|)^{-1} int_Q |f|_r
};

struct CZDecomposition {
  GridSpec spec;
  double lambda = 1.0;
  double theta = 0.0;
  double r = 1.0;  // l^r aggregation used for vector input
  std::vector<SelectedCube> cubes;
  std::vector<std::uint8_t> omega;  // cell mask of the union of selected cubes
  std::vector<GridFunction> good;   // f' per component
  std::vector<GridFunction> bad;    // f'' per component
  std::vector<GridFunction> fbar;   // psi-averages on each Q_j, zero elsewhere

  double omega_measure() const {
    return static_cast<double>(std::count(omega.begin(), omega.end(), 1)) * spec.cell_volume();
  }
};

inline json to_json_value(const CZDecomposition& d) {
  json cubes = json::array();
  for (const auto& c : d.cubes)
    cubes.push_back({{"level", c.level},
                     {"ordinal", c.ordinal},
                     {"psi", c.psi},
                     {"psi_average", c.psi_average},
                     {"cube", cube_json(c.cube, d.spec.dim())}});
  return {{"lambda", d.lambda},
          {"theta", d.theta},
          {"r", d.r},
          {"cube_count", d.cubes.size()},
          {"omega_measure", d.omega_measure()},
          {"cubes", cubes}};
}

namespace detail {

inline GridFunction aggregate(const VectorGridFunction& F, double r) {
  return F.count() == 1 ? F[0].abs() : vector_norm_pointwise(F, r);
}

}  // namespace detail

/// Top-down traversal: a cube is selected when its psi-average of |F|_r
/// exceeds lambda strictly; descendants of selected cubes are not visited.
inline CZDecomposition decompose(const VectorGridFunction& F, double r, double lambda, double theta,
                                 const CriticalRadiusField& rho, const DyadicLattice& lattice) {
  require(lambda > 0.0, "decompose: lambda must be positive");
  require(theta >= 0.0, "decompose: theta must be nonnegative");
  const GridSpec& spec = F.spec();
  require_same_grid(spec, lattice.spec());
  require_same_grid(spec, rho.rho.spec());
  const GridFunction a = detail::aggregate(F, r);
  const BoxSums sums(a);

  CZDecomposition d;
  d.spec = spec;
  d.lambda = lambda;
  d.theta = theta;
  d.r = r;
  d.omega.assign(spec.size(), 0);

  struct Node {
    int level;
    std::size_t ordinal;
  };
  std::vector<Node> stack{{0, 0}};
  const int n = spec.dim();
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    const Cube Q = lattice.cube(node.level, node.ordinal);
    const double psi = psi_cube_dyadic(Q, rho, theta);
    const double avg = static_cast<double>(sums.sum(Q) / static_cast<long double>(Q.cell_count(n))) / psi;
    if (avg > lambda) {
      d.cubes.push_back({Q, node.level, node.ordinal, psi, avg});
      Q.for_each_cell(spec, [&](std::size_t i) { d.omega[i] = 1; });
      continue;
    }
    if (node.level == lattice.depth()) continue;
    const Index parent = lattice.block_of(node.level, node.ordinal);
    // push children in reverse so they pop in ordinal order
    std::vector<Node> kids;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      Index child{};
      for (int k = 0; k < n; ++k) child[k] = 2 * parent[k] + ((mask >> (n - 1 - k)) & 1u);
      kids.push_back({node.level + 1, lattice.ordinal_of(node.level + 1, child)});
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  std::sort(d.cubes.begin(), d.cubes.end(), [](const SelectedCube& x, const SelectedCube& y) {
    return x.level != y.level ? x.level < y.level : x.ordinal < y.ordinal;
  });

  for (const auto& comp : F.components()) {
    std::vector<double> g(spec.size()), b(spec.size()), fb(spec.size(), 0.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (d.omega[i]) {
        g[i] = 0.0;
        b[i] = comp[i];
      } else {
        g[i] = comp[i];
        b[i] = 0.0;
      }
    }
    for (const auto& sc : d.cubes) {
      const double avg = cube_average(comp, sc.cube) / sc.psi;
      sc.cube.for_each_cell(spec, [&](std::size_t i) { fb[i] = avg; });
    }
    d.good.emplace_back(spec, std::move(g));
    d.bad.emplace_back(spec, std::move(b));
    d.fbar.emplace_back(spec, std::move(fb));
  }
  return d;
}

inline CZDecomposition decompose(const GridFunction& f, double lambda, double theta, const CriticalRadiusField& rho,
                                 const DyadicLattice& lattice) {
  return decompose(VectorGridFunction({f}), 1.0, lambda, theta, rho, lattice);
}

struct CZViolations {
  std::size_t upper_bound = 0;   // (ii): psi-average above (4n)^theta 2^n lambda
  std::size_t lower_bound = 0;   // (i): psi-average not above lambda
  std::size_t dyadic_complement = 0;  // (iii) in dyadic-average form
  std::size_t pointwise_complement = 0;  // |f| > lambda off the cubes (reported only)
  std::size_t overlaps = 0;
  double measure_slack = 0.0;    // (iv): |Omega| lambda / ||f||_1
};

/// Re-measures every property of the decomposition against the data.
inline InequalityReport verify_czd(const CZDecomposition& d, const VectorGridFunction& F,
                                   const CriticalRadiusField& rho, CZViolations* details = nullptr) {
  const GridSpec& spec = d.spec;
  require_same_grid(spec, F.spec());
  require(F.count() == d.good.size(), "verify_czd: component count mismatch");
  for (std::size_t k = 0; k < F.count(); ++k)
    for (std::size_t i = 0; i < spec.size(); ++i)
      require(d.good[k][i] + d.bad[k][i] == F[k][i], "verify_czd: decomposition does not belong to this data");

  const int n = spec.dim();
  const GridFunction a = detail::aggregate(F, d.r);
  const BoxSums sums(a);
  CZViolations v;
  const double cap = std::pow(4.0 * n, d.theta) * std::pow(2.0, n) * d.lambda;
  std::vector<int> cover(spec.size(), 0);
  for (const auto& sc : d.cubes) {
    const double avg = static_cast<double>(sums.sum(sc.cube) / static_cast<long double>(sc.cube.cell_count(n))) /
                       psi_cube_dyadic(sc.cube, rho, d.theta);
    if (!(avg > d.lambda)) ++v.lower_bound;
    if (avg > cap * (1.0 + 1e-12)) ++v.upper_bound;
    sc.cube.for_each_cell(spec, [&](std::size_t i) { ++cover[i]; });
  }
  for (int c : cover)
    if (c > 1) ++v.overlaps;

  // (iii): every dyadic cube containing an uncovered cell has psi-average <= lambda
  const DyadicLattice lattice(spec);
  for (int j = 0; j <= lattice.depth(); ++j) {
    for (std::size_t o = 0; o < lattice.cubes_at(j); ++o) {
      const Cube Q = lattice.cube(j, o);
      bool has_uncovered = false;
      Q.for_each_cell(spec, [&](std::size_t i) { has_uncovered = has_uncovered || cover[i] == 0; });
      if (!has_uncovered) continue;
      const double avg = static_cast<double>(sums.sum(Q) / static_cast<long double>(Q.cell_count(n))) /
                         psi_cube_dyadic(Q, rho, d.theta);
      if (avg > d.lambda) ++v.dyadic_complement;
    }
  }
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (cover[i] == 0 && a[i] > d.lambda) ++v.pointwise_complement;

  const double mass = integrate(a);
  const double omega = d.omega_measure();
  v.measure_slack = InequalityReport::safe_ratio(omega * d.lambda, mass);

  auto rep = InequalityReport::empty("czd_measure_bound", 1.0);
  rep.observe(omega * d.lambda, mass,
              {{"lower_bound_violations", v.lower_bound},
               {"upper_bound_violations", v.upper_bound},
               {"dyadic_complement_violations", v.dyadic_complement},
               {"pointwise_complement_exceedances", v.pointwise_complement},
               {"overlapping_cells", v.overlaps},
               {"upper_bound", cap},
               {"cube_count", d.cubes.size()}});
  rep.pass = rep.pass && v.lower_bound == 0 && v.upper_bound == 0 && v.dyadic_complement == 0 && v.overlaps == 0;
  if (details) *details = v;
  return rep;
}

inline InequalityReport verify_czd(const CZDecomposition& d, const GridFunction& f, const CriticalRadiusField& rho,
                                   CZViolations* details = nullptr) {
  return verify_czd(d, VectorGridFunction({f}), rho, details);
}

/// log of c0 = C0^2 4^{l0+1+n} (4n)^{eta_bar}.
inline double covering_log_c0(double C0, double l0, int n, double eta_bar) {
  return 2.0 * std::log(C0) + (l0 + 1.0 + n) * std::log(4.0) + eta_bar * std::log(4.0 * n);
}

/// {x : M'_{V,eta3} f(x) > c0 lambda} must lie inside the union of the doubled
/// selected cubes of the level-lambda decomposition at exponent eta2.
inline InequalityReport covering_check(const GridFunction& f, double lambda, double eta_bar, double eta3, double eta2,
                                       std::shared_ptr<const CriticalRadiusField> rho, double C0, double l0) {
  const GridSpec& spec = f.spec();
  const DyadicLattice lattice(spec);
  const CZDecomposition d = decompose(f, lambda, eta2, *rho, lattice);
  std::vector<std::uint8_t> doubled(spec.size(), 0);
  for (const auto& sc : d.cubes) sc.cube.dilated(spec, 2.0).for_each_cell(spec, [&](std::size_t i) { doubled[i] = 1; });

  MaximalConfig cfg = MaximalConfig::make(MaximalVariant::Centered, eta3, rho, spec);
  const GridFunction centered = maximal(f, cfg);
  const double log_c0 = covering_log_c0(C0, l0, spec.dim(), eta_bar);
  const double log_level = log_c0 + std::log(lambda);
  std::size_t left = 0, violations = 0, covered = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    covered += doubled[i];
    if (centered[i] > 0.0 && std::log(centered[i]) > log_level) {
      ++left;
      if (!doubled[i]) ++violations;
    }
  }
  auto rep = InequalityReport::empty("covering_containment", 0.0);
  rep.observe(static_cast<double>(violations), 1.0,
              {{"left_set_cells", left},
               {"doubled_union_cells", covered},
               {"cube_count", d.cubes.size()},
               {"log_c0", log_c0},
               {"lambda", lambda},
               {"eta_bar", eta_bar},
               {"eta3", eta3},
               {"eta2", eta2}});
  return rep;
}

}  // namespace swl
