#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "swl/czd.hpp"
#include "swl/verify.hpp"

using namespace swl;

namespace {

struct Fixture {
  GridSpec spec;
  RhoPtr rho;
  DyadicLattice lattice;
  explicit Fixture(const GridSpec& s)
      : spec(s),
        rho(std::make_shared<const CriticalRadiusField>(critical_radius_field(Potential::square_norm(s)))),
        lattice(s) {}
};

double psi_avg(const GridFunction& a, const Cube& q, const CriticalRadiusField& rho, double theta) {
  const GridSpec& s = a.spec();
  double sum = 0.0, cnt = 0.0, m = 0.0;
  q.for_each_cell(s, [&](std::size_t i) {
    sum += a[i];
    cnt += 1.0;
    m = std::max(m, rho.rho[i]);
  });
  return sum / cnt / (theta == 0.0 ? 1.0 : std::pow(1.0 + q.side / m, theta));
}

// Maximal dyadic cubes with psi-average above lambda: a cube is selected when
// it exceeds lambda and none of its ancestors does.
std::set<std::pair<int, std::size_t>> brute_selection(const GridFunction& f, double lambda, double theta,
                                                      const CriticalRadiusField& rho, const DyadicLattice& lat) {
  const GridFunction a = f.abs();
  std::set<std::pair<int, std::size_t>> out;
  for (int j = 0; j <= lat.depth(); ++j)
    for (std::size_t o = 0; o < lat.cubes_at(j); ++o) {
      const Cube q = lat.cube(j, o);
      if (!(psi_avg(a, q, rho, theta) > lambda)) continue;
      bool ancestor = false;
      const Index cell = q.lo;
      for (int i = 0; i < j && !ancestor; ++i)
        ancestor = psi_avg(a, lat.cube(i, lat.block_containing(i, cell)), rho, theta) > lambda;
      if (!ancestor) out.insert({j, o});
    }
  return out;
}

std::set<std::pair<int, std::size_t>> selection(const CZDecomposition& d) {
  std::set<std::pair<int, std::size_t>> out;
  for (const auto& c : d.cubes) out.insert({c.level, c.ordinal});
  return out;
}

GridFunction spike(const GridSpec& s, const Index& at, double mass) {
  std::vector<double> v(s.size(), 0.0);
  v[s.flatten(at)] = mass / s.cell_volume();
  return GridFunction(s, v);
}

}  // namespace

TEST(Czd, ZeroInputSelectsNothing) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto d = decompose(GridFunction::constant(u.spec, 0.0), 0.1, 1.0, *u.rho, u.lattice);
  EXPECT_TRUE(d.cubes.empty());
  EXPECT_EQ(d.omega_measure(), 0.0);
  EXPECT_TRUE(verify_czd(d, GridFunction::constant(u.spec, 0.0), *u.rho).pass);
}

TEST(Czd, LevelAboveEveryAverageSelectsNothing) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto f = random_function(u.spec, 1, 0);
  double top = 0.0;
  for (int j = 0; j <= u.lattice.depth(); ++j)
    for (std::size_t o = 0; o < u.lattice.cubes_at(j); ++o)
      top = std::max(top, psi_avg(f.abs(), u.lattice.cube(j, o), *u.rho, 1.0));
  const auto d = decompose(f, top, 1.0, *u.rho, u.lattice);
  EXPECT_TRUE(d.cubes.empty());
  CZViolations v;
  EXPECT_TRUE(verify_czd(d, f, *u.rho, &v).pass);
  EXPECT_EQ(v.dyadic_complement, 0u);
}

TEST(Czd, IndicatorOfLevelTwoCube) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const Cube target = u.lattice.cube(2, std::size_t{5});
  std::vector<double> v(u.spec.size(), 0.0);
  target.for_each_cell(u.spec, [&](std::size_t i) { v[i] = 1.0; });
  const GridFunction f(u.spec, v);
  const double theta = 1.0;
  const double lambda = 0.5 * psi_avg(f, target, *u.rho, theta);
  const auto d = decompose(f, lambda, theta, *u.rho, u.lattice);
  EXPECT_EQ(selection(d), brute_selection(f, lambda, theta, *u.rho, u.lattice));
  ASSERT_FALSE(d.cubes.empty());
  for (const auto& c : d.cubes) {
    // Q* itself or one of its ancestors
    EXPECT_LE(c.level, 2);
    EXPECT_TRUE(c.cube.contains(target.lo, 2));
  }
  CZViolations viol;
  EXPECT_TRUE(verify_czd(d, f, *u.rho, &viol).pass);
  EXPECT_EQ(viol.lower_bound, 0u);
  EXPECT_EQ(viol.upper_bound, 0u);
}

TEST(Czd, RandomSelectionMatchesBruteForceAndProperties) {
  const Fixture u(GridSpec(2, 2.0, 16));
  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto f = random_function(u.spec, 42, i);
    const double theta = 2.0;
    const double root = psi_avg(f.abs(), u.lattice.cube(0, std::size_t{0}), *u.rho, theta);
    const double lambda = root * (1.5 + i);
    const auto d = decompose(f, lambda, theta, *u.rho, u.lattice);
    EXPECT_EQ(selection(d), brute_selection(f, lambda, theta, *u.rho, u.lattice)) << i;
    CZViolations v;
    const auto rep = verify_czd(d, f, *u.rho, &v);
    EXPECT_TRUE(rep.pass) << i;
    EXPECT_LE(v.measure_slack, 1.0);
    // (ii) against a direct evaluation of the bound
    const double cap = std::pow(8.0, theta) * 4.0 * lambda;
    for (const auto& c : d.cubes) EXPECT_LE(psi_avg(f.abs(), c.cube, *u.rho, theta), cap * (1 + 1e-12));
    // f = g + b exactly, and the good part is bounded off the cubes' complement by design
    for (std::size_t x = 0; x < f.size(); ++x) EXPECT_EQ(d.good[0][x] + d.bad[0][x], f[x]);
  }
}

TEST(Czd, SpikeUpperBound) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const auto f = spike(u.spec, {20, 9}, 1.0);
  const double theta = 1.5;
  const double lambda = 4.0 * psi_avg(f, u.lattice.cube(0, std::size_t{0}), *u.rho, theta);
  const auto d = decompose(f, lambda, theta, *u.rho, u.lattice);
  ASSERT_EQ(d.cubes.size(), 1u);
  const double cap = std::pow(8.0, theta) * 4.0 * lambda;
  EXPECT_GT(d.cubes[0].psi_average, lambda);
  EXPECT_LE(d.cubes[0].psi_average, cap);
  EXPECT_TRUE(verify_czd(d, f, *u.rho).pass);
}

TEST(Czd, VectorDataUsesLrAggregate) {
  const Fixture u(GridSpec(2, 2.0, 16));
  std::vector<GridFunction> parts{random_function(u.spec, 3, 0), random_function(u.spec, 3, 1)};
  const VectorGridFunction F(parts);
  const GridFunction agg = vector_norm_pointwise(F, 2.0);
  const double root = psi_avg(agg, u.lattice.cube(0, std::size_t{0}), *u.rho, 1.0);
  const auto d = decompose(F, 2.0, 2.0 * root, 1.0, *u.rho, u.lattice);
  EXPECT_EQ(selection(d), brute_selection(agg, 2.0 * root, 1.0, *u.rho, u.lattice));
  EXPECT_TRUE(verify_czd(d, F, *u.rho).pass);
}

TEST(Czd, ForeignDataRejected) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto f = random_function(u.spec, 1, 1);
  const auto d = decompose(f, 1.0, 1.0, *u.rho, u.lattice);
  EXPECT_THROW(verify_czd(d, random_function(u.spec, 1, 2), *u.rho), Error);
}

TEST(Covering, ZeroAndHugeLevel) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto b = exponent_budget(1.0, 1.0, 2.0, 3.0, 2).rescaled(1.0);
  const auto z = covering_check(GridFunction::constant(u.spec, 0.0), 1.0, b.eta_bar, b.eta3, b.eta2, u.rho, 2.0, 1.0);
  EXPECT_TRUE(z.pass);
  EXPECT_EQ(z.worst["left_set_cells"].get<std::size_t>(), 0u);
  const auto f = spike(u.spec, {3, 3}, 1.0);
  const auto big = covering_check(f, 1e300, b.eta_bar, b.eta3, b.eta2, u.rho, 2.0, 1.0);
  EXPECT_EQ(big.worst["left_set_cells"].get<std::size_t>(), 0u);
  EXPECT_TRUE(big.pass);
}

TEST(Covering, SpikesContained) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const auto fit = fit_lemma21(*u.rho, sample_pairs(u.spec, 500, 3));
  const auto b = exponent_budget(fit.l0, 1.0, 2.0, 3.0, 2).rescaled(1.0);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto f = random_spikes(u.spec, 5, i);
    for (double frac : {0.02, 0.1, 0.5}) {
      const auto rep = covering_check(f, frac * f.max_abs(), b.eta_bar, b.eta3, b.eta2, u.rho, fit.C0, fit.l0);
      EXPECT_TRUE(rep.pass) << i << " " << frac;
    }
  }
}

TEST(Covering, ConstantMatchesFormula) {
  // log(C0^2 4^{l0+1+n} (4n)^{eta_bar})
  EXPECT_NEAR(covering_log_c0(2.0, 1.0, 3, 2304.0), std::log(4.0) + 5 * std::log(4.0) + 2304.0 * std::log(12.0), 1e-9);
}
