#include <gtest/gtest.h>

#include <cmath>

#include "swl/grid.hpp"
#include "swl/random.hpp"
#include "swl/verify.hpp"

using namespace swl;

TEST(Integrate, ConstantOverBox) {
  const GridSpec s(2, 1.0, 16);
  EXPECT_DOUBLE_EQ(integrate(GridFunction::constant(s, 1.0)), 4.0);
}

TEST(Integrate, OddFunctionVanishes) {
  const GridSpec s(2, 1.0, 16);
  const auto f = GridFunction::from_points(s, [](const Point& x) { return x[0]; });
  EXPECT_NEAR(integrate(f), 0.0, 1e-12);
}

TEST(Integrate, HalfDomainIndicator) {
  const GridSpec s(2, 1.0, 16);
  const auto f = GridFunction::from_points(s, [](const Point& x) { return x[0] > 0.0 ? 1.0 : 0.0; });
  EXPECT_NEAR(integrate(f), 2.0, s.cell_volume());
}

TEST(Norm, ConstantStrong) {
  const GridSpec s(2, 1.0, 16);
  EXPECT_NEAR(norm(GridFunction::constant(s, 3.0), 2.0), 3.0 * 2.0, 1e-12);
}

TEST(Norm, IndicatorWeakIsMeasureToOneOverP) {
  const GridSpec s(2, 1.0, 16);
  const auto f = GridFunction::from_points(s, [](const Point& x) { return x[0] > 0.0 && x[1] > 0.0 ? 1.0 : 0.0; });
  for (double p : {1.0, 2.0, 3.5}) EXPECT_NEAR(norm(f, p, NormMode::Weak), std::pow(1.0, 1.0 / p), 1e-12);
}

TEST(Norm, WeakBelowStrongOnRandomFunctions) {
  const GridSpec s(2, 2.0, 32);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto f = random_function(s, 3, i);
    for (double p : {1.0, 1.5, 2.0, 4.0}) EXPECT_LE(norm(f, p, NormMode::Weak), norm(f, p) * (1 + 1e-12));
  }
}

TEST(Norm, WeightedWeakMatchesSupDefinition) {
  // direct oracle: sup over levels alpha of alpha * w({|f| > alpha})^{1/p}
  const GridSpec s(1, 1.0, 8);
  const GridFunction f(s, {0.5, 3.0, 1.0, 2.0, 0.0, 2.0, 4.0, 1.0});
  const Weight w(GridFunction(s, {1.0, 2.0, 0.5, 1.0, 3.0, 1.0, 0.25, 2.0}));
  const double p = 2.0;
  double oracle = 0.0;
  for (double alpha : f.values()) {
    if (alpha <= 0.0) continue;
    // levels just below each magnitude realize the sup
    const double a = std::nextafter(alpha, 0.0);
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::fabs(f[i]) > a) m += w[i] * s.cell_volume();
    oracle = std::max(oracle, alpha * std::pow(m, 1.0 / p));
  }
  EXPECT_NEAR(norm(f, p, w, NormMode::Weak), oracle, 1e-12 * oracle);
}

TEST(VectorNorm, SingleComponentIsAbs) {
  const GridSpec s(2, 1.0, 8);
  const auto f = random_function(s, 1, 0).map([](double v) { return v - 0.3; });
  const auto g = vector_norm_pointwise(VectorGridFunction({f}), 2.0);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_DOUBLE_EQ(g[i], std::fabs(f[i]));
}

TEST(VectorNorm, TwoEqualComponents) {
  const GridSpec s(2, 1.0, 8);
  const auto f = random_function(s, 1, 1);
  const auto g = vector_norm_pointwise(VectorGridFunction({f, f}), 2.0);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g[i], std::sqrt(2.0) * std::fabs(f[i]), 1e-14 * (1 + g[i]));
}

TEST(VectorNorm, DominatesEachComponent) {
  const GridSpec s(2, 1.0, 16);
  std::vector<GridFunction> parts;
  for (std::uint64_t k = 0; k < 5; ++k) parts.push_back(random_function(s, 9, k));
  const auto g = vector_norm_pointwise(VectorGridFunction(parts), 3.0);
  for (const auto& p : parts)
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(g[i], std::fabs(p[i]));
}

TEST(CubeAverage, ConstantAndIndicator) {
  const GridSpec s(2, 1.0, 16);
  const Cube q = Cube::centered(s, {8, 8}, 2);
  EXPECT_DOUBLE_EQ(cube_average(GridFunction::constant(s, 2.5), q), 2.5);
  std::vector<double> v(s.size(), 0.0);
  q.for_each_cell(s, [&](std::size_t i) { v[i] = 1.0; });
  EXPECT_DOUBLE_EQ(cube_average(GridFunction(s, v), q), 1.0);
}

TEST(CubeAverage, SpikeMassOverVolume) {
  const GridSpec s(2, 1.0, 16);
  const Cube q = Cube::centered(s, {6, 9}, 3);
  std::vector<double> v(s.size(), 0.0);
  const double m = 0.37;
  v[s.flatten({6, 10})] = m / s.cell_volume();
  EXPECT_NEAR(cube_average(GridFunction(s, v), q), m / q.clipped_volume(s), 1e-12);
}

TEST(Cube, EmptyRegionRejected) {
  const GridSpec s(2, 1.0, 16);
  Cube q;
  q.side = 0.1;
  EXPECT_THROW(cube_average(GridFunction::constant(s, 1.0), q), Error);
}

TEST(Grid, FlattenRoundTrip) {
  const GridSpec s(3, 1.0, 6);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.flatten(s.unflatten(i)), i);
}

TEST(Dyadic, ChildrenTileParent) {
  const GridSpec s(2, 1.0, 16);
  const DyadicLattice lat(s);
  for (int j = 0; j < lat.depth(); ++j)
    for (std::size_t o = 0; o < lat.cubes_at(j); ++o) {
      const Cube q = lat.cube(j, o);
      std::size_t cells = 0;
      for (std::size_t c = 0; c < lat.cubes_at(j + 1); ++c) {
        const Cube k = lat.cube(j + 1, c);
        if (q.contains(k.lo, 2)) cells += k.cell_count(2);
      }
      EXPECT_EQ(cells, q.cell_count(2));
    }
}
