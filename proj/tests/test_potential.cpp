#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "swl/potential.hpp"

using namespace swl;

namespace {

// Root of a continuous increasing g on [lo, hi] by plain bisection.
template <typename G>
double bisect(G g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// (avg V^q)^{1/q} / avg V over cubes, straight loops.
double brute_rh(const GridFunction& V, double q, const std::vector<Cube>& cubes) {
  const GridSpec& s = V.spec();
  double worst = 0.0;
  for (const Cube& Q : cubes) {
    double a = 0.0, b = 0.0, cnt = 0.0;
    Q.for_each_cell(s, [&](std::size_t i) {
      a += V[i];
      b += std::pow(V[i], q);
      cnt += 1.0;
    });
    worst = std::max(worst, std::pow(b / cnt, 1.0 / q) / (a / cnt));
  }
  return worst;
}

GridFunction mollified_singular(const GridSpec& s) {
  const double h = s.spacing();
  return GridFunction::from_points(s, [&](const Point& x) { return std::pow(std::hypot(x[0], x[1]) + h, -1.9); });
}

}  // namespace

TEST(ReverseHolder, ConstantPotentialIsOne) {
  const GridSpec s(2, 2.0, 16);
  for (double q : {1.5, 2.0, 8.0, std::numeric_limits<double>::infinity()})
    EXPECT_DOUBLE_EQ(check_reverse_holder(Potential::one(s), q, CubeFamily::standard(s)).constant, 1.0);
}

TEST(ReverseHolder, PolynomialFiniteAndMatchesBruteForce) {
  const GridSpec s(2, 2.0, 16);
  const auto fam = CubeFamily::standard(s);
  const auto V = Potential::square_norm(s);
  const auto rep = check_reverse_holder(V, 2.0, fam);
  EXPECT_TRUE(std::isfinite(rep.constant));
  EXPECT_NEAR(rep.constant, brute_rh(V.values(), 2.0, fam.cubes(s)), 1e-9 * rep.constant);
  EXPECT_TRUE(std::isfinite(check_reverse_holder(V, std::numeric_limits<double>::infinity(), fam).constant));
}

TEST(ReverseHolder, SingularPotentialGrowsUnderRefinement) {
  const double q = 8.0;
  double prev = 0.0;
  for (int N : {16, 32, 64}) {
    const GridSpec s(2, 2.0, N);
    const auto fam = CubeFamily::standard(s);
    const GridFunction V = mollified_singular(s);
    const double c = check_reverse_holder(Potential(V), q, fam).constant;
    EXPECT_NEAR(c, brute_rh(V, q, fam.cubes(s)), 1e-9 * c) << "N=" << N;
    EXPECT_GT(c, prev) << "N=" << N;
    prev = c;
  }
}

TEST(CriticalRadius, ConstantPotentialThreeDims) {
  const GridSpec s(3, 2.0, 16);
  const auto rho = critical_radius_field(Potential::one(s));
  const double omega3 = 4.0 * std::numbers::pi / 3.0;
  const double oracle = bisect([&](double r) { return r * r * omega3 - 1.0; }, 0.0, 10.0);
  EXPECT_NEAR(oracle, 0.4886025119029199, 1e-12);
  for (std::size_t i = 0; i < s.size(); ++i) ASSERT_NEAR(rho[i], oracle, 2.0 * s.spacing());
  EXPECT_LE(rho.max() - rho.min(), 1e-9);
}

TEST(CriticalRadius, SquareNormAtOrigin) {
  const GridSpec s(3, 2.0, 16);
  const auto rho = critical_radius_field(Potential::square_norm(s));
  // (1/r) int_{B(0,r)} |y|^2 dy = 4 pi r^4 / 5
  const double oracle = bisect([](double r) { return 4.0 * std::numbers::pi * std::pow(r, 4) / 5.0 - 1.0; }, 0.0, 10.0);
  EXPECT_NEAR(oracle, std::pow(5.0 / (4.0 * std::numbers::pi), 0.25), 1e-12);
  EXPECT_NEAR(rho.nearest({0.0, 0.0, 0.0}), oracle, 2.0 * s.spacing());
}

TEST(CriticalRadius, ScalingByFourHalvesRho) {
  const GridSpec s(3, 2.0, 16);
  const auto a = critical_radius_field(Potential::constant(s, 1.0));
  const auto b = critical_radius_field(Potential::constant(s, 4.0));
  // interior point: both balls stay inside the box
  const std::size_t mid = s.flatten({8, 8, 8});
  EXPECT_NEAR(b[mid], a[mid] / 2.0, 2.0 * s.spacing());
}

TEST(CriticalRadius, TwoDimsConstantIsOmegaToMinusHalf) {
  const GridSpec s(2, 2.0, 32);
  const auto rho = critical_radius_field(Potential::one(s));
  // n=2: int_B 1 = pi r^2 <= 1
  for (std::size_t i = 0; i < s.size(); ++i) ASSERT_NEAR(rho[i], 1.0 / std::sqrt(std::numbers::pi), 2.0 * s.spacing());
}

TEST(Psi, Basics) {
  const GridSpec s(3, 2.0, 16);
  const auto rho = critical_radius_field(Potential::one(s));
  const Point x{0.0625, 0.0625, 0.0625};
  EXPECT_DOUBLE_EQ(psi_ball(x, 0.7, rho, 0.0), 1.0);
  EXPECT_NEAR(psi_ball(x, 1e-12, rho, 3.0), 1.0, 1e-10);
  for (double th : {0.5, 1.0, 2.0}) EXPECT_NEAR(psi_ball(x, rho.nearest(x), rho, th), std::pow(2.0, th), 1e-6);
}

TEST(Psi, DyadicVersion) {
  const GridSpec s(3, 2.0, 16);
  const DyadicLattice lat(s);
  const Cube corner = lat.cube(2, std::size_t{0});  // side 1 at the corner
  ASSERT_DOUBLE_EQ(corner.side, 1.0);
  const auto flat = constant_radius_field(s, 0.3);
  EXPECT_DOUBLE_EQ(psi_cube_dyadic(corner, flat, 0.0), 1.0);
  EXPECT_NEAR(psi_cube_dyadic(corner, flat, 2.0), psi_ball(corner.center, corner.side, flat, 2.0), 1e-14);
  const auto rho = critical_radius_field(Potential::square_norm(s));
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Index idx = s.unflatten(i);
    if (corner.contains(idx, 3)) m = std::max(m, rho[i]);
  }
  EXPECT_NEAR(psi_cube_dyadic(corner, rho, 1.5), std::pow(1.0 + 1.0 / m, 1.5), 1e-12);
}

TEST(Lemma21, ConstantFieldCertifiesAnything) {
  const GridSpec s(2, 2.0, 16);
  const auto rho = constant_radius_field(s, 0.5);
  const auto pairs = sample_pairs(s, 200, 1);
  for (double l0 : {0.25, 1.0, 3.0}) EXPECT_TRUE(lemma21_check(rho, 1.0, l0, pairs).certified());
  EXPECT_TRUE(lemma21_check(rho, 1.0, 1.0, {{5, 5}}).certified());
}

TEST(Lemma21, SquareNormFitAndGrowthBand) {
  const GridSpec s(3, 4.0, 16);
  const auto rho = critical_radius_field(Potential::square_norm(s));
  const auto fit = fit_lemma21(rho, sample_pairs(s, 2000, 7));
  EXPECT_TRUE(fit.certified());
  EXPECT_GE(fit.C0, 1.0);
  // rho(x)(1+|x|) stays inside a fixed band; frozen from this grid
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = rho[i] * (1.0 + s.norm_of_point(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_NEAR(lo, 0.563822, 1e-5);
  EXPECT_NEAR(hi, 0.733728, 1e-5);
  EXPECT_LT(hi / lo, 1.5);
}
