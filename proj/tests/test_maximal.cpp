#include <gtest/gtest.h>

#include <cmath>

#include "swl/maximal.hpp"
#include "swl/verify.hpp"

using namespace swl;

namespace {

struct Fixture {
  GridSpec spec;
  RhoPtr rho;
  explicit Fixture(const GridSpec& s) : spec(s), rho(std::make_shared<const CriticalRadiusField>(critical_radius_field(Potential::one(s)))) {}
};

double box_avg(const GridFunction& g, const Index& c, int k) {
  const GridSpec& s = g.spec();
  const Cube q = Cube::centered(s, c, k);
  double sum = 0.0, cnt = 0.0;
  q.for_each_cell(s, [&](std::size_t i) {
    sum += g[i];
    cnt += 1.0;
  });
  return sum / cnt;
}

// Sup over all ladder cubes containing x, straight loops; n = 2 only.
double brute_cube(const GridFunction& f, const MaximalConfig& cfg, std::size_t x, bool centered_only = false) {
  const GridSpec& s = f.spec();
  const Index xi = s.unflatten(x);
  const GridFunction a = f.abs();
  double best = cfg.point_limit ? a[x] : 0.0;
  for (int k : cfg.half_widths) {
    const double side = (2 * k + 1) * s.spacing();
    for (int c0 = xi[0] - k; c0 <= xi[0] + k; ++c0)
      for (int c1 = xi[1] - k; c1 <= xi[1] + k; ++c1) {
        if (c0 < 0 || c1 < 0 || c0 >= s.points() || c1 >= s.points()) continue;
        if (centered_only && (c0 != xi[0] || c1 != xi[1])) continue;
        const Index c{c0, c1};
        const double pen = cfg.exponent == 0.0 ? 1.0 : std::pow(1.0 + side / cfg.rho->rho[s.flatten(c)], cfg.exponent);
        best = std::max(best, box_avg(a, c, k) / pen);
      }
  }
  return best;
}

double brute_dyadic(const GridFunction& f, const MaximalConfig& cfg, std::size_t x) {
  const GridSpec& s = f.spec();
  const DyadicLattice lat(s);
  const GridFunction a = f.abs();
  double best = 0.0;
  for (int j = 0; j <= lat.depth(); ++j)
    for (std::size_t o = 0; o < lat.cubes_at(j); ++o) {
      const Cube q = lat.cube(j, o);
      if (!q.contains(s.unflatten(x), s.dim())) continue;
      double sum = 0.0, cnt = 0.0, m = 0.0;
      q.for_each_cell(s, [&](std::size_t i) {
        sum += a[i];
        cnt += 1.0;
        m = std::max(m, cfg.rho->rho[i]);
      });
      best = std::max(best, sum / cnt / (cfg.exponent == 0.0 ? 1.0 : std::pow(1.0 + q.side / m, cfg.exponent)));
    }
  return best;
}

GridFunction spike(const GridSpec& s, const Index& at, double mass) {
  std::vector<double> v(s.size(), 0.0);
  v[s.flatten(at)] = mass / s.cell_volume();
  return GridFunction(s, v);
}

}  // namespace

TEST(Maximal, ConstantInputWithinPenaltySlack) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 2.0, u.rho, u.spec);
  const auto m = maximal(GridFunction::constant(u.spec, 3.0), cfg);
  const double slack = std::pow(1.0 + u.spec.spacing() / u.rho->min(), 2.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_LE(m[i], 3.0 * (1 + 1e-12));
    EXPECT_GE(m[i], 3.0 / slack);
  }
}

TEST(Maximal, CubeVariantMatchesBruteForce) {
  const Fixture u(GridSpec(2, 2.0, 16));
  for (double th : {0.0, 1.0, 3.0}) {
    const auto cfg = MaximalConfig::make(MaximalVariant::Cube, th, u.rho, u.spec);
    const auto f = random_function(u.spec, 11, static_cast<std::uint64_t>(th));
    const auto m = maximal(f, cfg);
    for (std::size_t x = 0; x < u.spec.size(); x += 7) ASSERT_NEAR(m[x], brute_cube(f, cfg, x), 1e-12 * (1 + m[x]));
  }
}

TEST(Maximal, SpikeValueIsBestCoveringCube) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto f = spike(u.spec, {7, 8}, 0.25);
  const auto m = maximal(f, cfg);
  for (std::size_t x = 0; x < u.spec.size(); ++x) ASSERT_NEAR(m[x], brute_cube(f, cfg, x), 1e-12 * (1 + m[x]));
}

TEST(Maximal, CenteredAndDyadicMatchBruteForce) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto f = random_function(u.spec, 5, 4);
  const auto cen = MaximalConfig::make(MaximalVariant::Centered, 1.5, u.rho, u.spec);
  const auto dy = MaximalConfig::make(MaximalVariant::Dyadic, 1.5, u.rho, u.spec);
  const auto mc = maximal(f, cen), md = maximal(f, dy);
  for (std::size_t x = 0; x < u.spec.size(); x += 5) {
    ASSERT_NEAR(mc[x], brute_cube(f, cen, x, true), 1e-12 * (1 + mc[x]));
    ASSERT_NEAR(md[x], brute_dyadic(f, dy, x), 1e-12 * (1 + md[x]));
  }
}

TEST(Maximal, CenteredBelowUncentered) {
  const Fixture u(GridSpec(2, 2.0, 32));
  for (std::uint64_t i = 0; i < 6; ++i) {
    const auto f = random_function(u.spec, 2, i);
    const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
    const auto mu = maximal(f, cfg), mc = maximal(f, cfg.with_variant(MaximalVariant::Centered));
    for (std::size_t x = 0; x < mu.size(); ++x) ASSERT_LE(mc[x], mu[x]);
  }
}

TEST(Maximal, PointwiseSandwich) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto f = random_function(u.spec, 8, i);
    const auto mv = maximal(f, cfg), m = maximal(f, cfg.with_exponent(0.0));
    for (std::size_t x = 0; x < f.size(); ++x) {
      ASSERT_LE(std::fabs(f[x]), mv[x]);
      ASSERT_LE(mv[x], m[x]);
    }
  }
}

TEST(Maximal, LinearityAndHomogeneityProperties) {
  const Fixture u(GridSpec(2, 2.0, 32));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto f = random_function(u.spec, 1, 0), g = random_function(u.spec, 1, 1);
  const auto mf = maximal(f, cfg), mg = maximal(g, cfg), mfg = maximal(f + g, cfg), m3 = maximal(3.0 * f, cfg);
  for (std::size_t x = 0; x < f.size(); ++x) {
    EXPECT_LE(mfg[x], (mf[x] + mg[x]) * (1 + 1e-12));  // sublinear
    EXPECT_NEAR(m3[x], 3.0 * mf[x], 1e-12 * m3[x]);
  }
}

TEST(MaximalPower, DeltaOneIsMaximal) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto f = random_function(u.spec, 4, 0);
  const auto a = maximal_power(f, 1.0, cfg), b = maximal(f, cfg);
  for (std::size_t x = 0; x < f.size(); ++x) EXPECT_EQ(a[x], b[x]);
}

TEST(MaximalPower, IndicatorPowers) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto E = GridFunction::from_points(u.spec, [](const Point& x) { return x[0] > 0.3 ? 1.0 : 0.0; });
  const auto a = maximal_power(E, 0.5, cfg), b = maximal(E, cfg);
  for (std::size_t x = 0; x < E.size(); ++x) EXPECT_NEAR(a[x], b[x] * b[x], 1e-12);
}

TEST(MaximalPower, SpikeHalfPowerMatchesBruteForce) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto f = spike(u.spec, {4, 11}, 0.5);
  const auto root = f.map([](double v) { return std::sqrt(std::fabs(v)); });
  const auto m = maximal_power(f, 0.5, cfg);
  for (std::size_t x = 0; x < f.size(); x += 3) {
    const double b = brute_cube(root, cfg, x);
    ASSERT_NEAR(m[x], b * b, 1e-12 * (1 + m[x]));
  }
}

TEST(MaximalWeighted, UnitWeightIsFifthPowerOnInterior) {
  const GridSpec s(2, 2.0, 32);
  const std::vector<int> ladder{0, 1};
  const Weight one(GridFunction::constant(s, 1.0));
  const auto f = random_function(s, 6, 0);
  const auto mw = maximal_weighted(f, one, ladder);
  MaximalConfig plain;
  plain.half_widths = ladder;
  const auto m = maximal(f, plain);
  for (int i = 8; i < 24; ++i)
    for (int j = 8; j < 24; ++j) {
      const std::size_t x = s.flatten({i, j});
      EXPECT_NEAR(mw[x], m[x] / 25.0, 1e-12 * (1 + m[x]));
    }
}

TEST(MaximalWeighted, ConstantBoundedAndBruteForceAtTenPoints) {
  const GridSpec s(2, 2.0, 16);
  const auto ladder = default_half_widths(s);
  const Weight w = random_weight(s, 3, 0);
  const auto mc = maximal_weighted(GridFunction::constant(s, 2.0), w, ladder);
  for (std::size_t x = 0; x < mc.size(); ++x) EXPECT_LE(mc[x], 2.0 * (1 + 1e-12));
  const auto f = random_function(s, 3, 1);
  const auto m = maximal_weighted(f, w, ladder);
  for (std::size_t x = 0; x < s.size(); x += s.size() / 10) {
    const Index xi = s.unflatten(x);
    double best = std::fabs(f[x]) / 25.0;
    for (int k : ladder)
      for (int c0 = xi[0] - k; c0 <= xi[0] + k; ++c0)
        for (int c1 = xi[1] - k; c1 <= xi[1] + k; ++c1) {
          if (c0 < 0 || c1 < 0 || c0 >= 16 || c1 >= 16) continue;
          double num = 0.0, den = 0.0;
          Cube::centered(s, {c0, c1}, k).for_each_cell(s, [&](std::size_t i) { num += std::fabs(f[i]) * w[i]; });
          Cube::centered(s, {c0, c1}, 5 * k + 2).for_each_cell(s, [&](std::size_t i) { den += w[i]; });
          best = std::max(best, num / den);
        }
    EXPECT_NEAR(m[x], best, 1e-12 * (1 + best));
  }
}

TEST(SharpMaximal, ConstantGivesPenalizedUnitCube) {
  const GridSpec s(2, 2.0, 60);
  for (double eta : {0.5, 1.0, 2.0}) {
    const auto m = sharp_maximal(GridFunction::constant(s, 3.0), eta);
    for (std::size_t x = 0; x < m.size(); ++x) ASSERT_NEAR(m[x], 3.0 / std::pow(2.0, eta), 1e-12);
  }
  const auto z = sharp_maximal(GridFunction::constant(s, 0.0), 1.0);
  EXPECT_EQ(z.max_abs(), 0.0);
}

TEST(SharpMaximal, DipoleMatchesBruteForce) {
  const GridSpec s(2, 2.0, 16);
  std::vector<double> v(s.size(), 0.0);
  v[s.flatten({7, 7})] = 1.0;
  v[s.flatten({7, 8})] = -1.0;
  const GridFunction f(s, v);
  const double eta = 1.0;
  const auto m = sharp_maximal(f, eta);
  const auto ladder = default_half_widths(s);
  const double h = s.spacing();
  const int k_unit = static_cast<int>(std::ceil((1.0 / h - 1.0) / 2.0 - 1e-12));
  for (std::size_t x = 0; x < s.size(); x += 3) {
    const Index xi = s.unflatten(x);
    double osc = 0.0, big = 0.0;
    std::vector<int> ks = ladder;
    ks.push_back(k_unit);
    for (int k : ks) {
      const double side = (2 * k + 1) * h;
      for (int c0 = xi[0] - k; c0 <= xi[0] + k; ++c0)
        for (int c1 = xi[1] - k; c1 <= xi[1] + k; ++c1) {
          if (c0 < 0 || c1 < 0 || c0 >= 16 || c1 >= 16) continue;
          const Cube q = Cube::centered(s, {c0, c1}, k);
          const double mean = box_avg(f, {c0, c1}, k);
          if (side < 1.0) {
            double dev = 0.0, cnt = 0.0;
            q.for_each_cell(s, [&](std::size_t i) {
              dev += std::fabs(f[i] - mean);
              cnt += 1.0;
            });
            osc = std::max(osc, dev / cnt);
          } else {
            big = std::max(big, box_avg(f.abs(), {c0, c1}, k) / std::pow(1.0 + side, eta));
          }
        }
    }
    ASSERT_NEAR(m[x], osc + big, 1e-12) << x;
  }
  EXPECT_GT(m.max_abs(), 0.0);
}

TEST(MaximalVector, SingleAndEqualComponents) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  const auto f = random_function(u.spec, 2, 2);
  const auto m = maximal(f, cfg);
  const auto one = maximal_vector(VectorGridFunction({f}), cfg, 2.0);
  const auto three = maximal_vector(VectorGridFunction({f, f, f}), cfg, 3.0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    EXPECT_NEAR(one[x], m[x], 1e-14 * m[x]);
    EXPECT_NEAR(three[x], std::cbrt(3.0) * m[x], 1e-12 * m[x]);
  }
}

TEST(MaximalVector, FourComponentsAgainstComponentwiseBruteForce) {
  const Fixture u(GridSpec(2, 2.0, 16));
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, 1.0, u.rho, u.spec);
  std::vector<GridFunction> parts;
  for (std::uint64_t k = 0; k < 4; ++k) parts.push_back(random_function(u.spec, 21, k));
  const auto m = maximal_vector(VectorGridFunction(parts), cfg, 2.0);
  for (std::size_t x = 0; x < u.spec.size(); x += 9) {
    double s = 0.0;
    for (const auto& p : parts) s += std::pow(brute_cube(p, cfg, x), 2.0);
    EXPECT_NEAR(m[x], std::sqrt(s), 1e-12 * (1 + m[x]));
  }
}
