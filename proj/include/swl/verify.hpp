#pragma once

// Inequality harness: measured operator norms, weak-type sweeps, duality and
// Kolmogorov checks, the Fefferman-Stein comparison, RdF certification and
// extrapolation demonstrations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swl/box_sums.hpp"
#include "swl/construct.hpp"
#include "swl/grid.hpp"
#include "swl/maximal.hpp"
#include "swl/random.hpp"
#include "swl/report.hpp"
#include "swl/weights.hpp"

namespace swl {

using VectorOperator = std::function<GridFunction(const VectorGridFunction&)>;

struct PairFamily {
  std::vector<std::pair<GridFunction, GridFunction>> pairs;
  std::string generator;
};

struct NamedWeight {
  std::string name;
  Weight w;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline double power_integral(const GridFunction& f, double p, const Weight* w) {
  const double v = norm(f, p, w);
  return std::pow(v, p);
}

inline double median_positive(const GridFunction& f) {
  std::vector<double> v;
  for (double x : f.values())
    if (std::fabs(x) > 0.0) v.push_back(std::fabs(x));
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random data. Everything is supported in the central box |x_i| < L/2 so the
// clipped boundary cubes see no mass.

inline GridFunction random_bumps(const GridSpec& spec, std::uint64_t seed, std::uint64_t stream, int count = 3) {
  CounterRng rng(seed, stream);
  const double L = spec.half_width();
  struct Bump {
    Point c;
    double width, height;
  };
  std::vector<Bump> bumps;
  for (int b = 0; b < count; ++b) {
    Bump bump{};
    for (int a = 0; a < spec.dim(); ++a) bump.c[a] = rng.next(-0.35 * L, 0.35 * L);
    bump.width = rng.next(0.05, 0.2) * L;
    bump.height = rng.next(0.2, 2.0);
    bumps.push_back(bump);
  }
  return GridFunction::from_points(spec, [&](const Point& x) {
    bool inside = true;
    for (int a = 0; a < spec.dim(); ++a) inside = inside && std::fabs(x[a]) < 0.5 * L;
    if (!inside) return 0.0;
    double v = 0.0;
    for (const auto& b : bumps) {
      double d2 = 0.0;
      for (int a = 0; a < spec.dim(); ++a) d2 += (x[a] - b.c[a]) * (x[a] - b.c[a]);
      v += b.height * std::exp(-d2 / (2.0 * b.width * b.width));
    }
    return v;
  });
}

inline GridFunction random_spikes(const GridSpec& spec, std::uint64_t seed, std::uint64_t stream, int count = 4) {
  CounterRng rng(seed, stream);
  std::vector<double> v(spec.size(), 0.0);
  const int N = spec.points();
  for (int s = 0; s < count; ++s) {
    Index idx{};
    for (int a = 0; a < spec.dim(); ++a) idx[a] = N / 4 + static_cast<int>(rng.next_index(static_cast<std::uint64_t>(N / 2)));
    v[spec.flatten(idx)] += rng.next(0.5, 5.0);
  }
  return GridFunction(spec, std::move(v));
}

inline GridFunction random_noise(const GridSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  const int N = spec.points();
  std::vector<double> v(spec.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Index idx = spec.unflatten(i);
    bool inside = true;
    for (int a = 0; a < spec.dim(); ++a) inside = inside && idx[a] >= N / 4 && idx[a] < 3 * N / 4;
    if (inside) v[i] = rng.uniform(i);
  }
  return GridFunction(spec, std::move(v));
}

/// Cycles through bumps, spikes and noise.
inline GridFunction random_function(const GridSpec& spec, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t stream = 1000 + index;
  switch (index % 3) {
    case 0: return random_bumps(spec, seed, stream);
    case 1: return random_spikes(spec, seed, stream);
    default: return random_noise(spec, seed, stream);
  }
}

/// exp of a smooth random field: strictly positive, moderate dynamic range.
inline Weight random_weight(const GridSpec& spec, std::uint64_t seed, std::uint64_t index, double amplitude = 1.5) {
  const GridFunction g = random_bumps(spec, seed, 5000 + index, 4);
  const double m = g.max() > 0.0 ? g.max() : 1.0;
  CounterRng rng(seed, 9000 + index);
  const double sign = rng.next() < 0.5 ? -1.0 : 1.0;
  return Weight(g.map([&](double v) { return std::exp(sign * amplitude * v / m); }));
}

// ---------------------------------------------------------------------------
// Operator norms and weak type.

inline InequalityReport operator_norm_report(const std::string& name, const Operator& op, double p, const Weight* w,
                                             const std::vector<GridFunction>& suite) {
  require(!suite.empty(), "operator norm: empty suite");
  auto rep = InequalityReport::empty(name);
  std::size_t usable = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const double rhs = norm(suite[i], p, w);
    const double lhs = norm(op(suite[i]), p, w);
    if (rhs == 0.0 && lhs == 0.0) continue;
    ++usable;
    rep.observe(lhs, rhs, {{"instance", i}, {"p", p}});
  }
  require(usable > 0, "operator norm: all-zero suite");
  return rep;
}

/// max over the suite of ||op f||_{L^p(w)} / ||f||_{L^p(w)}.
inline double measure_operator_norm(const Operator& op, double p, const Weight* w,
                                    const std::vector<GridFunction>& suite) {
  return operator_norm_report("operator_norm", op, p, w, suite).ratio;
}

inline std::vector<double> level_sweep(double median, int count = 25) {
  std::vector<double> levels;
  if (!(median > 0.0)) return levels;
  for (int i = 0; i < count; ++i) levels.push_back(median * std::pow(10.0, -3.0 + 6.0 * i / (count - 1)));
  return levels;
}

namespace detail {

/// sup over the alpha sweep of alpha^p w({|Tf| > alpha}) / denom.
inline void observe_weak(InequalityReport& rep, const GridFunction& Tf, double p, const Weight* w, double denom,
                         std::size_t instance) {
  const double med = median_positive(Tf);
  if (med == 0.0) {
    rep.observe(0.0, denom, {{"instance", instance}});
    return;
  }
  const double cell = Tf.spec().cell_volume();
  for (double alpha : level_sweep(med)) {
    long double mass = 0.0L;
    for (std::size_t i = 0; i < Tf.size(); ++i)
      if (std::fabs(Tf[i]) > alpha) mass += weight_at(w, i);
    const double lhs = std::pow(alpha, p) * static_cast<double>(mass) * cell;
    rep.observe(lhs, denom, {{"instance", instance}, {"alpha", alpha}});
  }
}

}  // namespace detail

inline InequalityReport check_weak_type(const std::string& name, const Operator& op, double p, const Weight* w,
                                        const std::vector<GridFunction>& suite) {
  auto rep = InequalityReport::empty(name);
  for (std::size_t i = 0; i < suite.size(); ++i)
    detail::observe_weak(rep, op(suite[i]), p, w, detail::power_integral(suite[i], p, w), i);
  return rep;
}

/// Weak type for a vector operator returning |TF|_r; the right side is
/// int |F|_r^p w.
inline InequalityReport check_weak_type_vector(const std::string& name, const VectorOperator& op, double p, double r,
                                               const Weight* w, const std::vector<VectorGridFunction>& suite) {
  auto rep = InequalityReport::empty(name);
  for (std::size_t i = 0; i < suite.size(); ++i)
    detail::observe_weak(rep, op(suite[i]), p, w, detail::power_integral(vector_norm_pointwise(suite[i], r), p, w), i);
  return rep;
}

/// Same sweep with |TF|_r precomputed for each suite entry, so one operator
/// pass can serve several weights.
inline InequalityReport check_weak_type_vector(const std::string& name, const std::vector<GridFunction>& outputs,
                                               double p, double r, const Weight* w,
                                               const std::vector<VectorGridFunction>& suite) {
  require(outputs.size() == suite.size(), "weak type: outputs and suite differ in length");
  auto rep = InequalityReport::empty(name);
  for (std::size_t i = 0; i < suite.size(); ++i)
    detail::observe_weak(rep, outputs[i], p, w, detail::power_integral(vector_norm_pointwise(suite[i], r), p, w), i);
  return rep;
}

inline InequalityReport vector_norm_report(const std::string& name, const std::vector<GridFunction>& outputs, double p,
                                           double r, const Weight* w, const std::vector<VectorGridFunction>& suite) {
  require(outputs.size() == suite.size(), "vector norm: outputs and suite differ in length");
  auto rep = InequalityReport::empty(name);
  for (std::size_t i = 0; i < suite.size(); ++i)
    rep.observe(norm(outputs[i], p, w), norm(vector_norm_pointwise(suite[i], r), p, w), {{"instance", i}});
  return rep;
}

inline InequalityReport vector_norm_report(const std::string& name, const VectorOperator& op, double p, double r,
                                           const Weight* w, const std::vector<VectorGridFunction>& suite) {
  std::vector<GridFunction> outputs;
  for (const auto& F : suite) outputs.push_back(op(F));
  return vector_norm_report(name, outputs, p, r, w, suite);
}

// ---------------------------------------------------------------------------
// Duality inequality: int (M_{V,eta_bar} f)^q g <= C int f^q M_{V,eta_1} g and
// its dyadic precursor with M^dyadic_{V,eta_2} on the left.

struct DualityReports {
  InequalityReport full = InequalityReport::empty("duality_full");
  InequalityReport dyadic = InequalityReport::empty("duality_dyadic");
};

inline void observe_duality(DualityReports& out, const GridFunction& f, const GridFunction& g, double q,
                            const ExponentBudget& b, const RhoPtr& rho, std::size_t instance = 0) {
  require(q > 1.0, "duality: q must exceed 1");
  const GridSpec& spec = f.spec();
  const auto cube = MaximalConfig::make(MaximalVariant::Cube, 0.0, rho, spec);
  const GridFunction Mg = maximal(g, cube.with_exponent(b.eta1));
  const GridFunction Mf = maximal(f, cube.with_exponent(b.eta_bar));
  const GridFunction Df = maximal(f, cube.with_variant(MaximalVariant::Dyadic).with_exponent(b.eta2));
  auto qpow = [q](double v) { return std::pow(std::fabs(v), q); };
  const double rhs = integrate(f.map(qpow) * Mg);
  const json inst{{"instance", instance}, {"q", q}, {"eta_bar", b.eta_bar}, {"eta2", b.eta2}, {"eta1", b.eta1}};
  out.full.observe(integrate(Mf.map(qpow) * g), rhs, inst);
  out.dyadic.observe(integrate(Df.map(qpow) * g), rhs, inst);
}

inline DualityReports check_duality_ineq(const GridFunction& f, const GridFunction& g, double q,
                                         const ExponentBudget& b, const RhoPtr& rho) {
  DualityReports out;
  observe_duality(out, f, g, q, b, rho);
  return out;
}

/// (1/|Q|) int_Q (M_{V,theta} f)^delta against |Q|^{-delta} ||f||_1^delta for
/// f supported in Q.
inline InequalityReport kolmogorov_check(const GridFunction& f, double delta, const Cube& Q, const MaximalConfig& cfg) {
  require(delta > 0.0 && delta < 1.0, "kolmogorov: delta must lie in (0, 1)");
  const GridSpec& spec = f.spec();
  const GridFunction Mf = maximal(f, cfg);
  long double s = 0.0L;
  Q.for_each_cell(spec, [&](std::size_t i) { s += std::pow(Mf[i], delta); });
  const double vol = Q.clipped_volume(spec);
  const double lhs = static_cast<double>(s) * spec.cell_volume() / vol;
  double l1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) l1 += std::fabs(f[i]);
  l1 *= spec.cell_volume();
  const double rhs = std::pow(vol, -delta) * std::pow(l1, delta);
  return InequalityReport::single("kolmogorov", lhs, rhs);
}

/// int M_{phi,delta,eta} f^p w against int M#_{phi,delta,eta} f^p w.
inline InequalityReport check_fs(const GridFunction& f, double p, double delta, double eta, const Weight* w) {
  require(delta > 0.0 && delta < 1.0, "fefferman-stein: delta must lie in (0, 1)");
  const GridSpec& spec = f.spec();
  const MaximalConfig phi = MaximalConfig::make(MaximalVariant::Phi, eta, nullptr, spec);
  const GridFunction lhs_f = maximal_power(f, delta, phi);
  const GridFunction rhs_f = sharp_maximal(f, eta, delta);
  return InequalityReport::single("fefferman_stein", detail::power_integral(lhs_f, p, w),
                                  detail::power_integral(rhs_f, p, w));
}

// ---------------------------------------------------------------------------
// Synthetic operator T_rho f(x) = average of f over the centered cube whose
// side is the ladder rung log-nearest to rho(x).

inline std::vector<int> t_rho_half_widths(const CriticalRadiusField& rho, const std::vector<int>& ladder) {
  const GridSpec& spec = rho.rho.spec();
  std::vector<int> pick(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double target = std::log(rho[i]);
    int best = ladder.front();
    double gap = std::numeric_limits<double>::infinity();
    for (int k : ladder) {
      const double d = std::fabs(std::log(detail::side_of(spec, k)) - target);
      if (d < gap) {
        gap = d;
        best = k;
      }
    }
    pick[i] = best;
  }
  return pick;
}

inline GridFunction t_rho(const GridFunction& f, const CriticalRadiusField& rho, const std::vector<int>& ladder) {
  const GridSpec& spec = f.spec();
  require_same_grid(spec, rho.rho.spec());
  const auto ks = t_rho_half_widths(rho, ladder);
  const BoxSums sums(f);
  std::vector<double> out(spec.size());
  parallel_for(spec.size(), [&](std::size_t c) {
    const Index ci = spec.unflatten(c);
    const Index lo = detail::box_lo(spec, ci, ks[c]), hi = detail::box_hi(spec, ci, ks[c]);
    out[c] = static_cast<double>(sums.sum(lo, hi) / detail::box_count(spec, lo, hi));
  });
  return GridFunction(spec, std::move(out));
}

/// Pointwise |T_rho f| <= (1 + s(x)/rho(x))^eta M_{V,eta} f, s(x) the snapped side.
/// The factor is 2^eta up to the ladder snap.
inline InequalityReport t_rho_domination(const GridFunction& f, const MaximalConfig& cfg) {
  const GridSpec& spec = f.spec();
  const auto& rho = *cfg.rho;
  const auto ks = t_rho_half_widths(rho, cfg.half_widths);
  const GridFunction T = t_rho(f, rho, cfg.half_widths);
  const GridFunction M = maximal(f, cfg);
  auto rep = InequalityReport::empty("t_rho_domination", 1.0 + 1e-12);
  std::size_t violations = 0;
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double bound = detail::penalty(detail::side_of(spec, ks[i]), rho[i], cfg.exponent) * M[i];
    const double q = InequalityReport::safe_ratio(std::fabs(T[i]), bound);
    if (q > 1.0 + 1e-12) ++violations;
    if (q > worst) {
      worst = q;
      at = i;
    }
  }
  rep.observe(worst, 1.0, {{"violations", violations}, {"cell", at}, {"snap_factor_log2", std::log2(detail::penalty(detail::side_of(spec, ks[at]), rho[at], 1.0))}});
  rep.pass = rep.pass && violations == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Extrapolation.

struct ExtrapolationOptions {
  double p0 = 2.0;
  std::vector<double> targets{0.5, 1.0, 3.0};
  double q = 2.0;            // vector exponent
  std::size_t block = 4;     // components per vector instance
  bool strong = true;
  bool weak = true;
  bool vector = true;
  bool lorentz_vector = true;
  double gamma = 1.0;        // operator mode runs p > gamma
};

namespace detail {

inline GridFunction lq_aggregate(const std::vector<GridFunction>& parts, double q) {
  return vector_norm_pointwise(VectorGridFunction(parts), q);
}

}  // namespace detail

/// Measures the conclusions of extrapolation for a family of pairs (F, G):
/// first the hypothesis at p0, then strong and weak bounds at every target,
/// and vector-valued bounds with l^q aggregation over blocks of pairs.
/// When op and inputs are given, also the operator norm of op on L^p(w) for
/// targets p > gamma.
inline std::vector<InequalityReport> extrapolation_suite(const PairFamily& family,
                                                         const std::vector<NamedWeight>& weights,
                                                         const ExtrapolationOptions& opt, const Operator* op = nullptr,
                                                         const std::vector<GridFunction>* inputs = nullptr) {
  require(!family.pairs.empty(), "extrapolation: empty family");
  require(!weights.empty(), "extrapolation: empty weight suite");
  std::vector<InequalityReport> out;

  auto strong_report = [&](const std::string& name, double p) {
    auto rep = InequalityReport::empty(name);
    for (const auto& nw : weights)
      for (std::size_t i = 0; i < family.pairs.size(); ++i)
        rep.observe(norm(family.pairs[i].first, p, nw.w), norm(family.pairs[i].second, p, nw.w),
                    {{"weight", nw.name}, {"pair", i}, {"p", p}});
    return rep;
  };

  auto hyp = strong_report("hypothesis_p0=" + detail::fmt(opt.p0), opt.p0);
  if (!std::isfinite(hyp.ratio)) throw Error("extrapolation: base hypothesis fails");
  out.push_back(hyp);

  for (double p : opt.targets) {
    if (opt.strong) out.push_back(strong_report("strong_p=" + detail::fmt(p), p));
    if (opt.weak) {
      auto rep = InequalityReport::empty("weak_p=" + detail::fmt(p));
      for (const auto& nw : weights)
        for (std::size_t i = 0; i < family.pairs.size(); ++i)
          rep.observe(norm(family.pairs[i].first, p, nw.w, NormMode::Weak),
                      norm(family.pairs[i].second, p, nw.w, NormMode::Weak), {{"weight", nw.name}, {"pair", i}});
      out.push_back(rep);
    }
    if ((opt.vector || opt.lorentz_vector) && opt.block > 0 && family.pairs.size() >= opt.block) {
      auto vs = InequalityReport::empty("vector_q=" + detail::fmt(opt.q) + "_p=" + detail::fmt(p));
      auto vw = InequalityReport::empty("lorentz_vector_q=" + detail::fmt(opt.q) + "_p=" + detail::fmt(p));
      for (std::size_t start = 0; start + opt.block <= family.pairs.size(); start += opt.block) {
        std::vector<GridFunction> fs, gs;
        for (std::size_t j = start; j < start + opt.block; ++j) {
          fs.push_back(family.pairs[j].first);
          gs.push_back(family.pairs[j].second);
        }
        const GridFunction F = detail::lq_aggregate(fs, opt.q), G = detail::lq_aggregate(gs, opt.q);
        for (const auto& nw : weights) {
          const json inst{{"weight", nw.name}, {"block", start / opt.block}};
          if (opt.vector) vs.observe(norm(F, p, nw.w), norm(G, p, nw.w), inst);
          if (opt.lorentz_vector)
            vw.observe(norm(F, p, nw.w, NormMode::Weak), norm(G, p, nw.w, NormMode::Weak), inst);
        }
      }
      if (opt.vector) out.push_back(vs);
      if (opt.lorentz_vector) out.push_back(vw);
    }
  }

  if (op && inputs) {
    for (double p : opt.targets) {
      if (!(p > opt.gamma)) continue;
      auto rep = InequalityReport::empty("operator_p=" + detail::fmt(p));
      for (const auto& nw : weights) {
        const auto r = operator_norm_report("operator", *op, p, &nw.w, *inputs);
        json w = r.worst;
        w["weight"] = nw.name;
        rep.observe(r.lhs, r.rhs, w);
        rep.suite_size += r.suite_size - 1;
      }
      out.push_back(rep);
    }
  }
  return out;
}

/// The demo family: F = |T_rho f|, G = M_{V,eta} f.
inline PairFamily t_rho_family(const std::vector<GridFunction>& inputs, const MaximalConfig& cfg) {
  PairFamily fam;
  fam.generator = "t_rho vs M_V eta=" + detail::fmt(cfg.exponent);
  for (const auto& f : inputs) fam.pairs.emplace_back(t_rho(f, *cfg.rho, cfg.half_widths).abs(), maximal(f, cfg));
  return fam;
}

inline PairFamily identical_family(const std::vector<GridFunction>& inputs) {
  PairFamily fam;
  fam.generator = "identical pairs";
  for (const auto& f : inputs) fam.pairs.emplace_back(f.abs(), f.abs());
  return fam;
}

// ---------------------------------------------------------------------------
// RdF certification.

/// Re-measures (a), (b) and (c) for a finished majorant. The ratio is
/// sup M(Rh)/Rh over 2A; the ceiling allows the truncation tolerance.
inline InequalityReport rdf_properties_check(const RdFResult& r) {
  const RdFCertificate c = detail::certify_rdf(r.base, r.majorant, r.op, r.operator_norm_A, r.options);
  auto rep = InequalityReport::empty("rdf_properties", 1.0 + r.options.tol);
  rep.observe(c.a1_ratio, 2.0 * r.operator_norm_A,
              {{"domination_violations", c.domination_violations},
               {"norm_ratio", number_or_inf(c.norm_ratio)},
               {"a1_ratio", number_or_inf(c.a1_ratio)},
               {"A", r.operator_norm_A},
               {"K", r.truncation_K}});
  rep.pass = rep.pass && c.pointwise_domination && c.norm_doubling;
  return rep;
}

// ---------------------------------------------------------------------------
// Weight suite.

struct WeightSuiteOptions {
  bool constructed = true;   // RdF majorants and a factorization factor
  std::size_t majorants = 2;
};

inline GridFunction radial_power(const GridSpec& spec, double a) {
  return GridFunction::from_points(spec, [&](const Point& x) {
    double s = 0.0;
    for (int k = 0; k < spec.dim(); ++k) s += x[k] * x[k];
    return std::pow(1.0 + std::sqrt(s), a);
  });
}

inline std::vector<NamedWeight> weight_suite(const GridSpec& spec, double theta, const RhoPtr& rho, std::uint64_t seed,
                                             const WeightSuiteOptions& opt = {}) {
  const double n = spec.dim();
  std::vector<NamedWeight> out;
  out.push_back({"one", Weight::unit(spec)});
  out.push_back({"decay_gamma=0", Weight(radial_power(spec, -n))});
  out.push_back({"decay_gamma=theta/2", Weight(radial_power(spec, -(n + theta / 2.0)))});
  out.push_back({"decay_gamma=theta", Weight(radial_power(spec, -(n + theta)))});
  out.push_back({"power_a=-n/2", Weight(radial_power(spec, -n / 2.0))});
  out.push_back({"power_a=n/4", Weight(radial_power(spec, n / 4.0))});
  if (opt.constructed) {
    const MaximalConfig cfg = MaximalConfig::make(MaximalVariant::Cube, theta, rho, spec);
    const Operator M = [cfg](const GridFunction& f) { return maximal(f, cfg); };
    for (std::size_t j = 0; j < opt.majorants; ++j) {
      const GridFunction h = random_bumps(spec, seed, 7000 + j);
      RdFOptions ro;
      ro.A = measure_operator_norm(M, 2.0, nullptr, {h});
      const RdFResult r = rdf_majorant(h, cfg, ro);
      out.push_back({"rdf_majorant_" + std::to_string(j), r.weight()});
    }
    FactorOptions fo;
    fo.measure_a1 = false;
    const Factorization fz = factorize(out[2].w, 2.0, theta, rho, fo);
    out.push_back({"factor_w1", fz.w1});
  }
  return out;
}

}  // namespace swl
