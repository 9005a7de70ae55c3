#pragma once

// Named verification suites shared by `swl verify` and the acceptance runner.
// Each suite returns its reports plus a block of pinned constants; the
// regression file is the JSON of all suites at a given config and seed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "swl/construct.hpp"
#include "swl/czd.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/maximal.hpp"
#include "swl/potential.hpp"
#include "swl/report.hpp"
#include "swl/verify.hpp"
#include "swl/weights.hpp"

namespace swl {

inline constexpr const char* kSuiteVersion = "swl-suites-1";

struct SuiteConfig {
  int n = 2;
  int N = 64;
  double L = 2.0;
  std::string potential = "one";  // one | square
  double theta = 1.0;
  double eta = 1.0;    // T_rho demo and Fefferman-Stein exponent
  double delta = 0.5;
  double q = 2.0;
  std::uint64_t seed = 0;
  double scale = 1.0;  // multiplies instance counts (acceptance uses 1)

  GridSpec spec() const { return GridSpec(n, L, N); }
  GridSpec refined() const { return GridSpec(n, L, 2 * N); }
  std::size_t count(std::size_t base) const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(base * scale)));
  }
};

inline json to_json_value(const SuiteConfig& c) {
  return {{"n", c.n},         {"N", c.N},       {"L", c.L},       {"potential", c.potential},
          {"theta", c.theta}, {"eta", c.eta},   {"delta", c.delta}, {"q", c.q},
          {"seed", c.seed},   {"scale", c.scale}};
}

struct SuiteResult {
  std::string name;
  std::vector<InequalityReport> reports;
  json pinned = json::object();

  bool pass() const {
    return std::all_of(reports.begin(), reports.end(), [](const InequalityReport& r) { return r.pass; });
  }
};

inline json to_json_value(const SuiteResult& s) {
  json reps = json::array();
  for (const auto& r : s.reports) reps.push_back(to_json_value(r));
  return {{"name", s.name}, {"pass", s.pass()}, {"reports", reps}, {"pinned", s.pinned}};
}

inline Potential make_potential(const GridSpec& spec, const std::string& name) {
  if (name == "one") return Potential::one(spec);
  if (name == "square") return Potential::square_norm(spec);
  throw Error("potential: unknown builtin '" + name + "' (expected one or square)");
}

inline RhoPtr make_rho(const GridSpec& spec, const std::string& potential) {
  return std::make_shared<const CriticalRadiusField>(critical_radius_field(make_potential(spec, potential)));
}

namespace suites {

/// Constants below this are underflow residue of huge penalization exponents
/// (e.g. (1+h/rho)^{-2 eta_2}); their relative drift carries no information.
inline constexpr double kResolvable = 1e-12;

/// Finite-and-stable report: the ratio between two resolutions, both ways.
/// When both constants sit below kResolvable the comparison is recorded as
/// degenerate and only finiteness is asserted.
inline InequalityReport drift(const std::string& name, double coarse, double fine) {
  const double hi = std::max(coarse, fine), lo = std::min(coarse, fine);
  const bool degenerate = hi < kResolvable;
  auto rep = InequalityReport::empty(name, degenerate ? std::numeric_limits<double>::infinity() : 2.0);
  rep.observe(hi, lo, {{"coarse", number_or_inf(coarse)}, {"fine", number_or_inf(fine)}, {"degenerate", degenerate}});
  if (degenerate) rep.pass = std::isfinite(coarse) && std::isfinite(fine);
  return rep;
}

inline InequalityReport finite(const std::string& name, double value) {
  auto rep = InequalityReport::single(name, value, 1.0);
  rep.pass = std::isfinite(value);
  return rep;
}

inline InequalityReport count_zero(const std::string& name, std::size_t violations, std::size_t checked) {
  auto rep = InequalityReport::empty(name, 0.0);
  rep.observe(static_cast<double>(violations), 1.0, {{"checked", checked}});
  return rep;
}

inline double root_psi_average(const GridFunction& a, const CriticalRadiusField& rho, double theta) {
  const DyadicLattice lattice(a.spec());
  const Cube root = lattice.cube(0, std::size_t{0});
  return cube_average(a, root) / psi_cube_dyadic(root, rho, theta);
}

// -- rho: closed forms -------------------------------------------------------

inline SuiteResult rho(const SuiteConfig& c) {
  SuiteResult out{"rho", {}, json::object()};
  const GridSpec spec = c.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const double wn = unit_ball_volume(n);

  const auto one = critical_radius_field(Potential::one(spec));
  const double exact_one = 1.0 / std::sqrt(wn);
  double dev = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) dev = std::max(dev, std::fabs(one[i] - exact_one));
  auto r1 = InequalityReport::empty("rho_constant_potential", 2.0);
  r1.observe(dev, h, {{"exact", exact_one}, {"rho_min", one.min()}, {"rho_max", one.max()}});
  out.reports.push_back(r1);

  const auto sq = critical_radius_field(Potential::square_norm(spec));
  const double exact_sq = std::pow((n + 2.0) / (n * wn), 0.25);
  const double at0 = sq.nearest(Point{});
  auto r2 = InequalityReport::empty("rho_square_potential_origin", 2.0);
  r2.observe(std::fabs(at0 - exact_sq), h, {{"exact", exact_sq}, {"measured", at0}});
  out.reports.push_back(r2);

  const auto fit = fit_lemma21(sq, sample_pairs(spec, 2000, c.seed));
  out.pinned = {{"rho_constant", one.min()},
                {"rho_square_origin", at0},
                {"square_clamped", sq.clamped_count},
                {"lemma21_square", to_json_value(fit)}};
  return out;
}

// -- sandwich: |f| <= M_{V,theta} f <= M f -----------------------------------

inline SuiteResult sandwich(const SuiteConfig& c) {
  SuiteResult out{"sandwich", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, c.theta, rho, spec);
  const auto plain = cfg.with_exponent(0.0);
  std::size_t below = 0, above = 0;
  const std::size_t count = c.count(100);
  for (std::size_t k = 0; k < count; ++k) {
    const GridFunction f = random_function(spec, c.seed, k);
    const GridFunction Mv = maximal(f, cfg), M = maximal(f, plain);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (std::fabs(f[i]) > Mv[i]) ++below;
      if (Mv[i] > M[i]) ++above;
    }
  }
  out.reports.push_back(count_zero("abs_f_le_MV", below, count));
  out.reports.push_back(count_zero("MV_le_M", above, count));
  return out;
}

// -- czd: Calderon-Zygmund decomposition -------------------------------------

/// Brute force over the full tree: Q is selected iff its psi-average exceeds
/// lambda and no ancestor's does.
inline std::vector<std::pair<int, std::size_t>> brute_force_selection(const GridFunction& a,
                                                                       const CriticalRadiusField& rho, double theta,
                                                                       double lambda) {
  const DyadicLattice lattice(a.spec());
  std::vector<std::vector<bool>> above(lattice.depth() + 1);
  for (int j = 0; j <= lattice.depth(); ++j) {
    above[j].resize(lattice.cubes_at(j));
    for (std::size_t o = 0; o < lattice.cubes_at(j); ++o) {
      const Cube Q = lattice.cube(j, o);
      above[j][o] = cube_average(a, Q) / psi_cube_dyadic(Q, rho, theta) > lambda;
    }
  }
  std::vector<std::pair<int, std::size_t>> sel;
  for (int j = 0; j <= lattice.depth(); ++j) {
    for (std::size_t o = 0; o < lattice.cubes_at(j); ++o) {
      if (!above[j][o]) continue;
      Index b = lattice.block_of(j, o);
      bool ancestor = false;
      for (int i = j - 1; i >= 0 && !ancestor; --i) {
        for (int k = 0; k < a.spec().dim(); ++k) b[k] /= 2;
        ancestor = above[i][lattice.ordinal_of(i, b)];
      }
      if (!ancestor) sel.emplace_back(j, o);
    }
  }
  return sel;
}

inline SuiteResult czd(const SuiteConfig& c, double l0 = 1.0) {
  SuiteResult out{"czd", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const DyadicLattice lattice(spec);
  const double theta1 = c.theta * (l0 + 1.0);
  const int n = spec.dim();
  const double cap_factor = std::pow(2.0, n) * std::pow(4.0 * n, theta1);

  auto measure = InequalityReport::empty("measure_bound", 1.0);
  std::size_t lower = 0, upper = 0, dyadic = 0, overlaps = 0, pointwise = 0, maximality = 0, fbar = 0, split = 0;
  std::size_t cubes = 0;
  const std::size_t count = c.count(50);
  for (std::size_t k = 0; k < count; ++k) {
    const bool vector = k % 5 == 4;
    std::vector<GridFunction> comps;
    comps.push_back(random_function(spec, c.seed, 2 * k));
    if (vector)
      for (std::uint64_t j = 1; j < 4; ++j) comps.push_back(random_function(spec, c.seed, 2 * k + 300 * j));
    const VectorGridFunction F(comps);
    const double r = vector ? 2.0 : 1.0;
    const GridFunction a = detail::aggregate(F, r);
    // lambda above the root average so (ii) is reachable for every cube
    CounterRng rng(c.seed, 77 + k);
    const double lambda = root_psi_average(a, *rho, theta1) * rng.next(1.2, 20.0);
    const CZDecomposition d = decompose(F, r, lambda, theta1, *rho, lattice);
    CZViolations v;
    const auto rep = verify_czd(d, F, *rho, &v);
    measure.observe(rep.lhs, rep.rhs, {{"instance", k}, {"lambda", lambda}});
    lower += v.lower_bound;
    upper += v.upper_bound;
    dyadic += v.dyadic_complement;
    overlaps += v.overlaps;
    pointwise += v.pointwise_complement;
    cubes += d.cubes.size();

    auto bf = brute_force_selection(a, *rho, theta1, lambda);
    std::vector<std::pair<int, std::size_t>> got;
    for (const auto& sc : d.cubes) got.emplace_back(sc.level, sc.ordinal);
    if (bf != got) ++maximality;

    const GridFunction fb = detail::aggregate(VectorGridFunction(d.fbar), r);
    if (fb.max() > cap_factor * lambda * (1.0 + 1e-12)) ++fbar;
    for (std::size_t j = 0; j < F.count(); ++j)
      for (std::size_t i = 0; i < spec.size(); ++i)
        if (d.good[j][i] + d.bad[j][i] != F[j][i]) ++split;
  }
  out.reports.push_back(count_zero("property_i_lower", lower, count));
  out.reports.push_back(count_zero("property_ii_upper", upper, count));
  out.reports.push_back(count_zero("property_iii_dyadic", dyadic, count));
  out.reports.push_back(measure);
  out.reports.push_back(count_zero("disjoint", overlaps, count));
  out.reports.push_back(count_zero("maximality_vs_brute_force", maximality, count));
  out.reports.push_back(count_zero("fbar_bound", fbar, count));
  out.reports.push_back(count_zero("split_exact", split, count));
  out.pinned = {{"theta1", theta1}, {"selected_cubes", cubes}, {"pointwise_iii_exceedances", pointwise}};
  return out;
}

// -- covering (2.14) ----------------------------------------------------------

inline SuiteResult covering(const SuiteConfig& c) {
  SuiteResult out{"covering", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const auto fit = fit_lemma21(*rho, sample_pairs(spec, 2000, c.seed));
  const ExponentBudget printed = exponent_budget(fit.l0, c.theta, 2.0, 3.0, spec.dim());
  const ExponentBudget small = printed.rescaled(1.0);
  const std::size_t count = c.count(10);
  struct Chain {
    std::string name;
    ExponentBudget b;
  };
  for (const Chain& ch : {Chain{"printed", printed}, Chain{"rescaled", small}}) {
    auto rep = InequalityReport::empty("containment_" + ch.name, 0.0);
    std::size_t left = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const GridFunction f = random_spikes(spec, c.seed, 400 + k, 1 + static_cast<int>(k % 4));
      for (double m : {0.02, 0.1, 0.5}) {
        const double lambda = m * f.max();
        const auto r = covering_check(f, lambda, ch.b.eta_bar, ch.b.eta3, ch.b.eta2, rho, fit.C0, fit.l0);
        left += r.worst.value("left_set_cells", std::size_t{0});
        json w = r.worst;
        w["instance"] = k;
        rep.observe(r.lhs, r.rhs, w);
      }
    }
    out.reports.push_back(rep);
    out.pinned["left_set_cells_" + ch.name] = left;
  }
  out.pinned["lemma21"] = to_json_value(fit);
  out.pinned["eta_bar_printed"] = printed.eta_bar;
  return out;
}

// -- rdf: Rubio de Francia properties ----------------------------------------

inline SuiteResult rdf(const SuiteConfig& c) {
  SuiteResult out{"rdf", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, c.theta, rho, spec);
  const Operator M = [cfg](const GridFunction& f) { return maximal(f, cfg); };
  const double n = spec.dim();
  const std::vector<NamedWeight> weights{{"one", Weight::unit(spec)},
                                         {"decay_gamma=theta/2", Weight(radial_power(spec, -(n + c.theta / 2.0)))},
                                         {"power_a=-n/2", Weight(radial_power(spec, -n / 2.0))}};
  std::vector<GridFunction> hs;
  for (std::size_t k = 0; k < c.count(20); ++k) hs.push_back(random_function(spec, c.seed, 600 + k));

  auto a1 = InequalityReport::empty("property_c", 1.0 + 1e-9);
  auto nr = InequalityReport::empty("property_b", 1.0 + 0.5e-6);
  std::size_t dom = 0;
  json A = json::object();
  for (const auto& nw : weights) {
    RdFOptions opt;
    opt.weight = nw.w;
    opt.A = measure_operator_norm(M, 2.0, &nw.w, hs);
    A[nw.name] = opt.A;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const RdFResult r = rdf_majorant(hs[k], cfg, opt);
      const auto rep = rdf_properties_check(r);
      a1.observe(rep.lhs, rep.rhs, {{"weight", nw.name}, {"instance", k}, {"K", r.truncation_K}});
      nr.observe(r.certificate.norm_ratio, 2.0, {{"weight", nw.name}, {"instance", k}});
      dom += r.certificate.domination_violations;
    }
  }
  out.reports.push_back(count_zero("property_a", dom, hs.size() * weights.size()));
  out.reports.push_back(nr);
  out.reports.push_back(a1);
  out.pinned = {{"measured_A", A}};
  return out;
}

// -- factorization -------------------------------------------------------------

inline SuiteResult factorization(const SuiteConfig& c) {
  SuiteResult out{"factorization", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const auto weights = weight_suite(spec, c.theta, rho, c.seed);
  auto ident = InequalityReport::empty("product_identity", 1e-10);
  auto w1 = InequalityReport::empty("w1_a1_finite");
  auto w2 = InequalityReport::empty("w2_a1_finite");
  json pins = json::object();
  for (double p : {1.5, 2.0, 3.0}) {
    for (const auto& nw : weights) {
      const Factorization fz = factorize(nw.w, p, c.theta, rho);
      const json inst{{"weight", nw.name}, {"p", p}};
      ident.observe(fz.identity_error, 1.0, inst);
      w1.observe(fz.w1_a1, 1.0, inst);
      w2.observe(fz.w2_a1, 1.0, inst);
      pins[nw.name + "@p=" + detail::fmt(p)] = to_json_value(fz);
    }
  }
  out.reports = {ident, w1, w2};
  out.pinned = pins;
  return out;
}

// -- ap_duality: per-cube identity and monotone inclusion ----------------------

inline SuiteResult ap_duality(const SuiteConfig& c) {
  SuiteResult out{"ap_duality", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const CubeFamily fam = CubeFamily::standard(spec);
  const auto cubes = fam.cubes(spec);
  auto ident = InequalityReport::empty("per_cube_identity", 1e-10);
  std::size_t monotone = 0;
  const std::size_t count = c.count(50);
  for (std::size_t k = 0; k < count; ++k) {
    const Weight w = random_weight(spec, c.seed, k);
    const double p = 1.5 + 0.5 * static_cast<double>(k % 4);
    const double pc = conjugate(p);
    const auto a = ap_products(w, p, c.theta, rho, cubes);
    const auto b = ap_products(dual_weight(w, p), pc, c.theta, rho, cubes);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double expect = std::pow(a[i], pc - 1.0);
      err = std::max(err, std::fabs(b[i] - expect) / expect);
    }
    ident.observe(err, 1.0, {{"instance", k}, {"p", p}});
    double prev = std::numeric_limits<double>::infinity();
    for (double pp : {1.5, 2.0, 3.0, 4.0}) {
      const double v = ap_constant(w, pp, c.theta, rho, fam).constant;
      if (v > prev * (1.0 + 1e-12)) ++monotone;
      prev = v;
    }
  }
  out.reports.push_back(ident);
  out.reports.push_back(count_zero("monotone_inclusion", monotone, count));
  return out;
}

// -- dichotomy: (1+|x|)^{-(n+gamma)} in A1^{rho,theta} but not A1 ------------

inline SuiteResult dichotomy(const SuiteConfig& c) {
  SuiteResult out{"dichotomy", {}, json::object()};
  const double theta = c.theta;
  const double gamma = theta / 2.0;
  auto a1 = [&](const GridSpec& spec, double th) {
    const RhoPtr rho = std::make_shared<const CriticalRadiusField>(critical_radius_field(Potential::one(spec)));
    const Weight w(radial_power(spec, -(spec.dim() + gamma)));
    return ap_constant(w, 1.0, th, rho, CubeFamily::standard(spec)).constant;
  };
  const GridSpec base = c.spec();
  const double coarse = a1(base, theta);
  const double fine = a1(c.refined(), theta);
  out.reports.push_back(finite("a1_rho_theta_finite", coarse));
  out.reports.push_back(drift("a1_rho_theta_refinement", coarse, fine));
  const double classical_L = a1(base, 0.0);
  const double classical_2L = a1(GridSpec(c.n, 2.0 * c.L, 2 * c.N), 0.0);
  auto growth = InequalityReport::empty("classical_growth_inverse", 1.0 / 1.5);
  growth.observe(classical_L, classical_2L, {{"L", c.L}, {"2L", 2.0 * c.L}});
  out.reports.push_back(growth);
  out.pinned = {{"gamma", gamma},
                {"a1_rho_theta_coarse", coarse},
                {"a1_rho_theta_fine", fine},
                {"classical_L", classical_L},
                {"classical_2L", classical_2L}};
  return out;
}

// -- duality_ineq: (2.12), (2.13) and Kolmogorov -------------------------------

inline SuiteResult duality_ineq(const SuiteConfig& c) {
  SuiteResult out{"duality_ineq", {}, json::object()};
  const std::size_t count = c.count(50);
  const auto fit_l0 = 1.0;
  auto run = [&](const GridSpec& spec) {
    const RhoPtr rho = make_rho(spec, c.potential);
    const ExponentBudget printed = exponent_budget(fit_l0, c.theta, 2.0, 3.0, spec.dim());
    const ExponentBudget small = printed.rescaled(1.0);
    DualityReports dp, ds;
    dp.full.name = "duality_full_printed";
    dp.dyadic.name = "duality_dyadic_printed";
    ds.full.name = "duality_full_rescaled";
    ds.dyadic.name = "duality_dyadic_rescaled";
    for (std::size_t k = 0; k < count; ++k) {
      const GridFunction f = random_bumps(spec, c.seed, 800 + k);
      const GridFunction g = (k % 5 == 0) ? GridFunction::constant(spec, 1.0) : random_bumps(spec, c.seed, 900 + k);
      observe_duality(dp, f, g, c.q, printed, rho, k);
      observe_duality(ds, f, g, c.q, small, rho, k);
    }
    auto kol = InequalityReport::empty("kolmogorov");
    const auto cfg = MaximalConfig::make(MaximalVariant::Cube, c.theta, rho, spec);
    const Cube Q = Cube::from_box(spec, Point{}, spec.half_width());
    for (std::size_t k = 0; k < std::min<std::size_t>(count, 10); ++k) {
      const GridFunction f = random_bumps(spec, c.seed, 950 + k).map([](double v) { return v; });
      std::vector<double> masked(spec.size(), 0.0);
      Q.for_each_cell(spec, [&](std::size_t i) { masked[i] = f[i]; });
      const GridFunction fq(spec, std::move(masked));
      for (double delta : {0.3, 0.5, 0.7}) {
        const auto r = kolmogorov_check(fq, delta, Q, cfg);
        kol.observe(r.lhs, r.rhs, {{"instance", k}, {"delta", delta}});
      }
    }
    return std::vector<InequalityReport>{dp.full, dp.dyadic, ds.full, ds.dyadic, kol};
  };
  const auto coarse = run(c.spec());
  const auto fine = run(c.refined());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    out.reports.push_back(coarse[i]);
    out.reports.push_back(drift(coarse[i].name + "_refinement", coarse[i].ratio, fine[i].ratio));
    out.pinned[coarse[i].name] = {{"coarse", coarse[i].ratio}, {"fine", fine[i].ratio}};
  }
  return out;
}

// -- vector: Theorem 2.1 strong and weak --------------------------------------

inline SuiteResult vector(const SuiteConfig& c) {
  SuiteResult out{"vector", {}, json::object()};
  const double l0 = 1.0;
  struct PR {
    double p, r;
  };
  const std::size_t count = c.count(4);
  auto run = [&](const GridSpec& spec) {
    const RhoPtr rho = make_rho(spec, c.potential);
    const auto weights = weight_suite(spec, c.theta, rho, c.seed, {false, 0});
    std::vector<VectorGridFunction> suite;
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<GridFunction> comps;
      for (std::uint64_t j = 0; j < 4; ++j) comps.push_back(random_bumps(spec, c.seed, 1100 + 10 * k + j));
      suite.emplace_back(comps);
    }
    std::vector<InequalityReport> reps;
    for (const PR pr : {PR{2, 2}, PR{2, 3}, PR{3, 2}}) {
      const ExponentBudget b = exponent_budget(l0, c.theta, pr.p, pr.r, spec.dim());
      for (const auto& [label, eta] : {std::pair<std::string, double>{"printed", b.eta},
                                       std::pair<std::string, double>{"rescaled", b.rescaled(1.0).eta}}) {
        const auto cfg = MaximalConfig::make(MaximalVariant::Cube, eta, rho, spec);
        std::vector<GridFunction> outputs;
        for (const auto& F : suite) outputs.push_back(maximal_vector(F, cfg, pr.r));
        const std::string tag = "_p=" + detail::fmt(pr.p) + "_r=" + detail::fmt(pr.r) + "_" + label;
        auto strong = InequalityReport::empty("strong" + tag);
        auto weak = InequalityReport::empty("weak" + tag);
        for (const auto& nw : weights) {
          const auto s = vector_norm_report("s", outputs, pr.p, pr.r, &nw.w, suite);
          const auto w = check_weak_type_vector("w", outputs, pr.p, pr.r, &nw.w, suite);
          strong.observe(s.lhs, s.rhs, {{"weight", nw.name}, {"eta", eta}});
          // the weak constant lives on the p-th power scale
          weak.observe(std::pow(w.lhs, 1.0 / pr.p), std::pow(w.rhs, 1.0 / pr.p), {{"weight", nw.name}, {"eta", eta}});
        }
        reps.push_back(strong);
        reps.push_back(weak);
      }
    }
    return reps;
  };
  const auto coarse = run(c.spec());
  const auto fine = run(c.refined());
  std::size_t weak_above_strong = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    out.reports.push_back(coarse[i]);
    out.reports.push_back(drift(coarse[i].name + "_refinement", coarse[i].ratio, fine[i].ratio));
    out.pinned[coarse[i].name] = {{"coarse", coarse[i].ratio}, {"fine", fine[i].ratio}};
    if (i % 2 == 1 && coarse[i].ratio > coarse[i - 1].ratio * (1.0 + 1e-12)) ++weak_above_strong;
  }
  out.reports.push_back(count_zero("weak_le_strong", weak_above_strong, coarse.size() / 2));
  return out;
}

// -- extrapolation --------------------------------------------------------------

inline SuiteResult extrapolation(const SuiteConfig& c) {
  SuiteResult out{"extrapolation", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = make_rho(spec, c.potential);
  const auto weights = weight_suite(spec, c.theta, rho, c.seed);
  const auto cfg = MaximalConfig::make(MaximalVariant::Cube, c.eta, rho, spec);
  std::vector<GridFunction> inputs;
  for (std::size_t k = 0; k < c.count(8); ++k) inputs.push_back(random_function(spec, c.seed, 1300 + k));

  std::size_t dom = 0;
  double worst = 0.0;
  for (const auto& f : inputs) {
    const auto r = t_rho_domination(f, cfg);
    dom += r.worst.value("violations", std::size_t{0});
    worst = std::max(worst, r.ratio);
  }
  out.reports.push_back(count_zero("t_rho_domination", dom, inputs.size()));

  ExtrapolationOptions opt;
  opt.q = c.q;
  const PairFamily fam = t_rho_family(inputs, cfg);
  const auto& trho = *rho;
  const auto ladder = cfg.half_widths;
  const Operator op = [&trho, ladder](const GridFunction& f) { return t_rho(f, trho, ladder); };
  for (auto r : extrapolation_suite(fam, weights, opt, &op, &inputs)) {
    out.pinned[r.name] = number_or_inf(r.ratio);
    r.name = "t_rho_" + r.name;
    r.pass = std::isfinite(r.ratio);
    out.reports.push_back(r);
  }
  const PairFamily same = identical_family(inputs);
  for (auto r : extrapolation_suite(same, weights, opt)) {
    r.name = "identical_" + r.name;
    auto rep = InequalityReport::empty(r.name, 1e-12);
    rep.observe(std::fabs(r.ratio - 1.0), 1.0, r.worst);
    out.reports.push_back(rep);
  }
  out.pinned["t_rho_domination_worst_ratio"] = worst;
  return out;
}

// -- fs: Fefferman-Stein type -------------------------------------------------

inline SuiteResult fs(const SuiteConfig& c) {
  SuiteResult out{"fs", {}, json::object()};
  const GridSpec spec = c.spec();
  const RhoPtr rho = std::make_shared<const CriticalRadiusField>(constant_radius_field(spec, 1.0));
  const auto weights = weight_suite(spec, c.theta, rho, c.seed, {false, 0});
  auto rep = InequalityReport::empty("fefferman_stein");
  for (std::size_t k = 0; k < c.count(4); ++k) {
    const GridFunction f = random_bumps(spec, c.seed, 1500 + k);
    for (const auto& nw : weights) {
      const auto r = check_fs(f, 2.0, c.delta, c.eta, &nw.w);
      rep.observe(r.lhs, r.rhs, {{"weight", nw.name}, {"instance", k}});
    }
  }
  rep.pass = std::isfinite(rep.ratio);
  out.reports.push_back(rep);
  out.pinned["fefferman_stein"] = number_or_inf(rep.ratio);
  return out;
}

// -- budget ------------------------------------------------------------------------

inline SuiteResult budget(const SuiteConfig&) {
  SuiteResult out{"budget", {}, json::object()};
  const ExponentBudget b = exponent_budget(1.0, 1.0, 2.0, 3.0, 3);
  auto exact = [&](const std::string& name, double got, double want) {
    auto rep = InequalityReport::empty(name, 0.0);
    rep.observe(std::fabs(got - want), 1.0, {{"value", got}, {"expected", want}});
    out.reports.push_back(rep);
  };
  exact("p0", b.p0, 512.0);
  exact("theta0", b.theta0, 36.0);
  exact("eta", b.eta, 18432.0);
  exact("eta_bar", b.eta_bar, 2304.0);
  exact("eta3", b.eta3, 1152.0);
  exact("eta1", b.eta1, 288.0);
  auto order = InequalityReport::empty("chain_ordered", 0.0);
  order.observe(b.chain_ordered() ? 0.0 : 1.0, 1.0);
  out.reports.push_back(order);
  out.pinned = to_json_value(b);
  return out;
}

}  // namespace suites

using SuiteRunner = std::function<SuiteResult(const SuiteConfig&)>;

inline const std::vector<std::pair<std::string, SuiteRunner>>& suite_registry() {
  static const std::vector<std::pair<std::string, SuiteRunner>> r{
      {"budget", suites::budget},
      {"rho", suites::rho},
      {"sandwich", suites::sandwich},
      {"dichotomy", suites::dichotomy},
      {"ap_duality", suites::ap_duality},
      {"czd", [](const SuiteConfig& c) { return suites::czd(c); }},
      {"covering", suites::covering},
      {"rdf", suites::rdf},
      {"factorization", suites::factorization},
      {"duality_ineq", suites::duality_ineq},
      {"vector", suites::vector},
      {"extrapolation", suites::extrapolation},
      {"fs", suites::fs},
  };
  return r;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, run] : suite_registry()) names.push_back(name);
  return names;
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& c) {
  for (const auto& [n, run] : suite_registry())
    if (n == name) return run(c);
  throw Error("verify: unknown suite '" + name + "'");
}

/// The regression document for a list of suite results.
inline json regression_json(const std::vector<SuiteResult>& results, const json& config) {
  json suites = json::array();
  bool pass = true;
  for (const auto& s : results) {
    suites.push_back(to_json_value(s));
    pass = pass && s.pass();
  }
  return {{"suite_version", kSuiteVersion}, {"config", config}, {"pass", pass}, {"suites", suites}};
}

}  // namespace swl
