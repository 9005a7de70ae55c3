// swl: command-line front end. Every subcommand resolves a RunConfig (defaults,
// then --config file, then flags), writes its artifacts under --out, and prints
// one summary line. Exit 0 on pass, 2 on a failed assertion, 1 on usage errors.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swl/swl.hpp"

namespace fs = std::filesystem;
using namespace swl;

namespace {

constexpr int kPass = 0;
constexpr int kUsage = 1;
constexpr int kFail = 2;

// Flag values, all optional so that only what was given overrides the file.
struct Flags {
  std::optional<int> n, N, K;
  std::optional<double> L, p, q, r, theta, delta, eta, l0, lambda, A, tol, exponent, ladder_ratio, gamma, a, scale;
  std::optional<std::string> potential, variant, weight, input, out;
  std::optional<std::uint64_t> seed;
  std::string config_path;
};

void overlay(RunConfig& c, const Flags& f) {
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(c.n, f.n);
  set(c.N, f.N);
  set(c.K, f.K);
  set(c.L, f.L);
  set(c.p, f.p);
  set(c.q, f.q);
  set(c.r, f.r);
  set(c.theta, f.theta);
  set(c.delta, f.delta);
  set(c.eta, f.eta);
  set(c.l0, f.l0);
  set(c.tol, f.tol);
  set(c.ladder_ratio, f.ladder_ratio);
  set(c.gamma, f.gamma);
  set(c.a, f.a);
  set(c.scale, f.scale);
  set(c.potential, f.potential);
  set(c.variant, f.variant);
  set(c.weight, f.weight);
  set(c.input, f.input);
  set(c.out, f.out);
  set(c.seed, f.seed);
  if (f.lambda) c.lambda = f.lambda;
  if (f.A) c.A = f.A;
  if (f.exponent) c.exponent = f.exponent;
}

Error field(const std::string& key, const std::string& what) { return detail::field_error(key, what); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json with_config(json j, const RunConfig& c) {
  j["config"] = to_json_value(c);
  return j;
}

Potential load_potential(const RunConfig& c) {
  const GridSpec spec = c.spec();
  if (c.potential == "one" || c.potential == "square") return make_potential(spec, c.potential);
  GridFunction v = gfd::read(c.potential);
  if (!(v.spec() == spec)) throw field("potential", "grid of " + c.potential + " differs from the configured grid");
  return Potential(std::move(v));
}

RhoPtr load_rho(const RunConfig& c) {
  CriticalRadiusOptions opt;
  opt.ladder_ratio = c.ladder_ratio;
  return std::make_shared<const CriticalRadiusField>(critical_radius_field(load_potential(c), opt));
}

// f from --input, or a seeded random test function.
GridFunction load_input(const RunConfig& c) {
  const GridSpec spec = c.spec();
  if (c.input.empty()) return random_function(spec, c.seed, 0);
  GridFunction f = gfd::read(c.input);
  if (!(f.spec() == spec)) throw field("input", "grid of " + c.input + " differs from the configured grid");
  return f;
}

Weight load_weight(const RunConfig& c) {
  const GridSpec spec = c.spec();
  if (c.weight == "one") return Weight(GridFunction::constant(spec, 1.0));
  if (c.weight == "decay") return Weight(radial_power(spec, -(c.n + c.gamma)));
  if (c.weight == "power") return Weight(radial_power(spec, c.a));
  if (c.weight == "random") return random_weight(spec, c.seed, 0);
  GridFunction w = gfd::read(c.weight);
  if (!(w.spec() == spec)) throw field("weight", "grid of " + c.weight + " differs from the configured grid");
  return Weight(std::move(w));
}

MaximalConfig maximal_config(const RunConfig& c, const RhoPtr& rho) {
  MaximalVariant v;
  try {
    v = parse_variant(c.variant);
  } catch (const Error&) {
    throw field("variant", "expected cube, dyadic, centered or phi");
  }
  const double e = c.exponent.value_or(v == MaximalVariant::Phi ? c.eta : c.theta);
  MaximalConfig cfg = MaximalConfig::make(v, e, rho, c.spec());
  cfg.half_widths = cube_half_widths(c.spec(), radii_ladder(c.spec(), c.ladder_ratio));
  return cfg;
}

fs::path out_dir(const RunConfig& c) {
  fs::create_directories(c.out);
  return fs::path(c.out);
}

std::string num(double v) { return detail::fmt(v); }

// --- subcommands ----------------------------------------------------------

int cmd_rho(const RunConfig& c) {
  const RhoPtr rho = load_rho(c);
  const fs::path dir = out_dir(c);
  gfd::write(rho->rho, dir / "rho", {{"config", to_json_value(c)}, {"quantity", "rho"}});
  json j = to_json_value(*rho);
  j["potential"] = c.potential;
  write_json(dir / "rho.json", with_config(j, c));
  std::cout << "rho: min=" << num(rho->min()) << " max=" << num(rho->max()) << " clamped=" << rho->clamped_count
            << " -> " << (dir / "rho.gfd.json").string() << "\n";
  return kPass;
}

int cmd_rh_check(const RunConfig& c) {
  if (!(c.q > 1.0)) throw field("q", "must exceed 1");
  const Potential V = load_potential(c);
  const auto rep = check_reverse_holder(V, c.q, CubeFamily::standard(c.spec()));
  write_json(out_dir(c) / "rh_check.json", with_config(to_json_value(rep, c.n), c));
  const bool ok = std::isfinite(rep.constant);
  std::cout << "rh-check: q=" << num(c.q) << " constant=" << num(rep.constant) << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

int cmd_maximal(const RunConfig& c) {
  const GridFunction f = load_input(c);
  const MaximalVariant v = parse_variant(c.variant);
  const bool needs_rho = v != MaximalVariant::Phi && c.exponent.value_or(c.theta) > 0.0;
  const RhoPtr rho = needs_rho ? load_rho(c) : nullptr;
  const MaximalConfig cfg = maximal_config(c, rho);
  const GridFunction m = maximal(f, cfg);
  // sub-cell limit gives |f| <= M f pointwise
  std::size_t below = 0;
  for (std::size_t i = 0; i < m.size(); ++i) below += m[i] < std::fabs(f[i]) * (1.0 - 1e-12) ? 1 : 0;
  const bool ok = v == MaximalVariant::Dyadic || below == 0;
  const fs::path dir = out_dir(c);
  gfd::write(m, dir / "maximal",
             {{"config", to_json_value(c)}, {"variant", variant_name(v)}, {"exponent", cfg.exponent}});
  write_json(dir / "maximal.json",
             with_config({{"variant", variant_name(v)},
                          {"exponent", cfg.exponent},
                          {"max", m.max_abs()},
                          {"input_max", f.max_abs()},
                          {"below_input", below}},
                         c));
  std::cout << "maximal: variant=" << variant_name(v) << " exponent=" << num(cfg.exponent)
            << " max=" << num(m.max_abs()) << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

int cmd_ap(const RunConfig& c) {
  if (!(c.p >= 1.0) || !std::isfinite(c.p)) throw field("p", "must be a finite number >= 1");
  const Weight w = load_weight(c);
  const RhoPtr rho = c.theta > 0.0 ? load_rho(c) : nullptr;
  CubeFamily fam = CubeFamily::standard(c.spec());
  const ApReport rep = ap_constant(w, c.p, c.theta, rho, fam);
  write_json(out_dir(c) / "ap.json", with_config(to_json_value(rep, c.n), c));
  const bool ok = std::isfinite(rep.constant);
  std::cout << "ap: p=" << num(c.p) << " theta=" << num(c.theta) << " constant=" << num(rep.constant)
            << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

int cmd_bmo(const RunConfig& c) {
  const GridFunction f = load_input(c);
  const RhoPtr rho = c.theta > 0.0 ? load_rho(c) : nullptr;
  const double v = bmo_norm(f, c.theta, rho, CubeFamily::standard(c.spec()));
  write_json(out_dir(c) / "bmo.json", with_config({{"theta", c.theta}, {"bmo_norm", number_or_inf(v)}}, c));
  const bool ok = std::isfinite(v);
  std::cout << "bmo: theta=" << num(c.theta) << " norm=" << num(v) << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

int cmd_czd(const RunConfig& c) {
  const GridFunction f = load_input(c);
  const RhoPtr rho = load_rho(c);
  const double root = suites::root_psi_average(f.abs(), *rho, c.theta);
  const double lambda = c.lambda.value_or(4.0 * root);
  if (!(lambda > 0.0)) throw field("lambda", "must be positive");
  const DyadicLattice lattice(c.spec());
  const CZDecomposition d = decompose(f, lambda, c.theta, *rho, lattice);
  CZViolations viol;
  const InequalityReport rep = verify_czd(d, f, *rho, &viol);
  const fs::path dir = out_dir(c);
  json j = to_json_value(d);
  j["verification"] = to_json_value(rep);
  j["root_psi_average"] = root;
  write_json(dir / "czd.json", with_config(j, c));
  {
    std::ofstream csv(dir / "czd_cubes.csv");
    csv.precision(17);
    csv << "level,ordinal,side,psi,psi_average";
    for (int k = 0; k < c.n; ++k) csv << ",center_" << k;
    csv << "\n";
    for (const auto& s : d.cubes) {
      csv << s.level << ',' << s.ordinal << ',' << s.cube.side << ',' << s.psi << ',' << s.psi_average;
      for (int k = 0; k < c.n; ++k) csv << ',' << s.cube.center[k];
      csv << "\n";
    }
  }
  std::vector<double> mask(d.omega.begin(), d.omega.end());
  gfd::write(GridFunction(c.spec(), std::move(mask)), dir / "czd_omega",
             {{"config", to_json_value(c)}, {"quantity", "omega_mask"}});
  std::cout << "czd: lambda=" << num(lambda) << " cubes=" << d.cubes.size() << " |Omega|=" << num(d.omega_measure())
            << (rep.pass ? " PASS" : " FAIL") << "\n";
  return rep.pass ? kPass : kFail;
}

int cmd_factorize(const RunConfig& c) {
  if (!(c.p > 1.0) || !std::isfinite(c.p)) throw field("p", "must be a finite number > 1");
  const Weight w = load_weight(c);
  const RhoPtr rho = load_rho(c);
  FactorOptions opt;
  opt.K = c.K;
  opt.tol = c.tol;
  const Factorization fz = factorize(w, c.p, c.theta, rho, opt);
  const fs::path dir = out_dir(c);
  gfd::write(fz.w1.values(), dir / "factor_w1", {{"config", to_json_value(c)}, {"quantity", "w1"}});
  gfd::write(fz.w2.values(), dir / "factor_w2", {{"config", to_json_value(c)}, {"quantity", "w2"}});
  write_json(dir / "factorize.json", with_config(to_json_value(fz), c));
  const bool ok = fz.identity_error <= 1e-10 && std::isfinite(fz.w1_a1) && std::isfinite(fz.w2_a1);
  std::cout << "factorize: p=" << num(c.p) << " identity_error=" << num(fz.identity_error)
            << " w1_A1=" << num(fz.w1_a1) << " w2_A1=" << num(fz.w2_a1) << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

int cmd_rdf(const RunConfig& c) {
  if (!(c.p >= 1.0)) throw field("p", "must be >= 1");
  if (c.K < 1) throw field("K", "must be positive");
  if (!(c.tol > 0.0)) throw field("tol", "must be positive");
  if (c.A && !(*c.A > 0.0)) throw field("A", "must be positive");
  const GridFunction h = load_input(c).abs();
  const RhoPtr rho = c.theta > 0.0 ? load_rho(c) : nullptr;
  const MaximalConfig cfg = maximal_config(c, rho);
  RdFOptions opt;
  opt.A = c.A.value_or(1.0);
  opt.K = c.K;
  opt.tol = c.tol;
  opt.norm_p = c.p;
  const RdFResult res = rdf_majorant(h, cfg, opt);
  const InequalityReport rep = rdf_properties_check(res);
  const fs::path dir = out_dir(c);
  gfd::write(res.majorant, dir / "rdf_majorant", {{"config", to_json_value(c)}, {"quantity", "rdf_majorant"}});
  json j = to_json_value(res);
  j["verification"] = to_json_value(rep);
  write_json(dir / "rdf.json", with_config(j, c));
  std::cout << "rdf: A=" << num(res.operator_norm_A) << " K=" << res.truncation_K
            << " norm_ratio=" << num(res.certificate.norm_ratio) << " a1_ratio=" << num(res.certificate.a1_ratio)
            << (rep.pass ? " PASS" : " FAIL") << "\n";
  return rep.pass ? kPass : kFail;
}

int cmd_budget(const RunConfig& c) {
  if (!(c.l0 > 0.0)) throw field("l0", "must be positive");
  if (!(c.p >= 1.0)) throw field("p", "must be >= 1");
  if (!(c.r > 1.0)) throw field("r", "must exceed 1");
  const ExponentBudget b = exponent_budget(c.l0, c.theta, c.p, c.r, c.n);
  write_json(out_dir(c) / "budget.json", with_config(to_json_value(b), c));
  const bool ok = b.chain_ordered();
  std::cout << "budget: p0=" << num(b.p0) << " theta0=" << num(b.theta0) << " eta=" << num(b.eta)
            << " eta_bar=" << num(b.eta_bar) << " eta3=" << num(b.eta3) << " eta2=" << num(b.eta2)
            << " eta1=" << num(b.eta1) << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? kPass : kFail;
}

SuiteConfig suite_config(const RunConfig& c) {
  if (c.potential != "one" && c.potential != "square")
    throw field("potential", "verify suites use the builtin potentials one or square");
  SuiteConfig s;
  s.n = c.n;
  s.N = c.N;
  s.L = c.L;
  s.potential = c.potential;
  s.theta = c.theta;
  s.eta = c.eta;
  s.delta = c.delta;
  s.q = c.q;
  s.seed = c.seed;
  s.scale = c.scale;
  return s;
}

void write_csv(const fs::path& path, const std::vector<SuiteResult>& results) {
  std::ofstream csv(path);
  csv << "suite," << csv_header() << "\n";
  for (const auto& s : results)
    for (const auto& r : s.reports) csv << s.name << ',' << csv_row(r) << "\n";
}

int cmd_verify(const RunConfig& c, const std::string& which) {
  const SuiteConfig sc = suite_config(c);
  std::vector<std::string> names;
  if (which == "all") {
    names = suite_names();
  } else {
    const auto all = suite_names();
    if (std::find(all.begin(), all.end(), which) == all.end()) {
      std::string list;
      for (const auto& n : all) list += " " + n;
      throw Error("verify: unknown suite '" + which + "' (choose all or one of:" + list + ")");
    }
    names = {which};
  }
  const fs::path dir = out_dir(c);
  std::vector<SuiteResult> results;
  for (const auto& name : names) {
    SuiteResult r = run_suite(name, sc);
    write_json(dir / ("verify_" + name + ".json"), with_config(to_json_value(r), c));
    std::size_t failed = 0;
    for (const auto& rep : r.reports) failed += rep.pass ? 0 : 1;
    std::cout << "verify " << name << ": " << r.reports.size() << " reports, " << failed << " failed"
              << (r.pass() ? " PASS" : " FAIL") << "\n";
    for (const auto& rep : r.reports)
      if (!rep.pass) std::cout << "  FAIL " << rep.name << " ratio=" << num(rep.ratio) << " ceiling=" << num(rep.ceiling) << "\n";
    results.push_back(std::move(r));
  }
  bool pass = true;
  for (const auto& r : results) pass = pass && r.pass();
  if (which == "all") {
    write_json(dir / "regression.json", regression_json(results, to_json_value(c)));
    write_csv(dir / "regression.csv", results);
    std::cout << "verify all: " << results.size() << " suites" << (pass ? " PASS" : " FAIL") << " -> "
              << (dir / "regression.json").string() << "\n";
  }
  return pass ? kPass : kFail;
}

int cmd_report(const RunConfig& c) {
  const fs::path dir(c.out);
  if (!fs::is_directory(dir)) throw field("out", "directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("verify_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("report: no verify_*.json files in " + dir.string() + " (run `swl verify` first)");
  json suites = json::array();
  std::ofstream csv(dir / "report.csv");
  csv << "suite," << csv_header() << "\n";
  std::size_t total = 0, failed = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error("report: malformed " + path.string() + ": " + e.what());
    }
    const std::string suite = j.value("name", path.stem().string());
    std::size_t bad = 0;
    for (const auto& r : j.at("reports")) {
      const bool ok = r.at("pass").get<bool>();
      bad += ok ? 0 : 1;
      csv << suite << ',' << r.at("name").get<std::string>() << ',' << r.at("lhs").dump() << ','
          << r.at("rhs").dump() << ',' << r.at("ratio").dump() << ',' << r.at("suite_size").dump() << ','
          << r.at("ceiling").dump() << ',' << (ok ? "true" : "false") << "\n";
    }
    total += j.at("reports").size();
    failed += bad;
    suites.push_back({{"suite", suite}, {"reports", j.at("reports").size()}, {"failed", bad}, {"pass", bad == 0}});
    std::cout << "  " << suite << ": " << (bad == 0 ? "PASS" : "FAIL") << " (" << bad << "/"
              << j.at("reports").size() << " failed)\n";
  }
  write_json(dir / "report.json", with_config({{"suites", suites}, {"reports", total}, {"failed", failed}}, c));
  std::cout << "report: " << files.size() << " suites, " << total << " reports, " << failed << " failed"
            << (failed == 0 ? " PASS" : " FAIL") << "\n";
  return failed == 0 ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swl: Schrodinger-adapted weights, maximal operators and extrapolation on grids"};
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  const RunConfig d;
  app.add_option("--config", f.config_path, "JSON config with flat keys named like the flags (flags win)");
  app.add_option("--n", f.n, "dimension")->default_str(std::to_string(d.n));
  app.add_option("--N", f.N, "cells per axis (even)")->default_str(std::to_string(d.N));
  app.add_option("--L", f.L, "half-width of the box [-L,L]^n")->default_str("2");
  app.add_option("--potential", f.potential, "one | square | path to a .gfd.json")->default_str(d.potential);
  app.add_option("--p", f.p, "integrability exponent")->default_str("2");
  app.add_option("--q", f.q, "reverse Holder / extrapolation exponent")->default_str("2");
  app.add_option("--r", f.r, "l^r exponent for vector-valued data")->default_str("2");
  app.add_option("--theta", f.theta, "penalization exponent theta")->default_str("1");
  app.add_option("--delta", f.delta, "delta for M_delta and the Kolmogorov check")->default_str("0.5");
  app.add_option("--eta", f.eta, "exponent eta for phi-maximal and T_rho")->default_str("1");
  app.add_option("--l0", f.l0, "regularity exponent l0 of the critical radius")->default_str("1");
  app.add_option("--lambda", f.lambda, "CZ level (default: 4 x root psi-average)");
  app.add_option("--A", f.A, "RdF operator-norm estimate (raised if the iterates demand it)");
  app.add_option("--K", f.K, "minimum RdF / factorization truncation")->default_str(std::to_string(d.K));
  app.add_option("--tol", f.tol, "RdF tail tolerance")->default_str("1e-09");
  app.add_option("--variant", f.variant, "maximal variant: cube | dyadic | centered | phi")->default_str(d.variant);
  app.add_option("--exponent", f.exponent, "maximal exponent (default theta; eta for phi)");
  app.add_option("--ladder-ratio,--ladder_ratio", f.ladder_ratio, "ratio between radii rungs")->default_str("2^(1/4)");
  app.add_option("--weight", f.weight, "one | decay | power | random | path to a .gfd.json")->default_str(d.weight);
  app.add_option("--gamma", f.gamma, "decay weight (1+|x|)^-(n+gamma)")->default_str("0.5");
  app.add_option("--a", f.a, "power weight (1+|x|)^a")->default_str("-1");
  app.add_option("--input", f.input, "input function as .gfd.json (default: seeded random function)");
  app.add_option("--out", f.out, "artifact directory")->default_str(d.out);
  app.add_option("--seed", f.seed, "seed for random suites and inputs")->default_str("0");
  app.add_option("--scale", f.scale, "multiplier on suite instance counts")->default_str("1");

  std::string suite;
  auto* rho = app.add_subcommand("rho", "critical radius field rho(x)");
  auto* rh = app.add_subcommand("rh-check", "reverse Holder constant of V at q");
  auto* mx = app.add_subcommand("maximal", "penalized maximal function of --input");
  auto* ap = app.add_subcommand("ap", "A_p^{rho,theta} constant of --weight");
  auto* bmo = app.add_subcommand("bmo", "BMO_theta(rho) norm of --input");
  auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition of --input at --lambda");
  auto* fac = app.add_subcommand("factorize", "factor --weight as w1 w2^{1-p}");
  auto* rdf = app.add_subcommand("rdf", "Rubio de Francia majorant of --input");
  auto* bud = app.add_subcommand("budget", "exponent budget from l0, theta, p, r, n");
  auto* ver = app.add_subcommand("verify", "run a verification suite (or all)");
  ver->add_option("suite", suite, "suite name or all")->required();
  auto* rep = app.add_subcommand("report", "summarize verify_*.json in --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
    overlay(c, f);
    validate(c);
    if (rho->parsed()) return cmd_rho(c);
    if (rh->parsed()) return cmd_rh_check(c);
    if (mx->parsed()) return cmd_maximal(c);
    if (ap->parsed()) return cmd_ap(c);
    if (bmo->parsed()) return cmd_bmo(c);
    if (czd->parsed()) return cmd_czd(c);
    if (fac->parsed()) return cmd_factorize(c);
    if (rdf->parsed()) return cmd_rdf(c);
    if (bud->parsed()) return cmd_budget(c);
    if (ver->parsed()) return cmd_verify(c, suite);
    if (rep->parsed()) return cmd_report(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
