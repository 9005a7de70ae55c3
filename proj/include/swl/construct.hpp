#pragma once

// Rubio de Francia majorants and the A1 factorization of A_p^{rho,theta}
// weights.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/maximal.hpp"
#include "swl/weights.hpp"

namespace swl {

using Operator = std::function<GridFunction(const GridFunction&)>;

struct RdFOptions {
  double A = 1.0;          // caller-supplied operator norm estimate
  int K = 40;              // minimum truncation
  double tol = 1e-9;
  double norm_p = 2.0;     // the space in which (b) is measured
  std::optional<Weight> weight;
  int max_terms = 400;
};

struct RdFCertificate {
  std::size_t domination_violations = 0;  // (a)
  double norm_ratio = 0.0;                // (b): ||R h|| / ||h||
  double a1_ratio = 0.0;                  // (c): sup M(R h) / R h
  bool pointwise_domination = true;
  bool norm_doubling = true;
  bool a1_factor = true;
};

struct RdFResult {
  GridFunction majorant;
  GridFunction base;
  double supplied_A = 0.0;
  double operator_norm_A = 0.0;  // max of supplied A and the iterate ratios
  int truncation_K = 0;
  double tail_bound = 0.0;       // 2^{-K} 2 ||h||
  double tail_term = 0.0;        // sup M^{K+1}h / ((2A)^{K+1} R_K h)
  std::string config;
  RdFOptions options;
  Operator op;
  RdFCertificate certificate;

  Weight weight() const { return Weight(majorant); }
};

inline json to_json_value(const RdFResult& r) {
  const auto& c = r.certificate;
  return {{"config", r.config},
          {"supplied_A", r.supplied_A},
          {"operator_norm_A", r.operator_norm_A},
          {"truncation_K", r.truncation_K},
          {"tol", r.options.tol},
          {"norm_p", r.options.norm_p},
          {"weighted", r.options.weight.has_value()},
          {"tail_bound", r.tail_bound},
          {"tail_term", r.tail_term},
          {"certified",
           {{"pointwise_domination", c.pointwise_domination},
            {"domination_violations", c.domination_violations},
            {"norm_doubling", c.norm_doubling},
            {"norm_ratio", number_or_inf(c.norm_ratio)},
            {"a1_factor", c.a1_factor},
            {"a1_ratio", number_or_inf(c.a1_ratio)}}}};
}

namespace detail {

inline double space_norm(const GridFunction& f, const RdFOptions& o) {
  return o.weight ? norm(f, o.norm_p, *o.weight) : norm(f, o.norm_p);
}

inline RdFCertificate certify_rdf(const GridFunction& h, const GridFunction& R, const Operator& op, double A,
                                  const RdFOptions& o) {
  RdFCertificate c;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!(h[i] <= R[i])) ++c.domination_violations;
  c.pointwise_domination = c.domination_violations == 0;
  const double nh = space_norm(h, o);
  c.norm_ratio = nh > 0.0 ? space_norm(R, o) / nh : 0.0;
  c.norm_doubling = c.norm_ratio <= 2.0 + 1e-6;
  const GridFunction MR = op(R);
  double worst = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (R[i] > 0.0) worst = std::max(worst, MR[i] / R[i]);
    else if (MR[i] > 0.0) worst = std::numeric_limits<double>::infinity();
  }
  c.a1_ratio = worst;
  c.a1_factor = worst <= 2.0 * A * (1.0 + o.tol);
  return c;
}

}  // namespace detail

/// R_K h = sum_{k=0}^K op^k h / (2A)^k for a positively homogeneous sublinear
/// op. K grows past the requested minimum until 2^{-K} < tol and the tail
/// term that spoils self-majorization drops below tol.
inline RdFResult rdf_iterate(const GridFunction& h, const Operator& op, const RdFOptions& opt, std::string config) {
  require(opt.A > 0.0, "rdf: A must be positive");
  require(opt.tol > 0.0 && opt.tol < 1.0, "rdf: tol must lie in (0, 1)");
  require(opt.K >= 0, "rdf: K must be nonnegative");
  for (double v : h.values()) require(v >= 0.0, "rdf: h must be nonnegative");
  if (opt.weight) require_same_grid(h.spec(), opt.weight->spec());

  const int k_tol = static_cast<int>(std::ceil(-std::log2(opt.tol))) + 1;
  const int k_min = std::max(opt.K, k_tol);
  double A = opt.A;
  RdFResult res{h, h, opt.A, opt.A, 0, 0.0, 0.0, std::move(config), opt, op, {}};

  // Restart whenever an iterate ratio exceeds the current A so that (b)
  // follows from the triangle inequality.
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double> sum(h.data());
    GridFunction term = h;
    double prev_norm = detail::space_norm(term, opt);
    bool restart = false;
    int k = 0;
    double tail = 0.0;
    while (true) {
      GridFunction next = op(term);
      const double next_norm = detail::space_norm(next, opt);
      if (prev_norm > 0.0) {
        const double ratio = next_norm / prev_norm;
        require(std::isfinite(ratio), "rdf: iterate norm is not finite");
        if (ratio > A * (1.0 + 1e-12)) {
          A = ratio;
          restart = true;
          break;
        }
      }
      const double scale = 1.0 / (2.0 * A);
      next = scale * next;
      // next is now op^{k+1} h / (2A)^{k+1}; decide whether R_k suffices
      tail = 0.0;
      for (std::size_t i = 0; i < sum.size(); ++i)
        if (next[i] > 0.0) tail = std::max(tail, sum[i] > 0.0 ? next[i] / sum[i] : std::numeric_limits<double>::infinity());
      if ((k >= k_min && tail < opt.tol) || k >= opt.max_terms) break;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += next[i];
      term = std::move(next);
      prev_norm = next_norm * scale;
      ++k;
    }
    if (restart) continue;
    res.majorant = GridFunction(h.spec(), std::move(sum));
    res.truncation_K = k;
    res.tail_term = tail;
    res.operator_norm_A = A;
    res.tail_bound = std::ldexp(2.0 * detail::space_norm(h, opt), -k);
    res.certificate = detail::certify_rdf(h, res.majorant, op, A, opt);
    return res;
  }
  throw Error("rdf: operator norm estimate did not stabilize");
}

/// Rubio de Francia majorant with M = maximal(., cfg).
inline RdFResult rdf_majorant(const GridFunction& h, const MaximalConfig& cfg, const RdFOptions& opt) {
  cfg.validate(h.spec());
  Operator op = [cfg](const GridFunction& f) { return maximal(f, cfg); };
  std::ostringstream os;
  os << "M_V variant=" << variant_name(cfg.variant) << " exponent=" << cfg.exponent;
  return rdf_iterate(h, op, opt, os.str());
}

/// The R_w variant built on the weighted maximal operator M_w.
inline RdFResult rdf_majorant_weighted(const GridFunction& h, const Weight& w, const std::vector<int>& half_widths,
                                       const RdFOptions& opt) {
  Operator op = [w, half_widths](const GridFunction& f) { return maximal_weighted(f, w, half_widths); };
  return rdf_iterate(h, op, opt, "M_w");
}

// ---------------------------------------------------------------------------
// Factorization w = w1 w2^{1-p} with w1, w2 in A1.

enum class FactorBranch { LargeP, SmallP };  // p >= 2, p < 2

struct Factorization {
  Weight omega;
  double p = 2.0;
  double theta = 0.0;
  Weight w1;
  Weight w2;
  GridFunction eta;
  FactorBranch branch = FactorBranch::LargeP;
  double A = 0.0;              // measured norm of T on the iterates
  int terms = 0;
  double identity_error = 0.0;  // max relative |w1 w2^{1-p} - w| / w
  double a1_exponent = 0.0;     // p theta or p' theta
  double w1_a1 = 0.0;
  double w2_a1 = 0.0;
  std::vector<double> iterate_ratios;
};

inline json to_json_value(const Factorization& f) {
  return {{"p", f.p},
          {"theta", f.theta},
          {"branch", f.branch == FactorBranch::LargeP ? "p>=2" : "p<2"},
          {"A", f.A},
          {"terms", f.terms},
          {"identity_error", f.identity_error},
          {"a1_exponent", f.a1_exponent},
          {"w1_a1_constant", number_or_inf(f.w1_a1)},
          {"w2_a1_constant", number_or_inf(f.w2_a1)}};
}

struct FactorOptions {
  int K = 40;
  double tol = 1e-9;
  double divergence_cap = 1e8;
  bool measure_a1 = true;
};

/// For p >= 2, T f = [w^{-1/p} M(f^{p/p'} w^{1/p})]^{p'/p} + w^{1/p} M(f w^{-1/p})
/// on L^p with M = M_{V,p theta}; for p < 2 the roles of p and p' swap and T
/// acts on L^{p'} with M = M_{V,p' theta}. eta = sum_{k=1}^K (2A)^{-k} T^k f.
inline Factorization factorize(const Weight& w, double p, double theta, const RhoPtr& rho,
                               const FactorOptions& opt = {}) {
  require(p > 1.0, "factorize: p must exceed 1");
  require(theta >= 0.0, "factorize: theta must be nonnegative");
  const GridSpec& spec = w.spec();
  const double pc = conjugate(p);
  const bool large = p >= 2.0;
  // a = outer exponent of the first term's inner power, s = space exponent
  const double s = large ? p : pc;
  const double inner = large ? p / pc : pc / p;
  const double a1_exp = s * theta;
  const MaximalConfig cfg = MaximalConfig::make(MaximalVariant::Cube, a1_exp, rho, spec);

  const GridFunction& wv = w.values();
  const GridFunction w_pos = wv.map([p](double v) { return std::pow(v, 1.0 / p); });
  const GridFunction w_neg = wv.map([p](double v) { return std::pow(v, -1.0 / p); });
  // p >= 2: first term sandwiches M between w^{-1/p} (outside) and w^{1/p}
  // (inside); p < 2 reverses both.
  const GridFunction& outer1 = large ? w_neg : w_pos;
  const GridFunction& inner1 = large ? w_pos : w_neg;
  const GridFunction& outer2 = large ? w_pos : w_neg;
  const GridFunction& inner2 = large ? w_neg : w_pos;

  auto T = [&](const GridFunction& f) {
    const GridFunction a = maximal(f.map([inner](double v) { return std::pow(v, inner); }) * inner1, cfg);
    const GridFunction first = (outer1 * a).map([inner](double v) { return std::pow(v, 1.0 / inner); });
    const GridFunction second = outer2 * maximal(f * inner2, cfg);
    return first + second;
  };

  const double unit_norm = norm(GridFunction::constant(spec, 1.0), s);
  GridFunction term = GridFunction::constant(spec, 1.0 / unit_norm);

  Factorization out{w, p, theta, w, w, term, FactorBranch::LargeP, 0.0, 0, 0.0, 0.0, 0.0, 0.0, {}};
  out.branch = large ? FactorBranch::LargeP : FactorBranch::SmallP;
  out.a1_exponent = a1_exp;

  // first pass: T^k f normalized, to measure A on the iterates
  const int k_tol = static_cast<int>(std::ceil(-std::log2(opt.tol))) + 1;
  const int K = std::max(opt.K, k_tol);
  std::vector<GridFunction> iterates;
  iterates.reserve(K);
  double A = 0.0;
  GridFunction cur = term;
  double cur_norm = 1.0;
  for (int k = 1; k <= K; ++k) {
    GridFunction next = T(cur);
    const double nn = norm(next, s);
    const double ratio = nn / cur_norm;
    out.iterate_ratios.push_back(ratio);
    if (!std::isfinite(ratio) || ratio > opt.divergence_cap) {
      std::ostringstream os;
      os << "factorize: iteration diverges at k=" << k << " (norm ratio " << ratio << "); ratios so far:";
      for (double r : out.iterate_ratios) os << ' ' << r;
      throw Error(os.str());
    }
    A = std::max(A, ratio);
    // store T^k f / ||T^k f||, remembering the log norm growth
    iterates.push_back((1.0 / nn) * next);
    cur = iterates.back();
    cur_norm = 1.0;
  }
  // eta = sum (2A)^{-k} T^k f with T^k f = prod(ratios) * iterate_k
  std::vector<double> eta(spec.size(), 0.0);
  double log_scale = 0.0;
  for (int k = 1; k <= K; ++k) {
    log_scale += std::log(out.iterate_ratios[k - 1]) - std::log(2.0 * A);
    const double c = std::exp(log_scale);
    const GridFunction& it = iterates[k - 1];
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] += c * it[i];
  }
  out.eta = GridFunction(spec, std::move(eta));
  out.A = A;
  out.terms = K;

  const GridFunction& e = out.eta;
  if (large) {
    out.w1 = Weight(w_pos * e.map([p](double v) { return std::pow(v, p - 1.0); }));
    out.w2 = Weight(w_neg * e);
  } else {
    out.w1 = Weight(w_pos * e);
    out.w2 = Weight(w_neg * e.map([pc](double v) { return std::pow(v, pc - 1.0); }));
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double rebuilt = out.w1[i] * std::pow(out.w2[i], 1.0 - p);
    out.identity_error = std::max(out.identity_error, std::fabs(rebuilt - wv[i]) / wv[i]);
  }
  if (opt.measure_a1) {
    const CubeFamily fam = CubeFamily::standard(spec);
    out.w1_a1 = ap_constant(out.w1, 1.0, a1_exp, rho, fam).constant;
    out.w2_a1 = ap_constant(out.w2, 1.0, a1_exp, rho, fam).constant;
  }
  return out;
}

}  // namespace swl
