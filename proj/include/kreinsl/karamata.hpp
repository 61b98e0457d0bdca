#pragma once

// Finite-sample detectors for regular variation, slow variation, positive
// increase, the integral characterizations of the variation index, and
// sequence-wise asymptotic equivalence.
//
// Every positive function is carried in log domain: lphi = ln f as a function
// of the stored coordinate (u = ln x for ordinary handles, v = ln ln x for
// the doubly-logarithmic catalog functions whose interesting points overflow
// doubles in linear coordinates). Ratio diagnostics are differences of lphi,
// so a multiplicative scale on f cancels exactly. Limits at 0_- and at the
// two infinities reduce to limits at 0_+ / +infinity through the standard
// involutions; the minus-regime handles are the reflected representatives
// x -> -g(-x) built by from_negative.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kreinsl/numerics.hpp"
#include "kreinsl/verdict.hpp"

namespace kreinsl {

enum class Regime { zero_plus, zero_minus, plus_infinity, minus_infinity };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::zero_plus: return "zero_plus";
    case Regime::zero_minus: return "zero_minus";
    case Regime::plus_infinity: return "plus_infinity";
    default: return "minus_infinity";
  }
}

inline bool is_zero_regime(Regime r) {
  return r == Regime::zero_plus || r == Regime::zero_minus;
}

enum class Coord { linear_log, double_log };

struct PositiveFn {
  std::function<double(double)> lphi;   // ln f in the stored coordinate
  std::function<double(double)> dlphi;  // optional d lphi / du (= x f'/f)
  bool has_dlphi = false;
  double log_scale = 0.0;  // ln of a positive constant factor
  Coord coord = Coord::linear_log;

  // ln f(e^u): reduces a doubly-log handle to the u coordinate
  double lphi_log(double u) const {
    return coord == Coord::linear_log ? lphi(u) : lphi(std::log(u));
  }
  double log_eval_x(double x) const { return lphi_log(std::log(x)) + log_scale; }
  double eval(double x) const { return std::exp(log_eval_x(x)); }

  PositiveFn scaled(double c) const {
    PositiveFn out = *this;
    out.log_scale += std::log(c);
    return out;
  }

  static PositiveFn from_log(std::function<double(double)> phi) {
    PositiveFn f;
    f.lphi = std::move(phi);
    return f;
  }
  static PositiveFn from_log(std::function<double(double)> phi,
                             std::function<double(double)> dphi) {
    PositiveFn f;
    f.lphi = std::move(phi);
    f.dlphi = std::move(dphi);
    f.has_dlphi = true;
    return f;
  }
  static PositiveFn from_linear(std::function<double(double)> fn) {
    PositiveFn f;
    f.lphi = [fn](double u) { return std::log(fn(std::exp(u))); };
    return f;
  }
  // representative of a negative-valued g on the negative axis: x -> -g(-x)
  static PositiveFn from_negative(std::function<double(double)> g) {
    PositiveFn f;
    f.lphi = [g](double u) { return std::log(-g(-std::exp(u))); };
    return f;
  }
  static PositiveFn power(double a) {
    PositiveFn f;
    f.lphi = [a](double u) { return a * u; };
    f.dlphi = [a](double) { return a; };
    f.has_dlphi = true;
    return f;
  }
  static PositiveFn double_log_phi(std::function<double(double)> phi) {
    PositiveFn f;
    f.lphi = std::move(phi);
    f.coord = Coord::double_log;
    return f;
  }
};

struct GridPolicy {
  double anchor = 1e-6;  // x0: first grid point in linear coordinates
  double ratio = 0.5;    // q: geometric step toward the regime point
  int depth = 60;        // N
  std::vector<double> lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  static GridPolicy default_for(Regime r) {
    GridPolicy p;
    if (!is_zero_regime(r)) {
      p.anchor = 1e6;
      p.ratio = 2.0;
    }
    return p;
  }
};

namespace karamata_detail {

// The detectors study chi(t) = ln f at the point with |ln x| = t, with t
// increasing toward the regime point, and the difference
//   D_k(c) = chi(t_k) - chi(t_k "one lambda-step back").
// ln ratio f(lambda x)/f(x) = -D at the grid point.
struct Reduced {
  std::function<double(double)> chi;
  std::vector<double> t;  // increasing toward the regime point
};

inline Reduced reduce(const PositiveFn& fn, Regime regime,
                      const GridPolicy& pol) {
  Reduced red;
  bool zero = is_zero_regime(regime);
  double q = pol.ratio;
  if (zero && q >= 1.0) q = 1.0 / q;
  if (!zero && q <= 1.0) q = 1.0 / q;
  double lx = std::log(pol.anchor);
  for (int k = 0; k <= pol.depth; ++k)
    red.t.push_back(zero ? -(lx + k * std::log(q)) : lx + k * std::log(q));
  if (zero)
    red.chi = [&fn](double t) { return fn.lphi_log(-t); };
  else
    red.chi = [&fn](double t) { return fn.lphi_log(t); };
  return red;
}

}  // namespace karamata_detail

// ---------------------------------------------------------------------------
// slow variation: f(lambda x)/f(x) -> 1 for every lambda
// ---------------------------------------------------------------------------

inline TriVerdict is_slowly_varying(const PositiveFn& fn, Regime regime,
                                    std::optional<GridPolicy> policy = {}) {
  GridPolicy pol = policy ? *policy : GridPolicy::default_for(regime);
  auto red = karamata_detail::reduce(fn, regime, pol);
  std::vector<EvidencePoint> diag;
  bool eval_failure = false;
  for (double t : red.t) {
    double worst = 0.0;
    for (double lam : pol.lambdas) {
      double c = -std::log(lam);
      // ln of f(lambda x)/f(x) at this grid point
      double d = red.chi(t + (is_zero_regime(regime) ? c : -c)) - red.chi(t);
      double ratio = std::exp(d);
      if (!std::isfinite(ratio)) {
        eval_failure = true;
        continue;
      }
      worst = std::max(worst, std::abs(ratio - 1.0));
    }
    diag.push_back({t, worst, true});
  }
  TriVerdict v;
  v.evidence = diag;
  if (eval_failure) {
    v.note = "evaluation failure on the probe grid";
    return v;
  }
  auto first = detail::window_values(diag, 0.0, 0.25);
  auto last = detail::window_values(diag, 0.75, 1.0);
  double last_max = *std::max_element(last.begin(), last.end());
  double first_med = median(first);
  bool decreasing = last_max <= 0.6 * std::max(first_med, 1e-12) ||
                    last_max < 1e-6;
  v.trend = log_log_tail_slope(diag);
  if (last_max < 0.05 && (decreasing || v.trend < 0)) {
    v.status = Status::holds;
    return v;
  }
  if (last_max >= 0.05 && !decreasing) {
    v.status = Status::fails;
    v.note = "some lambda ratio stabilizes away from 1";
    return v;
  }
  return v;
}

// ---------------------------------------------------------------------------
// positive increase: limsup f(lambda x)/f(x) < 1 for some lambda in (0,1)
// ---------------------------------------------------------------------------

inline TriVerdict is_positively_increasing(const PositiveFn& fn, Regime regime,
                                           std::optional<GridPolicy> policy = {},
                                           double margin = 0.02) {
  GridPolicy pol = policy ? *policy : GridPolicy::default_for(regime);
  auto red = karamata_detail::reduce(fn, regime, pol);
  // precondition: nondecreasing toward the regime point, checked on the grid
  {
    double prev = -kInf;
    for (double t : red.t) {
      double v = red.chi(t) * (is_zero_regime(regime) ? -1.0 : 1.0);
      if (v < prev - 1e-9 * std::max(1.0, std::abs(prev)))
        throw DomainError(
            "is_positively_increasing: handle not monotone on the grid");
      prev = v;
    }
  }
  const std::size_t n = red.t.size();
  const std::size_t tail_start = n / 2;
  bool any_lambda_holds = false;
  bool all_lambda_approach_one = true;
  std::vector<EvidencePoint> diag;  // per grid point: max ratio over lambdas
  std::vector<double> per_point_max(n, 0.0);
  for (double lam : pol.lambdas) {
    double c = -std::log(lam);
    double tail_max = 0.0;
    std::vector<double> first_gap, last_gap;
    for (std::size_t k = 0; k < n; ++k) {
      double t = red.t[k];
      double lnr = red.chi(t + (is_zero_regime(regime) ? c : -c)) - red.chi(t);
      double ratio = std::exp(lnr);
      per_point_max[k] = std::max(per_point_max[k], ratio);
      if (k >= tail_start) tail_max = std::max(tail_max, ratio);
      if (k < n / 4) first_gap.push_back(1.0 - ratio);
      if (k >= (3 * n) / 4) last_gap.push_back(1.0 - ratio);
    }
    if (tail_max <= 1.0 - margin) any_lambda_holds = true;
    // "approaches 1": the gap shrinks markedly or the tail touches 1
    double fg = median(first_gap), lg = median(last_gap);
    bool approaches = tail_max >= 1.0 - margin / 4 ||
                      (fg > 0 && lg < 0.5 * fg);
    if (!approaches) all_lambda_approach_one = false;
  }
  for (std::size_t k = 0; k < n; ++k)
    diag.push_back({red.t[k], per_point_max[k], true});
  TriVerdict v;
  v.evidence = std::move(diag);
  v.trend = log_log_tail_slope(v.evidence);
  if (any_lambda_holds) {
    v.status = Status::holds;
    return v;
  }
  if (all_lambda_approach_one) {
    v.status = Status::fails;
    v.note = "ratios approach or oscillate up to 1 for every lambda";
    return v;
  }
  return v;
}

// ---------------------------------------------------------------------------
// variation index from the integral mean  L(v) = (1/(v^g f(v))) S(v),
// S(v) = int_0^v s^{g-1} f(s) ds;  L -> 1/(g + a)
// ---------------------------------------------------------------------------

struct IndexEstimate {
  double index = kNaN;           // estimated variation index
  double limit_estimate = kNaN;  // achieved limit of L
  TriVerdict verdict;
};

inline IndexEstimate rv_index_estimate(const PositiveFn& fn, double gamma,
                                       const GridPolicy& pol = {}) {
  IndexEstimate out;
  auto integrand = [&fn, gamma](double s) {
    return std::pow(s, gamma - 1.0) * fn.eval(s);
  };
  // grid of v decreasing toward 0; integrals accumulated from the deepest one
  std::vector<double> vs;
  for (int k = 0; k <= pol.depth; ++k)
    vs.push_back(pol.anchor * std::pow(pol.ratio < 1 ? pol.ratio : 0.5, k));
  auto tail = integrate_to_zero(integrand, vs.back(), 1e-12);
  if (tail.ruling == TailRuling::divergent)
    throw DivergenceError("rv_index_estimate: inner integral diverges at 0");
  std::vector<double> L(vs.size());
  double acc = tail.value;
  for (std::size_t i = vs.size(); i-- > 0;) {
    if (i + 1 < vs.size())
      acc += integrate(integrand, vs[i + 1], vs[i], 1e-12).value;
    L[i] = acc / (std::pow(vs[i], gamma) * fn.eval(vs[i]));
  }
  std::vector<EvidencePoint> ev;
  for (std::size_t i = 0; i < vs.size(); ++i)
    ev.push_back({vs[i], L[i], std::isfinite(L[i])});
  // stabilization over the deepest quarter
  std::size_t n = vs.size();
  std::vector<double> tail_vals(L.begin() + static_cast<long>((3 * n) / 4),
                                L.end());
  double lo = *std::min_element(tail_vals.begin(), tail_vals.end());
  double hi = *std::max_element(tail_vals.begin(), tail_vals.end());
  out.limit_estimate = tail_vals.back();
  out.index = 1.0 / out.limit_estimate - gamma;
  TriVerdict v;
  v.evidence = std::move(ev);
  double spread = (hi - lo) / std::max(1e-300, std::abs(hi));
  v.status = spread < 1e-3 ? Status::holds : Status::inconclusive;
  v.note = spread < 1e-3 ? "" : "integral mean still drifting";
  out.verdict = v;
  return out;
}

// ---------------------------------------------------------------------------
// Stieltjes-integral characterization:
//   (1/(f(v)g(v))) int_0^v g df -> a/(1+a),
// evaluated through integration by parts, int g df = f g - int f dg, with
// int_0^v f dg = int_0^{g(v)} f(g^{-1}(tau)) dtau. With f the accumulated
// mass, g the accumulated length and a = 0 this is the vanishing-ratio test
// for slow variation of mass-of-length.
// ---------------------------------------------------------------------------

struct StieltjesCheck {
  TriVerdict verdict;
  double limit_estimate = kNaN;
  double target = kNaN;
  bool integral_exists = false;
  bool boundary_vanishes = false;
};

inline StieltjesCheck stieltjes_condition_check(
    const Fn1& f, const Fn1& g, const Fn1& g_inv, double alpha,
    double v_anchor, const GridPolicy& pol = {}) {
  StieltjesCheck out;
  out.target = alpha / (1.0 + alpha);
  auto fg = [&](double v) { return f(v) * g(v); };
  auto f_of_ginv = [&](double tau) { return f(g_inv(tau)); };
  std::vector<double> vs;
  double q = pol.ratio < 1 ? pol.ratio : 0.5;
  int depth = std::min(pol.depth, 40);
  for (int k = 0; k <= depth; ++k) vs.push_back(v_anchor * std::pow(q, k));
  // existence of int_0^{v} f dg as an improper integral at 0
  auto deep = integrate_to_zero(f_of_ginv, g(vs.back()), 1e-12);
  out.integral_exists = deep.ruling == TailRuling::convergent;
  if (!out.integral_exists) {
    out.verdict.status = Status::fails;
    out.verdict.note = "Stieltjes integral divergent at 0";
    return out;
  }
  double acc = deep.value;
  std::vector<EvidencePoint> ev;
  std::vector<double> boundary;
  for (std::size_t i = vs.size(); i-- > 0;) {
    if (i + 1 < vs.size())
      acc += integrate(f_of_ginv, g(vs[i + 1]), g(vs[i]), 1e-12).value;
    double s = fg(vs[i]) - acc;           // int_0^v g df
    double ratio = s / fg(vs[i]);         // the characterizing mean
    ev.push_back({vs[i], ratio, std::isfinite(ratio)});
    boundary.push_back(fg(vs[i]));
  }
  std::reverse(ev.begin(), ev.end());  // ev along decreasing v
  std::reverse(boundary.begin(), boundary.end());
  out.boundary_vanishes = boundary.back() < 0.25 * boundary.front() ||
                          boundary.back() < 1e-12;
  out.limit_estimate = ev.back().value;
  TriVerdict v;
  v.evidence = std::move(ev);
  double err = std::abs(out.limit_estimate - out.target);
  if (out.boundary_vanishes && err <= 0.02)
    v.status = Status::holds;
  else if (err >= 0.1 || !out.boundary_vanishes)
    v.status = Status::fails;
  out.verdict = std::move(v);
  return out;
}

// ---------------------------------------------------------------------------
// normalized slow variation: eps(x) = x f'(x)/f(x) -> 0
// ---------------------------------------------------------------------------

inline TriVerdict karamata_rep_check(const PositiveFn& fn, Regime regime,
                                     std::optional<GridPolicy> policy = {}) {
  GridPolicy pol = policy ? *policy : GridPolicy::default_for(regime);
  auto red = karamata_detail::reduce(fn, regime, pol);
  std::vector<EvidencePoint> ev;
  bool failure = false;
  for (double t : red.t) {
    double u = is_zero_regime(regime) ? -t : t;
    double eps;
    if (fn.has_dlphi && fn.coord == Coord::linear_log) {
      eps = fn.dlphi(u);
    } else {
      const double h = 1e-6;  // relative step in x, i.e. absolute in u
      eps = (fn.lphi_log(u + h) - fn.lphi_log(u - h)) / (2 * h);
    }
    if (!std::isfinite(eps)) failure = true;
    ev.push_back({t, std::abs(eps), std::isfinite(eps)});
  }
  TriVerdict v;
  v.evidence = std::move(ev);
  if (failure) {
    v.note = "derivative evaluation failure";
    return v;
  }
  auto first = detail::window_values(v.evidence, 0.0, 0.25);
  auto last = detail::window_values(v.evidence, 0.75, 1.0);
  double last_max = *std::max_element(last.begin(), last.end());
  double first_med = median(first);
  v.trend = log_log_tail_slope(v.evidence);
  if (last_max < 0.05 && (last_max <= first_med || v.trend < 0))
    v.status = Status::holds;
  else if (last_max >= 0.05 && last_max >= 0.75 * first_med)
    v.status = Status::fails;
  return v;
}

// ---------------------------------------------------------------------------
// sequence-wise asymptotic equivalence and inversion
// ---------------------------------------------------------------------------

struct EquivalenceWitness {
  Coord coord = Coord::linear_log;
  std::vector<double> points;  // strictly increasing, in `coord`
  std::vector<double> ratios;  // achieved f/g at the points
};

// Search for an increasing unbounded sequence with f/g -> 1: scans the stored
// coordinate for crossings of ln f - ln g through 0 and refines; one-sided
// approaches within tolerance are accepted as well. A "none" result is
// finite-sample evidence, not proof.
inline std::optional<EquivalenceWitness> seq_equivalence_search(
    const PositiveFn& f, const PositiveFn& g, double coord_lo = 1.0,
    double coord_hi = 250.0, double ratio_tol = 1e-9) {
  if (f.coord != g.coord)
    throw DomainError("seq_equivalence_search: handles in different coords");
  auto delta = [&](double u) {
    return (f.lphi(u) + f.log_scale) - (g.lphi(u) + g.log_scale);
  };
  const int n_scan = 4000;
  EquivalenceWitness w;
  w.coord = f.coord;
  double prev_u = coord_lo, prev_d = delta(coord_lo);
  for (int i = 1; i <= n_scan; ++i) {
    double u = coord_lo + (coord_hi - coord_lo) * i / n_scan;
    double d = delta(u);
    if (d == 0.0 || (d > 0) != (prev_d > 0)) {
      double root = (d == 0.0)
                        ? u
                        : solve_bracketed(delta, prev_u, u, 1e-14, 200);
      w.points.push_back(root);
      w.ratios.push_back(std::exp(delta(root)));
    } else if (std::abs(d) <= ratio_tol && (w.points.empty() ||
                                            u > w.points.back() + 1e-9)) {
      w.points.push_back(u);
      w.ratios.push_back(std::exp(d));
    }
    prev_u = u;
    prev_d = d;
  }
  // require an unbounded-looking tail: enough points spread over the range
  if (w.points.size() < 6) return std::nullopt;
  if (w.points.back() < coord_lo + 0.5 * (coord_hi - coord_lo))
    return std::nullopt;
  for (std::size_t i = 0; i < w.points.size(); ++i)
    if (std::abs(w.ratios[i] - 1.0) > 1e-6) return std::nullopt;
  return w;
}

// Inverse transfer: with f regularly varying of nonzero index and a witness
// for f ~ g along a sequence, the inverses agree along the image sequence.
// Handles must be strictly monotone in the scanned range; linear-log only.
inline TriVerdict inverse_equivalence_check(const PositiveFn& f,
                                            const PositiveFn& g,
                                            const EquivalenceWitness& witness,
                                            double index) {
  if (witness.points.empty())
    throw DomainError("inverse_equivalence_check: witness required");
  if (index == 0.0)
    throw DomainError("inverse_equivalence_check: nonzero index required");
  if (f.coord != Coord::linear_log || g.coord != Coord::linear_log)
    throw DomainError("inverse_equivalence_check: linear-log handles only");
  TriVerdict v;
  bool increasing = index > 0;
  for (double u : witness.points) {
    double ly = f.lphi(u) + f.log_scale;  // log of the common ordinate
    // invert g in log domain: find u' with ln g(e^{u'}) = ly
    auto gg = [&](double t) { return (g.lphi(t) + g.log_scale) - ly; };
    double lo = u - 8.0, hi = u + 8.0;
    double glo = gg(lo), ghi = gg(hi);
    if ((glo > 0) == (ghi > 0)) {
      v.evidence.push_back({u, kNaN, false});
      continue;
    }
    double uprime = solve_bracketed(gg, lo, hi, 1e-14, 200);
    double inv_ratio = std::exp(increasing ? u - uprime : uprime - u);
    v.evidence.push_back({u, inv_ratio, true});
  }
  std::vector<double> tail;
  for (std::size_t i = v.evidence.size() / 2; i < v.evidence.size(); ++i)
    if (v.evidence[i].valid) tail.push_back(std::abs(v.evidence[i].value - 1));
  if (tail.empty()) {
    v.note = "inversion bracket failure";
    return v;
  }
  double worst = *std::max_element(tail.begin(), tail.end());
  if (worst < 1e-3)
    v.status = Status::holds;
  else if (worst > 0.2)
    v.status = Status::fails;
  return v;
}

}  // namespace kreinsl
