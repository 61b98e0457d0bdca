#pragma once

// Built-in catalog: the standard two-sided problems exercised throughout the
// tests and CLI, and the named asymptotic test functions. Each problem entry
// carries the expected classification outcomes used for regression checks
// where the outcome is pinned by theory.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kreinsl/coeffs.hpp"
#include "kreinsl/karamata.hpp"

namespace kreinsl {

struct CatalogParams {
  double alpha_plus = 0.5;
  double alpha_minus = 1.0;
  double alpha = 1.0;  // reflection scale
  double beta = 2.0;   // reflection compression
  double b_plus = 1.0;
  double b_minus = -1.0;
};

// w = sgn x, r = 1 on (-1, 1)
inline ProblemSpec make_sgn() {
  ProblemSpec p;
  p.b_minus = -1.0;
  p.b_plus = 1.0;
  p.w_plus = CoefficientExpr::constant(1.0);
  p.r_plus = CoefficientExpr::constant(1.0);
  p.w_minus = CoefficientExpr::constant(1.0);
  p.r_minus = CoefficientExpr::constant(1.0);
  return p;
}

// w = sgn x, r = 1 on the whole axis
inline ProblemSpec make_halfline() {
  ProblemSpec p = make_sgn();
  p.b_minus = -kInf;
  p.b_plus = kInf;
  return p;
}

// power weight w = sgn(x) |x|^alpha, r = 1 on (-1, 1)
inline ProblemSpec make_beals(double alpha = 0.5) {
  ProblemSpec p;
  p.b_minus = -1.0;
  p.b_plus = 1.0;
  p.w_plus = CoefficientExpr::power_log({{1.0, alpha, 0.0}});
  p.w_minus = CoefficientExpr::power_log({{1.0, alpha, 0.0}});
  p.r_plus = CoefficientExpr::constant(1.0);
  p.r_minus = CoefficientExpr::constant(1.0);
  return p;
}

// w_plus = 1/(x ln^2 x) on (0,1), r = 1; minus side the scaled reflection
// with parameters (alpha, beta)
inline ProblemSpec make_ex420(double alpha = 1.0, double beta = 2.0) {
  CoefficientExpr wp = CoefficientExpr::power_log({{1.0, -1.0, -2.0}});
  CoefficientExpr rp = CoefficientExpr::constant(1.0);
  return ProblemSpec::with_reflected_minus(1.0, wp, rp, alpha, beta);
}

// log-family weights w_pm = alpha_pm/(|x| (-ln|x|)^{1+alpha_pm}), r = 1
inline ProblemSpec make_ex421(double alpha_plus = 0.5, double alpha_minus = 1.0,
                              double b_plus = 1.0, double b_minus = -1.0) {
  ProblemSpec p;
  p.b_plus = b_plus;
  p.b_minus = b_minus;
  p.w_plus =
      CoefficientExpr::power_log({{alpha_plus, -1.0, -(1.0 + alpha_plus)}});
  p.w_minus =
      CoefficientExpr::power_log({{alpha_minus, -1.0, -(1.0 + alpha_minus)}});
  p.r_plus = CoefficientExpr::constant(1.0);
  p.r_minus = CoefficientExpr::constant(1.0);
  return p;
}

inline std::optional<ProblemSpec> make_catalog_problem(
    const std::string& name, const CatalogParams& prm = {}) {
  if (name == "sgn") return make_sgn();
  if (name == "halfline") return make_halfline();
  if (name == "neumann-unit") return make_sgn();  // eigs runs it decoupled
  if (name == "beals") return make_beals(prm.alpha_plus);
  if (name == "ex420" || name == "cor419")
    return make_ex420(prm.alpha, prm.beta);
  if (name == "ex421" || name == "ex435")
    return make_ex421(prm.alpha_plus, prm.alpha_minus, prm.b_plus,
                      prm.b_minus);
  return std::nullopt;
}

inline std::vector<std::string> catalog_problem_names() {
  return {"sgn", "halfline", "neumann-unit", "beals", "ex420", "cor419",
          "ex421", "ex435"};
}

// ---------------------------------------------------------------------------
// named asymptotic functions
// ---------------------------------------------------------------------------

struct CatalogFn {
  PositiveFn fn;
  Regime natural_regime = Regime::zero_plus;
  GridPolicy policy;  // grid adapted to where the behaviour shows
  std::string description;
};

// piecewise-linear staircase exponent: on (n^2 - n, n^2 + n] the value is
// n(n+1)/2 + min(0, u - n^2); nondecreasing, slope alternating 1 / 0
inline double staircase_exponent(double u) {
  if (u <= 0) return 0.0;
  double n = std::floor(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * u)));
  // n such that u in (n^2 - n, n^2 + n]
  while (u <= n * n - n) n -= 1.0;
  while (u > n * n + n) n += 1.0;
  return 0.5 * n * (n + 1.0) + std::min(0.0, u - n * n);
}

inline std::optional<CatalogFn> make_catalog_fn(const std::string& name) {
  CatalogFn c;
  if (name == "neglog_inv") {  // 1/(-ln x) near 0+
    c.fn = PositiveFn::from_log(
        [](double u) { return -std::log(-u); },
        [](double u) { return -1.0 / u; });
    c.natural_regime = Regime::zero_plus;
    c.policy = GridPolicy::default_for(Regime::zero_plus);
    c.description = "1/(-ln x), slowly varying at 0+";
    return c;
  }
  if (name == "oscslow") {  // exp((ln ln x) cos(ln ln x)) at +inf
    c.fn = PositiveFn::from_log(
        [](double u) { return std::log(u) * std::cos(std::log(u)); },
        [](double u) {
          return (std::cos(std::log(u)) - std::sin(std::log(u))) / u;
        });
    c.natural_regime = Regime::plus_infinity;
    c.policy = GridPolicy::default_for(Regime::plus_infinity);
    c.policy.depth = 140;  // the log-scale oscillation settles slowly
    c.description = "exp((ln ln x) cos(ln ln x)), normalized slowly varying";
    return c;
  }
  if (name == "a17") {  // staircase exponent: neither slowly varying nor
                        // positively increasing at +inf
    c.fn = PositiveFn::from_log(staircase_exponent);
    c.natural_regime = Regime::plus_infinity;
    c.policy = GridPolicy::default_for(Regime::plus_infinity);
    c.policy.depth = 90;
    c.description = "staircase-exponent function, pathological at +inf";
    return c;
  }
  if (name == "a14_f" || name == "a14_g") {  // doubly-log oscillating pair
    bool plus = name == "a14_f";
    c.fn = PositiveFn::double_log_phi(plus
                                          ? std::function<double(double)>(
                                                [](double v) {
                                                  return v + std::sin(v);
                                                })
                                          : std::function<double(double)>(
                                                [](double v) {
                                                  return v - std::sin(v);
                                                }));
    c.natural_regime = Regime::plus_infinity;
    c.policy = GridPolicy::default_for(Regime::plus_infinity);
    c.description = "doubly-log oscillating pair member";
    return c;
  }
  return std::nullopt;
}

inline std::vector<std::string> catalog_fn_names() {
  return {"neglog_inv", "oscslow", "a17", "a14_f", "a14_g"};
}

}  // namespace kreinsl
