#pragma once

// Coefficient expressions for the two-sided weighted string problem
//
//   -(1/w) ((1/r) f')' = z f   on (b_minus, 0) u (0, b_plus),
//
// with r > 0 and (sgn x) w > 0 a.e. Both sides are stored in positive
// coordinates: the minus-side coefficient functions are kept as functions of
// t = |x| on (0, |b_minus|), which matches the sign convention that w_minus
// is the positive restriction of -w.
//
// Supported expression families: finite sums of power-log products
// c * x^a * neglog(x)^b (neglog(x) = -ln x, valid on (0,1]), pure powers and
// constants on arbitrary intervals, a scaled-argument reflection of the other
// side's expression, and tabulated samples with monotone interpolation.
// Accumulated integrals ("mass" for w, "length" for r) use the closed-form
// primitive table where it applies and singularity-aware quadrature otherwise.

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kreinsl/numerics.hpp"

namespace kreinsl {

// One term c * x^a * (-ln x)^b. Terms with b != 0 are only meaningful for
// x in (0,1]; validation happens at expression level against the interval.
struct PowerLogTerm {
  double scale = 1.0;     // c > 0
  double power = 0.0;     // a
  double logpower = 0.0;  // b

  double eval(double x) const {
    double v = scale;
    if (power != 0.0) v *= std::pow(x, power);
    if (logpower != 0.0) v *= std::pow(-std::log(x), logpower);
    return v;
  }

  bool has_closed_primitive() const {
    if (logpower == 0.0) return power != -1.0;
    if (power == -1.0) return logpower != -1.0;
    return false;
  }

  // Antiderivative valid on the term's domain; only meaningful when
  // has_closed_primitive(). Integrability from 0 is a separate question.
  double primitive(double x) const {
    if (logpower == 0.0) {
      return scale * std::pow(x, power + 1.0) / (power + 1.0);
    }
    // power == -1
    double L = -std::log(x);
    return -scale * std::pow(L, logpower + 1.0) / (logpower + 1.0);
  }

  // Limit of the primitive as x -> 0+ (finite exactly when integrable at 0).
  double primitive_at_zero() const {
    if (!integrable_at_zero())
      throw DivergenceError("power-log term not integrable at 0");
    if (!has_closed_primitive())
      throw std::logic_error("primitive_at_zero: no closed primitive");
    return 0.0;
  }

  bool integrable_at_zero() const {
    if (power > -1.0) return true;  // log factors are subdominant
    if (power == -1.0) return logpower < -1.0;
    return false;
  }

  // Integrability of the tail toward a right endpoint e (finite or +inf).
  bool integrable_at(double e) const {
    if (std::isinf(e)) return logpower == 0.0 && power < -1.0;
    if (e < 1.0 || logpower == 0.0) return true;
    return logpower > -1.0;  // -ln x ~ (1-x) near 1
  }

  bool unbounded_at_zero() const {
    if (power < 0.0) return true;
    return power == 0.0 && logpower > 0.0;
  }

  bool unbounded_at(double e) const {
    if (std::isinf(e)) return power > 0.0 || (power == 0.0 && logpower > 0.0);
    if (e < 1.0) return false;
    return logpower < 0.0;  // pole of (-ln x)^b at x = 1
  }
};

class CoefficientExpr {
 public:
  enum class Kind { power_log_sum, scaled_arg, tabulated };

  CoefficientExpr() : kind_(Kind::power_log_sum), terms_{PowerLogTerm{}} {}

  static CoefficientExpr constant(double c) {
    CoefficientExpr e;
    e.terms_ = {PowerLogTerm{c, 0.0, 0.0}};
    return e;
  }
  static CoefficientExpr power_log(std::vector<PowerLogTerm> terms) {
    if (terms.empty())
      throw std::invalid_argument("CoefficientExpr: empty term list");
    for (const auto& t : terms)
      if (!(t.scale > 0))
        throw std::invalid_argument("CoefficientExpr: term scale must be > 0");
    CoefficientExpr e;
    e.terms_ = std::move(terms);
    return e;
  }
  // alpha * base(beta * t); used for the scaled-reflection families where one
  // side is a compressed copy of the other.
  static CoefficientExpr scaled_arg(double alpha, double beta,
                                    CoefficientExpr base) {
    if (!(alpha > 0) || !(beta > 0))
      throw std::invalid_argument("scaled_arg: alpha, beta must be > 0");
    CoefficientExpr e;
    e.kind_ = Kind::scaled_arg;
    e.alpha_ = alpha;
    e.beta_ = beta;
    e.base_ = std::make_shared<CoefficientExpr>(std::move(base));
    return e;
  }
  static CoefficientExpr tabulated(std::vector<double> x,
                                   std::vector<double> v) {
    CoefficientExpr e;
    e.kind_ = Kind::tabulated;
    e.tab_lo_ = x.front();
    e.tab_hi_ = x.back();
    e.interp_ = std::make_shared<MonotoneInterp>(std::move(x), std::move(v));
    return e;
  }

  Kind kind() const { return kind_; }

  double eval(double x) const {
    switch (kind_) {
      case Kind::power_log_sum: {
        double s = 0.0;
        for (const auto& t : terms_) s += t.eval(x);
        return s;
      }
      case Kind::scaled_arg:
        return alpha_ * base_->eval(beta_ * x);
      case Kind::tabulated:
        return (*interp_)(x);
    }
    return kNaN;
  }

  bool is_constant() const {
    return kind_ == Kind::power_log_sum && terms_.size() == 1 &&
           terms_[0].power == 0.0 && terms_[0].logpower == 0.0;
  }

  bool has_closed_primitive() const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (!t.has_closed_primitive()) return false;
        return true;
      case Kind::scaled_arg:
        return base_->has_closed_primitive();
      case Kind::tabulated:
        return false;
    }
    return false;
  }

  bool unbounded_at_zero() const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (t.unbounded_at_zero()) return true;
        return false;
      case Kind::scaled_arg:
        return base_->unbounded_at_zero();
      case Kind::tabulated:
        return false;
    }
    return false;
  }

  bool unbounded_at(double e) const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (t.unbounded_at(e)) return true;
        return false;
      case Kind::scaled_arg:
        return base_->unbounded_at(beta_ * e);
      case Kind::tabulated:
        return false;
    }
    return false;
  }

  // Ruling on local integrability at 0 (analytic for the closed families,
  // numeric probe for tabulated data).
  TailRuling integrable_at_zero() const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (!t.integrable_at_zero()) return TailRuling::divergent;
        return TailRuling::convergent;
      case Kind::scaled_arg:
        return base_->integrable_at_zero();
      case Kind::tabulated:
        return TailRuling::convergent;  // finite samples, finite interpolant
    }
    return TailRuling::undetermined;
  }

  TailRuling integrable_at(double e) const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (!t.integrable_at(e)) return TailRuling::divergent;
        return TailRuling::convergent;
      case Kind::scaled_arg:
        return base_->integrable_at(beta_ * e);
      case Kind::tabulated:
        return TailRuling::convergent;
    }
    return TailRuling::undetermined;
  }

  // Accumulated integral from 0: the "mass"/"length" function of the side.
  // Closed form when the primitive table applies, singularity-aware
  // quadrature otherwise. Throws DivergenceError when not integrable at 0.
  double integral_from_zero(double x, double rel_tol = 1e-10) const {
    if (integrable_at_zero() == TailRuling::divergent)
      throw DivergenceError("coefficient not integrable at 0");
    switch (kind_) {
      case Kind::power_log_sum: {
        if (has_closed_primitive()) {
          double s = 0.0;
          for (const auto& t : terms_)
            s += t.primitive(x) - t.primitive_at_zero();
          return s;
        }
        auto r = integrate_to_zero([this](double u) { return eval(u); }, x,
                                   rel_tol);
        if (r.ruling == TailRuling::divergent)
          throw DivergenceError("quadrature toward 0 diverges");
        return r.value;
      }
      case Kind::scaled_arg:
        return alpha_ / beta_ * base_->integral_from_zero(beta_ * x, rel_tol);
      case Kind::tabulated: {
        double lo = tab_lo_;
        double head = (*interp_)(lo)*lo;  // linear continuation below samples
        return head + integrate([this](double u) { return eval(u); }, lo, x,
                                rel_tol)
                          .value;
      }
    }
    return kNaN;
  }

  // Integral over [x1, x2] inside the domain (no integrability requirement
  // at 0); closed-form difference where available.
  double integral(double x1, double x2, double rel_tol = 1e-10) const {
    switch (kind_) {
      case Kind::power_log_sum: {
        if (has_closed_primitive()) {
          double s = 0.0;
          for (const auto& t : terms_) s += t.primitive(x2) - t.primitive(x1);
          return s;
        }
        return integrate([this](double u) { return eval(u); }, x1, x2, rel_tol)
            .value;
      }
      case Kind::scaled_arg:
        return alpha_ / beta_ * base_->integral(beta_ * x1, beta_ * x2, rel_tol);
      case Kind::tabulated:
        return integrate([this](double u) { return eval(u); }, x1, x2, rel_tol)
            .value;
    }
    return kNaN;
  }

  // True when every factor is representable on (0, hi); power-log terms with
  // a log factor require hi <= 1.
  bool valid_on(double hi) const {
    switch (kind_) {
      case Kind::power_log_sum:
        for (const auto& t : terms_)
          if (t.logpower != 0.0 && !(hi <= 1.0)) return false;
        return true;
      case Kind::scaled_arg:
        return base_->valid_on(beta_ * hi);
      case Kind::tabulated:
        return hi <= tab_hi_ * 1.0000001;
    }
    return false;
  }

  const std::vector<PowerLogTerm>& terms() const { return terms_; }
  double scaled_alpha() const { return alpha_; }
  double scaled_beta() const { return beta_; }

 private:
  Kind kind_ = Kind::power_log_sum;
  std::vector<PowerLogTerm> terms_;
  double alpha_ = 1.0, beta_ = 1.0;
  std::shared_ptr<CoefficientExpr> base_;
  std::shared_ptr<MonotoneInterp> interp_;
  double tab_lo_ = 0.0, tab_hi_ = 0.0;
};

enum class Side { plus, minus };

inline const char* to_string(Side s) {
  return s == Side::plus ? "plus" : "minus";
}

// Two-sided problem. Minus-side expressions are functions of t = |x|.
struct ProblemSpec {
  double b_minus = -1.0;  // < 0, possibly -inf
  double b_plus = 1.0;    // > 0, possibly +inf
  CoefficientExpr w_plus, r_plus;   // on (0, b_plus)
  CoefficientExpr w_minus, r_minus;  // on (0, |b_minus|), reflected

  double extent(Side s) const {
    return s == Side::plus ? b_plus : -b_minus;
  }
  const CoefficientExpr& w(Side s) const {
    return s == Side::plus ? w_plus : w_minus;
  }
  const CoefficientExpr& r(Side s) const {
    return s == Side::plus ? r_plus : r_minus;
  }

  // Signed-coordinate evaluation of the weight w (carries the sign of x) and
  // of r, for callers working on the original interval.
  double eval_w_signed(double x) const {
    return x >= 0 ? w_plus.eval(x) : -w_minus.eval(-x);
  }
  double eval_r_signed(double x) const {
    return x >= 0 ? r_plus.eval(x) : r_minus.eval(-x);
  }

  void validate() const {
    if (!(b_minus < 0.0) || !(b_plus > 0.0))
      throw DomainError("interval must satisfy b_minus < 0 < b_plus");
    for (Side s : {Side::plus, Side::minus}) {
      double B = extent(s);
      if (!w(s).valid_on(B) || !r(s).valid_on(B))
        throw DomainError("coefficient expression invalid on side interval");
      // positivity sampling on a geometric probe grid
      double x0 = std::isinf(B) ? 1.0 : B * 0.75;
      for (int k = 0; k < 24; ++k) {
        double x = x0 * std::pow(0.43, k * 0.5);
        if (!(w(s).eval(x) > 0.0) || !(r(s).eval(x) > 0.0))
          throw DomainError("coefficients must be positive on their side");
      }
      if (w(s).integrable_at_zero() == TailRuling::divergent ||
          r(s).integrable_at_zero() == TailRuling::divergent)
        throw DomainError("coefficients must be locally integrable at 0");
    }
  }

  // Resolve scaled-reflection markers: a minus side declared as a scaled
  // reflection of the plus side (or vice versa) with parameters (alpha, beta)
  // maps w_minus(t) = alpha*w_plus(beta t) on (0, b_plus/beta).
  static ProblemSpec with_reflected_minus(double b_plus, CoefficientExpr wp,
                                          CoefficientExpr rp, double alpha,
                                          double beta) {
    ProblemSpec p;
    p.b_plus = b_plus;
    p.b_minus = -b_plus / beta;
    p.w_minus = CoefficientExpr::scaled_arg(alpha, beta, wp);
    p.r_minus = CoefficientExpr::scaled_arg(alpha, beta, rp);
    p.w_plus = std::move(wp);
    p.r_plus = std::move(rp);
    return p;
  }
};

// eval_coeff with the domain checks of the public operation contract.
inline double eval_coeff(const CoefficientExpr& e, double x, double hi) {
  if (!(x > 0.0) || !(x < hi))
    throw DomainError("eval_coeff: point outside the open side interval");
  double v = e.eval(x);
  if (!std::isfinite(v))
    throw DomainError("eval_coeff: coefficient not finite at the point");
  return v;
}

}  // namespace kreinsl
