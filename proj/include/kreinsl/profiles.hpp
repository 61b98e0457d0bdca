#pragma once

// Per-side monotone profile bundle. In positive (reflected) coordinates a
// side carries
//   mass(x)   = integral of w from 0 to x      (increasing)
//   length(x) = integral of r from 0 to x      (increasing)
//   mass_of_length(s) = mass(length^{-1}(s))
//   freq(s)   = 1 / (s * mass_of_length(s))    (decreasing, unbounded at 0+)
// and scale_of_freq, the inverse of freq. The signed wrappers restore the
// convention that both accumulators are negative on the minus side and the
// frequency-profile inverse is negative there.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "kreinsl/coeffs.hpp"
#include "kreinsl/numerics.hpp"

namespace kreinsl {

// Monotone function on (0, hi) with bracketed inversion. Bracket expansion
// walks toward the open ends: multiplicative toward 0, distance-halving
// toward a finite right end, doubling toward an infinite one.
struct MonotoneHandle {
  std::function<double(double)> eval;
  double hi = 1.0;      // right end of the open domain (may be +inf)
  bool increasing = true;
  bool closed_form = false;

  double invert(double y, double abs_tol = 1e-12) const {
    double x1 = std::isinf(hi) ? 1.0 : 0.5 * hi;
    double lo = x1, up = x1;
    double v = eval(x1);
    auto above = [&](double val) { return increasing ? val > y : val < y; };
    int guard = 0;
    // grow the upper end until eval(up) is on the far side of y
    while (!above(eval(up))) {
      if (std::isinf(hi)) {
        up *= 2.0;
        if (up > 1e290) throw RootError("invert: value outside range");
      } else {
        double d = hi - up;
        if (d < 1e-13 * hi) throw RootError("invert: value outside range");
        up = hi - 0.5 * d;
      }
      if (++guard > 1200) throw RootError("invert: bracket expansion failed");
    }
    guard = 0;
    while (above(eval(lo))) {
      lo *= 0.25;
      if (lo < 1e-300) throw RootError("invert: value outside range");
      if (++guard > 1200) throw RootError("invert: bracket expansion failed");
    }
    (void)v;
    // bisect in log(x); domains here span many decades
    auto g = [&](double u) {
      double val = eval(std::exp(u));
      return increasing ? val - y : y - val;
    };
    double r = solve_bracketed(g, std::log(lo), std::log(up), 1e-15, 240);
    (void)abs_tol;
    return std::exp(r);
  }
};

struct SideProfile {
  Side side = Side::plus;
  double extent = 1.0;  // |b| of the side, possibly +inf

  // positive-coordinate core
  MonotoneHandle mass;       // W in reflected coordinates
  MonotoneHandle length;     // R in reflected coordinates
  double length_sup = kInf;  // sup of length = right end of freq domain
  bool mass_closed = false, length_closed = false;

  double mass_of_length(double s) const { return mass.eval(length.invert(s)); }
  double freq(double s) const { return 1.0 / (s * mass_of_length(s)); }
  // inverse of freq on (0, length_sup): decreasing
  double scale_of_freq(double y) const {
    MonotoneHandle h{[this](double s) { return freq(s); }, length_sup, false,
                     false};
    return h.invert(y);
  }

  // ---- signed views (match the sign convention of the minus side) ----
  double sign() const { return side == Side::plus ? 1.0 : -1.0; }
  double W(double x) const { return sign() * mass.eval(sign() * x); }
  double R(double x) const { return sign() * length.eval(sign() * x); }
  double R_inv(double s) const { return sign() * length.invert(sign() * s); }
  // W(R^{-1}(s)) in signed coordinates: s has the sign of the side
  double W_of_Rinv(double s) const {
    return sign() * mass_of_length(sign() * s);
  }
  // F(s) = 1/(s W(R^{-1}(s))): positive on either side
  double F(double s) const { return freq(sign() * s); }
  // inverse of F near +infinity: positive on the plus side, negative on minus
  double f(double y) const { return sign() * scale_of_freq(y); }
};

inline SideProfile side_profile(const ProblemSpec& p, Side s,
                                double rel_tol = 1e-10) {
  SideProfile prof;
  prof.side = s;
  prof.extent = p.extent(s);
  const CoefficientExpr& w = p.w(s);
  const CoefficientExpr& r = p.r(s);
  if (w.integrable_at_zero() == TailRuling::divergent ||
      r.integrable_at_zero() == TailRuling::divergent)
    throw DivergenceError("side_profile: coefficient not integrable at 0");
  prof.mass_closed = w.has_closed_primitive();
  prof.length_closed = r.has_closed_primitive();
  prof.mass = MonotoneHandle{
      [w, rel_tol](double x) { return w.integral_from_zero(x, rel_tol); },
      prof.extent, true, prof.mass_closed};
  prof.length = MonotoneHandle{
      [r, rel_tol](double x) { return r.integral_from_zero(x, rel_tol); },
      prof.extent, true, prof.length_closed};
  if (r.integrable_at(prof.extent) == TailRuling::convergent &&
      !std::isinf(prof.extent)) {
    prof.length_sup = prof.length.eval(prof.extent * (1.0 - 1e-12));
  } else if (!std::isinf(prof.extent)) {
    prof.length_sup = kInf;  // r not integrable at the endpoint
  }
  // round-trip verification on a geometric probe grid
  double x0 = std::isinf(prof.extent) ? 8.0 : 0.75 * prof.extent;
  for (int k = 0; k < 12; ++k) {
    double x = x0 * std::pow(0.35, k);
    double lx = prof.length.eval(x);
    double back = prof.length.invert(lx);
    if (std::abs(back - x) > 1e-8 * std::max(1.0, std::abs(x)))
      throw RootError("side_profile: length inversion round-trip failed");
  }
  return prof;
}

}  // namespace kreinsl
