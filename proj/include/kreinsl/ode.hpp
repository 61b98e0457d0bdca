#pragma once

// Propagation engine for the first-order system
//
//   f'(x) = r(x) g(x),    g'(x) = -z w(x) f(x)
//
// (g is the quasi-derivative f'/r). Two complementary steppers:
//
//  * measure panels: on a panel [a,b] the propagator of the averaged system
//    exp([[ -d, dR ], [ -z dW, d ]]) is exact in the panel measures
//    dW = int w, dR = int r and carries a diagonal commutator correction d
//    computed from the first moment of w against the running length. Panels
//    have unit determinant, so the Wronskian is preserved to roundoff, and
//    they are insensitive to pointwise blow-up of the coefficients; they
//    cross the layers at 0 and at singular endpoints where a pointwise
//    stepper cannot run. Each panel is validated against its own bisection
//    (step doubling) and split recursively until the two agree.
//
//  * adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for the interior
//    region where the coefficients are finite.
//
// Growth is controlled by joint rescaling of the propagator with an
// accumulated log scale; ratios of solution components are scale free.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kreinsl/coeffs.hpp"
#include "kreinsl/numerics.hpp"

namespace kreinsl {

using Cplx = std::complex<double>;

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double singularity_offset = 0.0;  // optional stand-off from endpoints
  long max_steps = 4000000;
  double rescale_threshold = 1e100;
  double theta_max = 0.5;          // max |phase| per accepted panel
  double panel_tol_factor = 0.02;  // per-panel share of rel_tol
  double m_convergence_tol = 1e-8;  // truncation loop: relative m stall
  double disk_radius_tol = 1e-6;    // limit-point disk threshold
  int max_truncation_cuts = 7;
};

// column-major-free tiny 2x2 complex matrix
struct Mat2 {
  Cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

  static Mat2 identity() { return {}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
  Cplx det() const { return a * d - b * c; }
  double norm() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }
  Mat2 unit_det_inverse() const { return {d, -b, -c, a}; }
};

struct StateVec {
  Cplx value{0, 0};        // f
  Cplx qderiv{0, 0};       // f' / r
  double log_scale = 0.0;  // true state = (value, qderiv) * exp(log_scale)
};

// log-domain accumulator for int |c(x)|^2 dW along a run (Weyl disk radius)
struct WeightQuad {
  double log_sum = -kInf;
  void add_log(double l) {
    if (l == -kInf) return;
    if (log_sum == -kInf) {
      log_sum = l;
      return;
    }
    double hi = std::max(log_sum, l), lo = std::min(log_sum, l);
    log_sum = hi + std::log1p(std::exp(lo - hi));
  }
};

// Positive-coordinate view of one side of the problem: coefficients as
// functions of t = |x| on (0, extent), with measure increments.
struct SideView {
  const CoefficientExpr* w = nullptr;
  const CoefficientExpr* r = nullptr;
  double extent = 1.0;

  SideView() = default;
  SideView(const ProblemSpec& p, Side s)
      : w(&p.w(s)), r(&p.r(s)), extent(p.extent(s)) {}
  static SideView dual_of(const SideView& v) {
    SideView d;
    d.w = v.r;
    d.r = v.w;
    d.extent = v.extent;
    return d;
  }

  double wval(double t) const { return w->eval(t); }
  double rval(double t) const { return r->eval(t); }
  double dW(double a, double b) const {
    return a == 0.0 ? w->integral_from_zero(b) : w->integral(a, b);
  }
  double dR(double a, double b) const {
    return a == 0.0 ? r->integral_from_zero(b) : r->integral(a, b);
  }
  bool constant_coeffs() const { return w->is_constant() && r->is_constant(); }
  bool unbounded_at_zero() const {
    return w->unbounded_at_zero() || r->unbounded_at_zero();
  }
  bool unbounded_at_extent() const {
    return w->unbounded_at(extent) || r->unbounded_at(extent);
  }
};

namespace detail {

inline void cosh_sinhc(Cplx s2, Cplx& ch, Cplx& shc) {
  // cosh(s) and sinh(s)/s for s = sqrt(s2), stable for small |s2|
  if (std::abs(s2) < 1e-8) {
    ch = 1.0 + s2 * (0.5 + s2 / 24.0);
    shc = 1.0 + s2 * (1.0 / 6.0 + s2 / 120.0);
    return;
  }
  Cplx s = std::sqrt(s2);
  ch = std::cosh(s);
  shc = std::sinh(s) / s;
}

// Exact propagator of the averaged panel: exp([[-d, dR], [-z dW, d]]).
inline Mat2 panel_propagator(Cplx z, double dW, double dR, Cplx delta) {
  Cplx s2 = delta * delta - z * dW * dR;
  Cplx ch, shc;
  cosh_sinhc(s2, ch, shc);
  return {ch - shc * delta, shc * dR, -shc * z * dW, ch + shc * delta};
}

// Commutator moment of a panel: delta = (z/2) int w(s) (dR - 2 rho(s)) ds
// with rho(s) the running length from the left edge. Gauss-7 nodes.
inline Cplx panel_delta(const SideView& v, Cplx z, double x0, double x1,
                        double dR) {
  static constexpr double nodes[7] = {
      -0.949107912342759, -0.741531185599394, -0.405845151377397, 0.0,
      0.405845151377397,  0.741531185599394,  0.949107912342759};
  static constexpr double wts[7] = {
      0.129484966168870, 0.279705391489277, 0.381830050505119,
      0.417959183673469, 0.381830050505119, 0.279705391489277,
      0.129484966168870};
  const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
  const bool closed_r = v.r->has_closed_primitive();
  double acc = 0.0;
  double rho_prev = 0.0;
  double s_prev = x0;
  for (int i = 0; i < 7; ++i) {
    double s = c + h * nodes[i];
    double rho;
    if (closed_r) {
      rho = v.dR(x0, s);
    } else {
      // accumulate with a cheap trapezoid between consecutive nodes
      rho = rho_prev + 0.5 * (v.rval(s_prev) + v.rval(s)) * (s - s_prev);
      rho_prev = rho;
      s_prev = s;
    }
    acc += wts[i] * v.wval(s) * (dR - 2.0 * rho);
  }
  acc *= h;
  return 0.5 * z * acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measure-panel crossing with per-panel step-doubling validation
// ---------------------------------------------------------------------------

class PanelCrosser {
 public:
  PanelCrosser(const SideView& view, Cplx z, const IntegratorConfig& cfg)
      : v_(view), z_(z), cfg_(cfg) {}

  // Propagator across [a, b] (a may be 0; measures handle integrable
  // singularities at either edge).
  Mat2 cross(double a, double b, int depth = 0) const {
    double dW = v_.dW(a, b);
    double dR = v_.dR(a, b);
    Cplx theta2 = z_ * dW * dR;
    bool tiny = std::abs(theta2) < 1e-20;
    Cplx delta = (tiny || v_.constant_coeffs() || a == 0.0)
                     ? Cplx{0, 0}
                     : detail::panel_delta(v_, z_, a, b, dR);
    Mat2 full = detail::panel_propagator(z_, dW, dR, delta);
    if (tiny && a == 0.0) return full;  // seed panel: phase negligible
    if (depth >= 46) return full;
    bool need_split = std::sqrt(std::abs(theta2)) > cfg_.theta_max;
    if (!need_split) {
      // step-doubling check
      double mid = (a == 0.0) ? 0.5 * b : 0.5 * (a + b);
      Mat2 halves = cross_nosplit(mid, b) * cross_nosplit(a, mid);
      double diff = diff_norm(full, halves);
      if (diff <= cfg_.panel_tol_factor * cfg_.rel_tol) return halves;
      need_split = true;
    }
    if (need_split) {
      double mid = (a == 0.0) ? 0.5 * b : 0.5 * (a + b);
      return cross(mid, b, depth + 1) * cross(a, mid, depth + 1);
    }
    return full;
  }

 private:
  Mat2 cross_nosplit(double a, double b) const {
    double dW = v_.dW(a, b);
    double dR = v_.dR(a, b);
    Cplx delta = (v_.constant_coeffs() || a == 0.0)
                     ? Cplx{0, 0}
                     : detail::panel_delta(v_, z_, a, b, dR);
    return detail::panel_propagator(z_, dW, dR, delta);
  }
  static double diff_norm(const Mat2& p, const Mat2& q) {
    double scale = std::max(p.norm(), q.norm());
    Mat2 d{p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
    return scale > 0 ? d.norm() / scale : 0.0;
  }

  const SideView& v_;
  Cplx z_;
  const IntegratorConfig& cfg_;
};

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) for the 2x2 matrix system  U' = A(x) U
// ---------------------------------------------------------------------------

struct RunResult {
  Mat2 U;                  // propagated matrix (times exp(log_scale))
  double log_scale = 0.0;
  double wronskian_drift = 0.0;
  long steps = 0;
};

namespace detail {

struct Mat2Ops {
  static Mat2 axpy(const Mat2& y, double h, const Mat2& k) {
    return {y.a + h * k.a, y.b + h * k.b, y.c + h * k.c, y.d + h * k.d};
  }
};

inline Mat2 rhs(const SideView& v, Cplx z, double x, const Mat2& U) {
  double rr = v.rval(x);
  Cplx mw = -z * v.wval(x);
  // A = [[0, r], [-z w, 0]]; rows of U are (f_s f_c; g_s g_c)
  return {rr * U.c, rr * U.d, mw * U.a, mw * U.b};
}

}  // namespace detail

// Adaptive RK across [a, b] (either direction). Coefficients must be finite
// on the closed interval.
inline void rk45_run(const SideView& v, Cplx z, double a, double b, Mat2& U,
                     double& log_scale, long& steps,
                     const IntegratorConfig& cfg, WeightQuad* radius = nullptr,
                     double im_weight = 0.0) {
  if (a == b) return;
  // Dormand-Prince tableau
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = (b > a) ? 1.0 : -1.0;
  double x = a;
  double h = dir * std::min(std::abs(b - a) / 64.0, 0.25);
  using detail::Mat2Ops;
  while (dir * (b - x) > 1e-14 * (std::abs(b) + 1.0)) {
    if (dir * (x + h - b) > 0) h = b - x;
    Mat2 k1 = detail::rhs(v, z, x, U);
    Mat2 k2 = detail::rhs(v, z, x + c2 * h, Mat2Ops::axpy(U, h * a21, k1));
    Mat2 t3 = Mat2Ops::axpy(Mat2Ops::axpy(U, h * a31, k1), h * a32, k2);
    Mat2 k3 = detail::rhs(v, z, x + c3 * h, t3);
    Mat2 t4 = Mat2Ops::axpy(
        Mat2Ops::axpy(Mat2Ops::axpy(U, h * a41, k1), h * a42, k2), h * a43,
        k3);
    Mat2 k4 = detail::rhs(v, z, x + c4 * h, t4);
    Mat2 t5 = Mat2Ops::axpy(
        Mat2Ops::axpy(
            Mat2Ops::axpy(Mat2Ops::axpy(U, h * a51, k1), h * a52, k2),
            h * a53, k3),
        h * a54, k4);
    Mat2 k5 = detail::rhs(v, z, x + c5 * h, t5);
    Mat2 t6 = Mat2Ops::axpy(
        Mat2Ops::axpy(
            Mat2Ops::axpy(
                Mat2Ops::axpy(Mat2Ops::axpy(U, h * a61, k1), h * a62, k2),
                h * a63, k3),
            h * a64, k4),
        h * a65, k5);
    Mat2 k6 = detail::rhs(v, z, x + h, t6);
    Mat2 y5 = Mat2Ops::axpy(
        Mat2Ops::axpy(
            Mat2Ops::axpy(Mat2Ops::axpy(Mat2Ops::axpy(U, h * b1, k1), h * b3,
                                        k3),
                          h * b4, k4),
            h * b5, k5),
        h * b6, k6);
    Mat2 k7 = detail::rhs(v, z, x + h, y5);
    // embedded error estimate
    Mat2 err{h * (e1 * k1.a + e3 * k3.a + e4 * k4.a + e5 * k5.a + e6 * k6.a +
                  e7 * k7.a),
             h * (e1 * k1.b + e3 * k3.b + e4 * k4.b + e5 * k5.b + e6 * k6.b +
                  e7 * k7.b),
             h * (e1 * k1.c + e3 * k3.c + e4 * k4.c + e5 * k5.c + e6 * k6.c +
                  e7 * k7.c),
             h * (e1 * k1.d + e3 * k3.d + e4 * k4.d + e5 * k5.d + e6 * k6.d +
                  e7 * k7.d)};
    auto comp_err = [&](Cplx e, Cplx y0, Cplx y1) {
      double sc =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0), std::abs(y1));
      return std::abs(e) / sc;
    };
    double en = std::max(std::max(comp_err(err.a, U.a, y5.a),
                                  comp_err(err.b, U.b, y5.b)),
                         std::max(comp_err(err.c, U.c, y5.c),
                                  comp_err(err.d, U.d, y5.d)));
    if (en <= 1.0) {
      if (radius) {
        double wmid = v.wval(x + 0.5 * h);
        double mag0 = std::abs(U.b), mag1 = std::abs(y5.b);
        double contrib = 0.5 * (mag0 * mag0 + mag1 * mag1) * wmid *
                         std::abs(h);
        if (contrib > 0)
          radius->add_log(std::log(contrib) + 2.0 * log_scale);
      }
      (void)im_weight;
      x += h;
      U = y5;
      double n = U.norm();
      if (n > cfg.rescale_threshold) {
        U = {U.a / n, U.b / n, U.c / n, U.d / n};
        log_scale += std::log(n);
      }
    }
    double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-15 * (std::abs(x) + 1.0))
      throw IntegrationError("rk45: step size underflow");
    if (++steps > cfg.max_steps)
      throw IntegrationError("rk45: step budget exhausted");
  }
}

// ---------------------------------------------------------------------------
// Region driver: layers at 0 / singular endpoint, RK in between
// ---------------------------------------------------------------------------

class SideIntegrator {
 public:
  SideIntegrator(SideView view, Cplx z, IntegratorConfig cfg = {})
      : v_(view), z_(z), cfg_(cfg), crosser_(v_, z_, cfg_) {}

  // Propagator from `a` to `b`, 0 <= a < b <= extent, applied to U0.
  // Accumulates the |c-column|^2 dW quadrature into `radius` when given.
  RunResult run(double a, double b, Mat2 U0, WeightQuad* radius = nullptr) {
    RunResult out;
    out.U = U0;
    double initial_logdet_arg = 0.0;
    (void)initial_logdet_arg;
    Cplx det0 = U0.det();

    if (v_.constant_coeffs()) {
      Mat2 P = crosser_.cross(a, b);
      if (radius) add_panel_radius(radius, out, P, a, b);
      out.U = P * out.U;
      rescale(out);
      out.wronskian_drift = drift(out, det0);
      return out;
    }

    // region boundaries
    double lo = a, hi = b;
    double span = hi - lo;
    double h0 = lo;
    if (lo == 0.0 && v_.unbounded_at_zero()) {
      h0 = std::min(0.25 * span, std::isinf(v_.extent)
                                     ? 0.25
                                     : 0.125 * v_.extent);
      h0 = std::min(h0, hi);
    }
    double e = v_.extent;
    double tail_lo = hi;
    if (!std::isinf(e) && v_.unbounded_at_extent() &&
        (e - hi) < 0.45 * (e - h0)) {
      tail_lo = std::max(h0, 0.5 * std::min(e, h0 + span));
      if (tail_lo >= hi) tail_lo = std::max(h0, 0.75 * hi);
    }

    // [lo, h0]: measure panels through the origin layer
    if (h0 > lo) {
      double seed = seed_point(h0);
      apply_panel(out, lo, std::max(seed, lo), radius);
      double x = std::max(seed, lo);
      while (x < h0 * (1 - 1e-14)) {
        double nxt = std::min(2.0 * x, h0);
        apply_panel(out, x, nxt, radius);
        x = nxt;
      }
      lo = h0;
    }

    // [lo, tail_lo]: adaptive RK
    if (tail_lo > lo) {
      rk45_run(v_, z_, lo, tail_lo, out.U, out.log_scale, out.steps, cfg_,
               radius);
      lo = tail_lo;
    }

    // [tail_lo, hi]: distance-halving measure panels toward the endpoint
    if (hi > lo) {
      double d = e - lo;
      double x = lo;
      while (e - x > 1.5 * (e - hi) && d > 1e-13 * e) {
        d *= 0.5;
        double nxt = e - d;
        if (nxt > hi) nxt = hi;
        apply_panel(out, x, nxt, radius);
        x = nxt;
        if (x >= hi * (1 - 1e-15)) break;
      }
      if (x < hi) apply_panel(out, x, hi, radius);
    }

    out.wronskian_drift = drift(out, det0);
    return out;
  }

 private:
  void apply_panel(RunResult& io, double x0, double x1, WeightQuad* radius) {
    if (x1 <= x0) return;
    Mat2 P = crosser_.cross(x0, x1);
    if (radius) add_panel_radius(radius, io, P, x0, x1);
    io.U = P * io.U;
    io.steps += 1;
    rescale(io);
  }
  void add_panel_radius(WeightQuad* radius, const RunResult& io, const Mat2& P,
                        double x0, double x1) {
    double dW = v_.dW(x0, x1);
    Mat2 after = P * io.U;
    double m0 = std::abs(io.U.b), m1 = std::abs(after.b);
    double contrib = 0.5 * (m0 * m0 + m1 * m1) * dW;
    if (contrib > 0)
      radius->add_log(std::log(contrib) + 2.0 * io.log_scale);
  }
  void rescale(RunResult& io) {
    double n = io.U.norm();
    if (n > cfg_.rescale_threshold) {
      io.U = {io.U.a / n, io.U.b / n, io.U.c / n, io.U.d / n};
      io.log_scale += std::log(n);
    }
  }
  double seed_point(double h0) const {
    double x = h0;
    for (int k = 0; k < 600; ++k) {
      double m = std::abs(z_) * v_.dW(0.0, x) * v_.dR(0.0, x);
      if (m <= 1e-10) return x;
      x *= 0.25;
      if (x < 1e-290) return x;
    }
    return x;
  }
  double drift(const RunResult& io, Cplx det0) const {
    Cplx dt = io.U.det();
    if (dt == Cplx{0, 0} || det0 == Cplx{0, 0}) return kInf;
    Cplx lg = std::log(dt) + 2.0 * io.log_scale - std::log(det0);
    // drift is |exp(lg) - 1| evaluated stably
    if (std::abs(lg) < 1e-3) return std::abs(lg);
    if (lg.real() > 50.0) return kInf;
    return std::abs(std::exp(lg) - 1.0);
  }

  SideView v_;
  Cplx z_;
  IntegratorConfig cfg_;
  PanelCrosser crosser_;
};

}  // namespace kreinsl
