#pragma once

// Neumann m-functions of the half-line restrictions, computed from the
// fundamental system (s, c) with s(0)=0, s'[1](0)=1, c(0)=1, c[1](0)=0.
//
// Regular / limit-circle endpoint: m = g_s(B) / g_c(B) from the propagated
// fundamental matrix with the derivative-vanishing cap at B. Limit-point
// endpoint: Neumann-capped truncations at cut points where the accumulated
// mass-length product reaches 10^k, iterated until the values stall within
// tolerance; the Weyl-disk radius 1/(2 Im z * int |c|^2 dW) is tracked as the
// contraction diagnostic. When the direct truncation stalls and the endpoint
// is singular, the value is recovered from the coefficient-swapped problem
// through  m_swapped(z) = -1 / (z m(z)),  whichever of the two routes
// contracts faster.
//
// The minus side is handled in reflected coordinates t = |x|, where it is a
// plus-type problem with the same Neumann m-function.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kreinsl/coeffs.hpp"
#include "kreinsl/ode.hpp"
#include "kreinsl/profiles.hpp"

namespace kreinsl {

struct ConvergenceError : IntegrationError {
  using IntegrationError::IntegrationError;
};

enum class Regularity { regular, singular };
enum class LimitType { limit_circle, limit_point, undetermined };

inline const char* to_string(Regularity r) {
  return r == Regularity::regular ? "regular" : "singular";
}
inline const char* to_string(LimitType t) {
  switch (t) {
    case LimitType::limit_circle: return "limit_circle";
    case LimitType::limit_point: return "limit_point";
    default: return "undetermined";
  }
}

struct EndpointClass {
  bool w_integrable = false;
  bool r_integrable = false;
  Regularity regularity = Regularity::singular;
  LimitType limit_type = LimitType::undetermined;
  std::vector<double> probe_radii;  // disk radii along the probe truncations
};

struct MSample {
  Cplx z{0, 1};
  Cplx m{0, 0};
  double truncation = kNaN;   // cut point actually used (NaN: full interval)
  double disk_radius = kNaN;  // at the final truncation (limit point mode)
  double wronskian_drift = 0.0;
  std::string route;  // "regular", "truncated", "dual", ...
  std::string error;  // empty on success

  double y() const { return z.imag(); }
  bool ok() const { return error.empty(); }
};

using MTrace = std::vector<MSample>;

namespace detail {

inline Mat2 fundamental_init() {
  // columns (s, c), rows (f; g)
  return {Cplx{0, 0}, Cplx{1, 0}, Cplx{1, 0}, Cplx{0, 0}};
}

// cut point where mass*length reaches `target`; saturates near the endpoint
inline double truncation_cut(const SideView& v, double target) {
  MonotoneHandle g{[&v](double x) { return v.dW(0, x) * v.dR(0, x); },
                   v.extent, true, false};
  try {
    return g.invert(target);
  } catch (const RootError&) {
    return std::isinf(v.extent) ? 1e150 : v.extent * (1.0 - 1e-13);
  }
}

struct TruncationStep {
  Cplx m;
  double radius;
  double drift;
};

inline TruncationStep m_at_cut(const SideView& v, Cplx z, double X,
                               const IntegratorConfig& cfg) {
  WeightQuad quad;
  SideIntegrator engine(v, z, cfg);
  RunResult rr = engine.run(0.0, X, fundamental_init(), &quad);
  TruncationStep st;
  st.m = rr.U.c / rr.U.d;
  st.drift = rr.wronskian_drift;
  double imz = std::abs(z.imag());
  st.radius = (imz > 0 && quad.log_sum > -kInf)
                  ? std::exp(-std::log(2.0 * imz) - quad.log_sum)
                  : kNaN;
  return st;
}

}  // namespace detail

// Endpoint data: integrability rulings plus the contraction probe at z = 2i.
inline EndpointClass classify_endpoint(const ProblemSpec& p, Side s,
                                       const IntegratorConfig& cfg = {}) {
  SideView v(p, s);
  EndpointClass ec;
  ec.w_integrable = v.w->integrable_at(v.extent) == TailRuling::convergent;
  ec.r_integrable = v.r->integrable_at(v.extent) == TailRuling::convergent;
  ec.regularity = (ec.w_integrable && ec.r_integrable) ? Regularity::regular
                                                       : Regularity::singular;
  if (ec.regularity == Regularity::regular) {
    ec.limit_type = LimitType::limit_circle;
    return ec;
  }
  const Cplx z{0, 2};
  double prev_radius = kInf;
  for (int k = 1; k <= cfg.max_truncation_cuts; ++k) {
    double X = detail::truncation_cut(v, std::pow(10.0, k));
    auto st = detail::m_at_cut(v, z, X, cfg);
    ec.probe_radii.push_back(st.radius);
    if (st.radius < cfg.disk_radius_tol) {
      ec.limit_type = LimitType::limit_point;
      return ec;
    }
    if (k >= 3 && std::isfinite(st.radius) &&
        st.radius > 0.5 * prev_radius) {
      // radii stopped contracting well above the threshold
      ec.limit_type = LimitType::limit_circle;
      return ec;
    }
    prev_radius = st.radius;
  }
  ec.limit_type = LimitType::undetermined;
  return ec;
}

namespace detail {

// m-function of a positive-coordinate side view. `allow_swap` enables the
// coefficient-swap fallback for singular endpoints.
inline MSample m_of_view(const SideView& v, Cplx z, const IntegratorConfig& cfg,
                         bool endpoint_regular, bool allow_swap) {
  MSample out;
  out.z = z;
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    out.error = "spectral parameter on the nonnegative real axis";
    return out;
  }
  if (endpoint_regular) {
    SideIntegrator engine(v, z, cfg);
    RunResult rr = engine.run(0.0, v.extent, fundamental_init(), nullptr);
    out.m = rr.U.c / rr.U.d;
    out.wronskian_drift = rr.wronskian_drift;
    out.route = "regular";
    return out;
  }
  // truncation loop
  Cplx prev{0, 0};
  bool have_prev = false;
  double prev_cut = -1.0;
  for (int k = 1; k <= cfg.max_truncation_cuts; ++k) {
    double X = truncation_cut(v, std::pow(10.0, k));
    if (X <= prev_cut * (1 + 1e-12)) break;  // saturated at the endpoint
    prev_cut = X;
    auto st = m_at_cut(v, z, X, cfg);
    out.m = st.m;
    out.truncation = X;
    out.disk_radius = st.radius;
    out.wronskian_drift = std::max(out.wronskian_drift, st.drift);
    if (have_prev &&
        std::abs(st.m - prev) <= cfg.m_convergence_tol * std::abs(st.m) &&
        (!std::isfinite(st.radius) || st.radius < 10 * cfg.disk_radius_tol ||
         std::abs(st.m - prev) <= 1e-12 * std::abs(st.m))) {
      out.route = "truncated";
      return out;
    }
    prev = st.m;
    have_prev = true;
  }
  if (allow_swap) {
    // dual route: swapped coefficients, m = -1/(z m_swapped)
    SideView dual = SideView::dual_of(v);
    MSample ms = m_of_view(dual, z, cfg, false, false);
    if (ms.ok() && ms.route == "truncated") {
      out.m = -1.0 / (z * ms.m);
      out.truncation = ms.truncation;
      out.disk_radius = ms.disk_radius;
      out.wronskian_drift = std::max(out.wronskian_drift, ms.wronskian_drift);
      out.route = "dual";
      return out;
    }
  }
  out.error = "truncation sequence did not contract";
  out.route = "truncated";
  return out;
}

}  // namespace detail

inline MSample m_function(const ProblemSpec& p, Side s, Cplx z,
                          const IntegratorConfig& cfg = {}) {
  SideView v(p, s);
  bool regular = v.w->integrable_at(v.extent) == TailRuling::convergent &&
                 v.r->integrable_at(v.extent) == TailRuling::convergent;
  return detail::m_of_view(v, z, cfg, regular, /*allow_swap=*/true);
}

// Strict variant: throws on convergence failure.
inline MSample m_function_strict(const ProblemSpec& p, Side s, Cplx z,
                                 const IntegratorConfig& cfg = {}) {
  MSample ms = m_function(p, s, z, cfg);
  if (!ms.ok()) throw ConvergenceError(ms.error);
  return ms;
}

inline MTrace m_trace(const ProblemSpec& p, Side s,
                      const std::vector<double>& y_grid,
                      const IntegratorConfig& cfg = {}) {
  MTrace out;
  out.reserve(y_grid.size());
  for (double y : y_grid) {
    if (!(y > 0)) {
      MSample bad;
      bad.z = Cplx{0, y};
      bad.error = "nonpositive frequency in trace grid";
      out.push_back(bad);
      continue;
    }
    MSample ms;
    try {
      ms = m_function(p, s, Cplx{0, y}, cfg);
    } catch (const std::exception& ex) {
      ms.z = Cplx{0, y};
      ms.error = ex.what();
    }
    if (ms.ok()) {
      if (!(ms.m.imag() > 0)) ms.error = "Im m not positive";
      else if (!(ms.m.real() > 0)) ms.error = "Re m not positive";
    }
    out.push_back(std::move(ms));
  }
  return out;
}

// Asymptotic prediction from the side profile: m(iy) ~ i * f_plus(y) on the
// plus side and -i * f_minus(y) on the minus side (both have positive
// imaginary part).
inline Cplx atkinson_predict(const SideProfile& prof, double y) {
  double f = prof.f(y);  // signed
  return Cplx{0.0, prof.side == Side::plus ? f : -f};
}

struct DualityResult {
  bool applicable = false;
  double residual = kNaN;
  Cplx m, m_swapped;
};

// Residual of the coefficient-swap identity m_swapped(z) = -1/(z m(z)),
// valid only when the endpoint is singular.
inline DualityResult duality_check(const ProblemSpec& p, Side s, Cplx z,
                                   const IntegratorConfig& cfg = {}) {
  DualityResult out;
  SideView v(p, s);
  bool regular = v.w->integrable_at(v.extent) == TailRuling::convergent &&
                 v.r->integrable_at(v.extent) == TailRuling::convergent;
  if (regular) return out;  // identity fails at regular endpoints
  out.applicable = true;
  MSample direct = detail::m_of_view(v, z, cfg, false, true);
  SideView dual = SideView::dual_of(v);
  bool dual_regular =
      dual.w->integrable_at(dual.extent) == TailRuling::convergent &&
      dual.r->integrable_at(dual.extent) == TailRuling::convergent;
  MSample swapped = detail::m_of_view(dual, z, cfg, dual_regular, true);
  if (!direct.ok() || !swapped.ok()) {
    out.residual = kInf;
    return out;
  }
  out.m = direct.m;
  out.m_swapped = swapped.m;
  out.residual =
      std::abs(swapped.m + 1.0 / (z * direct.m)) / std::abs(swapped.m);
  return out;
}

// ---------------------------------------------------------------------------
// Raw propagation on the original signed axis
// ---------------------------------------------------------------------------

// Fundamental solutions (s, c) of the side equation at a signed point x_eval;
// minus-side values are mapped back from the reflected run.
struct FundamentalPair {
  StateVec s, c;
  double wronskian_drift = 0.0;
};

inline FundamentalPair fundamental_solutions(const ProblemSpec& p, Side side,
                                             Cplx z, double x_eval,
                                             const IntegratorConfig& cfg = {}) {
  SideView v(p, side);
  double t = side == Side::plus ? x_eval : -x_eval;
  if (!(t >= 0) || t > v.extent)
    throw DomainError("fundamental_solutions: point outside side interval");
  SideIntegrator engine(v, z, cfg);
  RunResult rr = engine.run(0.0, t, detail::fundamental_init(), nullptr);
  FundamentalPair out;
  out.wronskian_drift = rr.wronskian_drift;
  if (side == Side::plus) {
    out.s = {rr.U.a, rr.U.c, rr.log_scale};
    out.c = {rr.U.b, rr.U.d, rr.log_scale};
  } else {
    // s_minus(x) = -s~(t), s_minus^[1](x) = +s~^[1](t);
    // c_minus(x) = +c~(t), c_minus^[1](x) = -c~^[1](t)
    out.s = {-rr.U.a, rr.U.c, rr.log_scale};
    out.c = {rr.U.b, -rr.U.d, rr.log_scale};
  }
  return out;
}

// Propagate an initial state (value, quasi-derivative) from x_from to x_to on
// one side of the axis. Both points must lie in the closed side interval with
// |x_from| <= |x_to| or |x_to| <= |x_from| (any direction).
inline StateVec integrate_system(const ProblemSpec& p, Side side, Cplx z,
                                 double x_from, double x_to,
                                 const StateVec& init,
                                 const IntegratorConfig& cfg = {}) {
  SideView v(p, side);
  double sgn = side == Side::plus ? 1.0 : -1.0;
  double ta = sgn * x_from, tb = sgn * x_to;
  if (ta < 0 || tb < 0 || ta > v.extent || tb > v.extent)
    throw DomainError("integrate_system: points outside side interval");
  Cplx f = init.value;
  Cplx g = side == Side::plus ? init.qderiv : -init.qderiv;
  SideIntegrator engine(v, z, cfg);
  Mat2 P;
  double log_scale = 0.0;
  if (ta <= tb) {
    RunResult rr = engine.run(ta, tb, Mat2::identity(), nullptr);
    P = rr.U;
    log_scale = rr.log_scale;
  } else {
    RunResult rr = engine.run(tb, ta, Mat2::identity(), nullptr);
    P = rr.U.unit_det_inverse();
    log_scale = -rr.log_scale;
  }
  StateVec out;
  out.value = P.a * f + P.b * g;
  out.qderiv = P.c * f + P.d * g;
  if (side == Side::minus) out.qderiv = -out.qderiv;
  out.log_scale = init.log_scale + log_scale;
  return out;
}

}  // namespace kreinsl
