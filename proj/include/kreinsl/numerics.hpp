#pragma once

// Low-level numerical kernels: adaptive quadrature, improper integrals with
// geometric panel refinement, safeguarded bracketed root finding, monotone
// cubic interpolation, grid builders and trend fits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kreinsl {

using Fn1 = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15(7) adaptive quadrature
// ---------------------------------------------------------------------------

namespace detail {

// Kronrod nodes on [-1,1] (positive half) and weights; Gauss-7 weights.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelEstimate {
  double value = 0.0;
  double error = 0.0;
};

inline PanelEstimate gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk[15];
  for (int i = 0; i < 7; ++i) {
    fk[i] = f(c - h * kGK15Nodes[i]);
    fk[14 - i] = f(c + h * kGK15Nodes[i]);
  }
  fk[7] = f(c);
  double kron = 0.0;
  for (int i = 0; i < 7; ++i) kron += kGK15WK[i] * (fk[i] + fk[14 - i]);
  kron += kGK15WK[7] * fk[7];
  kron *= h;
  // Gauss-7 uses the odd-index Kronrod nodes.
  double gauss = kGK15WG[3] * fk[7];
  for (int i = 0; i < 3; ++i)
    gauss += kGK15WG[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
  gauss *= h;
  PanelEstimate est;
  est.value = kron;
  est.error = std::abs(kron - gauss);
  return est;
}

}  // namespace detail

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Adaptive quadrature of f over the finite interval [a, b]; f must be finite
// on the open interval (endpoints are never evaluated at a or b exactly when
// split==true panels shrink toward them, but plain use evaluates endpoints).
inline QuadResult integrate(const Fn1& f, double a, double b,
                            double rel_tol = 1e-11, double abs_tol = 1e-14,
                            int max_depth = 48) {
  if (a == b) return {};
  struct Item {
    double a, b, value, error;
    int depth;
  };
  auto first = detail::gk15(f, a, b);
  std::vector<Item> stack{{a, b, first.value, first.error, 0}};
  double total = first.value;
  double total_err = first.error;
  QuadResult out;
  while (!stack.empty()) {
    double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_err <= tol) break;
    // split the worst panel
    std::size_t worst = 0;
    for (std::size_t i = 1; i < stack.size(); ++i)
      if (stack[i].error > stack[worst].error) worst = i;
    Item it = stack[worst];
    stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(worst));
    if (it.depth >= max_depth) {
      out.converged = false;
      break;
    }
    double mid = 0.5 * (it.a + it.b);
    auto le = detail::gk15(f, it.a, mid);
    auto re = detail::gk15(f, mid, it.b);
    total += le.value + re.value - it.value;
    total_err += le.error + re.error - it.error;
    stack.push_back({it.a, mid, le.value, le.error, it.depth + 1});
    stack.push_back({mid, it.b, re.value, re.error, it.depth + 1});
    if (stack.size() > 4000) {
      out.converged = false;
      break;
    }
  }
  out.value = total;
  out.error = total_err;
  return out;
}

enum class TailRuling { convergent, divergent, undetermined };

struct ImproperResult {
  double value = 0.0;
  TailRuling ruling = TailRuling::undetermined;
};

// Integral of f over (0, x0] where f may be unbounded (but integrable) at 0.
// Geometric panels x0*q^k with per-panel adaptive rule; the tail toward 0 is
// summed until its contribution is below tolerance.
inline ImproperResult integrate_to_zero(const Fn1& f, double x0,
                                        double rel_tol = 1e-11, double q = 0.5,
                                        int max_panels = 120) {
  ImproperResult out;
  double hi = x0;
  double total = 0.0;
  double last_panel = kInf;
  int nondecreasing_run = 0;
  for (int k = 0; k < max_panels; ++k) {
    double lo = hi * q;
    double piece = integrate(f, lo, hi, rel_tol * 0.1).value;
    total += piece;
    if (std::abs(piece) >= last_panel * 0.999)
      ++nondecreasing_run;
    else
      nondecreasing_run = 0;
    last_panel = std::abs(piece);
    if (std::abs(piece) < rel_tol * std::max(1.0, std::abs(total)) && k > 4) {
      out.value = total;
      out.ruling = TailRuling::convergent;
      return out;
    }
    if (nondecreasing_run > 24 || std::abs(total) > 1e15) {
      out.value = total;
      out.ruling = TailRuling::divergent;
      return out;
    }
    hi = lo;
  }
  out.value = total;
  out.ruling = (last_panel < 1e-6 * std::max(1.0, std::abs(total)))
                   ? TailRuling::convergent
                   : TailRuling::undetermined;
  return out;
}

// Integral of f over [x0, e) with e finite (f possibly unbounded at e) or
// e = +inf (panels doubling). Ruling semantics as integrate_to_zero.
inline ImproperResult integrate_to_endpoint(const Fn1& f, double x0, double e,
                                            double rel_tol = 1e-11,
                                            int max_panels = 200) {
  ImproperResult out;
  double total = 0.0;
  double last_panel = kInf;
  int nondecreasing_run = 0;
  if (std::isinf(e)) {
    double lo = x0;
    for (int k = 0; k < max_panels; ++k) {
      double hi = lo * 2.0 + 1.0;
      double piece = integrate(f, lo, hi, rel_tol * 0.1).value;
      total += piece;
      if (std::abs(piece) >= last_panel * 0.999)
        ++nondecreasing_run;
      else
        nondecreasing_run = 0;
      last_panel = std::abs(piece);
      if (std::abs(piece) < rel_tol * std::max(1.0, std::abs(total)) && k > 3) {
        out.value = total;
        out.ruling = TailRuling::convergent;
        return out;
      }
      if (nondecreasing_run > 24 || std::abs(total) > 1e15) {
        out.value = total;
        out.ruling = TailRuling::divergent;
        return out;
      }
      lo = hi;
    }
    out.value = total;
    out.ruling = TailRuling::undetermined;
    return out;
  }
  // finite endpoint: panels halving the distance to e
  double d = e - x0;
  double lo = x0;
  for (int k = 0; k < max_panels; ++k) {
    d *= 0.5;
    double hi = e - d;
    double piece = integrate(f, lo, hi, rel_tol * 0.1).value;
    total += piece;
    if (std::abs(piece) >= last_panel * 0.999)
      ++nondecreasing_run;
    else
      nondecreasing_run = 0;
    last_panel = std::abs(piece);
    if (std::abs(piece) < rel_tol * std::max(1.0, std::abs(total)) && k > 4) {
      out.value = total;
      out.ruling = TailRuling::convergent;
      return out;
    }
    if (nondecreasing_run > 24 || std::abs(total) > 1e15 || d < 1e-14 * e) {
      out.value = total;
      out.ruling = (std::abs(total) > 1e15 || nondecreasing_run > 24)
                       ? TailRuling::divergent
                       : TailRuling::undetermined;
      return out;
    }
    lo = hi;
  }
  out.value = total;
  out.ruling = TailRuling::undetermined;
  return out;
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct RootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Safeguarded bracketed solve of f(x) = 0 on [a, b] with f(a), f(b) of
// opposite sign: bisection with secant acceleration (Illinois update).
inline double solve_bracketed(const Fn1& f, double a, double b,
                              double abs_tol = 1e-12, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw RootError("solve_bracketed: endpoints do not bracket a root");
  for (int i = 0; i < max_iter; ++i) {
    double mid;
    double denom = fb - fa;
    if (denom != 0.0) {
      mid = b - fb * (b - a) / denom;  // secant
      double lo = std::min(a, b), hi = std::max(a, b);
      double guard = 0.01 * (hi - lo);
      if (!(mid > lo + guard && mid < hi - guard)) mid = 0.5 * (a + b);
    } else {
      mid = 0.5 * (a + b);
    }
    double fm = f(mid);
    if (fm == 0.0 || std::abs(b - a) < abs_tol * (1.0 + std::abs(mid)))
      return mid;
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
      fb *= 0.5;  // Illinois
    } else {
      b = mid;
      fb = fm;
      fa *= 0.5;
    }
    std::swap(a, b);
    std::swap(fa, fb);
  }
  return 0.5 * (a + b);
}

// Invert a strictly monotone function: find x with fn(x) = y, searching inside
// (lo, hi). When log_domain is set the bisection runs in u = ln x, which keeps
// precision for brackets reaching toward 0. Brackets are expanded toward the
// open ends when the initial ones do not straddle y.
inline double invert_monotone(const Fn1& fn, double y, double lo, double hi,
                              bool increasing, bool log_domain = false,
                              double abs_tol = 1e-12, int max_iter = 200) {
  auto g = [&](double t) {
    double x = log_domain ? std::exp(t) : t;
    double v = fn(x) - y;
    return increasing ? v : -v;
  };
  double a = log_domain ? std::log(lo) : lo;
  double b = log_domain ? std::log(hi) : hi;
  double ga = g(a), gb = g(b);
  int expand = 0;
  while (ga > 0 && expand < 900) {  // y below range: move the low end down
    b = a;
    gb = ga;
    a = log_domain ? a - 1.0 : a - std::max(1.0, std::abs(a));
    ga = g(a);
    ++expand;
  }
  while (gb < 0 && expand < 900) {  // y above range: move the high end up
    a = b;
    ga = gb;
    b = log_domain ? b + 1.0 : b + std::max(1.0, std::abs(b));
    gb = g(b);
    ++expand;
  }
  if (ga > 0 || gb < 0)
    throw RootError("invert_monotone: value provably outside range");
  double t = solve_bracketed(g, a, b, log_domain ? 1e-14 : abs_tol, max_iter);
  return log_domain ? std::exp(t) : t;
}

// ---------------------------------------------------------------------------
// Monotone cubic (PCHIP) interpolation for tabulated coefficient data
// ---------------------------------------------------------------------------

class MonotoneInterp {
 public:
  MonotoneInterp() = default;
  MonotoneInterp(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("MonotoneInterp: need >= 2 sorted samples");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("MonotoneInterp: x not increasing");
    d_.resize(n);
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      del[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_[0] = del[0];
    d_[n - 1] = del[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (del[i - 1] * del[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        double w1 = 2 * h[i] + h[i - 1];
        double w2 = h[i] + 2 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
      }
    }
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front() + d_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + d_.back() * (x - x_.back());
    std::size_t i =
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) -
                                 x_.begin()) -
        1;
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

 private:
  std::vector<double> x_, y_, d_;
};

// ---------------------------------------------------------------------------
// Grids and trend fitting
// ---------------------------------------------------------------------------

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(la + (lb - la) * i / (n - 1)));
  return out;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

// Least-squares slope of y against x over the given points.
inline double fitted_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace kreinsl
