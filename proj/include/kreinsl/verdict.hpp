#pragma once

// Three-valued verdicts with numeric evidence traces. Asymptotic statements
// (limits, limsups, O(1) bounds) are judged from finite samples, so every
// decision carries the sampled diagnostic and a fitted trend, and "holds" /
// "fails" are only returned when both the final window and the trend clear
// their thresholds.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kreinsl/numerics.hpp"

namespace kreinsl {

enum class Status { holds, fails, inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    default: return "inconclusive";
  }
}

struct EvidencePoint {
  double t = 0.0;      // abscissa of the diagnostic (grid point, y, ...)
  double value = 0.0;  // diagnostic value; +inf marks a blown-up sample
  bool valid = true;
};

struct TriVerdict {
  Status status = Status::inconclusive;
  std::vector<EvidencePoint> evidence;
  double trend = 0.0;  // fitted slope of the diagnostic over the grid tail
  std::string note;

  bool holds() const { return status == Status::holds; }
  bool fails() const { return status == Status::fails; }
};

namespace detail {

inline std::vector<double> window_values(const std::vector<EvidencePoint>& ev,
                                         double lo_frac, double hi_frac) {
  std::vector<double> out;
  const std::size_t n = ev.size();
  auto lo = static_cast<std::size_t>(lo_frac * static_cast<double>(n));
  auto hi = static_cast<std::size_t>(hi_frac * static_cast<double>(n));
  for (std::size_t i = lo; i < hi && i < n; ++i)
    if (ev[i].valid) out.push_back(ev[i].value);
  return out;
}

}  // namespace detail

// Fitted slope of log|value| against log|t| over the final half of the trace.
inline double log_log_tail_slope(const std::vector<EvidencePoint>& ev) {
  std::vector<double> xs, ys;
  for (std::size_t i = ev.size() / 2; i < ev.size(); ++i) {
    if (!ev[i].valid || !(ev[i].value > 0) || !std::isfinite(ev[i].value))
      continue;
    xs.push_back(std::log(std::abs(ev[i].t)));
    ys.push_back(std::log(ev[i].value));
  }
  return fitted_slope(xs, ys);
}

struct BoundednessPolicy {
  double hold_slope = 0.05;   // |slope| below this counts as flat
  double fail_slope = 0.30;   // slope above this with monotone growth: fails
  double window_blowup = 10;  // final sup vs first-window median
  double divergence_factor = 1.8;  // monotone growth by this factor: fails
};

// Finite-sample reading of "diagnostic = O(1) along the trace".
// holds  — flat trend and the final window stays within window_blowup of the
//          initial level;
// fails  — markers of blow-up, or steep fitted growth, or monotone growth by
//          divergence_factor across the trace;
// otherwise inconclusive.
inline TriVerdict bounded_verdict(std::vector<EvidencePoint> ev,
                                  BoundednessPolicy pol = {}) {
  TriVerdict v;
  v.evidence = std::move(ev);
  const auto& e = v.evidence;
  std::size_t n = e.size();
  if (n < 4) {
    v.note = "trace too short";
    return v;
  }
  bool any_invalid_tail = false;
  for (std::size_t i = n / 2; i < n; ++i)
    if (!e[i].valid || !std::isfinite(e[i].value)) any_invalid_tail = true;
  if (any_invalid_tail) {
    v.status = Status::fails;
    v.note = "unbounded samples in the trace tail";
    return v;
  }
  v.trend = log_log_tail_slope(e);
  auto first = detail::window_values(e, 0.0, 0.25);
  auto last = detail::window_values(e, 0.75, 1.0);
  if (first.empty() || last.empty()) {
    v.note = "insufficient valid samples";
    return v;
  }
  double first_med = median(first);
  double last_sup = *std::max_element(last.begin(), last.end());
  bool monotone_growth = true;
  double prev = -kInf;
  for (std::size_t i = 0; i + 1 < 8; ++i) {
    auto w = detail::window_values(e, i / 8.0, (i + 1) / 8.0);
    if (w.empty()) continue;
    double m = median(w);
    if (m < prev) monotone_growth = false;
    prev = m;
  }
  double growth = last_sup / std::max(1e-300, first_med);
  if (std::abs(v.trend) <= pol.hold_slope &&
      last_sup <= pol.window_blowup * std::max(first_med, 1e-300)) {
    v.status = Status::holds;
    return v;
  }
  if ((v.trend >= pol.fail_slope && monotone_growth) ||
      (monotone_growth && growth >= pol.divergence_factor)) {
    v.status = Status::fails;
    return v;
  }
  v.status = Status::inconclusive;
  return v;
}

// Finite-sample reading of "diagnostic -> 0 along the trace": the final
// window must sit below `cap` and the values must be decreasing overall.
inline TriVerdict vanishing_verdict(std::vector<EvidencePoint> ev, double cap,
                                    double fail_floor) {
  TriVerdict v;
  v.evidence = std::move(ev);
  const auto& e = v.evidence;
  if (e.size() < 4) {
    v.note = "trace too short";
    return v;
  }
  v.trend = log_log_tail_slope(e);
  auto first = detail::window_values(e, 0.0, 0.25);
  auto last = detail::window_values(e, 0.75, 1.0);
  if (first.empty() || last.empty()) return v;
  double last_sup = *std::max_element(last.begin(), last.end());
  double first_med = median(first);
  if (last_sup < cap && (last_sup <= first_med || v.trend < 0)) {
    v.status = Status::holds;
    return v;
  }
  if (last_sup > fail_floor && last_sup >= first_med) {
    v.status = Status::fails;
    return v;
  }
  v.status = Status::inconclusive;
  return v;
}

}  // namespace kreinsl
