#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kreinsl/catalog.hpp"
#include "kreinsl/coeffs.hpp"
#include "kreinsl/profiles.hpp"
#include "kreinsl/weyl.hpp"

using namespace kreinsl;

TEST_CASE("coefficient evaluation") {
  auto one = CoefficientExpr::constant(1.0);
  REQUIRE(eval_coeff(one, 0.3, 1.0) == Catch::Approx(1.0));

  // 1/(x (-ln x)^2) at e^{-1} equals e
  auto plog = CoefficientExpr::power_log({{1.0, -1.0, -2.0}});
  REQUIRE(eval_coeff(plog, std::exp(-1.0), 1.0) ==
          Catch::Approx(std::exp(1.0)).epsilon(1e-12));

  // log-family weight with unit exponent at e^{-1} equals e
  auto w421 = CoefficientExpr::power_log({{1.0, -1.0, -2.0}});
  REQUIRE(eval_coeff(w421, std::exp(-1.0), 1.0) ==
          Catch::Approx(std::exp(1.0)).epsilon(1e-12));

  REQUIRE_THROWS_AS(eval_coeff(one, 1.5, 1.0), DomainError);
  REQUIRE_THROWS_AS(eval_coeff(one, 0.0, 1.0), DomainError);
}

TEST_CASE("accumulated integrals: closed forms") {
  auto one = CoefficientExpr::constant(1.0);
  REQUIRE(one.integral_from_zero(0.3) == Catch::Approx(0.3).epsilon(1e-14));

  // mass of the unit log-family weight: (-ln x)^{-1}; at e^{-2} it is 1/2
  auto w = CoefficientExpr::power_log({{1.0, -1.0, -2.0}});
  REQUIRE(w.integral_from_zero(std::exp(-2.0)) ==
          Catch::Approx(0.5).epsilon(1e-12));

  // x^2 integrates to x^3/3: at 0.5 -> 1/24
  auto sq = CoefficientExpr::power_log({{1.0, 2.0, 0.0}});
  REQUIRE(sq.integral_from_zero(0.5) ==
          Catch::Approx(1.0 / 24.0).epsilon(1e-13));
}

TEST_CASE("closed-form and quadrature backends agree") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> powu(-0.9, 2.0);
  std::uniform_real_distribution<double> scaleu(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = powu(rng);
    double c = scaleu(rng);
    CoefficientExpr e = CoefficientExpr::power_log({{c, a, 0.0}});
    double x = 0.7;
    double closed = e.integral_from_zero(x);
    auto quad = integrate_to_zero([&](double t) { return e.eval(t); }, x);
    REQUIRE(quad.ruling == TailRuling::convergent);
    REQUIRE(std::abs(quad.value - closed) <= 1e-8 * std::abs(closed));
  }
  // the log-family weight as well
  CoefficientExpr w = CoefficientExpr::power_log({{0.5, -1.0, -1.5}});
  double closed = w.integral_from_zero(0.5);
  auto quad = integrate_to_zero([&](double t) { return w.eval(t); }, 0.5);
  REQUIRE(std::abs(quad.value - closed) <= 1e-8 * std::abs(closed));
}

TEST_CASE("local integrability rulings") {
  // 1/x diverges at 0
  auto bad = CoefficientExpr::power_log({{1.0, -1.0, 0.0}});
  REQUIRE(bad.integrable_at_zero() == TailRuling::divergent);
  REQUIRE_THROWS_AS(bad.integral_from_zero(0.5), DivergenceError);

  auto w421 = CoefficientExpr::power_log({{0.5, -1.0, -1.5}});
  REQUIRE(w421.integrable_at_zero() == TailRuling::convergent);
  REQUIRE(w421.integrable_at(1.0) == TailRuling::divergent);  // pole at 1

  auto one = CoefficientExpr::constant(1.0);
  REQUIRE(one.integrable_at(1.0) == TailRuling::convergent);
  REQUIRE(one.integrable_at(kInf) == TailRuling::divergent);
}

TEST_CASE("endpoint classification") {
  IntegratorConfig cfg;

  // regular: constant coefficients on a bounded side
  ProblemSpec pr = make_sgn();
  auto ec = classify_endpoint(pr, Side::plus, cfg);
  REQUIRE(ec.w_integrable);
  REQUIRE(ec.r_integrable);
  REQUIRE(ec.regularity == Regularity::regular);
  REQUIRE(ec.limit_type == LimitType::limit_circle);

  // log-family weight: w not integrable at 1, r integrable; singular
  ProblemSpec p421 = make_ex421(0.5, 1.0);
  auto es = classify_endpoint(p421, Side::plus, cfg);
  REQUIRE_FALSE(es.w_integrable);
  REQUIRE(es.r_integrable);
  REQUIRE(es.regularity == Regularity::singular);
  REQUIRE(es.limit_type == LimitType::limit_point);

  // classical constant-coefficient half line: limit point
  ProblemSpec ph = make_halfline();
  auto eh = classify_endpoint(ph, Side::plus, cfg);
  REQUIRE(eh.regularity == Regularity::singular);
  REQUIRE(eh.limit_type == LimitType::limit_point);
}

TEST_CASE("side profiles: constant coefficients") {
  ProblemSpec p = make_sgn();
  SideProfile pp = side_profile(p, Side::plus);
  SideProfile pm = side_profile(p, Side::minus);

  REQUIRE(pp.W(0.5) == Catch::Approx(0.5));
  REQUIRE(pp.R(0.5) == Catch::Approx(0.5));
  REQUIRE(pp.F(0.5) == Catch::Approx(4.0).epsilon(1e-9));       // 1/x^2
  REQUIRE(pp.f(16.0) == Catch::Approx(0.25).epsilon(1e-9));     // 1/sqrt(y)

  // minus side: negative values, signed composition equals s
  REQUIRE(pm.W(-0.5) == Catch::Approx(-0.5));
  REQUIRE(pm.R(-0.5) == Catch::Approx(-0.5));
  REQUIRE(pm.R_inv(-0.25) == Catch::Approx(-0.25).epsilon(1e-9));
  REQUIRE(pm.W_of_Rinv(-0.3) == Catch::Approx(-0.3).epsilon(1e-9));
  REQUIRE(pm.F(-0.5) == Catch::Approx(4.0).epsilon(1e-9));
  REQUIRE(pm.f(16.0) == Catch::Approx(-0.25).epsilon(1e-9));
}

TEST_CASE("side profiles: log-family closed forms") {
  ProblemSpec p = make_ex421(0.5, 1.0);
  SideProfile pp = side_profile(p, Side::plus);
  SideProfile pm = side_profile(p, Side::minus);
  for (double x : {0.3, 0.1, 0.01, 1e-4}) {
    REQUIRE(pp.W_of_Rinv(x) ==
            Catch::Approx(std::pow(-std::log(x), -0.5)).epsilon(1e-8));
    REQUIRE(pm.W_of_Rinv(-x) ==
            Catch::Approx(-std::pow(-std::log(x), -1.0)).epsilon(1e-8));
  }
}

TEST_CASE("side profiles: scaled reflection identity") {
  double alpha = 1.0, beta = 2.0;
  ProblemSpec p = make_ex420(alpha, beta);
  SideProfile pp = side_profile(p, Side::plus);
  SideProfile pm = side_profile(p, Side::minus);
  for (double x : {0.05, 0.01, 1e-3}) {
    double lhs = pm.W_of_Rinv(-x);
    double rhs = -(alpha / beta) * pp.W_of_Rinv((beta / alpha) * x);
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("profile properties: monotonicity and round trips") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ProblemSpec p = make_ex421(0.75, 1.5);
  for (Side s : {Side::plus, Side::minus}) {
    SideProfile prof = side_profile(p, s);
    double sgn = s == Side::plus ? 1.0 : -1.0;
    // 100-point geometric probe grid
    std::vector<double> grid;
    for (int k = 0; k < 100; ++k) grid.push_back(0.9 * std::pow(0.82, k));
    double prevW = -kInf, prevR = -kInf;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      double x = sgn * *it;
      double Wv = prof.W(x), Rv = prof.R(x);
      if (s == Side::minus) {
        REQUIRE(Wv < 0.0);
        REQUIRE(Rv < 0.0);
      }
      REQUIRE(Wv > prevW);
      REQUIRE(Rv > prevR);
      prevW = Wv;
      prevR = Rv;
      double back = prof.R_inv(Rv);
      REQUIRE(std::abs(back - x) <= 1e-8 * std::max(1.0, std::abs(x)));
    }
    // inversion of the frequency profile round-trips too
    for (double y : {10.0, 1e3, 1e5}) {
      double xf = prof.f(y);
      REQUIRE(prof.F(xf) == Catch::Approx(y).epsilon(1e-7));
    }
    (void)unif;
  }
}

TEST_CASE("frequency-profile inversion against an independent bisection") {
  // unit log-family weight: F(x) = (-ln x)/x; solve F = 100 independently
  ProblemSpec p = make_ex421(1.0, 1.0);
  SideProfile prof = side_profile(p, Side::plus);
  double lo = 1e-6, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    ((-std::log(mid)) / mid > 100.0 ? lo : hi) = mid;
  }
  double oracle = 0.5 * (lo + hi);
  REQUIRE(prof.f(100.0) == Catch::Approx(oracle).epsilon(1e-8));
  REQUIRE(oracle == Catch::Approx(0.0339).epsilon(2e-3));
}

TEST_CASE("tabulated coefficients") {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 40; ++i) {
    double x = 0.025 * i + 1e-3;
    xs.push_back(x);
    vs.push_back(1.0 + x * x);
  }
  auto tab = CoefficientExpr::tabulated(xs, vs);
  REQUIRE(tab.eval(0.5) == Catch::Approx(1.25).epsilon(1e-3));
  double mass = tab.integral_from_zero(0.9);
  REQUIRE(mass == Catch::Approx(0.9 + 0.243).epsilon(1e-2));
}

TEST_CASE("problem validation") {
  ProblemSpec p = make_sgn();
  REQUIRE_NOTHROW(p.validate());
  p.b_plus = -2.0;
  REQUIRE_THROWS_AS(p.validate(), DomainError);

  // log-pole expressions are rejected beyond x = 1
  ProblemSpec q = make_ex421(0.5, 0.5);
  q.b_plus = 2.0;
  REQUIRE_THROWS_AS(q.validate(), DomainError);
}
