#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kreinsl/catalog.hpp"
#include "kreinsl/karamata.hpp"
#include "kreinsl/profiles.hpp"

using namespace kreinsl;

TEST_CASE("slow variation detector") {
  auto neglog = make_catalog_fn("neglog_inv").value();
  auto v = is_slowly_varying(neglog.fn, Regime::zero_plus, neglog.policy);
  REQUIRE(v.status == Status::holds);

  auto pow03 = PositiveFn::power(0.3);
  auto f = is_slowly_varying(pow03, Regime::zero_plus);
  REQUIRE(f.status == Status::fails);

  auto osc = make_catalog_fn("oscslow").value();
  auto o = is_slowly_varying(osc.fn, Regime::plus_infinity, osc.policy);
  REQUIRE(o.status == Status::holds);
}

TEST_CASE("positive increase detector") {
  auto sqrtfn = PositiveFn::power(0.5);
  REQUIRE(is_positively_increasing(sqrtfn, Regime::zero_plus).status ==
          Status::holds);

  auto neglog = make_catalog_fn("neglog_inv").value();
  REQUIRE(
      is_positively_increasing(neglog.fn, Regime::zero_plus, neglog.policy)
          .status == Status::fails);

  auto a17 = make_catalog_fn("a17").value();
  REQUIRE(is_positively_increasing(a17.fn, Regime::plus_infinity, a17.policy)
              .status == Status::fails);
  REQUIRE(is_slowly_varying(a17.fn, Regime::plus_infinity, a17.policy)
              .status == Status::fails);

  // precondition: a decreasing handle is rejected
  auto dec = PositiveFn::power(-1.0);
  REQUIRE_THROWS_AS(is_positively_increasing(dec, Regime::zero_plus),
                    DomainError);
}

TEST_CASE("variation-index estimate from the integral mean") {
  // x^2 with gamma = 1: mean identically 1/3, index 2 (exact integrals)
  auto sq = PositiveFn::power(2.0);
  auto est = rv_index_estimate(sq, 1.0);
  REQUIRE(est.limit_estimate == Catch::Approx(1.0 / 3.0).epsilon(1e-8));
  REQUIRE(est.index == Catch::Approx(2.0).margin(1e-3));
  REQUIRE(est.verdict.status == Status::holds);

  auto cone = PositiveFn::power(0.0);
  auto estc = rv_index_estimate(cone, 1.0);
  REQUIRE(estc.limit_estimate == Catch::Approx(1.0).epsilon(1e-10));
  REQUIRE(estc.index == Catch::Approx(0.0).margin(1e-3));

  // slowly varying: converges slowly, loose tolerance
  auto neglog = make_catalog_fn("neglog_inv").value();
  GridPolicy deep;
  deep.anchor = 1e-4;
  deep.depth = 70;
  auto estn = rv_index_estimate(neglog.fn, 1.0, deep);
  REQUIRE(std::abs(estn.index) < 0.1);

  // pure powers, full gamma grid, acceptance-level tolerance
  for (double a : {0.5, 1.0, 2.0})
    for (double g : {0.5, 1.0, 2.0}) {
      auto e = rv_index_estimate(PositiveFn::power(a), g);
      REQUIRE(e.index == Catch::Approx(a).margin(1e-3));
      REQUIRE(e.limit_estimate ==
              Catch::Approx(1.0 / (g + a)).margin(1e-8));
    }

  // divergent inner integral rejected
  auto steep = PositiveFn::power(-3.0);
  REQUIRE_THROWS_AS(rv_index_estimate(steep, 1.0), DivergenceError);
}

TEST_CASE("index consistency on power-log products") {
  for (double a : {0.5, 1.0, 2.0})
    for (double g : {0.5, 1.0, 2.0}) {
      auto fn = PositiveFn::from_log([a](double u) {
        return a * u - 0.5 * std::log(-u);  // x^a * (-ln x)^{-1/2}
      });
      GridPolicy pol;
      pol.anchor = 1e-6;
      pol.depth = 80;
      auto e = rv_index_estimate(fn, g, pol);
      REQUIRE(e.index == Catch::Approx(a).margin(0.1));
    }
}

TEST_CASE("Stieltjes-integral characterization") {
  auto id = [](double v) { return v; };
  // f(v) = v, g = id, index 1: limit 1/2
  auto c1 = stieltjes_condition_check(id, id, id, 1.0, 0.5);
  REQUIRE(c1.verdict.status == Status::holds);
  REQUIRE(c1.limit_estimate == Catch::Approx(0.5).margin(1e-6));

  // f(v) = v^2, index 2: limit 2/3
  auto sq = [](double v) { return v * v; };
  auto c2 = stieltjes_condition_check(sq, id, id, 2.0, 0.5);
  REQUIRE(c2.verdict.status == Status::holds);
  REQUIRE(c2.limit_estimate == Catch::Approx(2.0 / 3.0).margin(1e-6));

  // accumulated mass of the log-family weight against the identity length:
  // vanishing-ratio form of slow variation (index 0)
  ProblemSpec p = make_ex421(1.0, 1.0);
  SideProfile prof = side_profile(p, Side::plus);
  auto mass = [&prof](double v) { return prof.mass.eval(v); };
  auto c3 = stieltjes_condition_check(mass, id, id, 0.0, 0.25);
  REQUIRE(c3.verdict.status == Status::holds);
  REQUIRE(std::abs(c3.limit_estimate) < 0.02);
  // consistency with the ratio detector
  auto proffn = PositiveFn::from_log(
      [&prof](double u) { return std::log(prof.mass_of_length(std::exp(u))); });
  GridPolicy pol;
  pol.anchor = 1e-2;
  pol.depth = 60;
  REQUIRE(is_slowly_varying(proffn, Regime::zero_plus, pol).status ==
          Status::holds);
}

TEST_CASE("normalized-slow-variation trace") {
  // f = ln at +inf: eps = 1/ln x -> 0
  auto lnfn = PositiveFn::from_log(
      [](double u) { return std::log(u); },
      [](double u) { return 1.0 / u; });
  REQUIRE(karamata_rep_check(lnfn, Regime::plus_infinity).status ==
          Status::holds);

  auto idfn = PositiveFn::power(1.0);
  REQUIRE(karamata_rep_check(idfn, Regime::plus_infinity).status ==
          Status::fails);

  auto osc = make_catalog_fn("oscslow").value();
  REQUIRE(karamata_rep_check(osc.fn, Regime::plus_infinity, osc.policy)
              .status == Status::holds);
}

TEST_CASE("staircase-exponent exact identities") {
  for (int c = 1; c <= 2; ++c)
    for (int n = c + 1; n <= 30; ++n) {
      double u1 = static_cast<double>(n) * n;
      double u2 = u1 + n;
      REQUIRE(staircase_exponent(u1) - staircase_exponent(u1 - c) ==
              static_cast<double>(c));
      REQUIRE(staircase_exponent(u2) - staircase_exponent(u2 - c) == 0.0);
    }
}

TEST_CASE("doubly-log pair: exact subsequence ratios") {
  auto f = make_catalog_fn("a14_f").value().fn;
  auto g = make_catalog_fn("a14_g").value().fn;
  for (int n = 1; n <= 50; ++n) {
    double v = n * M_PI;
    double r = std::exp(f.lphi(v) - g.lphi(v));
    REQUIRE(std::abs(r - 1.0) < 1e-12);
    double vy = (2 * n - 1) * M_PI - M_PI / 2;
    double ry = std::exp(f.lphi(vy) - g.lphi(vy));
    REQUIRE(ry == Catch::Approx(std::exp(2.0)).epsilon(1e-12));
    double vz = (2 * n - 1) * M_PI + M_PI / 2;
    double rz = std::exp(f.lphi(vz) - g.lphi(vz));
    REQUIRE(rz == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
  }
}

TEST_CASE("sequence-equivalence search") {
  auto f = make_catalog_fn("a14_f").value().fn;
  auto g = make_catalog_fn("a14_g").value().fn;
  auto w = seq_equivalence_search(f, g, 1.0, 160.0);
  REQUIRE(w.has_value());
  REQUIRE(w->coord == Coord::double_log);
  REQUIRE(w->points.size() >= 6);
  // crossings sit at multiples of pi
  for (double pt : w->points) {
    double frac = std::fmod(pt, M_PI);
    REQUIRE(std::min(frac, M_PI - frac) < 1e-6);
  }

  // identical handles: any grid point works
  auto idw = seq_equivalence_search(f, f, 1.0, 160.0);
  REQUIRE(idw.has_value());

  // f = x vs g = 2x: ratio fixed at 1/2, no witness
  auto fx = PositiveFn::power(1.0);
  auto gx = fx.scaled(2.0);
  REQUIRE_FALSE(seq_equivalence_search(fx, gx, 1.0, 200.0).has_value());
}

TEST_CASE("inverse transfer along a witness") {
  // f = x^2, g = x^2 + x: ratio -> 1 monotonically, inverses agree
  auto f2 = PositiveFn::power(2.0);
  auto g2 = PositiveFn::from_log([](double u) {
    double x = std::exp(u);
    return 2.0 * u + std::log1p(1.0 / x);
  });
  auto w = seq_equivalence_search(f2, g2, 1.0, 120.0);
  REQUIRE(w.has_value());
  auto v = inverse_equivalence_check(f2, g2, *w, 2.0);
  REQUIRE(v.status == Status::holds);

  // no witness: precondition error
  auto fx = PositiveFn::power(1.0);
  auto gx = fx.scaled(2.0);
  EquivalenceWitness empty;
  REQUIRE_THROWS_AS(inverse_equivalence_check(fx, gx, empty, 1.0),
                    DomainError);
}

TEST_CASE("scale invariance of ratio diagnostics") {
  auto neglog = make_catalog_fn("neglog_inv").value();
  auto scaled = neglog.fn.scaled(37.5);
  auto v1 = is_slowly_varying(neglog.fn, Regime::zero_plus, neglog.policy);
  auto v2 = is_slowly_varying(scaled, Regime::zero_plus, neglog.policy);
  REQUIRE(v1.status == v2.status);
  REQUIRE(v1.evidence.size() == v2.evidence.size());
  for (std::size_t i = 0; i < v1.evidence.size(); ++i)
    REQUIRE(v1.evidence[i].value == v2.evidence[i].value);  // exact
}

TEST_CASE("reflection consistency for minus regimes") {
  // signed decreasing function on the negative axis: g(x) = -sqrt(-x)
  auto g = [](double x) { return -std::sqrt(-x); };
  auto rep = PositiveFn::from_negative(g);
  auto vm = is_positively_increasing(rep, Regime::zero_minus);
  auto vp = is_positively_increasing(rep, Regime::zero_plus);
  REQUIRE(vm.status == vp.status);
  REQUIRE(vm.status == Status::holds);
  for (std::size_t i = 0; i < vm.evidence.size(); ++i)
    REQUIRE(vm.evidence[i].value == vp.evidence[i].value);
}

TEST_CASE("no catalog function is both slowly varying and positively "
          "increasing") {
  for (const auto& name : catalog_fn_names()) {
    auto c = make_catalog_fn(name).value();
    auto sv = is_slowly_varying(c.fn, c.natural_regime, c.policy);
    TriVerdict pi;
    try {
      pi = is_positively_increasing(c.fn, c.natural_regime, c.policy);
    } catch (const DomainError&) {
      continue;  // not monotone: positive increase not applicable
    }
    bool both = sv.status == Status::holds && pi.status == Status::holds;
    REQUIRE_FALSE(both);
  }
}
