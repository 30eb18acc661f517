#include <doctest.h>

#include "csplab/basic_lp.hpp"
#include "csplab/curves.hpp"
#include "csplab/errors.hpp"

using namespace csplab;

namespace {

// Grid oracle in integer arithmetic: c = i/64.
Rational dicut_on_grid(long i) {
  if (i <= 16) return make_rational(i, 64);
  if (i <= 32) return make_rational(1, 4);
  return make_rational(3 * i - 64, 128);
}

Rational two_sat_on_grid(long i) {
  if (i <= 32) return make_rational(i, 64);
  return make_rational(2 * i + 64, 256);
}

}  // namespace

TEST_CASE("closed-form threshold values") {
  CHECK(theta_dicut(make_rational(1, 2)) == make_rational(1, 4));
  CHECK(theta_dicut(make_rational(3, 4)) == make_rational(5, 8));
  CHECK(theta_dicut(make_rational(1, 8)) == make_rational(1, 8));
  CHECK(theta_dicut(Rational(1)) == 1);
  CHECK(theta_2sat(Rational(1)) == make_rational(3, 4));
  CHECK(theta_2sat(make_rational(1, 2)) == make_rational(1, 2));
  CHECK(theta_2sat(make_rational(3, 4)) == make_rational(5, 8));
  CHECK_THROWS_AS(theta_dicut(make_rational(-1, 8)), ValidationError);
  CHECK_THROWS_AS(theta_2sat(make_rational(9, 8)), ValidationError);
}

TEST_CASE("closed forms on the 1/64 grid") {
  for (long i = 0; i <= 64; ++i) {
    auto c = make_rational(i, 64);
    CHECK(theta_dicut(c) == dicut_on_grid(i));
    CHECK(theta_2sat(c) == two_sat_on_grid(i));
    CHECK(theta_dicut(c) <= c);
    CHECK(theta_2sat(c) <= c);
    CHECK(theta_dicut(c) == std::min(c, theta_star_dicut(c)));
    CHECK(theta_2sat(c) == std::min(c, theta_star_2sat(c)));
    if (i < 64) {
      auto next = make_rational(i + 1, 64);
      CHECK(abs(theta_dicut(next) - theta_dicut(c)) <= make_rational(3, 128));
      CHECK(abs(theta_2sat(next) - theta_2sat(c)) <= make_rational(1, 64));
    }
  }
}

TEST_CASE("shape check on closed forms and corrupted curves") {
  for (auto curve : {KnownCurve::Dicut, KnownCurve::TwoSat}) {
    auto pts = closed_form_curve(curve, 8);
    auto report = check_curve_shape(pts);
    CHECK(report.ok());
    CHECK(report.violations.empty());

    auto bent = pts;
    *bent[6].theta += make_rational(1, 16);
    bent[6].ub = *bent[6].theta;
    auto bad = check_curve_shape(bent);
    CHECK_FALSE(bad.ok());
    CHECK_FALSE(bad.identities);
    CHECK_FALSE(bad.violations.empty());

    auto dip = pts;
    *dip[7].theta -= make_rational(1, 4);
    CHECK_FALSE(check_curve_shape(dip).monotone);

    auto shuffled = pts;
    std::swap(shuffled[2], shuffled[3]);
    CHECK_THROWS_AS(check_curve_shape(shuffled), ValidationError);
  }
  CHECK(check_curve_shape(closed_form_curve(KnownCurve::Dicut, 64)).ok());
  CHECK(check_curve_shape(closed_form_curve(KnownCurve::TwoSat, 64)).ok());
}

TEST_CASE("empirical upper bounds never undercut the closed forms") {
  for (auto fam : {dicut_family(), two_sat_family()}) {
    auto pts = empirical_curve(fam, unit_grid(8), 60, 3);
    for (const auto& p : pts) {
      REQUIRE(p.found);
      CHECK(p.ub >= p.lb);
      CHECK(p.lb == *closed_form_theta_star(known_curve(*fam), p.c));
      REQUIRE(p.witness);
      CHECK(lp_value(*p.witness) == p.witness_lp);
      CHECK(p.witness_lp >= p.c);
      CHECK(exact_value(*p.witness).value == p.ub);
    }
    CHECK(check_curve_shape(pts).monotone);
  }
}

TEST_CASE("empirical upper bounds at the named extremal points") {
  auto sat = empirical_theta_upper(two_sat_family(), make_rational(1, 2), 20, 1);
  CHECK(sat.ub == make_rational(1, 2));
  auto full = empirical_theta_upper(two_sat_family(), Rational(1), 20, 1);
  CHECK(full.ub == make_rational(3, 4));
  auto cut = empirical_theta_upper(dicut_family(), make_rational(1, 2), 20, 1);
  CHECK(cut.ub <= make_rational(3, 10));
  CHECK(cut.ub > make_rational(1, 4));
}

TEST_CASE("empirical search on a family without closed form") {
  auto fam = std::make_shared<const PredicateFamily>(
      3, 2,
      std::vector<std::vector<bool>>{{false, true, true, false, true, false, false, false},
                                     {true, false, false, false, false, false, false, true}});
  CHECK(known_curve(*fam) == KnownCurve::None);
  CHECK(extremal_instances(*fam).empty());
  auto p = empirical_theta_upper(fam, Rational(0), 30, 9, {5, 10, 0, 1});
  CHECK(p.found);
  CHECK(p.lb == 0);
  CHECK(p.ub <= 1);

  auto none = empirical_theta_upper(fam, make_rational(1, 2), 0, 2);
  CHECK_FALSE(none.found);
  CHECK(none.ub == 1);
  CHECK_FALSE(none.witness);
}

TEST_CASE("search is deterministic and independent of thread count") {
  SearchConfig one{8, 24, 2, 1}, three{8, 24, 2, 3};
  auto a = search_candidates(dicut_family(), 25, 11, one);
  auto b = search_candidates(dicut_family(), 25, 11, three);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].instance == b[i].instance);
    CHECK(a[i].lp == b[i].lp);
    CHECK(a[i].value == b[i].value);
  }
}

TEST_CASE("curve CSV layout") {
  auto csv = curve_csv(closed_form_curve(KnownCurve::TwoSat, 2));
  CHECK(csv == "c,theta\n0,0\n1/2,1/2\n1,3/4\n");
  auto pts = empirical_curve(two_sat_family(), {Rational(1)}, 5, 1);
  CHECK(curve_csv(pts) == "c,lb,ub\n1,3/4,3/4\n");
}
