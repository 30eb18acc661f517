#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "csplab/errors.hpp"
#include "csplab/lp_approx.hpp"

using namespace csplab;

namespace {

Instance connected_instance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto inst = random_instance(seed % 2 ? dicut_family() : two_sat_family(), 4 + seed % 3, 5 + seed % 4,
                                derive_seed(seed, attempt));
    auto deg = degrees(inst);
    if (constraint_components(inst).size() == 1 && std::find(deg.begin(), deg.end(), 0u) == deg.end()) return inst;
  }
}

double stddev(const std::vector<double>& xs) {
  double mean = 0, var = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

}  // namespace

TEST_CASE("isolated constraint neighborhood is a labeled star") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  auto nb = extract_neighborhood(one, 0, 1);
  nb.validate();
  CHECK(nb.constraints.size() == 1);
  CHECK(nb.variables.size() == 2);
  CHECK(nb.edge_count() == 2);
  CHECK(nb.constraints[0].scope[0] == 0u);
  CHECK(nb.constraints[0].scope[1] == 1u);
  auto z = local_lp_estimate(nb);
  CHECK(z == std::vector<Rational>{0, 0, 1, 0});
  CHECK(root_mass(nb, z) == 1);
  CHECK_THROWS_AS(extract_neighborhood(one, 1, 1), ValidationError);
  CHECK_THROWS_AS(extract_neighborhood(one, 0, 0), ValidationError);
}

TEST_CASE("neighborhood size on bounded-degree instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto base = random_instance(dicut_family(), 6, 8, seed);
    auto s = sample_bounded_instance(base, {4, 2, 0}, seed);
    const std::size_t B = 4;
    for (std::size_t r = 1; r <= 3; ++r)
      for (std::size_t i = 0; i < s.instance.size(); i += 5) {
        auto nb = extract_neighborhood(s.instance, i, r);
        nb.validate();
        std::size_t bound = 2;
        for (std::size_t a = 0; a < r; ++a) bound *= std::max<std::size_t>(B, 2);
        CHECK(nb.vertex_count() + nb.edge_count() <= bound + 1);
      }
  }
}

TEST_CASE("large radius covers the connected component") {
  auto inst = complete_dicut(4);
  auto nb = extract_neighborhood(inst, 3, 10);
  CHECK(nb.constraints.size() == 12);
  CHECK(nb.variables.size() == 4);
  CHECK(nb.edge_count() == 24);
  Instance two(dicut_family(), 4, {{{0, 1}, 0}, {{2, 3}, 0}});
  CHECK(extract_neighborhood(two, 0, 10).constraints.size() == 1);
}

TEST_CASE("full-radius local estimates average to the LP value") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = connected_instance(seed);
    Rational total = 0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      auto nb = extract_neighborhood(inst, i, 4 * inst.size());
      total += root_mass(nb, local_lp_estimate(nb));
    }
    CHECK(total / Rational(static_cast<unsigned long>(inst.size())) == lp_value(inst));
  }
}

TEST_CASE("local estimates against the LP value at small radius (observation)") {
  int below = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = connected_instance(seed + 100);
    auto lp = lp_value(inst);
    for (std::size_t r = 1; r <= 4; ++r) {
      Rational sum = 0;
      for (std::size_t i = 0; i < inst.size(); ++i) {
        auto nb = extract_neighborhood(inst, i, r);
        auto z = local_lp_estimate(nb);
        Rational zsum = 0;
        for (const auto& q : z) {
          CHECK(sgn(q) >= 0);
          zsum += q;
        }
        CHECK(zsum == 1);
        sum += root_mass(nb, z);
      }
      ++total;
      below += sum / Rational(static_cast<unsigned long>(inst.size())) < lp ? 1 : 0;
    }
  }
  MESSAGE("average local estimate below the LP value in " << below << " of " << total << " (instance, radius) pairs");
}

TEST_CASE("approx_lp on a single satisfiable constraint") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  for (std::size_t r : {1, 2, 3}) {
    auto res = approx_lp(one, {3, 2, 0}, 25, r, 4);
    CHECK(res.estimate == 1);
    CHECK(res.run.passes_used == 1 + 3 * res.queries);
  }
}

TEST_CASE("approx_lp pass accounting, range, determinism") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = random_instance(seed % 2 ? dicut_family() : two_sat_family(), 5, 7, seed);
    auto a = approx_lp(inst, {4, 3, 0}, 60, 1 + seed % 3, seed);
    auto b = approx_lp(inst, {4, 3, 0}, 60, 1 + seed % 3, seed);
    CHECK(a.run == b.run);
    CHECK(a.estimate == b.estimate);
    CHECK(a.run.passes_used == 1 + 3 * a.queries);
    CHECK(sgn(a.estimate) >= 0);
    CHECK(a.estimate <= 1);
    CHECK(a.samples.size() == 60);
    CHECK(std::get<Rational>(a.run.output) == a.estimate);
  }
}

TEST_CASE("oracle-assembled neighborhoods match the materialized instance") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto inst = random_instance(seed % 2 ? dicut_family() : two_sat_family(), 5, 6, seed + 30);
    const std::size_t r = 1 + seed % 3;
    auto res = approx_lp(inst, {4, 2, 0}, 40, r, seed);
    auto sample = res.oracle->materialize(inst);
    for (const auto& [root, mass] : res.root_masses) {
      auto nb = extract_neighborhood(sample.instance, root, r);
      CHECK(root_mass(nb, local_lp_estimate(nb)) == mass);
    }
  }
}

TEST_CASE("pass cap propagates") {
  auto inst = complete_dicut(4);
  CHECK_THROWS_AS(approx_lp(inst, {8, 8, 0}, 400, 2, 1, 20), PassCapExceeded);
}

TEST_CASE("estimate spread shrinks with Q") {
  auto i4 = complete_dicut(4);
  std::vector<double> small, large;
  for (std::uint64_t s = 0; s < 30; ++s) {
    small.push_back(approx_lp(i4, {8, 8, 0}, 100, 2, s).estimate.get_d());
    large.push_back(approx_lp(i4, {8, 8, 0}, 400, 2, s).estimate.get_d());
  }
  CHECK(stddev(large) < stddev(small));
}

TEST_CASE("decision threshold and sample count") {
  auto c = make_rational(1, 2), eps = make_rational(1, 5);
  auto t = decision_threshold(c, eps);
  CHECK(t >= c + 2 * eps / 5);
  CHECK(t <= c + 3 * eps / 5);
  CHECK(samples_for_accuracy(make_rational(1, 10)) == 1000);
  CHECK(samples_for_accuracy(make_rational(1, 3)) == 90);
  CHECK_THROWS_AS(decision_threshold(Rational(1), eps), ValidationError);
  CHECK_THROWS_AS(decision_threshold(c, Rational(0)), ValidationError);
}

TEST_CASE("gap decider accepts satisfiable-heavy instances") {
  // Satisfiable 2SAT: planted assignment, clauses it satisfies.
  CounterRng g(5);
  std::vector<Constraint> cs;
  Assignment planted{1, 0, 1, 1, 0, 1};
  while (cs.size() < 12) {
    VarId a = static_cast<VarId>(g.below(6)), b = static_cast<VarId>(g.below(6));
    if (a == b) continue;
    PredId p = 2 + static_cast<PredId>(g.below(4));
    Constraint c{{a, b}, p};
    Instance probe(two_sat_family(), 6, {c});
    if (evaluate_constraint(probe, 0, planted)) cs.push_back(c);
  }
  Instance inst(two_sat_family(), 6, cs);
  REQUIRE(brute_force_value(inst).value == 1);
  const auto c = make_rational(3, 4), eps = make_rational(1, 5);
  DeciderConfig cfg{{12, 2, 0}, 200, 2};
  int ones = 0;
  for (std::uint64_t s = 0; s < 30; ++s) ones += gap_decider(inst, c, eps, s, cfg).decision ? 1 : 0;
  CHECK(ones >= 20);
}

TEST_CASE("gap decider rejects instances far below the curve") {
  // {u0, u1} on one scope: value 1/2. With c = 9/10 the 2SAT curve gives
  // (2c+1)/4 = 7/10, so value <= curve - 3/20.
  auto inst = two_sat_unary_pair();
  const auto c = make_rational(9, 10), eps = make_rational(3, 20);
  REQUIRE(brute_force_value(inst).value + eps <= (2 * c + 1) / 4);
  DeciderConfig cfg{{12, 2, 0}, 200, 2};
  int zeros = 0;
  for (std::uint64_t s = 0; s < 30; ++s) zeros += gap_decider(inst, c, eps, s, cfg).decision ? 0 : 1;
  CHECK(zeros >= 20);
}
