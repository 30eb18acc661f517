#include <doctest.h>

#include <cstdlib>

#include "csplab/csp.hpp"
#include "csplab/errors.hpp"
#include "csplab/instance_io.hpp"
#include "csplab/rng.hpp"

using namespace csplab;

namespace {

// Independent reference: recursive enumeration, full re-evaluation per leaf.
std::size_t naive_best(const Instance& inst, Assignment& tau, std::size_t v) {
  if (v == inst.num_vars()) {
    std::size_t sat = 0;
    for (const auto& c : inst.constraints()) {
      std::size_t idx = 0;
      for (VarId u : c.scope) idx = idx * inst.family().alphabet() + tau[u];
      sat += inst.family().table(c.pred)[idx];
    }
    return sat;
  }
  std::size_t best = 0;
  for (Symbol s = 0; s < static_cast<Symbol>(inst.family().alphabet()); ++s) {
    tau[v] = s;
    best = std::max(best, naive_best(inst, tau, v + 1));
  }
  return best;
}

Rational naive_value(const Instance& inst) {
  Assignment tau(inst.num_vars(), 0);
  Rational q(static_cast<unsigned long>(naive_best(inst, tau, 0)), static_cast<unsigned long>(inst.size()));
  q.canonicalize();
  return q;
}

Rational complete_dicut_formula(unsigned long n) {
  Rational q((n / 2) * ((n + 1) / 2), n * (n - 1));
  q.canonicalize();
  return q;
}

FamilyPtr ternary_family() {
  std::vector<std::vector<bool>> t(2, std::vector<bool>(27));
  for (std::size_t i = 0; i < 27; ++i) {
    t[0][i] = (i % 3) != (i / 9);
    t[1][i] = i % 2 == 0;
  }
  return std::make_shared<const PredicateFamily>(3, 3, t);
}

}  // namespace

TEST_CASE("evaluate_constraint reads the truth table at the lexicographic index") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  CHECK(evaluate_constraint(one, 0, {1, 0}));
  CHECK_FALSE(evaluate_constraint(one, 0, {0, 0}));
  CHECK_FALSE(evaluate_constraint(one, 0, {0, 1}));
  Instance clause(two_sat_family(), 2, {{{0, 1}, static_cast<PredId>(TwoSatPred::C00)}});
  CHECK_FALSE(evaluate_constraint(clause, 0, {0, 0}));
  CHECK(evaluate_constraint(clause, 0, {1, 0}));
  CHECK_THROWS_AS(evaluate_constraint(one, 1, {1, 0}), ValidationError);
  CHECK_THROWS_AS(evaluate_constraint(one, 0, {1}), ValidationError);
}

TEST_CASE("two_sat_family truth tables") {
  auto f = two_sat_family();
  CHECK(f->bitstring(0) == "1100");
  CHECK(f->bitstring(1) == "0011");
  CHECK(f->bitstring(2) == "0111");
  CHECK(f->bitstring(5) == "1110");
  CHECK(dicut_family()->bitstring(0) == "0010");
}

TEST_CASE("instance_value") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  CHECK(instance_value(one, {1, 0}) == 1);
  auto i4 = complete_dicut(4);
  CHECK(i4.size() == 12);
  CHECK(instance_value(i4, {1, 1, 0, 0}) == Rational(1, 3));
  // Constant assignments: fraction of predicates accepting the constant tuple.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = random_instance(two_sat_family(), 5, 9, seed);
    for (Symbol s = 0; s < 2; ++s) {
      std::size_t ok = 0;
      for (const auto& c : inst.constraints()) ok += inst.family().table(c.pred)[s * 2 + s];
      Rational expect(ok, 9);
      expect.canonicalize();
      CHECK(instance_value(inst, Assignment(5, s)) == expect);
    }
  }
  Instance empty(dicut_family(), 3, {});
  CHECK_THROWS_AS(instance_value(empty, {0, 0, 0}), ValidationError);
}

TEST_CASE("brute_force_value") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  CHECK(brute_force_value(one).value == 1);
  for (unsigned long n : {3ul, 4ul, 5ul, 6ul}) {
    auto r = brute_force_value(complete_dicut(n));
    CHECK(r.value == complete_dicut_formula(n));
    CHECK(instance_value(complete_dicut(n), r.witness) == r.value);
  }
  CHECK(brute_force_value(complete_dicut(4)).value == Rational(1, 3));
  CHECK(brute_force_value(complete_dicut(6)).value == Rational(3, 10));
  CHECK(brute_force_value(all_clause_e2sat(4)).value == Rational(3, 4));
}

TEST_CASE("brute_force_value agrees with an independent enumeration") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    CounterRng g(seed);
    auto family = seed % 3 == 0 ? ternary_family() : (seed % 3 == 1 ? dicut_family() : two_sat_family());
    std::size_t n = 3 + g.below(5);
    if (family->alphabet() == 3) n = 3 + g.below(3);
    auto inst = random_instance(family, n, 1 + g.below(14), seed);
    auto r = brute_force_value(inst);
    CHECK(r.value == naive_value(inst));
    CHECK(instance_value(inst, r.witness) == r.value);
    Assignment tau(n);
    for (auto& s : tau) s = static_cast<Symbol>(g.below(family->alphabet()));
    CHECK(r.value >= instance_value(inst, tau));
  }
}

TEST_CASE("brute force cap") {
  auto inst = random_instance(dicut_family(), 20, 5, 1);
  CHECK_THROWS_AS(brute_force_value(inst, 1000), CapExceeded);
  setenv("CSPLAB_CAP_ASSIGNMENTS", "1024", 1);
  CHECK(assignment_cap() == 1024);
  CHECK_THROWS_AS(brute_force_value(inst), CapExceeded);
  setenv("CSPLAB_CAP_ASSIGNMENTS", "bogus", 1);
  CHECK_THROWS_AS(assignment_cap(), ValidationError);
  unsetenv("CSPLAB_CAP_ASSIGNMENTS");
  CHECK(assignment_cap() == (1u << 24));
}

TEST_CASE("local_search_value") {
  Instance one(dicut_family(), 2, {{{0, 1}, 0}});
  CHECK(local_search_value(one, 1, 7).value == 1);
  CHECK(local_search_value(complete_dicut(4), 32, 7).value == Rational(1, 3));
  // Unique solution (1,0,1,1): u_b on scope (v, w) pins v to b.
  Instance pinned(two_sat_family(), 4, {{{0, 1}, 1}, {{1, 0}, 0}, {{2, 0}, 1}, {{3, 0}, 1}});
  auto bf = brute_force_value(pinned);
  CHECK(bf.value == 1);
  CHECK(bf.witness == Assignment{1, 0, 1, 1});
  CHECK(local_search_value(pinned, 64, 3).value == 1);
  CHECK(local_search_value(pinned, 5, 9).witness == local_search_value(pinned, 5, 9).witness);
}

TEST_CASE("local search never exceeds brute force") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng g(seed + 1000);
    auto family = seed % 2 ? dicut_family() : two_sat_family();
    auto inst = random_instance(family, 2 + g.below(11), 1 + g.below(30), seed);
    auto ls = local_search_value(inst, 4, seed);
    CHECK(ls.value <= brute_force_value(inst).value);
    CHECK(instance_value(inst, ls.witness) == ls.value);
  }
}

TEST_CASE("exact_value matches brute force") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng g(seed + 77);
    auto family = seed % 3 == 0 ? ternary_family() : (seed % 3 == 1 ? dicut_family() : two_sat_family());
    std::size_t n = family->alphabet() == 3 ? 3 + g.below(5) : 3 + g.below(12);
    auto inst = random_instance(family, n, 1 + g.below(3 * n), seed);
    auto ex = exact_value(inst);
    CHECK(ex.value == brute_force_value(inst).value);
    CHECK(instance_value(inst, ex.witness) == ex.value);
  }
}

TEST_CASE("exact_value handles sparse instances beyond brute force") {
  // Disjoint copies of I_4: value stays 1/3.
  std::vector<Constraint> cs;
  auto i4 = complete_dicut(4);
  for (VarId copy = 0; copy < 10; ++copy)
    for (auto c : i4.constraints()) {
      for (auto& v : c.scope) v += 4 * copy;
      cs.push_back(c);
    }
  Instance big(dicut_family(), 40, cs);
  CHECK(exact_value(big).value == Rational(1, 3));
}

TEST_CASE("degree") {
  Instance one(dicut_family(), 3, {{{0, 1}, 0}});
  CHECK(degree(one, 0) == 1);
  CHECK(degree(one, 2) == 0);
  CHECK_THROWS_AS(degree(one, 3), ValidationError);
  auto i4 = complete_dicut(4);
  for (VarId v = 0; v < 4; ++v) CHECK(degree(i4, v) == 6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = random_instance(ternary_family(), 6, 10, seed);
    std::size_t sum = 0;
    for (VarId v = 0; v < 6; ++v) sum += degree(inst, v);
    CHECK(sum == 3 * inst.size());
  }
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(PredicateFamily(2, 2, {{false, false, false, false}}), ValidationError);
  CHECK_THROWS_AS(PredicateFamily(2, 2, {{true, false}}), ValidationError);
  CHECK_THROWS_AS(PredicateFamily(2, 1, {{true}}), ValidationError);
  CHECK_THROWS_AS(PredicateFamily(0, 2, {{true}}), ValidationError);
  CHECK_THROWS_AS(Instance(dicut_family(), 2, {{{0, 0}, 0}}), ValidationError);
  CHECK_THROWS_AS(Instance(dicut_family(), 2, {{{0, 2}, 0}}), ValidationError);
  CHECK_THROWS_AS(Instance(dicut_family(), 2, {{{0, 1}, 1}}), ValidationError);
}

TEST_CASE("text and JSON formats round-trip") {
  auto i4 = complete_dicut(4);
  auto text = to_text(i4);
  CHECK(text.rfind("maxcsp k=2 sigma=2 vars=4 constraints=12\npred dicut 0010\nc dicut 0 1\n", 0) == 0);
  CHECK(parse_text(text) == i4);
  CHECK(to_text(parse_text(text)) == text);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = random_instance(seed % 2 ? ternary_family() : two_sat_family(), 7, seed % 9, seed);
    CHECK(parse_instance(to_text(inst)) == inst);
    auto js = to_json(inst).dump();
    CHECK(parse_instance(js) == inst);
    CHECK(to_json(parse_instance(js)).dump() == js);
  }
  CHECK(parse_text("# comment\n\nmaxcsp k=2 sigma=2 vars=2 constraints=1\npred d 0010\nc d 1 0\n").size() == 1);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_text("maxcsp k=2 sigma=2 vars=2 constraints=1\npred d 0010\nc d 0 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("maxcsp k=2 sigma=2 vars=2 constraints=1\npred d 001\nc d 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("maxcsp k=2 sigma=2 vars=2 constraints=2\npred d 0010\nc d 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("maxcsp k=2 sigma=2 vars=2 constraints=1\npred d 0010\nc e 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("maxcsp k=2 sigma=2 vars=2 constraints=1\npred d 0010\nc d 0 1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("pred d 0010\n"), ValidationError);
  CHECK_THROWS_AS(parse_instance("{\"format\":\"maxcsp\"}"), ValidationError);
  CHECK_THROWS_AS(parse_instance("{oops"), ValidationError);
}
