#include <doctest.h>

#include <algorithm>

#include "csplab/errors.hpp"
#include "csplab/stream.hpp"

using namespace csplab;

namespace {

class EndlessAlgorithm : public CountingAlgorithm {
 public:
  bool wants_pass() const override { return true; }
};

}  // namespace

TEST_CASE("counting algorithm takes one pass") {
  CountingAlgorithm alg;
  auto run = run_multipass(alg, complete_dicut(4), 5);
  CHECK(run.passes_used == 1);
  CHECK(std::get<Rational>(run.output) == 12);
  CHECK(run.seed == 5);
  CHECK(summary_line(run) == "passes=1 bits=" + std::to_string(run.peak_tracked_bits) + " output=12");
  CHECK(to_json(run)["output"] == "12");
}

TEST_CASE("quarter-cut estimate") {
  QuarterCutAlgorithm alg;
  auto run = run_multipass(alg, complete_dicut(4), 1);
  CHECK(std::get<Rational>(run.output) == 3);
}

TEST_CASE("pass cap aborts with a distinct error") {
  EndlessAlgorithm alg;
  CHECK_THROWS_AS(run_multipass(alg, complete_dicut(3), 0, 50), PassCapExceeded);
  Instance empty(dicut_family(), 2, {});
  CountingAlgorithm c;
  CHECK_THROWS_AS(run_multipass(c, empty, 0), ValidationError);
}

TEST_CASE("per-pass randomness is derived from (seed, pass)") {
  RecordingAlgorithm alg(3);
  run_multipass(alg, complete_dicut(3), 99);
  REQUIRE(alg.draws().size() == 3);
  for (std::size_t p = 0; p < 3; ++p) CHECK(alg.draws()[p] == CounterRng(derive_seed(99, p))());
  CHECK(alg.draws()[0] != alg.draws()[1]);
}

TEST_CASE("replay determinism and order fidelity") {
  auto base = random_instance(two_sat_family(), 6, 15, 3);
  for (std::uint64_t perm = 0; perm < 20; ++perm) {
    auto cs = base.constraints();
    CounterRng g(perm);
    std::shuffle(cs.begin(), cs.end(), g);
    Instance shuffled(base.family_ptr(), base.num_vars(), cs);
    RecordingAlgorithm a(2), b(2);
    auto ra = run_multipass(a, shuffled, perm);
    auto rb = run_multipass(b, shuffled, perm);
    CHECK(ra == rb);
    CHECK(a.draws() == b.draws());
    for (const auto& pass : a.seen()) CHECK(pass == cs);
    CHECK(ra.passes_used == 2);
    CHECK(ra.peak_tracked_bits == 64 * 2 * cs.size());
  }
}
