#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "csplab/csp.hpp"
#include "csplab/rng.hpp"

namespace csplab {

struct BlowupParams {
  std::size_t B = 1;  // rounds, and the degree bound of the result
  std::size_t D = 1;  // slots per unit of original degree
  Rational epsilon = 0;

  void validate() const;
};

// D = ⌈10k/ε⌉, B = ⌈16(kD ln|Σ| + 6)/ε²⌉.
BlowupParams choose_params(const Rational& epsilon, const PredicateFamily& family);

// Slot (v, j), j < D·deg(v), has flattened id offsets[v] + j.
struct SlotMap {
  std::size_t D = 1;
  std::vector<std::size_t> offsets;  // size num_vars + 1

  std::size_t total() const { return offsets.back(); }
  std::size_t slots_of(VarId v) const { return offsets[v + 1] - offsets[v]; }
  VarId id(VarId v, std::size_t j) const { return static_cast<VarId>(offsets[v] + j); }
  std::pair<VarId, std::size_t> locate(VarId id) const;
};

SlotMap make_slot_map(const Instance& instance, std::size_t D);

struct BoundedSample {
  Instance instance;  // copy (i, ℓ) sits at index ℓ·m + i
  SlotMap slots;
  BlowupParams params;
  std::uint64_t seed = 0;
};

// B rounds; in each round every constraint is copied with each
// scope variable replaced by a slot drawn uniformly from that variable's
// slots not yet used in the round.
BoundedSample sample_bounded_instance(const Instance& instance, const BlowupParams& params, std::uint64_t seed);

// Checks the structural invariants of sample_bounded_instance output: m·B copies in
// round-major order with the original predicates, every scope position
// holding a slot of the original variable, no slot reused within a round,
// and maximum degree at most B. On failure a reason is written to why.
bool is_legal_blowup(const Instance& original, const BoundedSample& sample, std::string* why = nullptr);

// τ̃((v, j)) = τ(v).
Assignment lift_assignment(const SlotMap& slots, const Assignment& tau);

// Sidecar metadata: B, D, seed and slot offsets.
nlohmann::json sidecar_json(const BoundedSample& sample);

struct OracleQuery {
  std::size_t constraint = 0;
  std::size_t round = 0;
  std::size_t position = 0;

  auto operator<=>(const OracleQuery&) const = default;
};

struct CopyIncidence {
  std::size_t constraint = 0;
  std::size_t round = 0;
  std::size_t position = 0;
  PredId pred = 0;

  auto operator<=>(const CopyIncidence&) const = default;
};

// Every constraint copy that uses slot (var, slot), with the scope position.
struct SlotNeighborhood {
  VarId var = 0;
  std::size_t slot = 0;
  std::vector<CopyIncidence> copies;  // sorted

  bool operator==(const SlotNeighborhood&) const = default;
};

// Answers queries about I_{B,D} without materializing it. Slot
// choices are sampled lazily, conditioned on everything revealed so far, so
// all answers are consistent with one draw of sample_bounded_instance.
//
// Each uncached query takes three passes over the stream: fetch the queried
// variable, count its degree and the rank of the queried occurrence, then
// collect the constraint copies that landed on the chosen slot.
class BoundedDegreeOracle {
 public:
  BoundedDegreeOracle(BlowupParams params, std::uint64_t seed);

  // Must be called (after one counting pass) before any query.
  void set_stream_length(std::size_t m, int arity);

  // Streaming protocol. begin() returns true when the answer is cached and
  // no passes are needed; otherwise feed three passes through observe() and
  // finish_pass(), after which ready() holds.
  bool begin(const OracleQuery& q);
  void observe(const Constraint& c);
  void finish_pass();
  bool ready() const { return stage_ == Stage::Idle; }
  const SlotNeighborhood& answer() const { return *answer_; }
  std::size_t stage_index() const { return static_cast<std::size_t>(stage_); }

  // Direct use on an in-memory stream; runs the same three passes.
  const SlotNeighborhood& query(const Instance& stream, const OracleQuery& q);

  // Queries every (i, ℓ, t) and assembles the instantiated I_{B,D}.
  BoundedSample materialize(const Instance& stream);

  std::size_t queries_issued() const { return queries_; }
  std::size_t passes_charged() const { return passes_; }
  std::size_t cache_size() const { return cache_.size(); }
  const std::vector<SlotNeighborhood>& answers() const { return log_; }
  const BlowupParams& params() const { return params_; }
  std::uint64_t state_bits() const;

 private:
  enum class Stage { Idle = 0, FetchVariable = 1, CountDegree = 2, Collect = 3 };

  struct RoundState {
    std::map<std::size_t, std::size_t> rank_slot;
    std::map<std::size_t, std::optional<std::size_t>> slot_rank;  // nullopt: known empty
  };

  void resolve();
  std::size_t slot_for_rank(RoundState& st, std::size_t rank);
  std::optional<std::size_t> rank_for_slot(RoundState& st, std::size_t slot);

  BlowupParams params_;
  std::uint64_t seed_;
  CounterRng rng_;
  std::size_t m_ = 0;
  int arity_ = 0;
  bool length_known_ = false;
  std::map<OracleQuery, std::size_t> cache_;  // index into log_
  std::vector<SlotNeighborhood> log_;
  std::map<std::pair<VarId, std::size_t>, RoundState> rounds_;
  std::map<VarId, std::size_t> known_degree_;

  Stage stage_ = Stage::Idle;
  OracleQuery current_{};
  std::size_t cursor_ = 0;
  VarId var_ = 0;
  std::size_t degree_ = 0;
  std::size_t rank_ = 0;
  std::size_t slot_ = 0;
  std::size_t occurrences_seen_ = 0;
  std::multimap<std::size_t, std::size_t> wanted_;  // occurrence rank -> round
  std::vector<CopyIncidence> collected_;
  std::optional<SlotNeighborhood> answer_;
  std::size_t queries_ = 0;
  std::size_t passes_ = 0;
};

}  // namespace csplab
