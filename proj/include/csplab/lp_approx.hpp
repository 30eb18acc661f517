#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "csplab/basic_lp.hpp"
#include "csplab/degree_reduce.hpp"
#include "csplab/stream.hpp"

namespace csplab {

// Radius-r ball around a constraint in the variable/constraint incidence
// graph. Ids are those of the underlying instance; for I_{B,D} copies the
// constraint id is ℓ·m + i and variable ids are flattened slot ids.
struct Neighborhood {
  struct ConstraintNode {
    std::uint64_t id = 0;
    PredId pred = 0;
    std::size_t distance = 0;
    // Variable at each scope position, or nullopt when it lies outside the ball.
    std::vector<std::optional<std::uint64_t>> scope;
  };
  struct VariableNode {
    std::uint64_t id = 0;
    std::size_t distance = 0;
  };

  FamilyPtr family;
  std::uint64_t root = 0;
  std::size_t radius = 0;
  std::vector<ConstraintNode> constraints;  // sorted by id
  std::vector<VariableNode> variables;      // sorted by id

  std::size_t edge_count() const;
  std::size_t vertex_count() const { return constraints.size() + variables.size(); }
  const ConstraintNode& root_node() const;
  // Throws ValidationError when an invariant fails.
  void validate() const;
};

struct Incidence {
  std::uint64_t constraint = 0;
  std::size_t position = 0;
  PredId pred = 0;
};

// Breadth-first construction driven by lookups: the builder asks for the
// variable at a (constraint, position) and, when that variable is new, the
// list of all its incidences.
class NeighborhoodBuilder {
 public:
  NeighborhoodBuilder(FamilyPtr family, std::uint64_t root, std::size_t radius);

  // Next (constraint id, position) to resolve, or nullopt when done.
  std::optional<std::pair<std::uint64_t, std::size_t>> next_lookup();
  bool knows_variable(std::uint64_t var) const { return vars_.count(var) != 0; }
  // Resolves the lookup returned by next_lookup(). incidence is only read
  // when the variable is new.
  void supply(std::uint64_t var, const std::vector<Incidence>& incidence);
  Neighborhood finish() const;
  std::uint64_t state_bits() const;

 private:
  bool advance_layer();
  void link(std::uint64_t var, const std::vector<Incidence>& incidence);

  FamilyPtr family_;
  std::uint64_t root_;
  std::size_t radius_;
  std::size_t layer_ = 0;
  std::map<std::uint64_t, Neighborhood::ConstraintNode> cons_;
  std::map<std::uint64_t, std::size_t> vars_;
  std::map<std::uint64_t, std::vector<Incidence>> incidence_;
  std::deque<std::pair<std::uint64_t, std::size_t>> pending_;
  bool root_pred_known_ = false;
};

Neighborhood extract_neighborhood(const Instance& instance, std::size_t i, std::size_t r);

// Solves the relaxation of the sub-instance spanned by the ball (positions
// outside the ball get private fresh variables; constraints and variables in
// increasing id order) and returns the root's z-block.
std::vector<Rational> local_lp_estimate(const Neighborhood& nbhd);
// Σ_b f_root(b) ẑ_b.
Rational root_mass(const Neighborhood& nbhd, const std::vector<Rational>& zhat);

// ApproxLP as a streaming algorithm: one pass to learn m, then Q samples
// of (i, ℓ) whose radius-r neighborhoods in I_{B,D} are assembled through the
// oracle (three passes per uncached query).
class ApproxLpAlgorithm : public StreamingAlgorithm {
 public:
  ApproxLpAlgorithm(FamilyPtr family, BlowupParams params, std::size_t Q, std::size_t r);

  void init(std::uint64_t seed, std::size_t num_vars) override;
  bool wants_pass() const override { return phase_ != Phase::Done; }
  void begin_pass(std::size_t pass, CounterRng pass_rng) override;
  void process(const Constraint& c) override;
  void end_pass() override;
  StreamOutput output() const override { return estimate(); }
  std::uint64_t state_bits() const override;

  Rational estimate() const;
  std::size_t queries() const { return oracle_ ? oracle_->queries_issued() : 0; }
  std::size_t stream_length() const { return m_; }
  const std::vector<Rational>& samples() const { return samples_; }
  const std::map<std::uint64_t, Rational>& root_masses() const { return memo_; }
  std::unique_ptr<BoundedDegreeOracle> release_oracle() { return std::move(oracle_); }

 private:
  enum class Phase { Count, Oracle, Done };

  void advance();
  void record(const Rational& mass);
  void absorb(const SlotNeighborhood& answer);

  FamilyPtr family_;
  BlowupParams params_;
  std::size_t Q_;
  std::size_t r_;
  Phase phase_ = Phase::Count;
  std::size_t m_ = 0;
  int arity_ = 0;
  std::optional<CounterRng> sampler_;
  std::unique_ptr<BoundedDegreeOracle> oracle_;
  std::unique_ptr<NeighborhoodBuilder> builder_;
  std::uint64_t root_ = 0;
  std::map<std::uint64_t, Rational> memo_;  // root copy id -> root mass
  std::vector<Rational> samples_;
  Rational sum_;
};

struct ApproxLpResult {
  Rational estimate;
  StreamRun run;
  std::size_t queries = 0;
  std::vector<Rational> samples;
  std::map<std::uint64_t, Rational> root_masses;  // root copy id ℓ·m + i -> Σ_b f(b) ẑ_b
  std::unique_ptr<BoundedDegreeOracle> oracle;  // answers seen by the run
};

ApproxLpResult approx_lp(const Instance& instance, const BlowupParams& params, std::size_t Q, std::size_t r,
                         std::uint64_t seed, std::size_t pass_cap = kDefaultPassCap);

// Q = ⌈10/ε₀²⌉.
std::size_t samples_for_accuracy(const Rational& eps0);

struct DeciderConfig {
  BlowupParams params{8, 8, 0};
  std::size_t Q = 400;
  std::size_t r = 2;
};

// c' = c + ε/2, the midpoint of [c + 2ε/5, c + 3ε/5].
Rational decision_threshold(const Rational& c, const Rational& epsilon);

struct GapDecision {
  bool decision = false;
  Rational threshold;
  ApproxLpResult approx;
};

// Gap decider: 1 iff the ApproxLP estimate reaches c'.
GapDecision gap_decider(const Instance& instance, const Rational& c, const Rational& epsilon, std::uint64_t seed,
                        const DeciderConfig& config = {});

}  // namespace csplab
