#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csplab/basic_lp.hpp"
#include "csplab/csp.hpp"
#include "csplab/matching.hpp"
#include "csplab/rational.hpp"

namespace csplab {

// Gap graph built from an instance and an exact LP optimum. Pre-vertices are
// the instance variables; edge i is the scope of constraint i.
struct DistributionLabeledGraph {
  FamilyPtr family;
  std::size_t num_pre_vertices = 0;
  std::vector<HyperEdge> edges;
  std::vector<PredId> preds;
  std::size_t N = 1;
  std::vector<OneWiseDistribution> mus;
  // q_bounds[v][σ] = Σ_{σ' < σ} N·x_{v,σ'}; the last entry is N.
  std::vector<std::vector<std::uint64_t>> q_bounds;
  // Per edge, the LP tuple masses in tuple order.
  std::vector<std::vector<Rational>> tuple_mass;
  // Per edge, Σ_b f_i(b) z_{i,b}.
  std::vector<Rational> p_star;

  std::size_t k() const { return static_cast<std::size_t>(family->arity()); }
  Symbol q(VarId v, Residue r) const;
  // Residues mapped to σ: [first, second).
  std::pair<Residue, Residue> preimage(VarId v, Symbol s) const;
  // Two-stage draw: tuple b with its LP mass, then uniform over the product
  // of preimages. Same law as mus[i].
  Label sample_mask(std::size_t i, CounterRng& rng) const;
};

// Rejects solutions that fail feasibility or whose objective differs from the
// instance's LP value.
DistributionLabeledGraph build_gap_graph(const Instance& instance, const LpSolution& sol);

struct DihpParams {
  std::size_t n = 1;
  Rational alpha = 1;
  std::size_t K = 1;
  std::uint64_t seed = 0;

  // alpha·n; throws unless integral and at most n.
  std::size_t matched() const;
  // certified additionally requires alpha <= 10^-8 k^-3.
  void validate(std::size_t k, bool certified = false) const;
};

// Blow-up vertex (v, l) has id v·n + l.
inline Vertex blowup_vertex(VarId v, std::size_t l, std::size_t n) { return static_cast<Vertex>(v * n + l); }
KUniverse edge_universe(const DistributionLabeledGraph& graph, std::size_t i, std::size_t n);

struct JointInput {
  std::size_t N = 1;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t matched = 0;
  std::size_t K = 0;
  // Player (i, j) at index i·K + j.
  std::vector<LabeledMatching> players;

  const LabeledMatching& player(std::size_t i, std::size_t j) const { return players.at(i * K + j); }
  bool operator==(const JointInput&) const = default;
};

struct YesSample {
  std::vector<Residue> hidden;
  JointInput input;
};

YesSample sample_yes(const DistributionLabeledGraph& graph, const DihpParams& params);
JointInput sample_no(const DistributionLabeledGraph& graph, const DihpParams& params);

// Players in order (i, j); each keeps its zero-labeled edges, sorted by edge.
Instance reduce_to_instance(const JointInput& input, const DistributionLabeledGraph& graph);

Assignment lifted_assignment(std::span<const Residue> hidden, const DistributionLabeledGraph& graph, std::size_t n);

// alpha_max = min(10^-8 k^-3, eps/(100k)); K_min = 100/alpha · eps^-2 · N^(2k) · |V| · ln|Σ|.
struct CertifiedParams {
  Rational epsilon;
  Rational alpha_max;
  // Everything in K_min except the logarithm.
  Rational k_factor;
  double log_alphabet = 0;
  double k_min = 0;
};
CertifiedParams certified_parameters(const DistributionLabeledGraph& graph, const Rational& epsilon);

nlohmann::json to_json(const DistributionLabeledGraph& graph);
nlohmann::json to_json(const JointInput& input);
JointInput joint_input_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CertifiedParams& cert);

struct ValueBounds {
  Rational lb;
  Rational ub;
  bool exact = false;
};

// Brute force up to 2^16 assignments, then branch and bound; when that hits
// its node cap, a local-search lower bound and the LP upper bound.
ValueBounds estimate_value(const Instance& instance, std::uint64_t seed);

struct DihpRow {
  std::uint64_t seed = 0;
  std::string kind;  // "yes" or "no"
  Rational value_lb;
  Rational value_ub;
  bool exact = false;
  std::size_t constraints = 0;
  std::size_t resamples = 0;
  // Yes rows: value_lb >= c - eps; no rows: value_ub <= s + eps.
  bool decision = false;
  // Yes rows only: every constraint satisfied by the lifted assignment.
  bool lifted_all = false;
  Rational lifted_value;
};

struct DihpExperimentConfig {
  DihpParams params;
  Rational epsilon = make_rational(1, 10);
  std::size_t yes_samples = 0;
  std::size_t no_samples = 0;
  std::size_t max_resamples = 1000;
};

struct DihpExperiment {
  Rational c;  // LP value of the base instance
  Rational s;  // value of the base instance
  std::size_t N = 1;
  std::vector<DihpRow> rows;

  std::size_t count(const std::string& kind) const;
  std::size_t passes(const std::string& kind) const;
};

DihpExperiment run_dihp_experiment(const Instance& base, const DihpExperimentConfig& config);

// Header: seed,case,value_lb,value_ub,exact,m_Y,resamples,decision.
std::string experiment_csv(const DihpExperiment& experiment);

}  // namespace csplab
