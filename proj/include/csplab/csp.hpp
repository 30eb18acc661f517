#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csplab/rational.hpp"

namespace csplab {

using VarId = std::uint32_t;
using PredId = std::uint32_t;
using Symbol = std::uint32_t;

class PredicateFamily {
 public:
  // Each table has alphabet^arity entries in lexicographic tuple order
  // (first coordinate most significant). Empty names get "p<index>".
  PredicateFamily(int arity, int alphabet, std::vector<std::vector<bool>> tables,
                  std::vector<std::string> names = {});

  int arity() const { return arity_; }
  int alphabet() const { return alphabet_; }
  std::size_t size() const { return tables_.size(); }
  std::size_t tuple_count() const { return tuple_count_; }

  const std::vector<bool>& table(PredId p) const { return tables_.at(p); }
  const std::string& name(PredId p) const { return names_.at(p); }
  std::optional<PredId> find(std::string_view name) const;

  bool eval(PredId p, std::size_t tuple_index) const { return tables_[p][tuple_index]; }
  std::size_t tuple_index(std::span<const Symbol> tuple) const;
  std::vector<Symbol> tuple_at(std::size_t index) const;
  // Truth table as a string of '0'/'1'.
  std::string bitstring(PredId p) const;

  bool operator==(const PredicateFamily& other) const;

 private:
  int arity_;
  int alphabet_;
  std::size_t tuple_count_;
  std::vector<std::vector<bool>> tables_;
  std::vector<std::string> names_;
};

using FamilyPtr = std::shared_ptr<const PredicateFamily>;

struct Constraint {
  std::vector<VarId> scope;
  PredId pred = 0;

  bool operator==(const Constraint&) const = default;
};

using Assignment = std::vector<Symbol>;

class Instance {
 public:
  Instance(FamilyPtr family, std::size_t num_vars, std::vector<Constraint> constraints);

  const PredicateFamily& family() const { return *family_; }
  const FamilyPtr& family_ptr() const { return family_; }
  std::size_t num_vars() const { return num_vars_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const Constraint& constraint(std::size_t i) const { return constraints_.at(i); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  bool operator==(const Instance& other) const;

 private:
  FamilyPtr family_;
  std::size_t num_vars_;
  std::vector<Constraint> constraints_;
};

bool evaluate_constraint(const Instance& instance, std::size_t i, const Assignment& tau);
std::size_t satisfied_count(const Instance& instance, const Assignment& tau);
Rational instance_value(const Instance& instance, const Assignment& tau);

struct ValueResult {
  Rational value;
  Assignment witness;
};

// Default 2^24; CSPLAB_CAP_ASSIGNMENTS overrides.
std::uint64_t assignment_cap();

// Exhaustive search over all |Σ|^n assignments (variable 0 is the fastest
// digit). Returns the first maximizer in that order.
ValueResult brute_force_value(const Instance& instance);
ValueResult brute_force_value(const Instance& instance, std::uint64_t cap);

// Best-improvement single-flip hill climbing with random restarts.
ValueResult local_search_value(const Instance& instance, int restarts, std::uint64_t seed);

// Exact value via connected components and branch and bound. Meant for sparse
// instances that are too large for brute_force_value. Throws CapExceeded once
// more than node_cap search nodes are visited.
ValueResult exact_value(const Instance& instance, std::uint64_t node_cap = 200'000'000);

std::size_t degree(const Instance& instance, VarId v);
std::vector<std::size_t> degrees(const Instance& instance);
std::size_t max_degree(const Instance& instance);

// Constraint-index groups of the incidence graph, in order of first constraint.
std::vector<std::vector<std::size_t>> constraint_components(const Instance& instance);

// Standard families and instances.
FamilyPtr dicut_family();
// Predicates u0,u1 (unary on the first coordinate) then c00,c01,c10,c11
// (clause false exactly on the indexed pair).
FamilyPtr two_sat_family();
enum class TwoSatPred : PredId { U0 = 0, U1 = 1, C00 = 2, C01 = 3, C10 = 4, C11 = 5 };

// Complete bidirectional DICUT instance on n vertices: (i,j),(j,i) for i<j.
Instance complete_dicut(std::size_t n);
// All four 2-clauses on every pair i<j.
Instance all_clause_e2sat(std::size_t n);
// {u0, u1} on the single scope (0,1).
Instance two_sat_unary_pair();

// Variables of later parts are shifted past earlier ones. All parts must share
// one family.
Instance disjoint_union(const std::vector<Instance>& parts);

// Uniform random scopes (distinct variables) and predicates.
Instance random_instance(FamilyPtr family, std::size_t num_vars, std::size_t num_constraints,
                         std::uint64_t seed);

}  // namespace csplab
