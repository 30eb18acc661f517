#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csplab/rational.hpp"
#include "csplab/rng.hpp"

namespace csplab {

using Vertex = std::uint32_t;
using Residue = std::uint32_t;

// k parts of equal size, pairwise disjoint.
struct KUniverse {
  std::vector<std::vector<Vertex>> parts;

  std::size_t k() const { return parts.size(); }
  std::size_t size() const { return parts.empty() ? 0 : parts.front().size(); }
  // Largest vertex id + 1.
  std::size_t span() const;
  void validate() const;
};

// Parts {0..n-1}, {n..2n-1}, ...
KUniverse standard_universe(std::size_t k, std::size_t n);

// One vertex per part, in part order.
using HyperEdge = std::vector<Vertex>;
using Label = std::vector<Residue>;

// Edges sorted lexicographically.
using Matching = std::vector<HyperEdge>;

struct LabeledEdge {
  HyperEdge edge;
  Label label;

  bool operator==(const LabeledEdge&) const = default;
  auto operator<=>(const LabeledEdge&) const = default;
};

struct LabeledMatching {
  std::size_t N = 1;
  std::size_t m = 0;
  // Sorted by edge.
  std::vector<LabeledEdge> edges;

  bool operator==(const LabeledMatching&) const = default;
  Matching support() const;
  // Label of `edge`, or nullptr when the edge is absent.
  const Label* find(const HyperEdge& edge) const;
  void validate(const KUniverse& universe) const;
};

bool is_matching(const KUniverse& universe, const Matching& matching);

// Number of matchings with m edges: C(n,m) * (n!/(n-m)!)^(k-1).
BigInt matching_count(std::size_t n, std::size_t k, std::size_t m);

// All matchings with m edges. Part-0 positions are chosen as an increasing
// combination, the other parts as injective position tuples in lexicographic
// order; each matching appears once with edges sorted by their part-0 vertex.
// Throws CapExceeded past `cap` matchings.
std::vector<Matching> enumerate_matchings(const KUniverse& universe, std::size_t m, std::size_t cap = 1'000'000);

// Uniform over matchings with m edges: an ordered m-sample without
// replacement from every part, zipped into edges.
Matching sample_uniform_matching(const KUniverse& universe, std::size_t m, CounterRng& rng);
Matching sample_uniform_matching(const KUniverse& universe, std::size_t m, std::uint64_t seed);

// Z_N^k vectors are indexed lexicographically, first coordinate most
// significant.
std::size_t vector_index(std::span<const Residue> v, std::size_t N);
Label vector_at(std::size_t index, std::size_t N, std::size_t k);
std::size_t group_size(std::size_t N, std::size_t k);

class OneWiseDistribution {
 public:
  OneWiseDistribution(std::size_t N, std::size_t k, std::vector<Rational> pmf);

  static OneWiseDistribution uniform(std::size_t N, std::size_t k);
  static OneWiseDistribution diagonal(std::size_t N, std::size_t k);
  static OneWiseDistribution point_mass(std::size_t N, std::size_t k, const Label& at);

  std::size_t N() const { return N_; }
  std::size_t k() const { return k_; }
  const std::vector<Rational>& pmf() const { return pmf_; }
  const Rational& prob(const Label& w) const { return pmf_[vector_index(w, N_)]; }
  // Exact marginal of coordinate j.
  std::vector<Rational> marginal(std::size_t j) const;
  Label sample(CounterRng& rng) const;

 private:
  std::size_t N_;
  std::size_t k_;
  std::vector<Rational> pmf_;
  // Integer weights over a common denominator, for exact sampling.
  std::vector<std::uint64_t> cumulative_;
};

// Every coordinate marginal equals 1/N exactly.
bool check_one_wise_independent(const OneWiseDistribution& mu);

// Kernel step: uniform matching, then each edge labeled x|e - w_e with
// w_e ~ mu. `x` is indexed by vertex id.
LabeledMatching markov_sample(const KUniverse& universe, std::size_t m, const OneWiseDistribution& mu,
                              std::span<const Residue> x, CounterRng& rng);
LabeledMatching markov_sample(const KUniverse& universe, std::size_t m, const OneWiseDistribution& mu,
                              std::span<const Residue> x, std::uint64_t seed);

// Uniform element of the labeled matching space.
LabeledMatching uniform_labeled_matching(const KUniverse& universe, std::size_t m, std::size_t N, CounterRng& rng);

}  // namespace csplab
