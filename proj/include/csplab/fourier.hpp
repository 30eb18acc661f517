#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "csplab/matching.hpp"
#include "csplab/rational.hpp"

namespace csplab {

using Complex = std::complex<double>;

// Probability that a fixed d-edge matching lies inside a uniform m-edge
// matching of a k-universe with parts of size n: 1 for d = 0, otherwise
// m/n^k times the value at (n-1, m-1, d-1).
Rational psi_prob(std::size_t n, std::size_t m, std::size_t d, std::size_t k);

// Shared report layout. worst_ratio is the largest observed quantity divided
// by its limit; pass means it is at most 1. Exact checks report the number of
// mismatches instead and pass only at 0.
struct CheckReport {
  std::string check;
  nlohmann::json params;
  bool certified = false;
  bool pass = false;
  double worst_ratio = 0;
  nlohmann::json details;
};
nlohmann::json to_json(const CheckReport& report);

// Compares psi_prob(n, m, d, k) for every d <= m with the exact fraction of
// enumerated m-matchings containing a fixed d-matching.
CheckReport check_psi_containment(std::size_t n, std::size_t m, std::size_t k, std::size_t cap = 1'000'000);

// Every labeled matching with m edges and labels in Z_N^k. Matchings follow
// enumerate_matchings; within a matching, labels run lexicographically over
// the edge labels concatenated in edge order. The universe must use the
// vertex ids 0..span-1.
class LabeledMatchingSpace {
 public:
  LabeledMatchingSpace(KUniverse universe, std::size_t m, std::size_t N, std::size_t cap = 1'000'000);

  const KUniverse& universe() const { return universe_; }
  std::size_t m() const { return m_; }
  std::size_t N() const { return N_; }
  std::size_t k() const { return universe_.k(); }
  std::size_t size() const { return matchings_.size() * labelings_; }
  const std::vector<Matching>& matchings() const { return matchings_; }

  LabeledMatching at(std::size_t index) const;
  std::size_t index_of(const LabeledMatching& y) const;

  // Z_N^{∪U}: seeds x indexed by vector_index over the vertex ids.
  std::size_t seed_dims() const { return universe_.span(); }
  std::size_t seed_count() const { return seed_count_; }

 private:
  KUniverse universe_;
  std::size_t m_;
  std::size_t N_;
  std::size_t labelings_;
  std::size_t seed_count_;
  std::vector<Matching> matchings_;
  std::map<Matching, std::size_t> matching_index_;
};

// Labels are nonzero vectors of Z_N^k, one per edge; edges sorted.
struct CharacterIndex {
  Matching edges;
  std::vector<Label> labels;

  bool operator==(const CharacterIndex&) const = default;
  void validate(const KUniverse& universe, std::size_t m, std::size_t N) const;
};

// χ_a(t) = exp(2πi <a, t> / N).
Complex root_character(std::span<const Residue> a, std::span<const Residue> t, std::size_t N);

// Ψ(|U|, m, |M|)^{-1/2} · Π_e χ_{a(e)}(y(e)); 0 when an edge of M is absent.
Complex character_eval(const CharacterIndex& idx, const LabeledMatching& y, const KUniverse& universe, std::size_t m);

// All character indices with at most max_d edges, by size, then matching,
// then labels.
std::vector<CharacterIndex> character_indices(const KUniverse& universe, std::size_t m, std::size_t N, std::size_t max_d);

// Values of a character on every element of the space.
std::vector<Complex> character_vector(const CharacterIndex& idx, const LabeledMatchingSpace& space);

// E_y f(y) conj(g(y)).
Complex inner_product(const std::vector<Complex>& f, const std::vector<Complex>& g);


CheckReport check_orthonormal(const KUniverse& universe, std::size_t m, std::size_t N, std::size_t max_d,
                              double tolerance = 1e-10, std::size_t cap = 1'000'000);

// Rows are seeds x, columns are elements y of the space:
// P(x, y) = Π_{e in supp y} mu(x|e - y(e)) / #matchings.
struct MarkovKernel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> exact;
  std::vector<double> dense;

  const Rational& at(std::size_t x, std::size_t y) const { return exact[x * cols + y]; }
};
MarkovKernel markov_kernel(const LabeledMatchingSpace& space, const OneWiseDistribution& mu,
                           std::size_t cap = 4'000'000);

// Exact row sums and the floating row sums against 1.
CheckReport check_kernel_rows(const MarkovKernel& kernel, double tolerance = 1e-12);

// x -> Σ_y P(x, y) f(y).
std::vector<double> kernel_pullback(const MarkovKernel& kernel, const std::vector<double>& f);
std::vector<Rational> kernel_pullback(const MarkovKernel& kernel, const std::vector<Rational>& f);

// The pullback of the constant 1 is exactly 1 in every row.
CheckReport check_constant_pullback(const MarkovKernel& kernel);

// |Ω|/|A| on A, 0 elsewhere. `members` are space indices.
std::vector<double> set_density(std::size_t space_size, const std::vector<std::size_t>& members);

// ⟨f, χ_b⟩ for every b in Z_N^dims, b in vector_index order.
std::vector<Complex> fourier_coefficients(const std::vector<Complex>& f, std::size_t N, std::size_t dims);
std::vector<Complex> fourier_coefficients(const std::vector<double>& f, std::size_t N, std::size_t dims);
// Entry ℓ is Σ_{|supp b| = ℓ} |⟨f, χ_b⟩|².
std::vector<double> level_weights(const std::vector<Complex>& coefficients, std::size_t N, std::size_t dims);
// Σ_b |⟨f, χ_b⟩|² against E|f|².
CheckReport check_parseval(const std::vector<double>& f, std::size_t N, std::size_t dims, double tolerance = 1e-10);

// r(t) = Σ_z mu(z) conj(χ_t(z)) for every t in Z_N^k.
std::vector<Complex> mask_coefficients(const OneWiseDistribution& mu);
// |r(t)| for t with exactly one nonzero coordinate.
CheckReport check_single_coordinate_vanish(const OneWiseDistribution& mu, double tolerance = 1e-10);

// Adjoint of the kernel applied to χ_b: y -> |Ω|/|X| Σ_x P(x, y) χ_b(x).
std::vector<Complex> adjoint_character(const MarkovKernel& kernel, const LabeledMatchingSpace& space,
                                       std::span<const Residue> b);

// For each b: orthogonality against the other listed b, squared distance to
// the span of characters with at most floor(|supp b|/2) edges, and the norm
// bound (100 k^3 m l / |U|^2)^{l/2}. Certified only when |U| > 100 k m.
CheckReport svd_structure_check(const LabeledMatchingSpace& space, const OneWiseDistribution& mu,
                                const std::vector<Label>& frequencies, double tolerance = 1e-10);

// y agrees with every labeled edge of z.
bool consistent(const LabeledMatching& y, const LabeledMatching& z);

// Density growth under every restriction subsuming z, against the allowed
// factor 2^{|z'| - |z|}. Throws when A leaves the restricted domain of z.
CheckReport check_global_set(const LabeledMatchingSpace& space, const std::vector<std::size_t>& members,
                             const LabeledMatching& z);

// Per-level weight ceiling: (w/n)^{l/2} for l <= w, (l/(8n))^{l/2} 4^w for
// w < l <= n, 0 beyond n.
double decay_bound(double n, std::size_t level, double w);

// Pairs of consecutive grid points where the bound decreases in w.
CheckReport check_decay_bound_monotone(double n, std::size_t level, const std::vector<double>& w_grid);

// Level weights of the pullback of the density of A against
// decay_bound(|U|, l, w) with w = log2(|Ω|/|A|). Certified only when
// |U| >= 10^8 k^3 m, m >= 2(w+1) and A is global.
CheckReport fourier_decay_check(const LabeledMatchingSpace& space, const OneWiseDistribution& mu,
                                const std::vector<std::size_t>& members, double tolerance = 1e-10);

}  // namespace csplab
