#include "csplab/matching.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "csplab/errors.hpp"

namespace csplab {

std::size_t KUniverse::span() const {
  std::size_t top = 0;
  for (const auto& part : parts)
    for (Vertex v : part) top = std::max<std::size_t>(top, v + 1);
  return top;
}

void KUniverse::validate() const {
  if (parts.empty()) throw ValidationError("universe needs at least one part");
  std::unordered_set<Vertex> seen;
  for (const auto& part : parts) {
    if (part.size() != parts.front().size()) throw ValidationError("universe parts must have equal size");
    for (Vertex v : part)
      if (!seen.insert(v).second) throw ValidationError("universe parts must be disjoint");
  }
}

KUniverse standard_universe(std::size_t k, std::size_t n) {
  KUniverse u;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Vertex> part(n);
    std::iota(part.begin(), part.end(), static_cast<Vertex>(j * n));
    u.parts.push_back(std::move(part));
  }
  return u;
}

Matching LabeledMatching::support() const {
  Matching out;
  for (const auto& le : edges) out.push_back(le.edge);
  return out;
}

const Label* LabeledMatching::find(const HyperEdge& edge) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), edge,
                             [](const LabeledEdge& le, const HyperEdge& e) { return le.edge < e; });
  return it != edges.end() && it->edge == edge ? &it->label : nullptr;
}

void LabeledMatching::validate(const KUniverse& universe) const {
  if (N == 0) throw ValidationError("labeled matching needs N >= 1");
  if (edges.size() != m) throw ValidationError("labeled matching has " + std::to_string(edges.size()) +
                                               " edges, declared " + std::to_string(m));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && !(edges[i - 1].edge < edges[i].edge)) throw ValidationError("labeled edges must be sorted");
    if (edges[i].label.size() != universe.k()) throw ValidationError("label length must equal k");
    for (Residue r : edges[i].label)
      if (r >= N) throw ValidationError("label residue out of range");
  }
  if (!is_matching(universe, support())) throw ValidationError("support is not a matching in the universe");
}

bool is_matching(const KUniverse& universe, const Matching& matching) {
  std::vector<std::unordered_set<Vertex>> members(universe.k());
  for (std::size_t j = 0; j < universe.k(); ++j) members[j].insert(universe.parts[j].begin(), universe.parts[j].end());
  std::unordered_set<Vertex> used;
  for (const auto& e : matching) {
    if (e.size() != universe.k()) return false;
    for (std::size_t j = 0; j < e.size(); ++j)
      if (!members[j].count(e[j]) || !used.insert(e[j]).second) return false;
  }
  return true;
}

BigInt matching_count(std::size_t n, std::size_t k, std::size_t m) {
  if (m > n) return 0;
  BigInt choose, falling = 1;
  mpz_bin_uiui(choose.get_mpz_t(), n, m);
  for (std::size_t i = 0; i < m; ++i) falling *= static_cast<unsigned long>(n - i);
  BigInt total = choose;
  for (std::size_t j = 1; j < k; ++j) total *= falling;
  return total;
}

namespace {

void combinations(std::size_t n, std::size_t m, std::size_t start, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == m) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i + (m - cur.size()) <= n; ++i) {
    cur.push_back(i);
    combinations(n, m, i + 1, cur, out);
    cur.pop_back();
  }
}

void arrangements(std::size_t n, std::size_t m, std::vector<bool>& used, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == m) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    cur.push_back(i);
    arrangements(n, m, used, cur, out);
    cur.pop_back();
    used[i] = false;
  }
}

}  // namespace

std::vector<Matching> enumerate_matchings(const KUniverse& universe, std::size_t m, std::size_t cap) {
  universe.validate();
  const std::size_t n = universe.size(), k = universe.k();
  if (m > n) throw ValidationError("matching size exceeds the universe");
  if (matching_count(n, k, m) > cap) throw CapExceeded("matching enumeration exceeds cap " + std::to_string(cap));

  std::vector<std::vector<std::size_t>> combos, arrs;
  std::vector<std::size_t> cur;
  combinations(n, m, 0, cur, combos);
  std::vector<bool> used(n, false);
  arrangements(n, m, used, cur, arrs);

  std::vector<Matching> out;
  std::vector<std::size_t> digit(k, 0);
  for (const auto& combo : combos) {
    std::fill(digit.begin(), digit.end(), 0);
    for (;;) {
      Matching mt(m, HyperEdge(k));
      for (std::size_t t = 0; t < m; ++t) {
        mt[t][0] = universe.parts[0][combo[t]];
        for (std::size_t j = 1; j < k; ++j) mt[t][j] = universe.parts[j][arrs[digit[j]][t]];
      }
      std::sort(mt.begin(), mt.end());
      out.push_back(std::move(mt));
      // Last part varies fastest.
      bool carry = true;
      for (std::size_t j = k; carry && j > 1;) {
        --j;
        if (++digit[j] < arrs.size())
          carry = false;
        else
          digit[j] = 0;
      }
      if (carry) break;
    }
  }
  return out;
}

Matching sample_uniform_matching(const KUniverse& universe, std::size_t m, CounterRng& rng) {
  const std::size_t n = universe.size(), k = universe.k();
  if (m > n) throw ValidationError("matching size " + std::to_string(m) + " exceeds universe size " + std::to_string(n));
  Matching mt(m, HyperEdge(k));
  std::vector<std::size_t> pos(n);
  for (std::size_t j = 0; j < k; ++j) {
    std::iota(pos.begin(), pos.end(), 0);
    for (std::size_t t = 0; t < m; ++t) {
      auto pick = t + static_cast<std::size_t>(rng.below(n - t));
      std::swap(pos[t], pos[pick]);
      mt[t][j] = universe.parts[j][pos[t]];
    }
  }
  std::sort(mt.begin(), mt.end());
  return mt;
}

Matching sample_uniform_matching(const KUniverse& universe, std::size_t m, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_uniform_matching(universe, m, rng);
}

std::size_t vector_index(std::span<const Residue> v, std::size_t N) {
  std::size_t idx = 0;
  for (Residue r : v) idx = idx * N + r;
  return idx;
}

Label vector_at(std::size_t index, std::size_t N, std::size_t k) {
  Label v(k);
  for (std::size_t j = k; j-- > 0;) {
    v[j] = static_cast<Residue>(index % N);
    index /= N;
  }
  return v;
}

std::size_t group_size(std::size_t N, std::size_t k) {
  std::size_t s = 1;
  for (std::size_t j = 0; j < k; ++j) {
    if (s > (std::size_t{1} << 40) / std::max<std::size_t>(N, 1)) throw CapExceeded("Z_N^k too large to enumerate");
    s *= N;
  }
  return s;
}

OneWiseDistribution::OneWiseDistribution(std::size_t N, std::size_t k, std::vector<Rational> pmf)
    : N_(N), k_(k), pmf_(std::move(pmf)) {
  if (N_ == 0 || k_ == 0) throw ValidationError("distribution needs N >= 1 and k >= 1");
  if (pmf_.size() != group_size(N_, k_)) throw ValidationError("pmf must have N^k entries");
  Rational total = 0;
  BigInt den = 1;
  for (const auto& p : pmf_) {
    if (sgn(p) < 0) throw ValidationError("pmf entries must be nonnegative");
    total += p;
    den = lcm(den, p.get_den());
  }
  if (total != 1) throw ValidationError("pmf must sum to 1, got " + to_string(total));
  if (!den.fits_ulong_p()) throw CapExceeded("pmf denominators too large for exact sampling");
  std::uint64_t acc = 0;
  for (const auto& p : pmf_) {
    BigInt w = p.get_num() * (den / p.get_den());
    acc += w.get_ui();
    cumulative_.push_back(acc);
  }
}

OneWiseDistribution OneWiseDistribution::uniform(std::size_t N, std::size_t k) {
  auto size = group_size(N, k);
  return OneWiseDistribution(N, k, std::vector<Rational>(size, make_rational(1, static_cast<long>(size))));
}

OneWiseDistribution OneWiseDistribution::diagonal(std::size_t N, std::size_t k) {
  std::vector<Rational> pmf(group_size(N, k), Rational(0));
  for (Residue t = 0; t < N; ++t) pmf[vector_index(Label(k, t), N)] = make_rational(1, static_cast<long>(N));
  return OneWiseDistribution(N, k, std::move(pmf));
}

OneWiseDistribution OneWiseDistribution::point_mass(std::size_t N, std::size_t k, const Label& at) {
  if (at.size() != k) throw ValidationError("point mass location must have k coordinates");
  std::vector<Rational> pmf(group_size(N, k), Rational(0));
  pmf.at(vector_index(at, N)) = 1;
  return OneWiseDistribution(N, k, std::move(pmf));
}

std::vector<Rational> OneWiseDistribution::marginal(std::size_t j) const {
  if (j >= k_) throw ValidationError("marginal coordinate out of range");
  std::vector<Rational> out(N_, Rational(0));
  for (std::size_t idx = 0; idx < pmf_.size(); ++idx) out[vector_at(idx, N_, k_)[j]] += pmf_[idx];
  return out;
}

Label OneWiseDistribution::sample(CounterRng& rng) const {
  auto r = rng.below(cumulative_.back());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return vector_at(static_cast<std::size_t>(it - cumulative_.begin()), N_, k_);
}

bool check_one_wise_independent(const OneWiseDistribution& mu) {
  const Rational share = make_rational(1, static_cast<long>(mu.N()));
  for (std::size_t j = 0; j < mu.k(); ++j)
    for (const auto& p : mu.marginal(j))
      if (p != share) return false;
  return true;
}

LabeledMatching markov_sample(const KUniverse& universe, std::size_t m, const OneWiseDistribution& mu,
                              std::span<const Residue> x, CounterRng& rng) {
  if (mu.k() != universe.k()) throw ValidationError("distribution arity does not match the universe");
  if (x.size() < universe.span()) throw ValidationError("seed vector does not cover the universe");
  const auto N = mu.N();
  LabeledMatching out;
  out.N = N;
  out.m = m;
  for (auto& e : sample_uniform_matching(universe, m, rng)) {
    auto w = mu.sample(rng);
    Label label(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (x[e[j]] >= N) throw ValidationError("seed vector entry out of range");
      label[j] = static_cast<Residue>((x[e[j]] + N - w[j]) % N);
    }
    out.edges.push_back({std::move(e), std::move(label)});
  }
  return out;
}

LabeledMatching markov_sample(const KUniverse& universe, std::size_t m, const OneWiseDistribution& mu,
                              std::span<const Residue> x, std::uint64_t seed) {
  CounterRng rng(seed);
  return markov_sample(universe, m, mu, x, rng);
}

LabeledMatching uniform_labeled_matching(const KUniverse& universe, std::size_t m, std::size_t N, CounterRng& rng) {
  LabeledMatching out;
  out.N = N;
  out.m = m;
  for (auto& e : sample_uniform_matching(universe, m, rng)) {
    Label label(e.size());
    for (auto& r : label) r = static_cast<Residue>(rng.below(N));
    out.edges.push_back({std::move(e), std::move(label)});
  }
  return out;
}

}  // namespace csplab
