#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "csplab/basic_lp.hpp"
#include "csplab/dihp.hpp"
#include "csplab/errors.hpp"

using namespace csplab;

namespace {

// Loose upper tail for a chi-square statistic with df degrees of freedom.
double chi_square_limit(std::size_t df) { return static_cast<double>(df) + 6.0 * std::sqrt(2.0 * static_cast<double>(df)); }

double chi_square(const std::vector<std::size_t>& observed, const std::vector<double>& expected) {
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double d = static_cast<double>(observed[i]) - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

bool within_three_sigma(double hits, double trials, double p) {
  double sd = std::sqrt(trials * p * (1 - p));
  return std::abs(hits - trials * p) <= 3 * sd + 1e-9;
}

// Containment probability of a fixed d-matching in a uniform m-matching,
// by counting the m-matchings that extend it.
Rational containment_by_formula(std::size_t n, std::size_t k, std::size_t m, std::size_t d) {
  return Rational(matching_count(n - d, k, m - d)) / Rational(matching_count(n, k, m));
}

Instance single_dicut() { return Instance(dicut_family(), 2, {{{0, 1}, 0}}); }

DistributionLabeledGraph graph_of(const Instance& inst) { return build_gap_graph(inst, solve_basic_lp(inst)); }

}  // namespace

TEST_CASE("matching counts agree with enumeration") {
  for (std::size_t k : {1, 2, 3})
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::size_t m = 0; m <= n; ++m) {
        auto all = enumerate_matchings(standard_universe(k, n), m);
        CHECK(BigInt(static_cast<unsigned long>(all.size())) == matching_count(n, k, m));
        std::set<Matching> distinct(all.begin(), all.end());
        CHECK(distinct.size() == all.size());
        for (const auto& mt : all) {
          CHECK(is_matching(standard_universe(k, n), mt));
          CHECK(std::is_sorted(mt.begin(), mt.end()));
        }
      }
  CHECK_THROWS_AS(enumerate_matchings(standard_universe(3, 6), 6, 1000), CapExceeded);
  CHECK_THROWS_AS(enumerate_matchings(standard_universe(2, 2), 3), ValidationError);
}

TEST_CASE("universe and matching validation") {
  KUniverse bad{{{0, 1}, {1, 2}}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  KUniverse uneven{{{0, 1}, {2}}};
  CHECK_THROWS_AS(uneven.validate(), ValidationError);
  auto u = standard_universe(2, 3);
  CHECK(is_matching(u, {{0, 3}, {1, 4}}));
  CHECK_FALSE(is_matching(u, {{0, 3}, {0, 4}}));
  CHECK_FALSE(is_matching(u, {{3, 0}}));
  CHECK_FALSE(is_matching(u, {{0, 1}}));

  LabeledMatching y{2, 1, {{{0, 3}, {1, 0}}}};
  CHECK_NOTHROW(y.validate(u));
  y.m = 2;
  CHECK_THROWS_AS(y.validate(u), ValidationError);
  y.m = 1;
  y.edges[0].label = {2, 0};
  CHECK_THROWS_AS(y.validate(u), ValidationError);
}

TEST_CASE("uniform matching sampler") {
  auto u = standard_universe(2, 2);
  CHECK(sample_uniform_matching(u, 0, 1).empty());
  CHECK_THROWS_AS(sample_uniform_matching(u, 3, 1), ValidationError);

  auto perfect = enumerate_matchings(u, 2);
  REQUIRE(perfect.size() == 2);
  std::map<Matching, std::size_t> index;
  for (std::size_t i = 0; i < perfect.size(); ++i) index[perfect[i]] = i;
  std::vector<std::size_t> counts(perfect.size(), 0);
  const std::size_t draws = 10000;
  for (std::size_t t = 0; t < draws; ++t) {
    auto mt = sample_uniform_matching(u, 2, derive_seed(7, t));
    REQUIRE(index.count(mt));
    ++counts[index[mt]];
  }
  CHECK(chi_square(counts, {draws / 2.0, draws / 2.0}) <= chi_square_limit(1));

  // Every 2-matching of a 3x3x3 universe.
  auto u3 = standard_universe(3, 3);
  auto all = enumerate_matchings(u3, 2);
  index.clear();
  for (std::size_t i = 0; i < all.size(); ++i) index[all[i]] = i;
  counts.assign(all.size(), 0);
  const std::size_t many = 40 * all.size();
  for (std::size_t t = 0; t < many; ++t) ++counts[index.at(sample_uniform_matching(u3, 2, derive_seed(8, t)))];
  CHECK(chi_square(counts, std::vector<double>(all.size(), 40.0)) <= chi_square_limit(all.size() - 1));
}

TEST_CASE("containment frequency of a fixed matching") {
  // Exhaustive: every enumerable case with k = 2.
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 0; m <= std::min<std::size_t>(n, 3); ++m)
      for (std::size_t d = 0; d <= m; ++d) {
        auto u = standard_universe(2, n);
        Matching fixed;
        for (std::size_t t = 0; t < d; ++t) fixed.push_back({static_cast<Vertex>(t), static_cast<Vertex>(n + t)});
        auto all = enumerate_matchings(u, m);
        std::size_t hits = 0;
        for (const auto& mt : all)
          hits += std::includes(mt.begin(), mt.end(), fixed.begin(), fixed.end());
        CHECK(make_rational(static_cast<long>(hits), static_cast<long>(all.size())) ==
              containment_by_formula(n, 2, m, d));
      }
  CHECK(containment_by_formula(3, 2, 2, 2) == make_rational(1, 18));

  // Sampled: k = 3, n = 4, m = 2, d = 1.
  auto u = standard_universe(3, 4);
  HyperEdge e{1, 6, 11};
  std::size_t hits = 0;
  const std::size_t draws = 10000;
  for (std::size_t t = 0; t < draws; ++t) {
    auto mt = sample_uniform_matching(u, 2, derive_seed(9, t));
    hits += std::find(mt.begin(), mt.end(), e) != mt.end();
  }
  CHECK(within_three_sigma(hits, draws, containment_by_formula(4, 3, 2, 1).get_d()));
}

TEST_CASE("one-wise independence") {
  for (std::size_t N : {1, 2, 3})
    for (std::size_t k : {1, 2, 3}) {
      CHECK(check_one_wise_independent(OneWiseDistribution::uniform(N, k)));
      CHECK(check_one_wise_independent(OneWiseDistribution::diagonal(N, k)));
    }
  CHECK_FALSE(check_one_wise_independent(OneWiseDistribution::point_mass(2, 2, {1, 0})));
  CHECK_FALSE(check_one_wise_independent(OneWiseDistribution::point_mass(3, 1, {0})));
  CHECK(check_one_wise_independent(OneWiseDistribution::point_mass(1, 2, {0, 0})));
  // Uniform on {(0,1),(1,0)}.
  OneWiseDistribution anti(2, 2, {0, make_rational(1, 2), make_rational(1, 2), 0});
  CHECK(check_one_wise_independent(anti));
  CHECK_THROWS_AS(OneWiseDistribution(2, 2, {1, 1, 0, 0}), ValidationError);
  CHECK_THROWS_AS(OneWiseDistribution(2, 2, {1, 0, 0}), ValidationError);

  OneWiseDistribution skew(3, 1, {make_rational(1, 6), make_rational(1, 3), make_rational(1, 2)});
  std::vector<std::size_t> counts(3, 0);
  CounterRng rng(5);
  for (int t = 0; t < 6000; ++t) ++counts[skew.sample(rng)[0]];
  CHECK(chi_square(counts, {1000, 2000, 3000}) <= chi_square_limit(2));
}

TEST_CASE("kernel step matches its exact law") {
  // N = 2, k = 2, |U| = 2, m = 1: P(e, label) = 1/4 · mu(x|e - label).
  auto u = standard_universe(2, 2);
  OneWiseDistribution mu(2, 2, {make_rational(1, 8), make_rational(3, 8), make_rational(3, 8), make_rational(1, 8)});
  std::vector<Residue> x{1, 0, 1, 1};
  auto edges = enumerate_matchings(u, 1);
  REQUIRE(edges.size() == 4);
  std::vector<double> expected;
  std::map<std::pair<HyperEdge, Label>, std::size_t> cell;
  for (const auto& mt : edges)
    for (std::size_t idx = 0; idx < 4; ++idx) {
      auto label = vector_at(idx, 2, 2);
      Label w{(x[mt[0][0]] + 2 - label[0]) % 2, (x[mt[0][1]] + 2 - label[1]) % 2};
      cell[{mt[0], label}] = expected.size();
      expected.push_back(Rational(mu.prob(w) / 4).get_d());
    }
  const std::size_t draws = 16000;
  std::vector<std::size_t> counts(expected.size(), 0);
  for (std::size_t t = 0; t < draws; ++t) {
    auto y = markov_sample(u, 1, mu, x, derive_seed(10, t));
    REQUIRE(y.edges.size() == 1);
    ++counts[cell.at({y.edges[0].edge, y.edges[0].label})];
  }
  for (auto& e : expected) e *= draws;
  CHECK(chi_square(counts, expected) <= chi_square_limit(expected.size() - 1));

  // Point mass at zero copies x onto every edge.
  auto y = markov_sample(standard_universe(2, 3), 3, OneWiseDistribution::point_mass(3, 2, {0, 0}),
                         std::vector<Residue>{0, 1, 2, 2, 1, 0}, 4);
  for (const auto& le : y.edges) CHECK(le.label == Label{le.edge[0], static_cast<Residue>(5 - le.edge[1])});
  CHECK_THROWS_AS(markov_sample(u, 1, mu, std::vector<Residue>{0, 0}, 1), ValidationError);
}

TEST_CASE("edge label is uniform when x is uniform") {
  // Exact: average the kernel law over all x in Z_2^4 for any one-wise mu.
  auto u = standard_universe(2, 2);
  OneWiseDistribution mu(2, 2, {make_rational(1, 8), make_rational(3, 8), make_rational(3, 8), make_rational(1, 8)});
  for (const auto& mt : enumerate_matchings(u, 1)) {
    std::vector<Rational> law(4, Rational(0));
    for (std::size_t xs = 0; xs < 16; ++xs) {
      auto x = vector_at(xs, 2, 4);
      for (std::size_t widx = 0; widx < 4; ++widx) {
        auto w = vector_at(widx, 2, 2);
        Label label{(x[mt[0][0]] + 2 - w[0]) % 2, (x[mt[0][1]] + 2 - w[1]) % 2};
        law[vector_index(label, 2)] += mu.prob(w) / 16;
      }
    }
    for (const auto& p : law) CHECK(p == make_rational(1, 4));
  }
  // Sampled with the same x uniform.
  std::vector<std::size_t> counts(4, 0);
  for (std::size_t t = 0; t < 8000; ++t) {
    CounterRng rng(derive_seed(11, t));
    std::vector<Residue> x(4);
    for (auto& r : x) r = static_cast<Residue>(rng.below(2));
    ++counts[vector_index(markov_sample(u, 1, mu, x, rng).edges[0].label, 2)];
  }
  CHECK(chi_square(counts, std::vector<double>(4, 2000)) <= chi_square_limit(3));
}

TEST_CASE("gap graph of a single DICUT constraint") {
  auto g = graph_of(single_dicut());
  CHECK(g.N == 1);
  REQUIRE(g.mus.size() == 1);
  CHECK(g.mus[0].pmf() == std::vector<Rational>{Rational(1)});
  CHECK(g.q(0, 0) == 1);
  CHECK(g.q(1, 0) == 0);
  CHECK(g.p_star[0] == 1);
  CHECK_THROWS_AS(g.q(0, 1), ValidationError);
}

TEST_CASE("gap graph of the complete DICUT instance on four vertices") {
  auto inst = complete_dicut(4);
  auto sol = solve_basic_lp(inst);
  auto g = build_gap_graph(inst, sol);
  CHECK(g.N == 2);
  CHECK(g.edges.size() == inst.size());
  Rational total = 0;
  for (std::size_t i = 0; i < g.mus.size(); ++i) {
    CHECK(check_one_wise_independent(g.mus[i]));
    CHECK(g.mus[i].N() == 2);
    total += g.p_star[i];
  }
  CHECK(total / static_cast<unsigned long>(g.mus.size()) == lp_value(inst));
  for (VarId v = 0; v < 4; ++v) {
    CHECK(g.q_bounds[v].front() == 0);
    CHECK(g.q_bounds[v].back() == 2);
    for (Symbol s = 0; s < 2; ++s) {
      auto [lo, hi] = g.preimage(v, s);
      CHECK(Rational(static_cast<unsigned long>(hi - lo)) == sol.x(v, s) * 2);
      for (Residue r = lo; r < hi; ++r) CHECK(g.q(v, r) == s);
    }
  }

  // sample_mask draws from mus.
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<std::size_t> counts(4, 0);
    CounterRng rng(derive_seed(12, i));
    const std::size_t draws = 8000;
    for (std::size_t t = 0; t < draws; ++t) ++counts[vector_index(g.sample_mask(i, rng), 2)];
    std::vector<double> expected;
    std::vector<std::size_t> support;
    for (std::size_t idx = 0; idx < 4; ++idx) {
      if (sgn(g.mus[i].pmf()[idx]) == 0) {
        CHECK(counts[idx] == 0);
        continue;
      }
      support.push_back(counts[idx]);
      expected.push_back(g.mus[i].pmf()[idx].get_d() * draws);
    }
    if (support.size() > 1) CHECK(chi_square(support, expected) <= chi_square_limit(support.size() - 1));
  }
}

TEST_CASE("gap graph of the all-clause E2SAT instance") {
  auto g = graph_of(all_clause_e2sat(4));
  CHECK(g.N == 2);
  for (const auto& p : g.p_star) CHECK(p == 1);
  for (const auto& mu : g.mus) CHECK(check_one_wise_independent(mu));
}

TEST_CASE("gap graph rejects non-optimal and infeasible solutions") {
  auto inst = complete_dicut(4);
  auto bad_tau = integral_point(inst, Assignment{0, 0, 0, 0});
  CHECK_THROWS_AS(build_gap_graph(inst, bad_tau), ValidationError);

  auto sol = solve_basic_lp(inst);
  auto broken = sol;
  broken.x(0, 0) += make_rational(1, 4);
  CHECK_THROWS_AS(build_gap_graph(inst, broken), ValidationError);

  auto lied = sol;
  lied.objective += make_rational(1, 8);
  CHECK_THROWS_AS(build_gap_graph(inst, lied), ValidationError);

  auto small = solve_basic_lp(single_dicut());
  CHECK_THROWS_AS(build_gap_graph(inst, small), ValidationError);
  CHECK_THROWS_AS(build_gap_graph(Instance(dicut_family(), 2, {}), small), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK(DihpParams{6, make_rational(1, 6), 8, 0}.matched() == 1);
  CHECK_THROWS_AS(DihpParams({6, make_rational(1, 4), 8, 0}).matched(), ValidationError);
  CHECK_THROWS_AS(DihpParams({6, Rational(1), 8, 0}).validate(2), ValidationError);
  CHECK_THROWS_AS(DihpParams({6, Rational(0), 8, 0}).validate(2), ValidationError);
  CHECK_THROWS_AS(DihpParams({6, make_rational(1, 6), 0, 0}).validate(2), ValidationError);
  CHECK_THROWS_AS(DihpParams({6, make_rational(1, 6), 8, 0}).validate(2, true), ValidationError);
  DihpParams tiny{800000000, make_rational(1, 800000000), 1, 0};
  CHECK_NOTHROW(tiny.validate(2, true));
  auto g = graph_of(complete_dicut(4));
  CHECK_THROWS_AS(sample_no(g, {6, make_rational(1, 4), 2, 0}), ValidationError);
}

TEST_CASE("yes and no samples have the right shape and are reproducible") {
  auto g = graph_of(complete_dicut(3));
  DihpParams params{6, make_rational(1, 2), 3, 21};
  auto a = sample_yes(g, params), b = sample_yes(g, params);
  CHECK(a.hidden == b.hidden);
  CHECK(a.input == b.input);
  CHECK(a.hidden.size() == 18);
  auto no = sample_no(g, params);
  CHECK(no == sample_no(g, params));
  for (const auto* in : {&a.input, &no}) {
    REQUIRE(in->players.size() == g.edges.size() * 3);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& y = in->player(i, j);
        CHECK(y.m == 3);
        CHECK_NOTHROW(y.validate(edge_universe(g, i, 6)));
      }
  }
  params.seed = 22;
  CHECK_FALSE(sample_yes(g, params).input == a.input);
}

TEST_CASE("degenerate modulus gives zero labels and a constant lift") {
  auto g = graph_of(single_dicut());
  auto y = sample_yes(g, {5, make_rational(2, 5), 4, 3});
  for (const auto& p : y.input.players)
    for (const auto& le : p.edges) CHECK(le.label == Label{0, 0});
  auto inst = reduce_to_instance(y.input, g);
  CHECK(inst.size() == 8);
  auto tau = lifted_assignment(y.hidden, g, 5);
  for (std::size_t l = 0; l < 5; ++l) {
    CHECK(tau[blowup_vertex(0, l, 5)] == 1);
    CHECK(tau[blowup_vertex(1, l, 5)] == 0);
  }
  CHECK(instance_value(inst, tau) == 1);
  CHECK_THROWS_AS(lifted_assignment(std::vector<Residue>(3, 0), g, 5), ValidationError);
}

TEST_CASE("single player label marginal in yes samples is uniform") {
  auto g = graph_of(complete_dicut(4));
  std::vector<std::size_t> counts(4, 0);
  const std::size_t draws = 10000;
  for (std::size_t t = 0; t < draws; ++t) {
    auto y = sample_yes(g, {2, make_rational(1, 2), 1, derive_seed(13, t)});
    ++counts[vector_index(y.input.player(0, 0).edges.at(0).label, 2)];
  }
  CHECK(chi_square(counts, std::vector<double>(4, draws / 4.0)) <= chi_square_limit(3));
}

TEST_CASE("no-sample labels are uniform and players independent") {
  auto g = graph_of(complete_dicut(4));
  const std::size_t draws = 10000;
  // Plug-in mutual information between the first labels of two players.
  auto mutual_information = [&](bool yes) {
    std::vector<std::vector<double>> joint(4, std::vector<double>(4, 0));
    std::vector<std::size_t> first(4, 0);
    for (std::size_t t = 0; t < draws; ++t) {
      DihpParams p{1, make_rational(1, 2), 2, derive_seed(14, t)};
      p.n = 2;
      auto in = yes ? sample_yes(g, p).input : sample_no(g, p);
      auto a = vector_index(in.player(0, 0).edges.at(0).label, 2);
      auto b = vector_index(in.player(0, 1).edges.at(0).label, 2);
      joint[a][b] += 1.0 / draws;
      ++first[a];
    }
    if (!yes) CHECK(chi_square(first, std::vector<double>(4, draws / 4.0)) <= chi_square_limit(3));
    std::vector<double> pa(4, 0), pb(4, 0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        pa[a] += joint[a][b];
        pb[b] += joint[a][b];
      }
    double mi = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (joint[a][b] > 0) mi += joint[a][b] * std::log(joint[a][b] / (pa[a] * pb[b]));
    return mi;
  };
  // The plug-in bias is about 9 / (2 · 10^4) nats.
  CHECK(mutual_information(false) < 0.003);
  // Players sharing hidden values are visibly correlated.
  CHECK(mutual_information(true) > 0.01);
}

TEST_CASE("reduction keeps exactly the zero-labeled edges") {
  auto g = graph_of(complete_dicut(3));
  auto in = sample_no(g, {4, make_rational(3, 4), 2, 31});
  auto inst = reduce_to_instance(in, g);
  std::vector<Constraint> expected;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (const auto& le : in.player(i, j).edges)
        if (le.label == Label{0, 0}) expected.push_back({{le.edge[0], le.edge[1]}, g.preds[i]});
  CHECK(inst.constraints() == expected);
  CHECK(inst.num_vars() == 12);

  auto zeroed = in;
  for (auto& p : zeroed.players)
    for (auto& le : p.edges) le.label = {1, 1};
  CHECK(reduce_to_instance(zeroed, g).empty());

  auto truncated = in;
  truncated.players.pop_back();
  CHECK_THROWS_AS(reduce_to_instance(truncated, g), ValidationError);
  auto clash = in;
  clash.players[0].edges[0].edge = clash.players[0].edges[1].edge;
  CHECK_THROWS_AS(reduce_to_instance(clash, g), ValidationError);
}

TEST_CASE("point-mass masks with zero hidden values place every edge") {
  // x̃ ≡ 0 and mu = δ_0 make every label zero; built by hand on a one-edge graph.
  auto u = standard_universe(2, 4);
  auto y = markov_sample(u, 3, OneWiseDistribution::point_mass(2, 2, {0, 0}), std::vector<Residue>(8, 0), 6);
  for (const auto& le : y.edges) CHECK(le.label == Label{0, 0});
  auto g = graph_of(single_dicut());
  JointInput in{1, 2, 4, 3, 1, {y}};
  in.players[0].N = 1;
  CHECK(reduce_to_instance(in, g).size() == 3);
}

TEST_CASE("placed constraints per player average alpha n / N^k") {
  auto g = graph_of(complete_dicut(4));
  const std::size_t samples = 200;
  double placed = 0, players = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    auto y = sample_yes(g, {8, make_rational(1, 2), 1, derive_seed(15, t)});
    placed += static_cast<double>(reduce_to_instance(y.input, g).size());
    players += static_cast<double>(y.input.players.size());
  }
  // Each of the 4 matched edges is placed with probability 1/4.
  CHECK(within_three_sigma(placed, players * 4, 0.25));
}

TEST_CASE("placed constraints are satisfied by the lift with probability p*") {
  auto g = graph_of(complete_dicut(3));
  std::vector<double> placed(g.edges.size(), 0), satisfied(g.edges.size(), 0);
  for (std::size_t t = 0; placed[0] < 1000 || placed.back() < 1000; ++t) {
    auto y = sample_yes(g, {4, make_rational(1, 2), 2, derive_seed(16, t)});
    auto tau = lifted_assignment(y.hidden, g, 4);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (const auto& le : y.input.player(i, j).edges) {
          if (le.label != Label{0, 0}) continue;
          placed[i] += 1;
          std::vector<Symbol> tuple{tau[le.edge[0]], tau[le.edge[1]]};
          satisfied[i] += g.family->eval(g.preds[i], g.family->tuple_index(tuple));
        }
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    double p = g.p_star[i].get_d();
    if (p == 0 || p == 1)
      CHECK(satisfied[i] == p * placed[i]);
    else
      CHECK(within_three_sigma(satisfied[i], placed[i], p));
  }
}

TEST_CASE("perfect completeness for the all-clause E2SAT gap graph") {
  auto g = graph_of(all_clause_e2sat(4));
  for (std::size_t t = 0; t < 100; ++t) {
    auto y = sample_yes(g, {4, make_rational(1, 2), 3, derive_seed(17, t)});
    auto inst = reduce_to_instance(y.input, g);
    if (inst.empty()) continue;
    CHECK(instance_value(inst, lifted_assignment(y.hidden, g, 4)) == 1);
  }
}

TEST_CASE("JSON round trip of joint inputs and graph summary") {
  auto g = graph_of(complete_dicut(3));
  auto y = sample_yes(g, {3, make_rational(2, 3), 2, 41});
  auto j = to_json(y.input);
  CHECK(joint_input_from_json(j) == y.input);
  CHECK(joint_input_from_json(nlohmann::json::parse(j.dump())) == y.input);
  auto reordered = j;
  std::swap(reordered["players"][0], reordered["players"][1]);
  CHECK_THROWS_AS(joint_input_from_json(reordered), ValidationError);
  auto broken = j;
  broken.erase("K");
  CHECK_THROWS_AS(joint_input_from_json(broken), ValidationError);

  auto gj = to_json(g);
  CHECK(gj["N"] == 2);
  CHECK(gj["edges"].size() == g.edges.size());
  Rational mass = 0;
  for (auto& [key, p] : gj["edges"][0]["mu"].items()) mass += parse_rational(p.get<std::string>());
  CHECK(mass == 1);
}

TEST_CASE("certified parameters") {
  auto g = graph_of(complete_dicut(4));
  auto cert = certified_parameters(g, make_rational(1, 10));
  CHECK(cert.alpha_max == make_rational(1, 800000000));
  // 100 · 8·10^8 · 100 · 2^4 · 4.
  CHECK(cert.k_factor == Rational(BigInt("512000000000000")));
  CHECK(cert.k_min == doctest::Approx(5.12e14 * std::log(2.0)));
  auto loose = certified_parameters(g, make_rational(1, 1000000000));
  CHECK(loose.alpha_max == make_rational(1, 200000000000L));
  CHECK_THROWS_AS(certified_parameters(g, Rational(0)), ValidationError);
  CHECK(to_json(cert)["alpha_max"] == "1/800000000");
}

TEST_CASE("experiment driver") {
  DihpExperimentConfig cfg;
  cfg.params = {4, make_rational(1, 4), 4, 3};
  cfg.yes_samples = 6;
  cfg.no_samples = 5;
  auto base = complete_dicut(3);
  auto ex = run_dihp_experiment(base, cfg);
  CHECK(ex.c == lp_value(base));
  CHECK(ex.s == brute_force_value(base).value);
  CHECK(ex.N == 2);
  CHECK(ex.count("yes") == 6);
  CHECK(ex.count("no") == 5);
  for (const auto& r : ex.rows) {
    CHECK(r.exact);
    CHECK(r.constraints > 0);
    CHECK(r.value_lb == r.value_ub);
  }
  auto again = run_dihp_experiment(base, cfg);
  CHECK(experiment_csv(again) == experiment_csv(ex));
  auto csv = experiment_csv(ex);
  CHECK(csv.rfind("seed,case,value_lb,value_ub,exact,m_Y,resamples,decision\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);

  auto e2 = run_dihp_experiment(all_clause_e2sat(4), {{4, make_rational(1, 2), 2, 5}, make_rational(1, 10), 10, 0});
  for (const auto& r : e2.rows) CHECK(r.lifted_all);
}
