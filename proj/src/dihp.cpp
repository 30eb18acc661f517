#include "csplab/dihp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csplab/errors.hpp"

namespace csplab {

Symbol DistributionLabeledGraph::q(VarId v, Residue r) const {
  const auto& bounds = q_bounds.at(v);
  if (r >= N) throw ValidationError("residue out of range");
  auto it = std::upper_bound(bounds.begin(), bounds.end(), static_cast<std::uint64_t>(r));
  return static_cast<Symbol>(it - bounds.begin() - 1);
}

std::pair<Residue, Residue> DistributionLabeledGraph::preimage(VarId v, Symbol s) const {
  const auto& bounds = q_bounds.at(v);
  return {static_cast<Residue>(bounds.at(s)), static_cast<Residue>(bounds.at(s + 1))};
}

Label DistributionLabeledGraph::sample_mask(std::size_t i, CounterRng& rng) const {
  const auto& mass = tuple_mass.at(i);
  // N·z is integral and sums to N.
  auto r = rng.below(N);
  std::size_t b = 0;
  for (BigInt acc = 0; b < mass.size(); ++b) {
    acc += BigInt(mass[b] * static_cast<unsigned long>(N));
    if (acc > r) break;
  }
  auto tuple = family->tuple_at(b);
  Label w(k());
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto [lo, hi] = preimage(edges[i][j], tuple[j]);
    w[j] = lo + static_cast<Residue>(rng.below(hi - lo));
  }
  return w;
}

DistributionLabeledGraph build_gap_graph(const Instance& instance, const LpSolution& sol) {
  if (instance.empty()) throw ValidationError("gap graph needs a nonempty instance");
  const auto& fam = instance.family();
  const std::size_t q = static_cast<std::size_t>(fam.alphabet()), k = static_cast<std::size_t>(fam.arity());
  if (sol.num_vars != instance.num_vars() || sol.num_constraints != instance.size() || sol.alphabet != q ||
      sol.tuple_count != fam.tuple_count())
    throw ValidationError("LP solution shape does not match the instance");
  if (!is_feasible_point(instance, sol)) throw ValidationError("LP solution is infeasible");
  Rational objective = 0;
  for (std::size_t i = 0; i < instance.size(); ++i)
    for (std::size_t b = 0; b < fam.tuple_count(); ++b)
      if (fam.eval(instance.constraint(i).pred, b)) objective += sol.z(i, b);
  objective /= static_cast<unsigned long>(instance.size());
  if (objective != sol.objective) throw ValidationError("LP solution objective does not match its z values");
  if (objective != lp_value(instance))
    throw ValidationError("LP solution is not optimal: " + to_string(objective) + " vs " + to_string(lp_value(instance)));

  BigInt den = 1;
  for (const auto& v : sol.x_values) den = lcm(den, v.get_den());
  for (const auto& v : sol.z_values) den = lcm(den, v.get_den());
  if (den > (1u << 20)) throw CapExceeded("common denominator " + den.get_str() + " too large");

  DistributionLabeledGraph g;
  g.family = instance.family_ptr();
  g.num_pre_vertices = instance.num_vars();
  g.N = den.get_ui();
  const auto N = static_cast<unsigned long>(g.N);
  for (VarId v = 0; v < instance.num_vars(); ++v) {
    std::vector<std::uint64_t> bounds{0};
    for (Symbol s = 0; s < q; ++s) bounds.push_back(bounds.back() + BigInt(sol.x(v, s) * N).get_ui());
    g.q_bounds.push_back(std::move(bounds));
  }

  const auto size = group_size(g.N, k);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const auto& c = instance.constraint(i);
    g.edges.emplace_back(c.scope.begin(), c.scope.end());
    g.preds.push_back(c.pred);
    std::vector<Rational> mass(fam.tuple_count()), pmf(size, Rational(0));
    Rational p = 0;
    for (std::size_t b = 0; b < fam.tuple_count(); ++b) {
      mass[b] = sol.z(i, b);
      if (fam.eval(c.pred, b)) p += mass[b];
      if (sgn(mass[b]) == 0) continue;
      auto tuple = fam.tuple_at(b);
      std::vector<std::pair<Residue, Residue>> box;
      unsigned long volume = 1;
      for (std::size_t j = 0; j < k; ++j) {
        box.push_back(g.preimage(c.scope[j], tuple[j]));
        volume *= box.back().second - box.back().first;
      }
      const Rational share = mass[b] / volume;
      Label w(k);
      for (std::size_t j = 0; j < k; ++j) w[j] = box[j].first;
      for (;;) {
        pmf[vector_index(w, g.N)] += share;
        bool carry = true;
        for (std::size_t j = k; carry && j > 0;) {
          --j;
          if (++w[j] < box[j].second)
            carry = false;
          else
            w[j] = box[j].first;
        }
        if (carry) break;
      }
    }
    g.mus.emplace_back(g.N, k, std::move(pmf));
    if (!check_one_wise_independent(g.mus.back()))
      throw std::logic_error("edge distribution is not one-wise independent");
    g.tuple_mass.push_back(std::move(mass));
    g.p_star.push_back(std::move(p));
  }
  return g;
}

std::size_t DihpParams::matched() const {
  Rational an = alpha * static_cast<unsigned long>(n);
  if (an.get_den() != 1) throw ValidationError("alpha*n = " + to_string(an) + " is not an integer");
  if (sgn(an) < 0 || an > static_cast<unsigned long>(n)) throw ValidationError("alpha*n out of range");
  return an.get_num().get_ui();
}

void DihpParams::validate(std::size_t k, bool certified) const {
  if (n == 0) throw ValidationError("n must be positive");
  if (K == 0) throw ValidationError("K must be positive");
  if (sgn(alpha) <= 0 || alpha >= 1) throw ValidationError("alpha must lie in (0, 1)");
  matched();
  if (certified) {
    Rational cap = Rational(1) / (BigInt(100000000) * static_cast<unsigned long>(k * k * k));
    if (alpha > cap) throw ValidationError("certified mode needs alpha <= 10^-8 k^-3");
  }
}

KUniverse edge_universe(const DistributionLabeledGraph& graph, std::size_t i, std::size_t n) {
  KUniverse u;
  for (VarId v : graph.edges.at(i)) {
    std::vector<Vertex> part(n);
    for (std::size_t l = 0; l < n; ++l) part[l] = blowup_vertex(v, l, n);
    u.parts.push_back(std::move(part));
  }
  return u;
}

namespace {

JointInput empty_input(const DistributionLabeledGraph& graph, const DihpParams& params) {
  params.validate(graph.k());
  JointInput in;
  in.N = graph.N;
  in.k = graph.k();
  in.n = params.n;
  in.matched = params.matched();
  in.K = params.K;
  return in;
}

}  // namespace

YesSample sample_yes(const DistributionLabeledGraph& graph, const DihpParams& params) {
  YesSample out;
  out.input = empty_input(graph, params);
  CounterRng hidden_rng(derive_seed(params.seed, 0));
  out.hidden.resize(graph.num_pre_vertices * params.n);
  for (auto& r : out.hidden) r = static_cast<Residue>(hidden_rng.below(graph.N));
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    auto u = edge_universe(graph, i, params.n);
    for (std::size_t j = 0; j < params.K; ++j) {
      CounterRng rng(derive_seed(params.seed, 1, i, j));
      LabeledMatching y;
      y.N = graph.N;
      y.m = out.input.matched;
      for (auto& e : sample_uniform_matching(u, y.m, rng)) {
        auto w = graph.sample_mask(i, rng);
        Label label(e.size());
        for (std::size_t t = 0; t < e.size(); ++t)
          label[t] = static_cast<Residue>((out.hidden[e[t]] + graph.N - w[t]) % graph.N);
        y.edges.push_back({std::move(e), std::move(label)});
      }
      out.input.players.push_back(std::move(y));
    }
  }
  return out;
}

JointInput sample_no(const DistributionLabeledGraph& graph, const DihpParams& params) {
  auto in = empty_input(graph, params);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    auto u = edge_universe(graph, i, params.n);
    for (std::size_t j = 0; j < params.K; ++j) {
      CounterRng rng(derive_seed(params.seed, 2, i, j));
      in.players.push_back(uniform_labeled_matching(u, in.matched, graph.N, rng));
    }
  }
  return in;
}

Instance reduce_to_instance(const JointInput& input, const DistributionLabeledGraph& graph) {
  if (input.N != graph.N || input.k != graph.k() || input.players.size() != graph.edges.size() * input.K)
    throw ValidationError("joint input shape does not match the gap graph");
  std::vector<Constraint> cs;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    auto u = edge_universe(graph, i, input.n);
    for (std::size_t j = 0; j < input.K; ++j) {
      const auto& y = input.player(i, j);
      if (y.m != input.matched) throw ValidationError("player matching size differs from the declared one");
      y.validate(u);
      for (const auto& le : y.edges)
        if (std::all_of(le.label.begin(), le.label.end(), [](Residue r) { return r == 0; }))
          cs.push_back({std::vector<VarId>(le.edge.begin(), le.edge.end()), graph.preds[i]});
    }
  }
  return Instance(graph.family, graph.num_pre_vertices * input.n, std::move(cs));
}

Assignment lifted_assignment(std::span<const Residue> hidden, const DistributionLabeledGraph& graph, std::size_t n) {
  if (hidden.size() != graph.num_pre_vertices * n) throw ValidationError("hidden vector has the wrong length");
  Assignment tau(hidden.size());
  for (VarId v = 0; v < graph.num_pre_vertices; ++v)
    for (std::size_t l = 0; l < n; ++l) tau[blowup_vertex(v, l, n)] = graph.q(v, hidden[blowup_vertex(v, l, n)]);
  return tau;
}

CertifiedParams certified_parameters(const DistributionLabeledGraph& graph, const Rational& epsilon) {
  if (sgn(epsilon) <= 0 || epsilon >= 1) throw ValidationError("epsilon must lie in (0, 1)");
  const auto k = static_cast<unsigned long>(graph.k());
  CertifiedParams out;
  out.epsilon = epsilon;
  Rational structural = Rational(1) / (BigInt(100000000) * (k * k * k));
  Rational accuracy = epsilon / (100 * k);
  out.alpha_max = std::min(structural, accuracy);
  BigInt n_pow;
  mpz_pow_ui(n_pow.get_mpz_t(), BigInt(static_cast<unsigned long>(graph.N)).get_mpz_t(), 2 * k);
  out.k_factor = Rational(100) / out.alpha_max / (epsilon * epsilon) * Rational(n_pow) *
                 static_cast<unsigned long>(graph.num_pre_vertices);
  out.log_alphabet = std::log(static_cast<double>(graph.family->alphabet()));
  out.k_min = out.k_factor.get_d() * out.log_alphabet;
  return out;
}

namespace {

nlohmann::json rational_json(const Rational& q) { return to_string(q); }

}  // namespace

nlohmann::json to_json(const DistributionLabeledGraph& graph) {
  nlohmann::json j;
  j["vertices"] = graph.num_pre_vertices;
  j["N"] = graph.N;
  j["k"] = graph.k();
  j["q"] = graph.q_bounds;
  j["edges"] = nlohmann::json::array();
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    nlohmann::json e;
    e["scope"] = graph.edges[i];
    e["pred"] = graph.family->name(graph.preds[i]);
    e["p_star"] = rational_json(graph.p_star[i]);
    auto& mu = e["mu"] = nlohmann::json::object();
    const auto& pmf = graph.mus[i].pmf();
    for (std::size_t idx = 0; idx < pmf.size(); ++idx) {
      if (sgn(pmf[idx]) == 0) continue;
      std::string key;
      for (Residue r : vector_at(idx, graph.N, graph.k())) key += (key.empty() ? "" : ",") + std::to_string(r);
      mu[key] = rational_json(pmf[idx]);
    }
    j["edges"].push_back(std::move(e));
  }
  return j;
}

nlohmann::json to_json(const JointInput& input) {
  nlohmann::json j;
  j["N"] = input.N;
  j["k"] = input.k;
  j["n"] = input.n;
  j["matched"] = input.matched;
  j["K"] = input.K;
  j["players"] = nlohmann::json::array();
  for (std::size_t idx = 0; idx < input.players.size(); ++idx) {
    nlohmann::json p;
    p["edge"] = idx / input.K;
    p["copy"] = idx % input.K;
    p["labeled_edges"] = nlohmann::json::array();
    for (const auto& le : input.players[idx].edges)
      p["labeled_edges"].push_back({{"edge", le.edge}, {"label", le.label}});
    j["players"].push_back(std::move(p));
  }
  return j;
}

JointInput joint_input_from_json(const nlohmann::json& j) {
  try {
    JointInput in;
    in.N = j.at("N").get<std::size_t>();
    in.k = j.at("k").get<std::size_t>();
    in.n = j.at("n").get<std::size_t>();
    in.matched = j.at("matched").get<std::size_t>();
    in.K = j.at("K").get<std::size_t>();
    if (in.K == 0) throw ValidationError("joint input needs K >= 1");
    for (std::size_t idx = 0; idx < j.at("players").size(); ++idx) {
      const auto& p = j["players"][idx];
      if (p.at("edge").get<std::size_t>() != idx / in.K || p.at("copy").get<std::size_t>() != idx % in.K)
        throw ValidationError("players must be listed in (edge, copy) order");
      LabeledMatching y;
      y.N = in.N;
      y.m = in.matched;
      for (const auto& le : p.at("labeled_edges"))
        y.edges.push_back({le.at("edge").get<HyperEdge>(), le.at("label").get<Label>()});
      in.players.push_back(std::move(y));
    }
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed joint input: ") + e.what());
  }
}

nlohmann::json to_json(const CertifiedParams& cert) {
  return {{"epsilon", rational_json(cert.epsilon)},
          {"alpha_max", rational_json(cert.alpha_max)},
          {"K_factor", rational_json(cert.k_factor)},
          {"log_alphabet", cert.log_alphabet},
          {"K_min", cert.k_min}};
}

namespace {

// Reduced instances are sparse; past this size branch and bound over
// components is far faster than enumeration and equally exact.
constexpr double kBruteForceLimit = 1 << 16;

}  // namespace

ValueBounds estimate_value(const Instance& instance, std::uint64_t seed) {
  const auto q = static_cast<double>(instance.family().alphabet());
  if (std::pow(q, static_cast<double>(instance.num_vars())) <= kBruteForceLimit) {
    auto v = brute_force_value(instance).value;
    return {v, v, true};
  }
  try {
    auto v = exact_value(instance, 20'000'000).value;
    return {v, v, true};
  } catch (const CapExceeded&) {
    return {local_search_value(instance, 8, seed).value, lp_value(instance), false};
  }
}

std::size_t DihpExperiment::count(const std::string& kind) const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const DihpRow& r) { return r.kind == kind; }));
}

std::size_t DihpExperiment::passes(const std::string& kind) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const DihpRow& r) { return r.kind == kind && r.decision; }));
}

DihpExperiment run_dihp_experiment(const Instance& base, const DihpExperimentConfig& config) {
  if (sgn(config.epsilon) <= 0 || config.epsilon >= 1) throw ValidationError("epsilon must lie in (0, 1)");
  auto sol = solve_basic_lp(base);
  auto graph = build_gap_graph(base, sol);
  DihpExperiment ex;
  ex.c = sol.objective;
  ex.s = estimate_value(base, config.params.seed).lb;
  ex.N = graph.N;

  auto run = [&](const std::string& kind, std::uint64_t tag, std::size_t count) {
    for (std::size_t t = 0; t < count; ++t) {
      DihpRow row;
      row.kind = kind;
      for (std::size_t attempt = 0;; ++attempt) {
        if (attempt > config.max_resamples)
          throw CapExceeded("no nonempty reduced instance after " + std::to_string(config.max_resamples) + " resamples");
        auto params = config.params;
        params.seed = derive_seed(config.params.seed, tag, t, attempt);
        std::vector<Residue> hidden;
        JointInput input;
        if (kind == "yes") {
          auto y = sample_yes(graph, params);
          hidden = std::move(y.hidden);
          input = std::move(y.input);
        } else {
          input = sample_no(graph, params);
        }
        auto inst = reduce_to_instance(input, graph);
        if (inst.empty()) {
          ++row.resamples;
          continue;
        }
        row.seed = params.seed;
        row.constraints = inst.size();
        auto bounds = estimate_value(inst, params.seed);
        row.value_lb = bounds.lb;
        row.value_ub = bounds.ub;
        row.exact = bounds.exact;
        if (kind == "yes") {
          row.decision = bounds.lb >= ex.c - config.epsilon;
          row.lifted_value = instance_value(inst, lifted_assignment(hidden, graph, params.n));
          row.lifted_all = row.lifted_value == 1;
        } else {
          row.decision = bounds.ub <= ex.s + config.epsilon;
        }
        break;
      }
      ex.rows.push_back(std::move(row));
    }
  };
  run("yes", 0, config.yes_samples);
  run("no", 1, config.no_samples);
  return ex;
}

std::string experiment_csv(const DihpExperiment& experiment) {
  std::ostringstream os;
  os << "seed,case,value_lb,value_ub,exact,m_Y,resamples,decision\n";
  for (const auto& r : experiment.rows)
    os << r.seed << ',' << r.kind << ',' << to_string(r.value_lb) << ',' << to_string(r.value_ub) << ','
       << (r.exact ? 1 : 0) << ',' << r.constraints << ',' << r.resamples << ',' << (r.decision ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace csplab
