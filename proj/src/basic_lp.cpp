#include "csplab/basic_lp.hpp"

#include <algorithm>

#include "csplab/errors.hpp"
#include "csplab/rng.hpp"

namespace csplab {

LinearProgram build_basic_lp(const Instance& instance) {
  if (instance.empty()) throw ValidationError("instance has no constraints");
  const auto& f = instance.family();
  const std::size_t q = static_cast<std::size_t>(f.alphabet());
  const std::size_t k = static_cast<std::size_t>(f.arity());
  const std::size_t tc = f.tuple_count();
  const std::size_t nx = instance.num_vars() * q;
  const std::size_t m = instance.size();

  LinearProgram lp;
  lp.num_vars = nx + m * tc;
  Rational weight(1, static_cast<unsigned long>(m));
  weight.canonicalize();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = instance.constraint(i);
    for (std::size_t b = 0; b < tc; ++b)
      if (f.eval(c.pred, b)) lp.objective.push_back({nx + i * tc + b, weight});
  }
  for (std::size_t v = 0; v < instance.num_vars(); ++v) {
    SparseRow row;
    for (std::size_t s = 0; s < q; ++s) row.push_back({v * q + s, Rational(1)});
    lp.eq_constraints.emplace_back(std::move(row), Rational(1));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = instance.constraint(i);
    for (std::size_t j = 0; j < k; ++j)
      for (Symbol s = 0; s < q; ++s) {
        SparseRow row;
        for (std::size_t b = 0; b < tc; ++b)
          if (f.tuple_at(b)[j] == s) row.push_back({nx + i * tc + b, Rational(1)});
        row.push_back({c.scope[j] * q + s, Rational(-1)});
        lp.eq_constraints.emplace_back(std::move(row), Rational(0));
      }
  }
  return lp;
}

namespace {

LpSolution empty_solution(const Instance& instance) {
  const auto& f = instance.family();
  LpSolution sol;
  sol.num_vars = instance.num_vars();
  sol.num_constraints = instance.size();
  sol.alphabet = static_cast<std::size_t>(f.alphabet());
  sol.tuple_count = f.tuple_count();
  sol.x_values.assign(sol.num_vars * sol.alphabet, Rational(0));
  sol.z_values.assign(sol.num_constraints * sol.tuple_count, Rational(0));
  return sol;
}

void require_binary(const Instance& instance) {
  if (instance.family().alphabet() != 2 || instance.family().arity() != 2)
    throw ValidationError("rounding needs a binary alphabet and arity 2");
}

RoundingResult round_binary(const Instance& instance, const LpSolution& sol, std::uint64_t seed) {
  require_binary(instance);
  if (sol.num_vars != instance.num_vars() || sol.num_constraints != instance.size())
    throw ValidationError("solution shape differs from instance");
  if (!check_half_integral(sol)) throw ValidationError("rounding needs a half-integral solution");
  const auto& f = instance.family();
  RoundingResult out;
  CounterRng rng(seed);
  out.tau.resize(instance.num_vars());
  for (VarId v = 0; v < instance.num_vars(); ++v) {
    const Rational& p = sol.x(v, 1);
    if (p == 1)
      out.tau[v] = 1;
    else if (sgn(p) == 0)
      out.tau[v] = 0;
    else
      out.tau[v] = static_cast<Symbol>(rng.bernoulli(1, 2));
  }
  // E[f(τ(v1),τ(v2))] = Σ_b f(b) Π_j P[τ(v_j) = b_j].
  Rational total = 0;
  for (const auto& c : instance.constraints()) {
    Rational e = 0;
    for (std::size_t b = 0; b < f.tuple_count(); ++b) {
      if (!f.eval(c.pred, b)) continue;
      auto t = f.tuple_at(b);
      Rational term = 1;
      for (std::size_t j = 0; j < 2; ++j) term *= sol.x(c.scope[j], t[j]);
      e += term;
    }
    out.per_constraint.push_back(e);
    total += e;
  }
  out.expected_value = total / Rational(static_cast<unsigned long>(instance.size()));
  return out;
}

}  // namespace

LpSolution unpack_basic_solution(const Instance& instance, const LpResult& result) {
  if (result.status != LpStatus::Optimal) throw ValidationError("relaxation did not solve to optimality");
  LpSolution sol = empty_solution(instance);
  const std::size_t nx = sol.x_values.size();
  if (result.x.size() != nx + sol.z_values.size()) throw ValidationError("solution shape differs from instance");
  std::copy(result.x.begin(), result.x.begin() + static_cast<std::ptrdiff_t>(nx), sol.x_values.begin());
  std::copy(result.x.begin() + static_cast<std::ptrdiff_t>(nx), result.x.end(), sol.z_values.begin());
  sol.objective = result.objective;
  return sol;
}

LpSolution solve_basic_lp_monolithic(const Instance& instance) {
  return unpack_basic_solution(instance, solve_lp_exact(build_basic_lp(instance)));
}

LpSolution solve_basic_lp(const Instance& instance) {
  if (instance.empty()) throw ValidationError("instance has no constraints");
  LpSolution sol = empty_solution(instance);
  std::vector<char> covered(instance.num_vars(), 0);
  Rational weighted = 0;
  for (const auto& comp : constraint_components(instance)) {
    std::vector<VarId> vars;
    for (std::size_t i : comp)
      for (VarId v : instance.constraint(i).scope) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    auto local = [&](VarId v) { return static_cast<VarId>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()); };
    std::vector<Constraint> cs;
    for (std::size_t i : comp) {
      Constraint c = instance.constraint(i);
      for (auto& v : c.scope) v = local(v);
      cs.push_back(std::move(c));
    }
    Instance sub(instance.family_ptr(), vars.size(), std::move(cs));
    LpSolution part = solve_basic_lp_monolithic(sub);
    for (std::size_t a = 0; a < vars.size(); ++a) {
      covered[vars[a]] = 1;
      for (Symbol s = 0; s < sol.alphabet; ++s) sol.x(vars[a], s) = part.x(static_cast<VarId>(a), s);
    }
    for (std::size_t c = 0; c < comp.size(); ++c)
      for (std::size_t b = 0; b < sol.tuple_count; ++b) sol.z(comp[c], b) = part.z(c, b);
    weighted += part.objective * Rational(static_cast<unsigned long>(comp.size()));
  }
  for (VarId v = 0; v < instance.num_vars(); ++v)
    if (!covered[v]) sol.x(v, 0) = 1;
  sol.objective = weighted / Rational(static_cast<unsigned long>(instance.size()));
  return sol;
}

Rational lp_value(const Instance& instance) { return solve_basic_lp(instance).objective; }

LpSolution integral_point(const Instance& instance, const Assignment& tau) {
  if (tau.size() != instance.num_vars()) throw ValidationError("assignment length differs from num_vars");
  LpSolution sol = empty_solution(instance);
  const auto& f = instance.family();
  for (VarId v = 0; v < instance.num_vars(); ++v) sol.x(v, tau[v]) = 1;
  std::size_t sat = 0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    std::vector<Symbol> t;
    for (VarId v : instance.constraint(i).scope) t.push_back(tau[v]);
    auto b = f.tuple_index(t);
    sol.z(i, b) = 1;
    sat += f.eval(instance.constraint(i).pred, b) ? 1 : 0;
  }
  sol.objective = Rational(static_cast<unsigned long>(sat)) / Rational(static_cast<unsigned long>(instance.size()));
  return sol;
}

bool is_feasible_point(const Instance& instance, const LpSolution& sol) {
  const auto& f = instance.family();
  if (sol.num_vars != instance.num_vars() || sol.num_constraints != instance.size() ||
      sol.alphabet != static_cast<std::size_t>(f.alphabet()) || sol.tuple_count != f.tuple_count())
    return false;
  for (const auto& q : sol.x_values)
    if (sgn(q) < 0) return false;
  for (const auto& q : sol.z_values)
    if (sgn(q) < 0) return false;
  for (VarId v = 0; v < sol.num_vars; ++v) {
    Rational s = 0;
    for (Symbol a = 0; a < sol.alphabet; ++a) s += sol.x(v, a);
    if (s != 1) return false;
  }
  Rational obj = 0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const auto& c = instance.constraint(i);
    for (std::size_t j = 0; j < c.scope.size(); ++j)
      for (Symbol a = 0; a < sol.alphabet; ++a) {
        Rational s = 0;
        for (std::size_t b = 0; b < sol.tuple_count; ++b)
          if (f.tuple_at(b)[j] == a) s += sol.z(i, b);
        if (s != sol.x(c.scope[j], a)) return false;
      }
    for (std::size_t b = 0; b < sol.tuple_count; ++b)
      if (f.eval(c.pred, b)) obj += sol.z(i, b);
  }
  if (!instance.empty()) obj /= Rational(static_cast<unsigned long>(instance.size()));
  return obj == sol.objective && sgn(obj) >= 0 && obj <= 1;
}

bool check_half_integral(const LpSolution& sol) {
  const Rational half(1, 2);
  auto ok = [&](const Rational& q) { return sgn(q) == 0 || q == 1 || q == half; };
  return std::all_of(sol.x_values.begin(), sol.x_values.end(), ok) &&
         std::all_of(sol.z_values.begin(), sol.z_values.end(), ok);
}

RoundingResult round_dicut(const Instance& instance, const LpSolution& sol, std::uint64_t seed) {
  return round_binary(instance, sol, seed);
}

RoundingResult round_2sat(const Instance& instance, const LpSolution& sol, std::uint64_t seed) {
  return round_binary(instance, sol, seed);
}

nlohmann::json to_json(const LpSolution& sol) {
  auto pair = [](const Rational& q) { return nlohmann::json::array({q.get_num().get_str(), q.get_den().get_str()}); };
  nlohmann::json j;
  j["num_vars"] = sol.num_vars;
  j["num_constraints"] = sol.num_constraints;
  j["alphabet"] = sol.alphabet;
  j["tuple_count"] = sol.tuple_count;
  j["objective"] = pair(sol.objective);
  j["x"] = nlohmann::json::array();
  for (const auto& q : sol.x_values) j["x"].push_back(pair(q));
  j["z"] = nlohmann::json::array();
  for (const auto& q : sol.z_values) j["z"].push_back(pair(q));
  return j;
}

}  // namespace csplab
