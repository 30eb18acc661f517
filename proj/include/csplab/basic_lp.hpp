#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "csplab/csp.hpp"
#include "csplab/lp.hpp"

namespace csplab {

// Optimal point of the relaxation: x_{v,σ} per variable, z_{i,b} per
// constraint over the tuple index b, and the objective value.
struct LpSolution {
  std::size_t num_vars = 0;
  std::size_t num_constraints = 0;
  std::size_t alphabet = 0;
  std::size_t tuple_count = 0;
  std::vector<Rational> x_values;  // [v * alphabet + σ]
  std::vector<Rational> z_values;  // [i * tuple_count + b]
  Rational objective;

  const Rational& x(VarId v, Symbol s) const { return x_values[v * alphabet + s]; }
  const Rational& z(std::size_t i, std::size_t b) const { return z_values[i * tuple_count + b]; }
  Rational& x(VarId v, Symbol s) { return x_values[v * alphabet + s]; }
  Rational& z(std::size_t i, std::size_t b) { return z_values[i * tuple_count + b]; }
};

// Column layout: x_{v,σ} at v·|Σ|+σ, then z_{i,b} at |V||Σ| + i·|Σ|^k + b.
// Rows: Σ_σ x_{v,σ} = 1 per variable, then Σ_{b: b_j=σ} z_{i,b} − x_{v_ij,σ} = 0
// for each (i, j, σ).
LinearProgram build_basic_lp(const Instance& instance);

// Unpacks a solved build_basic_lp program.
LpSolution unpack_basic_solution(const Instance& instance, const LpResult& result);

// Solves the relaxation one connected component at a time (a vertex of each
// block is a vertex of the product) and stitches the blocks together.
// Variables outside every scope get x_{v,0} = 1.
LpSolution solve_basic_lp(const Instance& instance);
// Solves build_basic_lp(instance) as a single program.
LpSolution solve_basic_lp_monolithic(const Instance& instance);
Rational lp_value(const Instance& instance);

// Objective of the point induced by an integral assignment.
LpSolution integral_point(const Instance& instance, const Assignment& tau);
// Exact check of every equality row, nonnegativity and the objective.
bool is_feasible_point(const Instance& instance, const LpSolution& sol);
bool check_half_integral(const LpSolution& sol);

struct RoundingResult {
  Assignment tau;
  Rational expected_value;
  std::vector<Rational> per_constraint;
};

// Independent rounding τ(v)=1 with probability x_{v,1} on a half-integral
// binary optimum, with the exact expectation of the rounded value.
RoundingResult round_dicut(const Instance& instance, const LpSolution& sol, std::uint64_t seed);
RoundingResult round_2sat(const Instance& instance, const LpSolution& sol, std::uint64_t seed);

nlohmann::json to_json(const LpSolution& sol);

}  // namespace csplab
