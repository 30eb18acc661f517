#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "csplab/rational.hpp"

namespace csplab {

struct SparseEntry {
  std::size_t var;
  Rational coef;
};
using SparseRow = std::vector<SparseEntry>;

// maximize objective·x subject to rows (row·x = rhs) and x ≥ 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  SparseRow objective;
  std::vector<std::pair<SparseRow, Rational>> eq_constraints;

  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> x;  // basic feasible solution when Optimal
  Rational objective;
  std::size_t pivots = 0;
};

// Two-phase primal simplex over exact rationals with Bland's rule. The
// returned point is the basic feasible solution the second phase stops at.
LpResult solve_lp_exact(const LinearProgram& lp);

}  // namespace csplab
