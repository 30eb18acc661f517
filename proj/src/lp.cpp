#include "csplab/lp.hpp"

#include <limits>

#include "csplab/errors.hpp"

namespace csplab {

void LinearProgram::validate() const {
  for (const auto& e : objective)
    if (e.var >= num_vars) throw ValidationError("objective references unknown variable");
  for (const auto& [row, rhs] : eq_constraints)
    for (const auto& e : row)
      if (e.var >= num_vars) throw ValidationError("constraint references unknown variable");
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class Tableau {
 public:
  Tableau(const LinearProgram& lp) : n_(lp.num_vars) {
    rows_ = lp.eq_constraints.size();
    cols_ = n_ + rows_;  // structural + one artificial per row
    a_.assign(rows_, std::vector<Rational>(cols_ + 1));
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto& [row, rhs] = lp.eq_constraints[r];
      const bool flip = sgn(rhs) < 0;
      for (const auto& e : row) a_[r][e.var] += flip ? Rational(-e.coef) : e.coef;
      a_[r][cols_] = flip ? Rational(-rhs) : rhs;
      a_[r][n_ + r] = 1;
      basis_[r] = n_ + r;
    }
    allowed_.assign(cols_, 1);
  }

  // Phase 1: maximize −Σ artificials. Returns false when infeasible.
  bool phase_one() {
    std::vector<Rational> cost(cols_);
    for (std::size_t j = n_; j < cols_; ++j) cost[j] = -1;
    set_costs(cost);
    if (!optimize()) throw std::logic_error("phase one cannot be unbounded");
    if (sgn(value_) < 0) return false;
    // Drive zero-level artificials out of the basis; drop rows that are
    // linear combinations of others.
    for (std::size_t r = 0; r < rows_;) {
      if (basis_[r] < n_) {
        ++r;
        continue;
      }
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < n_; ++j)
        if (sgn(a_[r][j]) != 0) {
          enter = j;
          break;
        }
      if (enter == kNone) {
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
        continue;
      }
      pivot(r, enter);
      ++r;
    }
    for (std::size_t j = n_; j < cols_; ++j) allowed_[j] = 0;
    return true;
  }

  bool phase_two(const std::vector<Rational>& cost) {
    set_costs(cost);
    return optimize();
  }

  std::vector<Rational> point() const {
    std::vector<Rational> x(n_);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < n_) x[basis_[r]] = a_[r][cols_];
    return x;
  }

  const Rational& value() const { return value_; }
  std::size_t pivots() const { return pivots_; }

 private:
  void set_costs(const std::vector<Rational>& cost) {
    rc_.assign(cols_ + 1, Rational(0));
    for (std::size_t j = 0; j < cols_; ++j) rc_[j] = cost[j];
    value_ = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const Rational& cb = cost[basis_[r]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= cols_; ++j)
        if (sgn(a_[r][j]) != 0) rc_[j] -= cb * a_[r][j];
      value_ += cb * a_[r][cols_];
    }
  }

  // Bland's rule. Returns false when unbounded.
  bool optimize() {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < cols_; ++j)
        if (allowed_[j] && sgn(rc_[j]) > 0) {
          enter = j;
          break;
        }
      if (enter == kNone) return true;
      std::size_t leave = kNone;
      Rational best;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (sgn(a_[r][enter]) <= 0) continue;
        Rational ratio = a_[r][cols_] / a_[r][enter];
        if (leave == kNone || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == kNone) return false;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    ++pivots_;
    auto& prow = a_[pr];
    const Rational inv = 1 / prow[pc];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j)
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    Rational factor, tmp;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr || sgn(a_[r][pc]) == 0) continue;
      factor = a_[r][pc];
      auto& row = a_[r];
      for (std::size_t j : nz) {
        tmp = factor * prow[j];
        row[j] -= tmp;
      }
    }
    if (sgn(rc_[pc]) != 0) {
      factor = rc_[pc];
      for (std::size_t j : nz) {
        if (j == cols_) continue;
        tmp = factor * prow[j];
        rc_[j] -= tmp;
      }
      value_ += factor * prow[cols_];
    }
    basis_[pr] = pc;
  }

  std::size_t n_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
  std::vector<char> allowed_;
  std::vector<Rational> rc_;
  Rational value_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpResult solve_lp_exact(const LinearProgram& lp) {
  lp.validate();
  LpResult result;
  Tableau t(lp);
  if (!t.phase_one()) {
    result.status = LpStatus::Infeasible;
    result.pivots = t.pivots();
    return result;
  }
  std::vector<Rational> cost(lp.num_vars + lp.eq_constraints.size());
  for (const auto& e : lp.objective) cost[e.var] += e.coef;
  if (!t.phase_two(cost)) {
    result.status = LpStatus::Unbounded;
    result.pivots = t.pivots();
    return result;
  }
  result.status = LpStatus::Optimal;
  result.x = t.point();
  result.objective = 0;
  for (const auto& e : lp.objective) result.objective += e.coef * result.x[e.var];
  result.pivots = t.pivots();
  return result;
}

}  // namespace csplab
