#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csplab/csp.hpp"
#include "csplab/rational.hpp"

namespace csplab {

enum class KnownCurve { None, Dicut, TwoSat };

KnownCurve known_curve(const PredicateFamily& family);
std::string to_string(KnownCurve curve);

// Approximability thresholds, c in [0, 1].
Rational theta_dicut(const Rational& c);
Rational theta_2sat(const Rational& c);

// Infimum of the integral value over instances with LP value >= c, without
// the min with c. Nondecreasing and convex.
Rational theta_star_dicut(const Rational& c);
Rational theta_star_2sat(const Rational& c);

std::optional<Rational> closed_form_theta(KnownCurve curve, const Rational& c);
std::optional<Rational> closed_form_theta_star(KnownCurve curve, const Rational& c);

struct CurvePoint {
  Rational c;
  KnownCurve curve = KnownCurve::None;
  // Set for closed-form points.
  std::optional<Rational> theta;
  // Bounds on theta_star(c) for empirical points.
  Rational lb = 0;
  Rational ub = 1;
  std::optional<Instance> witness;
  Rational witness_lp = 0;
  // False when no candidate reached LP value c; ub stays 1.
  bool found = true;

  const Rational& value() const { return theta ? *theta : ub; }
};

// Points c = 0, 1/grid, ..., 1.
std::vector<Rational> unit_grid(std::size_t grid);
std::vector<CurvePoint> closed_form_curve(KnownCurve curve, std::size_t grid);

struct SearchConfig {
  std::size_t max_vars = 8;
  std::size_t max_constraints = 24;
  // Disjoint unions of named instances use up to this many parts.
  std::size_t max_union_parts = 6;
  unsigned jobs = 1;
};

// Named instances for the known families: complete DICUT graphs and disjoint
// edge matchings; the unary pair, all-clause E2SAT and disjoint clauses for
// 2SAT. Empty for other families.
std::vector<Instance> extremal_instances(const PredicateFamily& family);

struct Candidate {
  Instance instance;
  Rational lp;
  Rational value;
};

// Evaluates `budget` random instances plus the disjoint unions of extremal
// instances. Order is deterministic in (family, budget, seed), independent of
// config.jobs.
std::vector<Candidate> search_candidates(const FamilyPtr& family, std::size_t budget, std::uint64_t seed,
                                         const SearchConfig& config = {});

// Minimum value over candidates with LP value >= c; ties go to the earliest
// candidate.
CurvePoint upper_bound_from(const std::vector<Candidate>& candidates, const PredicateFamily& family,
                            const Rational& c);

CurvePoint empirical_theta_upper(const FamilyPtr& family, const Rational& c, std::size_t budget, std::uint64_t seed,
                                 const SearchConfig& config = {});
std::vector<CurvePoint> empirical_curve(const FamilyPtr& family, const std::vector<Rational>& cs, std::size_t budget,
                                        std::uint64_t seed, const SearchConfig& config = {});

struct ShapeReport {
  bool monotone = true;
  bool convex = true;
  bool identities = true;
  std::vector<std::string> violations;

  bool ok() const { return monotone && convex && identities; }
};

// Monotonicity over all points; convexity over the points whose value lies
// strictly below c for closed forms, all points for empirical ones; for
// closed forms also theta <= c and theta == min(c, max of the affine pieces).
// Throws ValidationError on unsorted input.
ShapeReport check_curve_shape(const std::vector<CurvePoint>& points, const Rational& tolerance = 0);

// CSV: "c,theta" for closed-form points, "c,lb,ub" otherwise.
std::string curve_csv(const std::vector<CurvePoint>& points);

}  // namespace csplab
