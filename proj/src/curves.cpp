#include "csplab/curves.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "csplab/basic_lp.hpp"
#include "csplab/errors.hpp"
#include "csplab/rng.hpp"

namespace csplab {

namespace {

void check_unit(const Rational& c) {
  if (sgn(c) < 0 || c > 1) throw ValidationError("c must lie in [0, 1], got " + to_string(c));
}

const Rational kQuarter = make_rational(1, 4);
const Rational kHalf = make_rational(1, 2);

}  // namespace

KnownCurve known_curve(const PredicateFamily& family) {
  if (family == *dicut_family()) return KnownCurve::Dicut;
  if (family == *two_sat_family()) return KnownCurve::TwoSat;
  return KnownCurve::None;
}

std::string to_string(KnownCurve curve) {
  switch (curve) {
    case KnownCurve::Dicut: return "dicut";
    case KnownCurve::TwoSat: return "2sat";
    case KnownCurve::None: break;
  }
  return "none";
}

Rational theta_dicut(const Rational& c) {
  check_unit(c);
  if (c <= kQuarter) return c;
  if (c <= kHalf) return kQuarter;
  return (3 * c - 1) / 2;
}

Rational theta_2sat(const Rational& c) {
  check_unit(c);
  if (c <= kHalf) return c;
  return (2 * c + 1) / 4;
}

Rational theta_star_dicut(const Rational& c) {
  check_unit(c);
  return c <= kHalf ? kQuarter : Rational((3 * c - 1) / 2);
}

Rational theta_star_2sat(const Rational& c) {
  check_unit(c);
  return c <= kHalf ? kHalf : Rational((2 * c + 1) / 4);
}

std::optional<Rational> closed_form_theta(KnownCurve curve, const Rational& c) {
  switch (curve) {
    case KnownCurve::Dicut: return theta_dicut(c);
    case KnownCurve::TwoSat: return theta_2sat(c);
    case KnownCurve::None: break;
  }
  return std::nullopt;
}

std::optional<Rational> closed_form_theta_star(KnownCurve curve, const Rational& c) {
  switch (curve) {
    case KnownCurve::Dicut: return theta_star_dicut(c);
    case KnownCurve::TwoSat: return theta_star_2sat(c);
    case KnownCurve::None: break;
  }
  return std::nullopt;
}

std::vector<Rational> unit_grid(std::size_t grid) {
  if (grid == 0) throw ValidationError("grid must be positive");
  std::vector<Rational> cs;
  for (std::size_t i = 0; i <= grid; ++i)
    cs.push_back(make_rational(static_cast<long>(i), static_cast<long>(grid)));
  return cs;
}

std::vector<CurvePoint> closed_form_curve(KnownCurve curve, std::size_t grid) {
  if (curve == KnownCurve::None) throw ValidationError("no closed form for this family");
  std::vector<CurvePoint> points;
  for (const auto& c : unit_grid(grid)) {
    CurvePoint p;
    p.c = c;
    p.curve = curve;
    p.theta = closed_form_theta(curve, c);
    p.lb = p.ub = *p.theta;
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<Instance> extremal_instances(const PredicateFamily& family) {
  std::vector<Instance> out;
  switch (known_curve(family)) {
    case KnownCurve::Dicut:
      for (std::size_t edges : {1, 6, 30}) {
        std::vector<Constraint> cs;
        for (VarId e = 0; e < edges; ++e) cs.push_back({{2 * e, 2 * e + 1}, 0});
        out.emplace_back(dicut_family(), 2 * edges, std::move(cs));
      }
      for (std::size_t n = 2; n <= 6; ++n) out.push_back(complete_dicut(n));
      break;
    case KnownCurve::TwoSat:
      out.push_back(two_sat_unary_pair());
      out.push_back(all_clause_e2sat(2));
      out.push_back(all_clause_e2sat(3));
      for (std::size_t clauses : {1, 6}) {
        std::vector<Constraint> cs;
        for (VarId e = 0; e < clauses; ++e) cs.push_back({{2 * e, 2 * e + 1}, static_cast<PredId>(TwoSatPred::C00)});
        out.emplace_back(two_sat_family(), 2 * clauses, std::move(cs));
      }
      break;
    case KnownCurve::None: break;
  }
  return out;
}

std::vector<Candidate> search_candidates(const FamilyPtr& family, std::size_t budget, std::uint64_t seed,
                                         const SearchConfig& config) {
  const auto k = static_cast<std::size_t>(family->arity());
  if (config.max_vars < k) throw ValidationError("max_vars below the family arity");
  if (config.max_constraints == 0) throw ValidationError("max_constraints must be positive");

  // LP and integral optima add over disjoint components, so a union's values
  // are weighted averages of its parts.
  struct Mix {
    Instance instance;
    Rational lp;
    Rational value;
  };
  std::vector<Mix> unions;
  auto named = extremal_instances(*family);
  std::vector<Rational> named_lp, named_val;
  for (const auto& inst : named) {
    named_lp.push_back(lp_value(inst) * static_cast<unsigned long>(inst.size()));
    named_val.push_back(exact_value(inst).value * static_cast<unsigned long>(inst.size()));
  }
  for (std::size_t i = 0; i < named.size(); ++i)
    for (std::size_t j = i; j < named.size(); ++j)
      for (std::size_t a = 1; a <= config.max_union_parts; ++a)
        for (std::size_t b = 0; a + b <= config.max_union_parts; ++b) {
          if (i == j && b > 0) break;
          std::vector<Instance> parts(a, named[i]);
          parts.insert(parts.end(), b, named[j]);
          const auto ua = static_cast<unsigned long>(a), ub = static_cast<unsigned long>(b);
          const Rational m = ua * named[i].size() + ub * named[j].size();
          unions.push_back({disjoint_union(parts), (ua * named_lp[i] + ub * named_lp[j]) / m,
                            (ua * named_val[i] + ub * named_val[j]) / m});
        }

  const std::size_t total = budget + unions.size();
  std::vector<std::optional<Candidate>> slots(total);
  auto evaluate = [&](std::size_t idx) {
    if (idx < budget) {
      CounterRng rng(derive_seed(seed, idx));
      auto n = k + static_cast<std::size_t>(rng.below(config.max_vars - k + 1));
      auto m = 1 + static_cast<std::size_t>(rng.below(config.max_constraints));
      auto inst = random_instance(family, n, m, rng());
      auto lp = lp_value(inst);
      auto val = brute_force_value(inst).value;
      slots[idx] = Candidate{std::move(inst), std::move(lp), std::move(val)};
    } else {
      const auto& mix = unions[idx - budget];
      slots[idx] = Candidate{mix.instance, mix.lp, mix.value};
    }
  };
  const unsigned jobs = std::max(1u, config.jobs);
  if (jobs == 1) {
    for (std::size_t idx = 0; idx < total; ++idx) evaluate(idx);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t idx = w; idx < total; idx += jobs) evaluate(idx);
      });
    for (auto& t : workers) t.join();
  }
  std::vector<Candidate> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

CurvePoint upper_bound_from(const std::vector<Candidate>& candidates, const PredicateFamily& family,
                            const Rational& c) {
  check_unit(c);
  CurvePoint p;
  p.c = c;
  auto known = known_curve(family);
  p.lb = closed_form_theta_star(known, c).value_or(Rational(0));
  const Candidate* best = nullptr;
  for (const auto& cand : candidates)
    if (cand.lp >= c && (!best || cand.value < best->value)) best = &cand;
  if (!best) {
    p.found = false;
    p.ub = 1;
    return p;
  }
  p.ub = best->value;
  p.witness = best->instance;
  p.witness_lp = best->lp;
  return p;
}

CurvePoint empirical_theta_upper(const FamilyPtr& family, const Rational& c, std::size_t budget, std::uint64_t seed,
                                 const SearchConfig& config) {
  return upper_bound_from(search_candidates(family, budget, seed, config), *family, c);
}

std::vector<CurvePoint> empirical_curve(const FamilyPtr& family, const std::vector<Rational>& cs, std::size_t budget,
                                        std::uint64_t seed, const SearchConfig& config) {
  auto candidates = search_candidates(family, budget, seed, config);
  std::vector<CurvePoint> out;
  for (const auto& c : cs) out.push_back(upper_bound_from(candidates, *family, c));
  return out;
}

ShapeReport check_curve_shape(const std::vector<CurvePoint>& points, const Rational& tolerance) {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].c <= points[i - 1].c) throw ValidationError("curve points must be sorted by strictly increasing c");
  ShapeReport report;
  auto note = [&](bool& flag, const std::string& what, const CurvePoint& p) {
    flag = false;
    report.violations.push_back(what + " at c=" + to_string(p.c));
  };

  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].value() + tolerance < points[i - 1].value()) note(report.monotone, "decrease", points[i]);

  // Convexity on the part of the curve that follows the infimum piece.
  std::vector<const CurvePoint*> piece;
  for (const auto& p : points)
    if (!p.theta || *p.theta < p.c) piece.push_back(&p);
  for (std::size_t i = 2; i < piece.size(); ++i) {
    const auto &a = *piece[i - 2], &b = *piece[i - 1], &c = *piece[i];
    Rational left = (b.value() - a.value()) / (b.c - a.c);
    Rational right = (c.value() - b.value()) / (c.c - b.c);
    if (right + tolerance < left) note(report.convex, "slope drop", b);
  }

  for (const auto& p : points) {
    if (!p.theta) {
      if (p.ub < p.lb) note(report.identities, "ub below lb", p);
      continue;
    }
    if (*p.theta > p.c) note(report.identities, "theta above c", p);
    Rational expected;
    if (p.curve == KnownCurve::Dicut) {
      expected = std::min(p.c, std::max(kQuarter, Rational((3 * p.c - 1) / 2)));
    } else if (p.curve == KnownCurve::TwoSat) {
      expected = std::min(p.c, std::max(kHalf, Rational((2 * p.c + 1) / 4)));
    } else {
      continue;
    }
    if (*p.theta != expected) note(report.identities, "closed form mismatch", p);
  }
  return report;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  bool closed = !points.empty() && points.front().theta.has_value();
  os << (closed ? "c,theta\n" : "c,lb,ub\n");
  for (const auto& p : points) {
    if (p.theta)
      os << to_string(p.c) << ',' << to_string(*p.theta) << '\n';
    else
      os << to_string(p.c) << ',' << to_string(p.lb) << ',' << to_string(p.ub) << '\n';
  }
  return os.str();
}

}  // namespace csplab
