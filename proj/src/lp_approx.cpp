#include "csplab/lp_approx.hpp"

#include <algorithm>

#include "csplab/errors.hpp"

namespace csplab {

std::size_t Neighborhood::edge_count() const {
  std::size_t n = 0;
  for (const auto& c : constraints)
    for (const auto& v : c.scope) n += v ? 1 : 0;
  return n;
}

const Neighborhood::ConstraintNode& Neighborhood::root_node() const {
  auto it = std::lower_bound(constraints.begin(), constraints.end(), root,
                             [](const ConstraintNode& c, std::uint64_t id) { return c.id < id; });
  if (it == constraints.end() || it->id != root) throw ValidationError("neighborhood lacks its root");
  return *it;
}

void Neighborhood::validate() const {
  if (!family) throw ValidationError("neighborhood needs a family");
  const auto k = static_cast<std::size_t>(family->arity());
  if (root_node().distance != 0) throw ValidationError("root must be at distance 0");
  auto var_distance = [&](std::uint64_t id) -> std::optional<std::size_t> {
    auto it = std::lower_bound(variables.begin(), variables.end(), id,
                               [](const VariableNode& v, std::uint64_t x) { return v.id < x; });
    if (it == variables.end() || it->id != id) return std::nullopt;
    return it->distance;
  };
  std::map<std::uint64_t, std::size_t> degree;
  for (std::size_t a = 0; a < constraints.size(); ++a) {
    const auto& c = constraints[a];
    if (a > 0 && constraints[a - 1].id >= c.id) throw ValidationError("constraints not sorted by id");
    if (c.distance > radius || c.distance % 2 != 0) throw ValidationError("constraint distance out of range");
    if (c.scope.size() != k) throw ValidationError("scope length differs from arity");
    if (c.pred >= family->size()) throw ValidationError("predicate out of range");
    for (const auto& v : c.scope) {
      if (!v) {
        if (c.distance < radius) throw ValidationError("interior constraint has an unresolved position");
        continue;
      }
      auto d = var_distance(*v);
      if (!d) throw ValidationError("edge to a variable outside the ball");
      if (*d + 1 != c.distance && c.distance + 1 != *d) throw ValidationError("edge between non-adjacent layers");
      ++degree[*v];
    }
  }
  for (std::size_t a = 0; a < variables.size(); ++a) {
    if (a > 0 && variables[a - 1].id >= variables[a].id) throw ValidationError("variables not sorted by id");
    if (variables[a].distance > radius || variables[a].distance % 2 != 1)
      throw ValidationError("variable distance out of range");
    if (!degree.count(variables[a].id)) throw ValidationError("isolated variable in neighborhood");
  }
}

NeighborhoodBuilder::NeighborhoodBuilder(FamilyPtr family, std::uint64_t root, std::size_t radius)
    : family_(std::move(family)), root_(root), radius_(radius) {
  if (radius_ < 1) throw ValidationError("radius must be at least 1");
  const auto k = static_cast<std::size_t>(family_->arity());
  cons_[root_] = {root_, 0, 0, std::vector<std::optional<std::uint64_t>>(k)};
  for (std::size_t t = 0; t < k; ++t) pending_.emplace_back(root_, t);
}

std::optional<std::pair<std::uint64_t, std::size_t>> NeighborhoodBuilder::next_lookup() {
  for (;;) {
    while (!pending_.empty()) {
      auto [c, t] = pending_.front();
      if (!cons_.at(c).scope[t]) return pending_.front();
      pending_.pop_front();
    }
    if (!advance_layer()) return std::nullopt;
  }
}

void NeighborhoodBuilder::supply(std::uint64_t var, const std::vector<Incidence>& incidence) {
  if (pending_.empty()) throw std::logic_error("no lookup outstanding");
  auto [c, t] = pending_.front();
  pending_.pop_front();
  auto& node = cons_.at(c);
  node.scope[t] = var;
  if (vars_.count(var)) return;
  vars_[var] = node.distance + 1;
  incidence_[var] = incidence;
  link(var, incidence);
  if (node.scope[t] != var) throw ValidationError("incidence list disagrees with the lookup");
}

void NeighborhoodBuilder::link(std::uint64_t var, const std::vector<Incidence>& incidence) {
  bool saw_lookup = false;
  for (const auto& e : incidence) {
    if (e.constraint == root_) {
      cons_.at(root_).pred = e.pred;
      root_pred_known_ = true;
    }
    auto it = cons_.find(e.constraint);
    if (it == cons_.end()) continue;
    auto& slot = it->second.scope.at(e.position);
    if (slot && *slot != var) throw ValidationError("inconsistent incidence answers");
    slot = var;
    saw_lookup = true;
  }
  if (!saw_lookup) throw ValidationError("incidence list misses the constraint it was reached from");
}

bool NeighborhoodBuilder::advance_layer() {
  if (layer_ + 2 > radius_) return false;
  const auto k = static_cast<std::size_t>(family_->arity());
  bool added = false;
  for (const auto& [var, dist] : vars_) {
    if (dist != layer_ + 1) continue;
    for (const auto& e : incidence_.at(var)) {
      auto it = cons_.find(e.constraint);
      if (it == cons_.end()) {
        it = cons_.emplace(e.constraint, Neighborhood::ConstraintNode{e.constraint, e.pred, layer_ + 2,
                                                                      std::vector<std::optional<std::uint64_t>>(k)})
                 .first;
        added = true;
      }
      it->second.scope.at(e.position) = var;
    }
  }
  layer_ += 2;
  if (layer_ + 1 <= radius_)
    for (const auto& [id, node] : cons_)
      if (node.distance == layer_)
        for (std::size_t t = 0; t < k; ++t)
          if (!node.scope[t]) pending_.emplace_back(id, t);
  return added;
}

Neighborhood NeighborhoodBuilder::finish() const {
  if (!root_pred_known_) throw std::logic_error("neighborhood incomplete");
  Neighborhood nb;
  nb.family = family_;
  nb.root = root_;
  nb.radius = radius_;
  for (const auto& [id, node] : cons_) nb.constraints.push_back(node);
  for (const auto& [id, dist] : vars_) nb.variables.push_back({id, dist});
  return nb;
}

std::uint64_t NeighborhoodBuilder::state_bits() const {
  std::uint64_t bits = 0;
  for (const auto& [id, node] : cons_) bits += 64 + 16 + 64 * node.scope.size();
  for (const auto& [id, inc] : incidence_) bits += 64 + inc.size() * (64 + 16);
  return bits + pending_.size() * 80;
}

Neighborhood extract_neighborhood(const Instance& instance, std::size_t i, std::size_t r) {
  if (i >= instance.size()) throw ValidationError("constraint index out of range");
  std::vector<std::vector<Incidence>> inc(instance.num_vars());
  for (std::size_t c = 0; c < instance.size(); ++c) {
    const auto& con = instance.constraint(c);
    for (std::size_t t = 0; t < con.scope.size(); ++t) inc[con.scope[t]].push_back({c, t, con.pred});
  }
  NeighborhoodBuilder builder(instance.family_ptr(), i, r);
  while (auto next = builder.next_lookup()) {
    VarId v = instance.constraint(next->first).scope[next->second];
    builder.supply(v, inc[v]);
  }
  return builder.finish();
}

std::vector<Rational> local_lp_estimate(const Neighborhood& nbhd) {
  std::map<std::uint64_t, VarId> local;
  for (const auto& v : nbhd.variables) local.emplace(v.id, static_cast<VarId>(local.size()));
  VarId next = static_cast<VarId>(local.size());
  std::vector<Constraint> cs;
  std::size_t root_index = 0;
  for (const auto& c : nbhd.constraints) {
    if (c.id == nbhd.root) root_index = cs.size();
    Constraint sub{{}, c.pred};
    for (const auto& v : c.scope) sub.scope.push_back(v ? local.at(*v) : next++);
    cs.push_back(std::move(sub));
  }
  Instance sub(nbhd.family, next, std::move(cs));
  auto sol = solve_basic_lp(sub);
  return {sol.z_values.begin() + static_cast<std::ptrdiff_t>(root_index * sol.tuple_count),
          sol.z_values.begin() + static_cast<std::ptrdiff_t>((root_index + 1) * sol.tuple_count)};
}

Rational root_mass(const Neighborhood& nbhd, const std::vector<Rational>& zhat) {
  const auto& root = nbhd.root_node();
  Rational mass = 0;
  for (std::size_t b = 0; b < zhat.size(); ++b)
    if (nbhd.family->eval(root.pred, b)) mass += zhat[b];
  return mass;
}

ApproxLpAlgorithm::ApproxLpAlgorithm(FamilyPtr family, BlowupParams params, std::size_t Q, std::size_t r)
    : family_(std::move(family)), params_(std::move(params)), Q_(Q), r_(r) {
  params_.validate();
  if (Q_ < 1 || r_ < 1) throw ValidationError("Q and r must be at least 1");
}

void ApproxLpAlgorithm::init(std::uint64_t seed, std::size_t) {
  phase_ = Phase::Count;
  m_ = 0;
  arity_ = 0;
  sampler_.emplace(derive_seed(seed, 1));
  oracle_ = std::make_unique<BoundedDegreeOracle>(params_, derive_seed(seed, 2));
  builder_.reset();
  memo_.clear();
  samples_.clear();
  sum_ = 0;
}

void ApproxLpAlgorithm::begin_pass(std::size_t, CounterRng) {}

void ApproxLpAlgorithm::process(const Constraint& c) {
  if (phase_ == Phase::Count) {
    ++m_;
    arity_ = static_cast<int>(c.scope.size());
  } else {
    oracle_->observe(c);
  }
}

void ApproxLpAlgorithm::end_pass() {
  if (phase_ == Phase::Count) {
    oracle_->set_stream_length(m_, arity_);
    phase_ = Phase::Oracle;
  } else {
    oracle_->finish_pass();
    if (!oracle_->ready()) return;
    absorb(oracle_->answer());
  }
  advance();
}

void ApproxLpAlgorithm::record(const Rational& mass) {
  samples_.push_back(mass);
  sum_ += mass;
}

void ApproxLpAlgorithm::absorb(const SlotNeighborhood& answer) {
  const std::uint64_t var = (static_cast<std::uint64_t>(answer.var) << 32) | answer.slot;
  std::vector<Incidence> inc;
  inc.reserve(answer.copies.size());
  for (const auto& c : answer.copies) inc.push_back({c.round * m_ + c.constraint, c.position, c.pred});
  builder_->supply(var, inc);
}

void ApproxLpAlgorithm::advance() {
  while (phase_ == Phase::Oracle) {
    if (!builder_) {
      if (samples_.size() == Q_) {
        phase_ = Phase::Done;
        return;
      }
      const auto i = sampler_->below(m_);
      const auto round = sampler_->below(params_.B);
      root_ = round * m_ + i;
      if (auto it = memo_.find(root_); it != memo_.end()) {
        record(it->second);
        continue;
      }
      builder_ = std::make_unique<NeighborhoodBuilder>(family_, root_, r_);
    }
    auto next = builder_->next_lookup();
    if (!next) {
      auto nb = builder_->finish();
      Rational mass = root_mass(nb, local_lp_estimate(nb));
      memo_[root_] = mass;
      record(mass);
      builder_.reset();
      continue;
    }
    OracleQuery q{next->first % m_, next->first / m_, next->second};
    if (!oracle_->begin(q)) return;
    absorb(oracle_->answer());
  }
}

Rational ApproxLpAlgorithm::estimate() const {
  if (samples_.empty()) return Rational(0);
  return sum_ / Rational(static_cast<unsigned long>(samples_.size()));
}

std::uint64_t ApproxLpAlgorithm::state_bits() const {
  std::uint64_t bits = 3 * 64;
  if (oracle_) bits += oracle_->state_bits();
  if (builder_) bits += builder_->state_bits();
  bits += mpz_sizeinbase(sum_.get_num_mpz_t(), 2) + mpz_sizeinbase(sum_.get_den_mpz_t(), 2);
  for (const auto& [id, mass] : memo_)
    bits += 64 + mpz_sizeinbase(mass.get_num_mpz_t(), 2) + mpz_sizeinbase(mass.get_den_mpz_t(), 2);
  return bits;
}

ApproxLpResult approx_lp(const Instance& instance, const BlowupParams& params, std::size_t Q, std::size_t r,
                         std::uint64_t seed, std::size_t pass_cap) {
  ApproxLpAlgorithm alg(instance.family_ptr(), params, Q, r);
  ApproxLpResult out;
  out.run = run_multipass(alg, instance, seed, pass_cap);
  out.estimate = alg.estimate();
  out.queries = alg.queries();
  out.samples = alg.samples();
  out.root_masses = alg.root_masses();
  out.oracle = alg.release_oracle();
  return out;
}

std::size_t samples_for_accuracy(const Rational& eps0) {
  if (sgn(eps0) <= 0) throw ValidationError("accuracy must be positive");
  return ceil(Rational(10) / (eps0 * eps0)).get_ui();
}

Rational decision_threshold(const Rational& c, const Rational& epsilon) {
  if (sgn(c) <= 0 || c >= 1) throw ValidationError("c must lie in (0, 1)");
  if (sgn(epsilon) <= 0 || epsilon >= 1) throw ValidationError("epsilon must lie in (0, 1)");
  return c + epsilon / 2;
}

GapDecision gap_decider(const Instance& instance, const Rational& c, const Rational& epsilon, std::uint64_t seed,
                        const DeciderConfig& config) {
  GapDecision out;
  out.threshold = decision_threshold(c, epsilon);
  out.approx = approx_lp(instance, config.params, config.Q, config.r, seed);
  out.decision = out.approx.estimate >= out.threshold;
  return out;
}

}  // namespace csplab
