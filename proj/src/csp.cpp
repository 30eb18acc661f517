#include "csplab/csp.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>

#include "csplab/errors.hpp"
#include "csplab/rng.hpp"

namespace csplab {

PredicateFamily::PredicateFamily(int arity, int alphabet, std::vector<std::vector<bool>> tables,
                                 std::vector<std::string> names)
    : arity_(arity), alphabet_(alphabet), tables_(std::move(tables)), names_(std::move(names)) {
  if (arity_ < 1) throw ValidationError("arity must be at least 1");
  if (alphabet_ < 2) throw ValidationError("alphabet must have at least 2 symbols");
  if (tables_.empty()) throw ValidationError("family needs at least one predicate");
  tuple_count_ = 1;
  for (int j = 0; j < arity_; ++j) {
    if (tuple_count_ > (std::size_t{1} << 40) / static_cast<std::size_t>(alphabet_))
      throw ValidationError("truth tables too large");
    tuple_count_ *= static_cast<std::size_t>(alphabet_);
  }
  bool any_satisfiable = false;
  for (const auto& t : tables_) {
    if (t.size() != tuple_count_) throw ValidationError("truth table has wrong length");
    any_satisfiable = any_satisfiable || std::find(t.begin(), t.end(), true) != t.end();
  }
  if (!any_satisfiable) throw ValidationError("every predicate is unsatisfiable");
  if (names_.empty()) {
    for (std::size_t p = 0; p < tables_.size(); ++p) names_.push_back("p" + std::to_string(p));
  }
  if (names_.size() != tables_.size()) throw ValidationError("one name per predicate required");
  for (std::size_t p = 0; p < names_.size(); ++p) {
    const auto& n = names_[p];
    if (n.empty() || n.find_first_of(" \t\r\n") != std::string::npos)
      throw ValidationError("predicate names must be nonempty without whitespace");
    for (std::size_t q = 0; q < p; ++q)
      if (names_[q] == n) throw ValidationError("duplicate predicate name: " + n);
  }
}

std::optional<PredId> PredicateFamily::find(std::string_view name) const {
  for (std::size_t p = 0; p < names_.size(); ++p)
    if (names_[p] == name) return static_cast<PredId>(p);
  return std::nullopt;
}

std::size_t PredicateFamily::tuple_index(std::span<const Symbol> tuple) const {
  std::size_t idx = 0;
  for (Symbol s : tuple) idx = idx * static_cast<std::size_t>(alphabet_) + s;
  return idx;
}

std::vector<Symbol> PredicateFamily::tuple_at(std::size_t index) const {
  std::vector<Symbol> t(static_cast<std::size_t>(arity_));
  for (int j = arity_ - 1; j >= 0; --j) {
    t[static_cast<std::size_t>(j)] = static_cast<Symbol>(index % static_cast<std::size_t>(alphabet_));
    index /= static_cast<std::size_t>(alphabet_);
  }
  return t;
}

std::string PredicateFamily::bitstring(PredId p) const {
  std::string s;
  for (bool b : tables_.at(p)) s.push_back(b ? '1' : '0');
  return s;
}

bool PredicateFamily::operator==(const PredicateFamily& other) const {
  return arity_ == other.arity_ && alphabet_ == other.alphabet_ && tables_ == other.tables_ &&
         names_ == other.names_;
}

Instance::Instance(FamilyPtr family, std::size_t num_vars, std::vector<Constraint> constraints)
    : family_(std::move(family)), num_vars_(num_vars), constraints_(std::move(constraints)) {
  if (!family_) throw ValidationError("instance needs a predicate family");
  const auto k = static_cast<std::size_t>(family_->arity());
  for (const auto& c : constraints_) {
    if (c.scope.size() != k) throw ValidationError("scope length differs from arity");
    if (c.pred >= family_->size()) throw ValidationError("predicate index out of range");
    for (std::size_t a = 0; a < k; ++a) {
      if (c.scope[a] >= num_vars_) throw ValidationError("variable id out of range");
      for (std::size_t b = 0; b < a; ++b)
        if (c.scope[a] == c.scope[b]) throw ValidationError("scope variables must be distinct");
    }
  }
}

bool Instance::operator==(const Instance& other) const {
  return num_vars_ == other.num_vars_ && constraints_ == other.constraints_ &&
         (family_ == other.family_ || *family_ == *other.family_);
}

namespace {

std::size_t assigned_index(const PredicateFamily& f, const Constraint& c, const Assignment& tau) {
  std::size_t idx = 0;
  for (VarId v : c.scope) idx = idx * static_cast<std::size_t>(f.alphabet()) + tau[v];
  return idx;
}

bool satisfied(const PredicateFamily& f, const Constraint& c, const Assignment& tau) {
  return f.eval(c.pred, assigned_index(f, c, tau));
}

void check_assignment(const Instance& instance, const Assignment& tau) {
  if (tau.size() != instance.num_vars()) throw ValidationError("assignment length differs from num_vars");
  for (Symbol s : tau)
    if (s >= static_cast<Symbol>(instance.family().alphabet()))
      throw ValidationError("assignment symbol out of range");
}

void require_nonempty(const Instance& instance) {
  if (instance.empty()) throw ValidationError("instance has no constraints");
}

std::vector<std::vector<std::size_t>> incidence(const Instance& instance) {
  std::vector<std::vector<std::size_t>> inc(instance.num_vars());
  for (std::size_t i = 0; i < instance.size(); ++i)
    for (VarId v : instance.constraint(i).scope) inc[v].push_back(i);
  return inc;
}

}  // namespace

bool evaluate_constraint(const Instance& instance, std::size_t i, const Assignment& tau) {
  if (i >= instance.size()) throw ValidationError("constraint index out of range");
  check_assignment(instance, tau);
  return satisfied(instance.family(), instance.constraint(i), tau);
}

std::size_t satisfied_count(const Instance& instance, const Assignment& tau) {
  check_assignment(instance, tau);
  std::size_t count = 0;
  for (const auto& c : instance.constraints()) count += satisfied(instance.family(), c, tau) ? 1 : 0;
  return count;
}

Rational instance_value(const Instance& instance, const Assignment& tau) {
  require_nonempty(instance);
  Rational q(static_cast<unsigned long>(satisfied_count(instance, tau)),
             static_cast<unsigned long>(instance.size()));
  q.canonicalize();
  return q;
}

std::uint64_t assignment_cap() {
  if (const char* env = std::getenv("CSPLAB_CAP_ASSIGNMENTS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw ValidationError("CSPLAB_CAP_ASSIGNMENTS must be a positive integer");
  }
  return std::uint64_t{1} << 24;
}

ValueResult brute_force_value(const Instance& instance) { return brute_force_value(instance, assignment_cap()); }

ValueResult brute_force_value(const Instance& instance, std::uint64_t cap) {
  require_nonempty(instance);
  const auto& f = instance.family();
  const std::uint64_t q = static_cast<std::uint64_t>(f.alphabet());
  std::uint64_t total = 1;
  for (std::size_t v = 0; v < instance.num_vars(); ++v) {
    if (total > cap / q) throw CapExceeded("brute force exceeds assignment cap");
    total *= q;
  }
  if (total > cap) throw CapExceeded("brute force exceeds assignment cap");

  const auto inc = incidence(instance);
  Assignment tau(instance.num_vars(), 0);
  std::vector<char> sat(instance.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    sat[i] = satisfied(f, instance.constraint(i), tau);
    count += static_cast<std::size_t>(sat[i]);
  }
  std::size_t best = count;
  Assignment witness = tau;
  auto refresh = [&](VarId v) {
    for (std::size_t i : inc[v]) {
      char now = satisfied(f, instance.constraint(i), tau);
      count += static_cast<std::size_t>(now) - static_cast<std::size_t>(sat[i]);
      sat[i] = now;
    }
  };
  for (std::uint64_t step = 1; step < total; ++step) {
    for (VarId v = 0;; ++v) {
      if (++tau[v] == q) {
        tau[v] = 0;
        refresh(v);
      } else {
        refresh(v);
        break;
      }
    }
    if (count > best) {
      best = count;
      witness = tau;
    }
  }
  Rational value(static_cast<unsigned long>(best), static_cast<unsigned long>(instance.size()));
  value.canonicalize();
  return {value, witness};
}

ValueResult local_search_value(const Instance& instance, int restarts, std::uint64_t seed) {
  require_nonempty(instance);
  const auto& f = instance.family();
  const auto inc = incidence(instance);
  const auto q = static_cast<Symbol>(f.alphabet());
  std::size_t best = 0;
  Assignment witness;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Assignment tau(instance.num_vars());
    for (auto& s : tau) s = static_cast<Symbol>(rng.below(q));
    std::size_t count = satisfied_count(instance, tau);
    for (;;) {
      long best_gain = 0;
      VarId best_v = 0;
      Symbol best_s = 0;
      for (VarId v = 0; v < instance.num_vars(); ++v) {
        const Symbol old = tau[v];
        long before = 0;
        for (std::size_t i : inc[v]) before += satisfied(f, instance.constraint(i), tau) ? 1 : 0;
        for (Symbol s = 0; s < q; ++s) {
          if (s == old) continue;
          tau[v] = s;
          long after = 0;
          for (std::size_t i : inc[v]) after += satisfied(f, instance.constraint(i), tau) ? 1 : 0;
          if (after - before > best_gain) {
            best_gain = after - before;
            best_v = v;
            best_s = s;
          }
        }
        tau[v] = old;
      }
      if (best_gain <= 0) break;
      tau[best_v] = best_s;
      count += static_cast<std::size_t>(best_gain);
    }
    if (witness.empty() || count > best) {
      best = count;
      witness = tau;
    }
  }
  Rational value(static_cast<unsigned long>(best), static_cast<unsigned long>(instance.size()));
  value.canonicalize();
  return {value, witness};
}

std::vector<std::vector<std::size_t>> constraint_components(const Instance& instance) {
  std::vector<std::size_t> parent(instance.num_vars());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : instance.constraints())
    for (std::size_t j = 1; j < c.scope.size(); ++j) {
      auto a = find(c.scope[0]), b = find(c.scope[j]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(instance.num_vars(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < instance.size(); ++i) {
    auto root = find(instance.constraint(i).scope[0]);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

namespace {

class ComponentSearch {
 public:
  ComponentSearch(const Instance& inst, const std::vector<std::size_t>& cons, Assignment& tau,
                  std::uint64_t& nodes, std::uint64_t node_cap)
      : inst_(inst), f_(inst.family()), cons_(cons), tau_(tau), nodes_(nodes), node_cap_(node_cap) {
    std::vector<std::size_t> deg_local;
    std::vector<VarId> vars;
    for (std::size_t i : cons_)
      for (VarId v : inst_.constraint(i).scope) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    local_inc_.assign(vars.size(), {});
    auto local = [&](VarId v) { return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()); };
    for (std::size_t c = 0; c < cons_.size(); ++c)
      for (VarId v : inst_.constraint(cons_[c]).scope) local_inc_[local(v)].push_back(c);
    // BFS order from the highest-degree variable keeps constraints closing early.
    std::vector<char> seen(vars.size(), 0);
    std::size_t start = 0;
    for (std::size_t a = 1; a < vars.size(); ++a)
      if (local_inc_[a].size() > local_inc_[start].size()) start = a;
    std::queue<std::size_t> bfs;
    bfs.push(start);
    seen[start] = 1;
    while (!bfs.empty()) {
      auto a = bfs.front();
      bfs.pop();
      order_.push_back(vars[a]);
      order_inc_.push_back(local_inc_[a]);
      for (std::size_t c : local_inc_[a])
        for (VarId w : inst_.constraint(cons_[c]).scope) {
          auto b = local(w);
          if (!seen[b]) {
            seen[b] = 1;
            bfs.push(b);
          }
        }
    }
    assigned_.assign(inst_.num_vars(), 0);
    lost_flag_.assign(cons_.size(), 0);
  }

  // Improves on the incumbent count (from the current tau) if possible.
  void run() {
    best_ = 0;
    for (std::size_t i : cons_) best_ += satisfied(f_, inst_.constraint(i), tau_) ? 1 : 0;
    best_tau_.clear();
    for (VarId v : order_) best_tau_.push_back(tau_[v]);
    current_.assign(order_.size(), 0);
    search(0, 0);
    for (std::size_t a = 0; a < order_.size(); ++a) tau_[order_[a]] = best_tau_[a];
  }

 private:
  bool still_satisfiable(const Constraint& c) const {
    const auto k = c.scope.size();
    for (std::size_t t = 0; t < f_.tuple_count(); ++t) {
      if (!f_.eval(c.pred, t)) continue;
      auto tuple = f_.tuple_at(t);
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j)
        if (assigned_[c.scope[j]] && local_value(c.scope[j]) != tuple[j]) ok = false;
      if (ok) return true;
    }
    return false;
  }

  Symbol local_value(VarId v) const { return value_[v]; }

  void search(std::size_t depth, std::size_t lost) {
    if (++nodes_ > node_cap_) throw CapExceeded("exact_value node cap exceeded");
    if (cons_.size() - lost <= best_) return;
    if (depth == order_.size()) {
      best_ = cons_.size() - lost;
      best_tau_ = current_;
      return;
    }
    const VarId v = order_[depth];
    assigned_[v] = 1;
    for (Symbol s = 0; s < static_cast<Symbol>(f_.alphabet()); ++s) {
      value_[v] = s;
      current_[depth] = s;
      std::vector<std::size_t> newly;
      for (std::size_t c : order_inc_[depth]) {
        if (lost_flag_[c]) continue;
        if (!still_satisfiable(inst_.constraint(cons_[c]))) {
          lost_flag_[c] = 1;
          newly.push_back(c);
        }
      }
      search(depth + 1, lost + newly.size());
      for (std::size_t c : newly) lost_flag_[c] = 0;
    }
    assigned_[v] = 0;
  }

  const Instance& inst_;
  const PredicateFamily& f_;
  const std::vector<std::size_t>& cons_;
  Assignment& tau_;
  std::uint64_t& nodes_;
  std::uint64_t node_cap_;
  std::vector<std::vector<std::size_t>> local_inc_;
  std::vector<VarId> order_;
  std::vector<std::vector<std::size_t>> order_inc_;
  std::vector<char> assigned_;
  std::vector<char> lost_flag_;
  std::vector<Symbol> current_;
  std::vector<Symbol> best_tau_;
  std::size_t best_ = 0;
  Assignment value_ = Assignment(inst_.num_vars(), 0);
};

}  // namespace

ValueResult exact_value(const Instance& instance, std::uint64_t node_cap) {
  require_nonempty(instance);
  Assignment tau = local_search_value(instance, 8, 0x5eed).witness;
  std::uint64_t nodes = 0;
  for (const auto& comp : constraint_components(instance)) {
    ComponentSearch search(instance, comp, tau, nodes, node_cap);
    search.run();
  }
  return {instance_value(instance, tau), tau};
}

std::size_t degree(const Instance& instance, VarId v) {
  if (v >= instance.num_vars()) throw ValidationError("variable id out of range");
  std::size_t d = 0;
  for (const auto& c : instance.constraints())
    d += static_cast<std::size_t>(std::count(c.scope.begin(), c.scope.end(), v));
  return d;
}

std::vector<std::size_t> degrees(const Instance& instance) {
  std::vector<std::size_t> d(instance.num_vars(), 0);
  for (const auto& c : instance.constraints())
    for (VarId v : c.scope) ++d[v];
  return d;
}

std::size_t max_degree(const Instance& instance) {
  auto d = degrees(instance);
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

FamilyPtr dicut_family() {
  static const FamilyPtr family = std::make_shared<const PredicateFamily>(
      2, 2, std::vector<std::vector<bool>>{{false, false, true, false}}, std::vector<std::string>{"dicut"});
  return family;
}

FamilyPtr two_sat_family() {
  static const FamilyPtr family = [] {
    std::vector<std::vector<bool>> tables;
    std::vector<std::string> names;
    for (Symbol b = 0; b < 2; ++b) {
      std::vector<bool> t(4);
      for (std::size_t idx = 0; idx < 4; ++idx) t[idx] = (idx >> 1) == b;
      tables.push_back(t);
      names.push_back("u" + std::to_string(b));
    }
    for (std::size_t falsified = 0; falsified < 4; ++falsified) {
      std::vector<bool> t(4, true);
      t[falsified] = false;
      tables.push_back(t);
      names.push_back("c" + std::to_string(falsified >> 1) + std::to_string(falsified & 1));
    }
    return std::make_shared<const PredicateFamily>(2, 2, tables, names);
  }();
  return family;
}

Instance complete_dicut(std::size_t n) {
  std::vector<Constraint> cs;
  for (VarId i = 0; i < n; ++i)
    for (VarId j = i + 1; j < n; ++j) {
      cs.push_back({{i, j}, 0});
      cs.push_back({{j, i}, 0});
    }
  return Instance(dicut_family(), n, std::move(cs));
}

Instance all_clause_e2sat(std::size_t n) {
  std::vector<Constraint> cs;
  for (VarId i = 0; i < n; ++i)
    for (VarId j = i + 1; j < n; ++j)
      for (PredId p = 2; p < 6; ++p) cs.push_back({{i, j}, p});
  return Instance(two_sat_family(), n, std::move(cs));
}

Instance two_sat_unary_pair() {
  return Instance(two_sat_family(), 2, {{{0, 1}, 0}, {{0, 1}, 1}});
}

Instance disjoint_union(const std::vector<Instance>& parts) {
  if (parts.empty()) throw ValidationError("disjoint_union needs at least one part");
  std::vector<Constraint> cs;
  std::size_t offset = 0;
  for (const auto& part : parts) {
    if (!(part.family() == parts.front().family())) throw ValidationError("disjoint_union: family mismatch");
    for (auto c : part.constraints()) {
      for (auto& v : c.scope) v += static_cast<VarId>(offset);
      cs.push_back(std::move(c));
    }
    offset += part.num_vars();
  }
  return Instance(parts.front().family_ptr(), offset, std::move(cs));
}

Instance random_instance(FamilyPtr family, std::size_t num_vars, std::size_t num_constraints, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(family->arity());
  if (num_vars < k) throw ValidationError("need at least k variables");
  CounterRng rng(seed);
  std::vector<Constraint> cs;
  std::vector<VarId> pool(num_vars);
  for (std::size_t i = 0; i < num_constraints; ++i) {
    std::iota(pool.begin(), pool.end(), 0);
    Constraint c;
    for (std::size_t j = 0; j < k; ++j) {
      auto pick = j + rng.below(num_vars - j);
      std::swap(pool[j], pool[pick]);
      c.scope.push_back(pool[j]);
    }
    c.pred = static_cast<PredId>(rng.below(family->size()));
    cs.push_back(std::move(c));
  }
  return Instance(std::move(family), num_vars, std::move(cs));
}

}  // namespace csplab
