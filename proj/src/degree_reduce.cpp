#include "csplab/degree_reduce.hpp"

#include <algorithm>
#include <cmath>

#include "csplab/errors.hpp"
#include "csplab/stream.hpp"

namespace csplab {

void BlowupParams::validate() const {
  if (B < 1 || D < 1) throw ValidationError("B and D must be at least 1");
}

BlowupParams choose_params(const Rational& epsilon, const PredicateFamily& family) {
  if (sgn(epsilon) <= 0 || epsilon >= 1) throw ValidationError("epsilon must lie in (0, 1)");
  BlowupParams p;
  p.epsilon = epsilon;
  const Rational d = Rational(10 * family.arity()) / epsilon;
  p.D = ceil(d).get_ui();
  const long double eps = epsilon.get_d();
  const long double inner = static_cast<long double>(family.arity()) * static_cast<long double>(p.D) *
                                std::log(static_cast<long double>(family.alphabet())) +
                            6.0L;
  p.B = static_cast<std::size_t>(std::ceil(16.0L * inner / (eps * eps)));
  return p;
}

std::pair<VarId, std::size_t> SlotMap::locate(VarId id) const {
  if (id >= total()) throw ValidationError("slot id out of range");
  auto it = std::upper_bound(offsets.begin(), offsets.end(), static_cast<std::size_t>(id));
  auto v = static_cast<VarId>(it - offsets.begin() - 1);
  return {v, id - offsets[v]};
}

SlotMap make_slot_map(const Instance& instance, std::size_t D) {
  SlotMap map;
  map.D = D;
  map.offsets.assign(instance.num_vars() + 1, 0);
  auto deg = degrees(instance);
  for (std::size_t v = 0; v < instance.num_vars(); ++v) map.offsets[v + 1] = map.offsets[v] + D * deg[v];
  return map;
}

BoundedSample sample_bounded_instance(const Instance& instance, const BlowupParams& params, std::uint64_t seed) {
  params.validate();
  if (instance.empty()) throw ValidationError("instance has no constraints");
  SlotMap slots = make_slot_map(instance, params.D);
  CounterRng rng(seed);
  std::vector<Constraint> out;
  out.reserve(instance.size() * params.B);
  std::vector<std::vector<std::size_t>> pool(instance.num_vars());
  for (std::size_t round = 0; round < params.B; ++round) {
    for (VarId v = 0; v < instance.num_vars(); ++v) {
      pool[v].resize(slots.slots_of(v));
      for (std::size_t j = 0; j < pool[v].size(); ++j) pool[v][j] = j;
    }
    for (const auto& c : instance.constraints()) {
      Constraint copy{{}, c.pred};
      for (VarId v : c.scope) {
        if (pool[v].empty()) throw std::logic_error("slot pool exhausted");
        auto pick = rng.below(pool[v].size());
        copy.scope.push_back(slots.id(v, pool[v][pick]));
        pool[v][pick] = pool[v].back();
        pool[v].pop_back();
      }
      out.push_back(std::move(copy));
    }
  }
  return {Instance(instance.family_ptr(), slots.total(), std::move(out)), slots, params, seed};
}

nlohmann::json sidecar_json(const BoundedSample& sample) {
  nlohmann::json j;
  j["B"] = sample.params.B;
  j["D"] = sample.params.D;
  j["seed"] = sample.seed;
  j["slot_offsets"] = sample.slots.offsets;
  return j;
}

BoundedDegreeOracle::BoundedDegreeOracle(BlowupParams params, std::uint64_t seed)
    : params_(std::move(params)), seed_(seed), rng_(seed) {
  params_.validate();
}

void BoundedDegreeOracle::set_stream_length(std::size_t m, int arity) {
  if (m == 0) throw ValidationError("stream has no constraints");
  if (length_known_ && (m != m_ || arity != arity_)) throw ValidationError("stream length changed");
  m_ = m;
  arity_ = arity;
  length_known_ = true;
}

bool BoundedDegreeOracle::begin(const OracleQuery& q) {
  if (!length_known_) throw ValidationError("oracle needs the stream length first");
  if (stage_ != Stage::Idle) throw std::logic_error("oracle query already in progress");
  if (q.constraint >= m_ || q.round >= params_.B || q.position >= static_cast<std::size_t>(arity_))
    throw ValidationError("malformed oracle query");
  if (auto it = cache_.find(q); it != cache_.end()) {
    answer_ = log_[it->second];
    return true;
  }
  current_ = q;
  stage_ = Stage::FetchVariable;
  cursor_ = 0;
  ++queries_;
  return false;
}

void BoundedDegreeOracle::observe(const Constraint& c) {
  switch (stage_) {
    case Stage::Idle:
      throw std::logic_error("no oracle query in progress");
    case Stage::FetchVariable:
      if (cursor_ == current_.constraint) var_ = c.scope[current_.position];
      break;
    case Stage::CountDegree:
      for (std::size_t p = 0; p < c.scope.size(); ++p)
        if (c.scope[p] == var_) {
          if (cursor_ == current_.constraint && p == current_.position) rank_ = degree_;
          ++degree_;
        }
      break;
    case Stage::Collect:
      for (std::size_t p = 0; p < c.scope.size(); ++p)
        if (c.scope[p] == var_) {
          auto [lo, hi] = wanted_.equal_range(occurrences_seen_);
          for (auto it = lo; it != hi; ++it) collected_.push_back({cursor_, it->second, p, c.pred});
          ++occurrences_seen_;
        }
      break;
  }
  ++cursor_;
}

void BoundedDegreeOracle::finish_pass() {
  if (cursor_ != m_) throw ValidationError("pass length differs from the stream length");
  ++passes_;
  cursor_ = 0;
  switch (stage_) {
    case Stage::Idle:
      throw std::logic_error("no oracle query in progress");
    case Stage::FetchVariable:
      degree_ = 0;
      rank_ = 0;
      stage_ = Stage::CountDegree;
      break;
    case Stage::CountDegree:
      known_degree_[var_] = degree_;
      resolve();
      occurrences_seen_ = 0;
      collected_.clear();
      stage_ = Stage::Collect;
      break;
    case Stage::Collect: {
      std::sort(collected_.begin(), collected_.end(), [](const CopyIncidence& a, const CopyIncidence& b) {
        return std::tie(a.round, a.constraint, a.position) < std::tie(b.round, b.constraint, b.position);
      });
      log_.push_back({var_, slot_, collected_});
      cache_[current_] = log_.size() - 1;
      answer_ = log_.back();
      stage_ = Stage::Idle;
      break;
    }
  }
}

std::size_t BoundedDegreeOracle::slot_for_rank(RoundState& st, std::size_t rank) {
  if (auto it = st.rank_slot.find(rank); it != st.rank_slot.end()) return it->second;
  const std::size_t total = params_.D * degree_;
  std::size_t pick = rng_.below(total - st.slot_rank.size());
  std::size_t slot = 0;
  for (;; ++slot) {
    if (st.slot_rank.count(slot)) continue;
    if (pick-- == 0) break;
  }
  st.rank_slot[rank] = slot;
  st.slot_rank[slot] = rank;
  return slot;
}

std::optional<std::size_t> BoundedDegreeOracle::rank_for_slot(RoundState& st, std::size_t slot) {
  if (auto it = st.slot_rank.find(slot); it != st.slot_rank.end()) return it->second;
  const std::size_t total = params_.D * degree_;
  const std::size_t unrevealed = degree_ - st.rank_slot.size();
  const std::size_t available = total - st.slot_rank.size();
  if (!rng_.bernoulli(unrevealed, available)) {
    st.slot_rank[slot] = std::nullopt;
    return std::nullopt;
  }
  std::size_t pick = rng_.below(unrevealed);
  std::size_t rank = 0;
  for (;; ++rank) {
    if (st.rank_slot.count(rank)) continue;
    if (pick-- == 0) break;
  }
  st.rank_slot[rank] = slot;
  st.slot_rank[slot] = rank;
  return rank;
}

void BoundedDegreeOracle::resolve() {
  slot_ = slot_for_rank(rounds_[{var_, current_.round}], rank_);
  wanted_.clear();
  for (std::size_t round = 0; round < params_.B; ++round)
    if (auto r = rank_for_slot(rounds_[{var_, round}], slot_)) wanted_.emplace(*r, round);
}

const SlotNeighborhood& BoundedDegreeOracle::query(const Instance& stream, const OracleQuery& q) {
  if (!length_known_) set_stream_length(stream.size(), stream.family().arity());
  if (begin(q)) return *answer_;
  while (!ready()) {
    for (const auto& c : stream.constraints()) observe(c);
    finish_pass();
  }
  return *answer_;
}

BoundedSample BoundedDegreeOracle::materialize(const Instance& stream) {
  SlotMap slots = make_slot_map(stream, params_.D);
  std::vector<Constraint> out(stream.size() * params_.B);
  for (std::size_t round = 0; round < params_.B; ++round)
    for (std::size_t i = 0; i < stream.size(); ++i) {
      auto& copy = out[round * stream.size() + i];
      copy.pred = stream.constraint(i).pred;
      for (std::size_t t = 0; t < stream.constraint(i).scope.size(); ++t) {
        const auto& a = query(stream, {i, round, t});
        copy.scope.push_back(slots.id(a.var, a.slot));
      }
    }
  return {Instance(stream.family_ptr(), slots.total(), std::move(out)), slots, params_, seed_};
}

std::uint64_t BoundedDegreeOracle::state_bits() const {
  const std::uint64_t idx = bits_for(m_) + bits_for(params_.B) + bits_for(static_cast<std::uint64_t>(arity_));
  const std::uint64_t slot = 32 + 32;
  std::uint64_t bits = 256;  // counters and generator state
  for (const auto& a : log_) bits += slot + a.copies.size() * (idx + 16);
  for (const auto& [key, st] : rounds_) bits += slot + (st.rank_slot.size() + st.slot_rank.size()) * 64;
  bits += cache_.size() * (idx + 32);
  return bits;
}

}  // namespace csplab

namespace csplab {

bool is_legal_blowup(const Instance& original, const BoundedSample& sample, std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  const auto& inst = sample.instance;
  const std::size_t m = original.size();
  const std::size_t B = sample.params.B;
  if (sample.slots.offsets != make_slot_map(original, sample.params.D).offsets) return fail("slot map mismatch");
  if (inst.num_vars() != sample.slots.total()) return fail("variable count differs from slot count");
  if (inst.size() != m * B) return fail("copy count differs from m*B");
  for (std::size_t round = 0; round < B; ++round) {
    std::vector<char> used(inst.num_vars(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& copy = inst.constraint(round * m + i);
      const auto& orig = original.constraint(i);
      if (copy.pred != orig.pred) return fail("predicate differs at copy " + std::to_string(round * m + i));
      for (std::size_t t = 0; t < orig.scope.size(); ++t) {
        auto [v, j] = sample.slots.locate(copy.scope[t]);
        if (v != orig.scope[t]) return fail("slot of the wrong variable at copy " + std::to_string(round * m + i));
        if (used[copy.scope[t]]++) return fail("slot reused within round " + std::to_string(round));
      }
    }
  }
  if (max_degree(inst) > B) return fail("degree exceeds B");
  return true;
}

Assignment lift_assignment(const SlotMap& slots, const Assignment& tau) {
  if (tau.size() + 1 != slots.offsets.size()) throw ValidationError("assignment length differs from num_vars");
  Assignment out(slots.total());
  for (VarId v = 0; v < tau.size(); ++v)
    for (std::size_t j = 0; j < slots.slots_of(v); ++j) out[slots.id(v, j)] = tau[v];
  return out;
}

}  // namespace csplab
