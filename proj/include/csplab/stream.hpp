#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "csplab/csp.hpp"
#include "csplab/rng.hpp"

namespace csplab {

using StreamOutput = std::variant<bool, Rational>;

std::string to_string(const StreamOutput& out);

// A multi-pass streaming algorithm. The driver calls init once, then
// begin_pass / process (in stream order) / end_pass while wants_pass() holds.
class StreamingAlgorithm {
 public:
  virtual ~StreamingAlgorithm() = default;
  virtual void init(std::uint64_t seed, std::size_t num_vars) = 0;
  virtual bool wants_pass() const = 0;
  // pass_rng is the substream derived from (seed, pass).
  virtual void begin_pass(std::size_t pass, CounterRng pass_rng) = 0;
  virtual void process(const Constraint& c) = 0;
  virtual void end_pass() = 0;
  virtual StreamOutput output() const = 0;
  // Self-reported size of the current state, in bits.
  virtual std::uint64_t state_bits() const = 0;
  // Nullopt means "unbounded".
  virtual std::optional<std::uint64_t> declared_space_bits() const { return std::nullopt; }
};

struct StreamRun {
  std::size_t passes_used = 0;
  std::uint64_t peak_tracked_bits = 0;
  StreamOutput output = false;
  std::uint64_t seed = 0;

  bool operator==(const StreamRun&) const = default;
};

class PassCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kDefaultPassCap = 10'000;

StreamRun run_multipass(StreamingAlgorithm& alg, const Instance& instance, std::uint64_t seed,
                        std::size_t pass_cap = kDefaultPassCap);

nlohmann::json to_json(const StreamRun& run);
// "passes=<p> bits=<b> output=<o>"
std::string summary_line(const StreamRun& run);

// Bits needed to store a value in [0, n].
std::uint64_t bits_for(std::uint64_t n);

// One pass, outputs m.
class CountingAlgorithm : public StreamingAlgorithm {
 public:
  void init(std::uint64_t, std::size_t) override { count_ = 0, passes_ = 0; }
  bool wants_pass() const override { return passes_ == 0; }
  void begin_pass(std::size_t, CounterRng) override {}
  void process(const Constraint&) override { ++count_; }
  void end_pass() override { ++passes_; }
  StreamOutput output() const override { return Rational(static_cast<unsigned long>(count_)); }
  std::uint64_t state_bits() const override { return bits_for(count_) + 1; }
  std::optional<std::uint64_t> declared_space_bits() const override { return 64; }

 private:
  std::uint64_t count_ = 0;
  std::size_t passes_ = 0;
};

// Counts DICUT constraints and reports m/4, the expected number satisfied by
// a uniformly random assignment.
class QuarterCutAlgorithm : public StreamingAlgorithm {
 public:
  void init(std::uint64_t, std::size_t) override { count_ = 0, done_ = false; }
  bool wants_pass() const override { return !done_; }
  void begin_pass(std::size_t, CounterRng) override {}
  void process(const Constraint&) override { ++count_; }
  void end_pass() override { done_ = true; }
  StreamOutput output() const override { return Rational(static_cast<unsigned long>(count_)) / 4; }
  std::uint64_t state_bits() const override { return bits_for(count_) + 1; }
  std::optional<std::uint64_t> declared_space_bits() const override { return 64; }

 private:
  std::uint64_t count_ = 0;
  bool done_ = false;
};

// Records everything it sees; used to check what process() observes.
class RecordingAlgorithm : public StreamingAlgorithm {
 public:
  explicit RecordingAlgorithm(std::size_t passes) : passes_wanted_(passes) {}
  void init(std::uint64_t, std::size_t) override { seen_.clear(), draws_.clear(), passes_ = 0; }
  bool wants_pass() const override { return passes_ < passes_wanted_; }
  void begin_pass(std::size_t, CounterRng rng) override {
    seen_.emplace_back();
    draws_.push_back(rng());
  }
  void process(const Constraint& c) override { seen_.back().push_back(c); }
  void end_pass() override { ++passes_; }
  StreamOutput output() const override { return Rational(static_cast<unsigned long>(passes_)); }
  std::uint64_t state_bits() const override {
    std::uint64_t n = 0;
    for (const auto& p : seen_) n += p.size();
    return 64 * n;
  }

  const std::vector<std::vector<Constraint>>& seen() const { return seen_; }
  const std::vector<std::uint64_t>& draws() const { return draws_; }

 private:
  std::size_t passes_wanted_;
  std::size_t passes_ = 0;
  std::vector<std::vector<Constraint>> seen_;
  std::vector<std::uint64_t> draws_;
};

}  // namespace csplab
