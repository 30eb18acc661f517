#include "csplab/stream.hpp"

#include <algorithm>
#include <bit>

#include "csplab/errors.hpp"

namespace csplab {

std::string to_string(const StreamOutput& out) {
  if (std::holds_alternative<bool>(out)) return std::get<bool>(out) ? "1" : "0";
  return std::get<Rational>(out).get_str();
}

std::uint64_t bits_for(std::uint64_t n) { return std::max<std::uint64_t>(1, std::bit_width(n)); }

StreamRun run_multipass(StreamingAlgorithm& alg, const Instance& instance, std::uint64_t seed, std::size_t pass_cap) {
  if (instance.empty()) throw ValidationError("stream has no constraints");
  StreamRun run;
  run.seed = seed;
  alg.init(seed, instance.num_vars());
  run.peak_tracked_bits = alg.state_bits();
  while (alg.wants_pass()) {
    if (run.passes_used >= pass_cap)
      throw PassCapExceeded("algorithm requested more than " + std::to_string(pass_cap) + " passes");
    alg.begin_pass(run.passes_used, CounterRng(derive_seed(seed, run.passes_used)));
    ++run.passes_used;
    for (const auto& c : instance.constraints()) {
      alg.process(c);
      run.peak_tracked_bits = std::max(run.peak_tracked_bits, alg.state_bits());
    }
    alg.end_pass();
    run.peak_tracked_bits = std::max(run.peak_tracked_bits, alg.state_bits());
  }
  run.output = alg.output();
  return run;
}

nlohmann::json to_json(const StreamRun& run) {
  nlohmann::json j;
  j["passes_used"] = run.passes_used;
  j["peak_tracked_bits"] = run.peak_tracked_bits;
  j["output"] = to_string(run.output);
  j["seed"] = run.seed;
  return j;
}

std::string summary_line(const StreamRun& run) {
  return "passes=" + std::to_string(run.passes_used) + " bits=" + std::to_string(run.peak_tracked_bits) +
         " output=" + to_string(run.output);
}

}  // namespace csplab
