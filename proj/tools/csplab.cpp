#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "csplab/basic_lp.hpp"
#include "csplab/curves.hpp"
#include "csplab/degree_reduce.hpp"
#include "csplab/dihp.hpp"
#include "csplab/errors.hpp"
#include "csplab/fourier.hpp"
#include "csplab/instance_io.hpp"
#include "csplab/lp_approx.hpp"
#include "csplab/stream.hpp"

using namespace csplab;
using nlohmann::json;

namespace {

std::string invocation;

// Resolved options of the subcommand that ran, plus the literal command line.
json config_json(const CLI::App& sub) {
  json options = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string name = opt->get_name();
    while (!name.empty() && name[0] == '-') name.erase(0, 1);
    if (!opt->results().empty())
      options[name] = opt->results().size() == 1 ? json(opt->results()[0]) : json(opt->results());
    else if (opt->get_expected_min() == 0)
      options[name] = false;
    else
      options[name] = opt->get_default_str();
  }
  return {{"command", sub.get_name()}, {"invocation", invocation}, {"options", options}};
}

void csv_header(const CLI::App& sub) { std::cout << "# config " << config_json(sub).dump() << "\n"; }

Rational rational_arg(const std::string& text) { return parse_rational(text); }

// Runs f(seed + i) for i < count on `jobs` threads; results come back in seed
// order whatever the completion order.
template <class Row>
std::vector<Row> run_seeds(std::uint64_t seed, std::size_t count, unsigned jobs,
                           const std::function<Row(std::uint64_t)>& f) {
  std::vector<Row> rows(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        rows[i] = f(seed + i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

struct SeedOptions {
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  unsigned jobs = 1;
  std::string format;
};

void add_seed_options(CLI::App* sub, SeedOptions& o, const std::string& default_format) {
  o.format = default_format;
  sub->add_option("--seed", o.seed, "base seed")->capture_default_str();
  sub->add_option("--seeds", o.seeds, "number of runs; run i uses seed+i")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--jobs", o.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
}

// One JSON object per line after a config line, or CSV after a "# config" line.
void emit_rows(const CLI::App& sub, const std::string& format, const std::vector<std::string>& columns,
               const std::vector<json>& rows) {
  if (format == "json") {
    std::cout << json{{"config", config_json(sub)}}.dump() << "\n";
    for (const auto& r : rows) std::cout << r.dump() << "\n";
    return;
  }
  csv_header(sub);
  for (std::size_t c = 0; c < columns.size(); ++c) std::cout << (c ? "," : "") << columns[c];
  std::cout << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& v = r.at(columns[c]);
      std::cout << (c ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    std::cout << "\n";
  }
}

OneWiseDistribution parse_mask(const std::string& text, std::size_t N, std::size_t k) {
  if (text == "uniform") return OneWiseDistribution::uniform(N, k);
  if (text == "diagonal") return OneWiseDistribution::diagonal(N, k);
  std::vector<Rational> pmf;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) pmf.push_back(parse_rational(item));
  return OneWiseDistribution(N, k, pmf);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) invocation += (i ? " " : "") + std::string(i ? argv[i] : "csplab");

  CLI::App app{"Streaming Max-CSP approximation and hard-instance toolkit"};
  app.require_subcommand(1);
  std::function<void()> action;

  std::string instance_path;
  auto load = [&] { return load_instance(instance_path); };

  // value
  std::string method = "brute";
  int restarts = 20;
  std::uint64_t seed = 0;
  std::uint64_t cap = 0;
  auto* value = app.add_subcommand("value", "integral value of an instance");
  value->add_option("--instance", instance_path, "instance file (text or JSON)")->required();
  value->add_option("--method", method, "brute, exact or local")
      ->capture_default_str()
      ->check(CLI::IsMember({"brute", "exact", "local"}));
  value->add_option("--restarts", restarts, "local search restarts")->capture_default_str();
  value->add_option("--seed", seed, "local search seed")->capture_default_str();
  value->add_option("--cap", cap, "assignment cap for brute force (0: CSPLAB_CAP_ASSIGNMENTS or 2^24)")
      ->capture_default_str();
  value->callback([&] {
    action = [&] {
      std::cerr << "# config " << config_json(*value).dump() << "\n";
      auto inst = load();
      ValueResult r = method == "exact"   ? exact_value(inst)
                      : method == "local" ? local_search_value(inst, restarts, seed)
                      : cap               ? brute_force_value(inst, cap)
                                          : brute_force_value(inst);
      std::cout << to_string(r.value) << "\n";
    };
  });

  // lp
  std::string lp_format = "value";
  auto* lp = app.add_subcommand("lp", "exact BasicLP optimum");
  lp->add_option("--instance", instance_path, "instance file")->required();
  lp->add_option("--format", lp_format, "value or json")->capture_default_str()->check(CLI::IsMember({"value", "json"}));
  lp->callback([&] {
    action = [&] {
      auto sol = solve_basic_lp(load());
      if (lp_format == "json") {
        std::cout << json{{"config", config_json(*lp)}, {"solution", to_json(sol)}}.dump(2) << "\n";
        return;
      }
      std::cerr << "# config " << config_json(*lp).dump() << "\n";
      std::cout << to_string(sol.objective) << "\n";
    };
  });

  // round
  SeedOptions round_opts;
  auto* round = app.add_subcommand("round", "independent rounding of the half-integral LP optimum");
  round->add_option("--instance", instance_path, "DICUT or 2SAT instance")->required();
  add_seed_options(round, round_opts, "csv");
  round->callback([&] {
    action = [&] {
      auto inst = load();
      auto curve = known_curve(inst.family());
      if (curve == KnownCurve::None) throw ValidationError("round needs a DICUT or 2SAT instance");
      auto sol = solve_basic_lp(inst);
      auto rows = run_seeds<json>(round_opts.seed, round_opts.seeds, round_opts.jobs, [&](std::uint64_t s) {
        auto r = curve == KnownCurve::Dicut ? round_dicut(inst, sol, s) : round_2sat(inst, sol, s);
        return json{{"seed", s},
                    {"lp_value", to_string(sol.objective)},
                    {"expected_value", to_string(r.expected_value)},
                    {"realized_value", to_string(instance_value(inst, r.tau))}};
      });
      emit_rows(*round, round_opts.format, {"seed", "lp_value", "expected_value", "realized_value"}, rows);
    };
  });

  // stream-approx and decide share the decider parameters.
  std::string c_text = "1/2", eps_text = "1/10";
  DeciderConfig decider;
  auto add_decider_options = [&](CLI::App* sub) {
    sub->add_option("--instance", instance_path, "instance file")->required();
    sub->add_option("--c", c_text, "completeness threshold")->capture_default_str();
    sub->add_option("--eps", eps_text, "gap")->capture_default_str();
    sub->add_option("--B", decider.params.B, "rounds and degree bound")->capture_default_str();
    sub->add_option("--D", decider.params.D, "slots per unit degree")->capture_default_str();
    sub->add_option("--Q", decider.Q, "sampled constraint copies")->capture_default_str();
    sub->add_option("--r", decider.r, "neighborhood radius")->capture_default_str();
  };
  auto decide_row = [&](const Instance& inst, std::uint64_t s) {
    auto d = gap_decider(inst, rational_arg(c_text), rational_arg(eps_text), s, decider);
    return json{{"seed", s},
                {"estimate", to_string(d.approx.estimate)},
                {"threshold", to_string(d.threshold)},
                {"decision", d.decision ? 1 : 0},
                {"passes", d.approx.run.passes_used},
                {"queries", d.approx.queries},
                {"bits", d.approx.run.peak_tracked_bits}};
  };

  SeedOptions stream_opts;
  auto* stream = app.add_subcommand("stream-approx", "ApproxLP estimate and gap decision per seed");
  add_decider_options(stream);
  add_seed_options(stream, stream_opts, "json");
  stream->callback([&] {
    action = [&] {
      auto inst = load();
      auto rows = run_seeds<json>(stream_opts.seed, stream_opts.seeds, stream_opts.jobs,
                                  [&](std::uint64_t s) { return decide_row(inst, s); });
      emit_rows(*stream, stream_opts.format, {"seed", "estimate", "threshold", "decision", "passes", "queries", "bits"},
                rows);
    };
  });

  std::uint64_t decide_seed = 0;
  auto* decide = app.add_subcommand("decide", "one gap-decider run: summary line, then the decision");
  add_decider_options(decide);
  decide->add_option("--seed", decide_seed, "seed")->capture_default_str();
  decide->callback([&] {
    action = [&] {
      std::cerr << "# config " << config_json(*decide).dump() << "\n";
      auto d = gap_decider(load(), rational_arg(c_text), rational_arg(eps_text), decide_seed, decider);
      std::cout << summary_line(d.approx.run) << "\n" << "decision=" << (d.decision ? 1 : 0) << "\n";
    };
  });

  // reduce
  BlowupParams blowup{8, 8, 0};
  std::uint64_t reduce_seed = 0;
  std::string out_path, sidecar_path;
  auto* reduce = app.add_subcommand("reduce", "sample the bounded-degree blow-up I_{B,D}");
  reduce->add_option("--instance", instance_path, "instance file")->required();
  reduce->add_option("--B", blowup.B, "rounds and degree bound")->capture_default_str();
  reduce->add_option("--D", blowup.D, "slots per unit degree")->capture_default_str();
  reduce->add_option("--seed", reduce_seed, "seed")->capture_default_str();
  reduce->add_option("--out", out_path, "instance output path (default stdout)");
  reduce->add_option("--sidecar", sidecar_path, "sidecar JSON path (B, D, seed, slot map)");
  reduce->callback([&] {
    action = [&] {
      auto sample = sample_bounded_instance(load(), blowup, reduce_seed);
      write_text(out_path, "# config " + config_json(*reduce).dump() + "\n" + to_text(sample.instance));
      if (!sidecar_path.empty()) {
        auto side = sidecar_json(sample);
        side["config"] = config_json(*reduce);
        write_text(sidecar_path, side.dump(2) + "\n");
      }
    };
  });

  // DIHP
  std::size_t dihp_n = 6, dihp_K = 8;
  std::string alpha_text = "1/6", dihp_eps_text = "1/10", dihp_case = "yes", dihp_output = "joint";
  std::uint64_t dihp_seed = 0;
  auto dihp_params = [&] {
    DihpParams p;
    p.n = dihp_n;
    p.alpha = rational_arg(alpha_text);
    p.K = dihp_K;
    p.seed = dihp_seed;
    return p;
  };
  auto gap_graph = [&](const Instance& inst) { return build_gap_graph(inst, solve_basic_lp(inst)); };
  auto add_dihp_options = [&](CLI::App* sub) {
    sub->add_option("--instance", instance_path, "base instance")->required();
    sub->add_option("--n", dihp_n, "blow-up size")->capture_default_str();
    sub->add_option("--alpha", alpha_text, "matched fraction per player")->capture_default_str();
    sub->add_option("--K", dihp_K, "players per edge")->capture_default_str();
    sub->add_option("--seed", dihp_seed, "seed")->capture_default_str();
  };

  auto* dihp_build = app.add_subcommand("dihp-build", "gap graph of an instance and its certified parameters");
  dihp_build->add_option("--instance", instance_path, "base instance")->required();
  dihp_build->add_option("--eps", dihp_eps_text, "gap")->capture_default_str();
  dihp_build->callback([&] {
    action = [&] {
      auto g = gap_graph(load());
      std::cout << json{{"config", config_json(*dihp_build)},
                        {"graph", to_json(g)},
                        {"certified", to_json(certified_parameters(g, rational_arg(dihp_eps_text)))}}
                       .dump(2)
                << "\n";
    };
  });

  auto* dihp_sample = app.add_subcommand("dihp-sample", "draw one yes or no DIHP input");
  add_dihp_options(dihp_sample);
  dihp_sample->add_option("--case", dihp_case, "yes or no")->capture_default_str()->check(CLI::IsMember({"yes", "no"}));
  dihp_sample->add_option("--output", dihp_output, "joint (JSON players) or instance (reduced CSP)")
      ->capture_default_str()
      ->check(CLI::IsMember({"joint", "instance"}));
  dihp_sample->callback([&] {
    action = [&] {
      auto g = gap_graph(load());
      auto params = dihp_params();
      std::vector<Residue> hidden;
      JointInput input;
      if (dihp_case == "yes") {
        auto y = sample_yes(g, params);
        hidden = std::move(y.hidden);
        input = std::move(y.input);
      } else {
        input = sample_no(g, params);
      }
      if (dihp_output == "instance") {
        std::cout << "# config " << config_json(*dihp_sample).dump() << "\n" << to_text(reduce_to_instance(input, g));
        return;
      }
      json out{{"config", config_json(*dihp_sample)}, {"input", to_json(input)}};
      if (dihp_case == "yes") out["hidden"] = hidden;
      std::cout << out.dump(2) << "\n";
    };
  });

  DihpExperimentConfig experiment;
  std::string experiment_format = "csv";
  auto* dihp_experiment = app.add_subcommand("dihp-experiment", "completeness and soundness over yes/no samples");
  add_dihp_options(dihp_experiment);
  dihp_experiment->add_option("--eps", dihp_eps_text, "slack on c and s")->capture_default_str();
  dihp_experiment->add_option("--yes", experiment.yes_samples, "yes samples")->capture_default_str();
  dihp_experiment->add_option("--no", experiment.no_samples, "no samples")->capture_default_str();
  dihp_experiment->add_option("--max-resamples", experiment.max_resamples, "redraws of empty reduced instances")
      ->capture_default_str();
  dihp_experiment->add_option("--format", experiment_format, "csv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  dihp_experiment->callback([&] {
    action = [&] {
      experiment.params = dihp_params();
      experiment.epsilon = rational_arg(dihp_eps_text);
      auto result = run_dihp_experiment(load(), experiment);
      std::cerr << "c=" << to_string(result.c) << " s=" << to_string(result.s) << " N=" << result.N
                << " yes_pass=" << result.passes("yes") << "/" << result.count("yes")
                << " no_pass=" << result.passes("no") << "/" << result.count("no") << "\n";
      if (experiment_format == "csv") {
        csv_header(*dihp_experiment);
        std::cout << experiment_csv(result);
        return;
      }
      json rows = json::array();
      for (const auto& r : result.rows)
        rows.push_back({{"seed", r.seed},
                        {"case", r.kind},
                        {"value_lb", to_string(r.value_lb)},
                        {"value_ub", to_string(r.value_ub)},
                        {"exact", r.exact},
                        {"constraints", r.constraints},
                        {"resamples", r.resamples},
                        {"decision", r.decision},
                        {"lifted_all", r.lifted_all}});
      std::cout << json{{"config", config_json(*dihp_experiment)},
                        {"c", to_string(result.c)},
                        {"s", to_string(result.s)},
                        {"N", result.N},
                        {"rows", rows}}
                       .dump(2)
                << "\n";
    };
  });

  // curve
  std::string family = "dicut";
  std::size_t grid = 64, budget = 200;
  std::uint64_t curve_seed = 0;
  unsigned curve_jobs = 1;
  auto* curve = app.add_subcommand("curve", "threshold curve as CSV");
  curve->add_option("--family", family, "dicut, 2sat or file")
      ->capture_default_str()
      ->check(CLI::IsMember({"dicut", "2sat", "file"}));
  curve->add_option("--instance", instance_path, "instance whose family is searched (family=file)");
  curve->add_option("--grid", grid, "grid denominator")->capture_default_str()->check(CLI::PositiveNumber);
  curve->add_option("--budget", budget, "random candidates for family=file")->capture_default_str();
  curve->add_option("--seed", curve_seed, "search seed")->capture_default_str();
  curve->add_option("--jobs", curve_jobs, "search threads")->capture_default_str()->check(CLI::PositiveNumber);
  curve->callback([&] {
    action = [&] {
      std::vector<CurvePoint> points;
      if (family == "file") {
        if (instance_path.empty()) throw ValidationError("family=file needs --instance");
        SearchConfig cfg;
        cfg.jobs = curve_jobs;
        points = empirical_curve(load().family_ptr(), unit_grid(grid), budget, curve_seed, cfg);
      } else {
        points = closed_form_curve(family == "dicut" ? KnownCurve::Dicut : KnownCurve::TwoSat, grid);
      }
      csv_header(*curve);
      std::cout << curve_csv(points);
    };
  });

  // fourier-check
  std::string check = "orthonormal", mask = "uniform", set_kind = "full";
  std::size_t universe = 2, arity = 2, edges = 1, modulus = 2, max_d = 1, level = 1, steps = 64;
  double w_lo = 0.1, w_hi = 8, keep = 0.5;
  std::uint64_t fourier_seed = 0;
  auto* fourier = app.add_subcommand("fourier-check", "structural checks on labeled matchings; prints a JSON report");
  fourier->add_option("--check", check, "check to run")
      ->capture_default_str()
      ->check(CLI::IsMember({"psi", "orthonormal", "kernel-rows", "pullback", "vanish", "svd", "global", "decay",
                             "decay-monotone"}));
  fourier->add_option("--U", universe, "part size |U|")->capture_default_str();
  fourier->add_option("--k", arity, "arity")->capture_default_str();
  fourier->add_option("--m", edges, "matching size")->capture_default_str();
  fourier->add_option("--N", modulus, "label modulus")->capture_default_str();
  fourier->add_option("--max-d", max_d, "largest character support (orthonormal)")->capture_default_str();
  fourier->add_option("--mu", mask, "uniform, diagonal, or a comma-separated pmf over Z_N^k")->capture_default_str();
  fourier->add_option("--set", set_kind, "full or random (global, decay)")
      ->capture_default_str()
      ->check(CLI::IsMember({"full", "random"}));
  fourier->add_option("--keep", keep, "membership probability for --set random")->capture_default_str();
  fourier->add_option("--seed", fourier_seed, "seed for --set random")->capture_default_str();
  fourier->add_option("--level", level, "level (decay-monotone)")->capture_default_str();
  fourier->add_option("--w-lo", w_lo, "grid start (decay-monotone)")->capture_default_str();
  fourier->add_option("--w-hi", w_hi, "grid end (decay-monotone)")->capture_default_str();
  fourier->add_option("--steps", steps, "grid points (decay-monotone)")->capture_default_str();
  fourier->callback([&] {
    action = [&] {
      auto space = [&] { return LabeledMatchingSpace(standard_universe(arity, universe), edges, modulus); };
      auto members = [&](const LabeledMatchingSpace& sp) {
        std::vector<std::size_t> out;
        CounterRng rng(fourier_seed);
        for (std::size_t i = 0; i < sp.size(); ++i)
          if (set_kind == "full" || rng.uniform01() < keep) out.push_back(i);
        if (out.empty()) throw ValidationError("random set came out empty");
        return out;
      };
      CheckReport report;
      if (check == "psi") {
        report = check_psi_containment(universe, edges, arity);
      } else if (check == "orthonormal") {
        report = check_orthonormal(standard_universe(arity, universe), edges, modulus, max_d);
      } else if (check == "kernel-rows") {
        report = check_kernel_rows(markov_kernel(space(), parse_mask(mask, modulus, arity)));
      } else if (check == "pullback") {
        report = check_constant_pullback(markov_kernel(space(), parse_mask(mask, modulus, arity)));
      } else if (check == "vanish") {
        report = check_single_coordinate_vanish(parse_mask(mask, modulus, arity));
      } else if (check == "svd") {
        auto sp = space();
        std::vector<Label> all;
        for (std::size_t b = 0; b < sp.seed_count(); ++b) all.push_back(vector_at(b, modulus, sp.seed_dims()));
        report = svd_structure_check(sp, parse_mask(mask, modulus, arity), all);
      } else if (check == "global") {
        auto sp = space();
        report = check_global_set(sp, members(sp), LabeledMatching{modulus, 0, {}});
      } else if (check == "decay") {
        auto sp = space();
        report = fourier_decay_check(sp, parse_mask(mask, modulus, arity), members(sp));
      } else {
        if (steps < 2) throw ValidationError("decay-monotone needs at least 2 grid points");
        std::vector<double> grid_w;
        for (std::size_t i = 0; i < steps; ++i)
          grid_w.push_back(w_lo + (w_hi - w_lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
        report = check_decay_bound_monotone(static_cast<double>(universe), level, grid_w);
      }
      auto out = to_json(report);
      out["config"] = config_json(*fourier);
      std::cout << out.dump(2) << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    action();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const PassCapExceeded& e) {
    std::cerr << "pass cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
