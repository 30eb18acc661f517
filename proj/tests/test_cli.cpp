#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csplab/degree_reduce.hpp"
#include "csplab/dihp.hpp"
#include "csplab/instance_io.hpp"

using namespace csplab;

namespace {

struct Run {
  int code = 0;
  std::string out;
};

// stdout only; stderr goes to a scratch file.
Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + std::string(CSPLAB_BIN) + " " + args + " 2>/tmp/csplab_cli_stderr";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WEXITSTATUS(status);
  return r;
}

std::string last_stderr() {
  std::ifstream in("/tmp/csplab_cli_stderr");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return std::string(CSPLAB_DATA) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("documented examples") {
  auto v = run("value --instance " + data("dicut_n4.csp"));
  CHECK(v.code == 0);
  CHECK(v.out == "1/3\n");
  auto lp = run("lp --instance " + data("dicut_n4.csp"));
  CHECK(lp.code == 0);
  CHECK(lp.out == "1/2\n");
  auto curve = run("curve --family 2sat --grid 4");
  CHECK(curve.code == 0);
  auto rows = lines(curve.out);
  CHECK(rows.at(1) == "c,theta");
  CHECK(std::find(rows.begin(), rows.end(), "1,3/4") != rows.end());
  CHECK(std::find(rows.begin(), rows.end(), "1/2,1/2") != rows.end());
  CHECK(run("value --method exact --instance " + data("dicut_n6.csp")).out == "3/10\n");
  CHECK(run("lp --instance " + data("e2sat_n4.csp")).out == "1\n");
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("value").code == 1);
  CHECK(run("value --instance " + data("dicut_n4.csp") + " --method nope").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("--help").code == 0);
  CHECK(run("value --instance /nonexistent.csp").code == 2);
  CHECK(run("value --instance " + data("dicut_n4.csp"), "CSPLAB_CAP_ASSIGNMENTS=4").code == 2);
  CHECK(last_stderr().find("cap") != std::string::npos);
  CHECK(run("value --instance " + data("dicut_n4.csp"), "CSPLAB_CAP_ASSIGNMENTS=16").out == "1/3\n");
  CHECK(run("round --instance " + data("dicut_n4.csp") + " --seeds 0").code == 1);
  CHECK(run("dihp-sample --instance " + data("dicut_n3.csp") + " --alpha 1/4").code == 2);
  CHECK(run("fourier-check --check orthonormal --U 4 --m 3 --N 3 --k 3").code == 2);
}

TEST_CASE("config echo") {
  auto v = run("value --instance " + data("dicut_n4.csp") + " --method local --seed 5");
  auto header = last_stderr();
  REQUIRE(header.rfind("# config ", 0) == 0);
  auto cfg = nlohmann::json::parse(header.substr(9));
  CHECK(cfg["command"] == "value");
  CHECK(cfg["options"]["seed"] == "5");
  CHECK(cfg["options"]["method"] == "local");
  CHECK(cfg["invocation"] == "csplab value --instance " + data("dicut_n4.csp") + " --method local --seed 5");

  auto csv = lines(run("round --instance " + data("dicut_n4.csp") + " --seeds 2").out);
  REQUIRE(csv.at(0).rfind("# config ", 0) == 0);
  CHECK(nlohmann::json::parse(csv[0].substr(9))["options"]["seeds"] == "2");
  CHECK(csv.at(1) == "seed,lp_value,expected_value,realized_value");

  auto js = lines(run("stream-approx --instance " + data("dicut_n4.csp") + " --Q 20 --seeds 2").out);
  REQUIRE(js.size() == 3);
  CHECK(nlohmann::json::parse(js[0])["config"]["options"]["Q"] == "20");
  for (int i = 1; i <= 2; ++i) {
    auto row = nlohmann::json::parse(js[i]);
    for (const auto* key : {"estimate", "decision", "passes", "queries"}) CHECK(row.contains(key));
    CHECK(row["passes"].get<std::size_t>() == 1 + 3 * row["queries"].get<std::size_t>());
  }

  auto report = nlohmann::json::parse(run("fourier-check --check psi --U 3 --m 2").out);
  CHECK(report["pass"] == true);
  CHECK(report["config"]["options"]["U"] == "3");
}

TEST_CASE("seed sweeps are reproducible and ordered regardless of jobs") {
  const std::string base = "stream-approx --instance " + data("dicut_n4.csp") + " --Q 30 --seed 11 --seeds 5";
  auto one = lines(run(base + " --jobs 1").out);
  auto many = lines(run(base + " --jobs 4").out);
  REQUIRE(one.size() == 6);
  REQUIRE(many.size() == 6);
  for (std::size_t i = 1; i < 6; ++i) {
    CHECK(one[i] == many[i]);
    CHECK(nlohmann::json::parse(one[i])["seed"] == 10 + i);
  }
  CHECK(run(base + " --jobs 1").out == run(base + " --jobs 1").out);

  const std::string rounding = "round --instance " + data("e2sat_n4.csp") + " --seed 3 --seeds 7";
  auto r1 = lines(run(rounding).out), r3 = lines(run(rounding + " --jobs 3").out);
  CHECK(std::vector(r1.begin() + 1, r1.end()) == std::vector(r3.begin() + 1, r3.end()));
}

TEST_CASE("emitted instances re-parse to the same instance") {
  const auto dir = std::filesystem::temp_directory_path() / "csplab_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = (dir / "reduced.csp").string(), side = (dir / "side.json").string();
  auto r = run("reduce --instance " + data("dicut_n4.csp") + " --B 3 --D 2 --seed 9 --out " + out + " --sidecar " + side);
  REQUIRE(r.code == 0);
  auto expected = sample_bounded_instance(load_instance(data("dicut_n4.csp")), BlowupParams{3, 2, 0}, 9);
  CHECK(load_instance(out) == expected.instance);
  std::ifstream sin(side);
  auto sidecar = nlohmann::json::parse(sin);
  CHECK(sidecar["B"] == 3);
  CHECK(sidecar["seed"] == 9);
  CHECK(sidecar["config"]["command"] == "reduce");

  auto reduced = run("dihp-sample --instance " + data("dicut_n3.csp") + " --case no --seed 4 --output instance");
  REQUIRE(reduced.code == 0);
  auto inst = parse_instance(reduced.out);
  CHECK(parse_instance(to_text(inst)) == inst);
  auto joint = nlohmann::json::parse(run("dihp-sample --instance " + data("dicut_n3.csp") + " --case no --seed 4").out);
  auto base = load_instance(data("dicut_n3.csp"));
  auto g = build_gap_graph(base, solve_basic_lp(base));
  CHECK(reduce_to_instance(joint_input_from_json(joint["input"]), g) == inst);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dihp experiment output") {
  auto csv = lines(run("dihp-experiment --instance " + data("dicut_n3.csp") + " --yes 3 --no 2 --seed 1").out);
  REQUIRE(csv.size() == 2 + 5);
  CHECK(csv[1] == "seed,case,value_lb,value_ub,exact,m_Y,resamples,decision");
  CHECK(last_stderr().find("yes_pass=") != std::string::npos);
  auto js = nlohmann::json::parse(run("dihp-experiment --instance " + data("dicut_n3.csp") + " --yes 3 --no 2 --seed 1 --format json").out);
  CHECK(js["rows"].size() == 5);
  CHECK(js["c"] == "1/2");
  CHECK(js["s"] == "1/3");
}
