#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "c2lab/encode.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI from the repository root; stderr is discarded unless merged.
Run cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string("cd '") + C2LAB_SOURCE_DIR + "' && '" + C2LAB_CLI_PATH + "' " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  return s;
}

const fs::path kGoldens = fs::path(C2LAB_SOURCE_DIR) / "docs" / "goldens";

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("c2lab_test_cli_" + name); }

}  // namespace

TEST_CASE("outputs match the goldens") {
  std::ifstream list(kGoldens / "commands.txt");
  REQUIRE(list);
  std::string line;
  int checked = 0;
  while (std::getline(list, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find('|');
    const std::string name = trim(line.substr(0, bar));
    const std::string args = trim(line.substr(bar + 1));
    CAPTURE(name);
    const Run r = cli(args);
    CHECK(r.status == 0);
    CHECK(r.out == slurp(kGoldens / name));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("data files match the goldens") {
  const auto csv = scratch("random.csv");
  REQUIRE(cli("--seed 0 random-test --builtin c2-counterexample --trials 5 --embedding 8 --layers 3 --threads 1 --out " +
              csv.string())
              .status == 0);
  CHECK(slurp(csv) == slurp(kGoldens / "random-test-small.csv"));
  const auto curve = scratch("curve.csv");
  // global flags may also follow the subcommand
  REQUIRE(cli("train-test --builtin c2-counterexample --steps 20 --embedding 8 --layers 3 --seed 0 --out " +
              curve.string())
              .status == 0);
  CHECK(slurp(curve) == slurp(kGoldens / "train-test-small.csv"));
  fs::remove(csv);
  fs::remove(curve);
}

TEST_CASE("the documented examples") {
  CHECK(cli("encode --builtin c2-counterexample --which I1 --encoding eq1").out ==
        "q(a,a)\nq(b,b)\nq_G(a,b)\nq_G(b,a)\n");
  CHECK(cli("eval --builtin c2-counterexample --which I1 --goal-not-achieved").out == "true\n");
  CHECK(cli("eval --builtin c2-counterexample --which I2 --goal-not-achieved").out == "false\n");
  const Run three = cli("eval --builtin c2-counterexample --which I1 --formula 'exists>=3 x . q(x,x)'");
  CHECK(three.status == 0);
  CHECK(three.out == "false\n");
  CHECK(cli("plan-length --builtin c2-counterexample --which I1").out == "2\n");
  CHECK(cli("plan-length --builtin c2-counterexample --which I2").out == "0\n");

  const Run rgnn = cli("--format structured distinguish --builtin c2-counterexample --regime rgnn");
  CHECK(json::parse(rgnn.out)["distinguishable"] == false);
  const Run pair = cli("--format structured distinguish --builtin c2-counterexample --regime pairtype-c2");
  CHECK(json::parse(pair.out)["distinguishable"] == true);
  CHECK(json::parse(pair.out)["separating_round"] == 0);
  for (const char* regime : {"rgnn", "pairtype-c2", "ploi-sparse"}) {
    const Run same = cli(std::string("--format structured distinguish --builtin c2-counterexample --a I2 --b I2 --regime ") +
                         regime);
    CHECK(same.status == 0);
    CHECK(json::parse(same.out)["distinguishable"] == false);
  }
}

TEST_CASE("ploi equals eq1 without binary predicates") {
  const std::string input = "encode --input docs/goldens/unary-only.json --encoding ";
  const Run eq1 = cli(input + "eq1");
  CHECK(eq1.status == 0);
  CHECK(eq1.out == cli(input + "ploi").out);
}

TEST_CASE("labeled-graph dumps round-trip") {
  for (const char* which : {"I1", "I2"}) {
    const Run graph = cli(std::string("encode --builtin c2-counterexample --encoding labeled-graph --which ") + which);
    const Run ploi = cli(std::string("encode --builtin c2-counterexample --encoding ploi --which ") + which);
    const auto back = c2lab::from_labeled_graph(c2lab::parse_graph_dump(graph.out));
    CHECK(c2lab::dump_structure(back) == ploi.out);
  }
}

TEST_CASE("experiment summaries") {
  const Run random = cli("random-test --builtin c2-counterexample --trials 20 --embedding 16 --layers 4");
  CHECK(random.status == 0);
  CHECK(random.out.find("max rel_diff < 0.01, likely-indistinguishable\n") != std::string::npos);

  const Run floor = cli("train-test --builtin c2-counterexample --steps 100 --embedding 8 --layers 3");
  CHECK(floor.status == 0);
  CHECK(floor.out.find("min loss >= 0.95, floor-reached\n") != std::string::npos);

  const Run constant = cli(
      "--format structured train-test --builtin c2-counterexample --steps 300 --lr 0.01 --embedding 8 --layers 3 "
      "--target-a 0 --target-b 0");
  CHECK(constant.status == 0);
  CHECK(json::parse(constant.out)["verdict"] == "learned");
}

TEST_CASE("runs are reproducible from the seed") {
  const std::string args = "random-test --builtin c2-counterexample --trials 4 --embedding 8 --layers 2 --out ";
  const auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
  REQUIRE(cli("--seed 5 " + args + a.string()).status == 0);
  REQUIRE(cli("--seed 5 " + args + b.string() + " --threads 2").status == 0);
  REQUIRE(cli("--seed 6 " + args + c.string()).status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
  fs::remove(a);
  fs::remove(b);
  fs::remove(c);
}

TEST_CASE("exit statuses") {
  CHECK(cli("--help").status == 0);
  CHECK(cli("").status == 2);
  CHECK(cli("encode --builtin c2-counterexample --which I1 --frob").status == 2);
  CHECK(cli("encode --builtin nope --which I1").status == 2);
  CHECK(cli("encode --input /nonexistent.json").status == 2);
  CHECK(cli("encode --builtin c2-counterexample --which I3").status == 2);
  CHECK(cli("encode --builtin c2-counterexample --which I1 --encoding dense").status == 2);
  CHECK(cli("eval --builtin c2-counterexample --which I1 --formula 'q(x,x)'").status == 2);
  CHECK(cli("eval --builtin c2-counterexample --which I1 --formula 'exists x . ('").status == 2);
  CHECK(cli("eval --builtin c2-counterexample --which I1 --formula 'exists x . r(x)'").status == 2);
  CHECK(cli("eval --builtin c2-counterexample --which I1").status == 2);
  CHECK(cli("distinguish --builtin c2-counterexample --regime wl3").status == 2);
  CHECK(cli("distinguish --builtin c2-counterexample --regime rgnn --encoding-b labeled-graph").status == 2);
  CHECK(cli("random-test --builtin c2-counterexample --trials 0").status == 2);
  CHECK(cli("random-test --builtin c2-counterexample --trials 5 --paper-scale").status == 2);

  const Run cap = cli("plan-length --builtin c2-counterexample --which I1 --action-cap 3", true);
  CHECK(cap.status == 3);
  CHECK(cap.out.find("resource-cap") != std::string::npos);
  const Run diverge = cli(
      "train-test --builtin c2-counterexample --steps 30 --lr 1e300 --embedding 8 --layers 3 --target-a 1e300 "
      "--target-b -1e300",
      true);
  CHECK(diverge.status == 3);
  CHECK(diverge.out.find("divergence") != std::string::npos);
}

TEST_CASE("errors go to stderr, data to stdout") {
  const Run r = cli("eval --builtin c2-counterexample --which I1 --formula 'q(x,x)'");
  CHECK(r.out.empty());
  const Run merged = cli("eval --builtin c2-counterexample --which I1 --formula 'q(x,x)'", true);
  CHECK(merged.out.find("unbound") != std::string::npos);
}
