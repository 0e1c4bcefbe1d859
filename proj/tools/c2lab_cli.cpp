// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c2lab/c2lab.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(c2lab_status s) {
  switch (s) {
    case C2LAB_ERROR_RESOURCE_CAP:
    case C2LAB_ERROR_DIVERGENCE:
    case C2LAB_ERROR_OUT_OF_MEMORY:
    case C2LAB_ERROR_INTERNAL:
      return kExitNumeric;
    default:
      return kExitInput;
  }
}

void check(c2lab_status s) {
  if (s != C2LAB_OK) {
    throw Failure{exit_code_for(s), std::string(c2lab_status_name(s)) + ": " + c2lab_last_error()};
  }
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { c2lab_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct DocumentDeleter {
  void operator()(c2lab_document* d) const { c2lab_document_free(d); }
};
using DocumentPtr = std::unique_ptr<c2lab_document, DocumentDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitInput, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DocumentPtr load(const std::string& builtin, const std::string& path) {
  c2lab_document* d = nullptr;
  if (!path.empty()) {
    check(c2lab_document_parse(read_file(path).c_str(), &d));
  } else {
    check(c2lab_document_builtin(builtin.empty() ? "c2-counterexample" : builtin.c_str(), &d));
  }
  return DocumentPtr(d);
}

std::string instance_name(const c2lab_document* d, std::size_t index) {
  std::size_t n = 0;
  check(c2lab_document_instance_count(d, &n));
  if (index >= n) {
    throw Failure{kExitInput, "document has " + std::to_string(n) + " instance(s); name one explicitly"};
  }
  const char* name = nullptr;
  check(c2lab_document_instance_name(d, index, &name));
  return name;
}

c2lab_encoding parse_encoding(const std::string& s) {
  if (s.empty()) return C2LAB_ENCODING_DEFAULT;
  if (s == "eq1") return C2LAB_ENCODING_EQ1;
  if (s == "ploi") return C2LAB_ENCODING_PLOI;
  if (s == "labeled-graph") return C2LAB_ENCODING_LABELED_GRAPH;
  throw Failure{kExitInput, "unknown encoding '" + s + "'"};
}

struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "table";

  std::string builtin;
  std::string input;
  std::string input_b;
  std::string which;
  std::string a;
  std::string b;

  std::string encoding;
  std::string encoding_b;
  std::string formula;
  std::string formula_file;
  bool goal_not_achieved = false;
  std::string regime = "rgnn";
  bool all_regimes = false;
  std::size_t max_rounds = 0;

  std::size_t trials = 1000;
  double epsilon = 0.01;
  std::size_t embedding = 64;
  std::size_t layers = 30;
  std::size_t hidden = 0;
  bool no_residual = false;
  std::size_t threads = 0;
  bool paper_scale = false;
  std::size_t steps = 2000;
  double lr = 0.0002;
  std::optional<double> target_a;
  std::optional<double> target_b;

  std::size_t bound = 64;
  std::uint64_t action_cap = 100000;

  bool structured() const { return format == "structured"; }
  c2lab_net_shape shape() const { return {embedding, layers, hidden, no_residual ? 0 : 1}; }
};

// Where the primary output of a command goes.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Failure{kExitInput, "cannot write '" + path + "'"};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct Pair {
  DocumentPtr doc_a;
  DocumentPtr doc_b;
  std::string a;
  std::string b;

  c2lab_input input_a(c2lab_encoding e) const { return {doc_a.get(), a.c_str(), e}; }
  c2lab_input input_b(c2lab_encoding e) const { return {doc_b ? doc_b.get() : doc_a.get(), b.c_str(), e}; }
};

Pair load_pair(const Options& o) {
  Pair p;
  p.doc_a = load(o.builtin, o.input);
  if (!o.input_b.empty()) p.doc_b = load("", o.input_b);
  p.a = o.a.empty() ? instance_name(p.doc_a.get(), 0) : o.a;
  if (!o.b.empty()) {
    p.b = o.b;
  } else if (p.doc_b) {
    p.b = instance_name(p.doc_b.get(), 0);
  } else {
    p.b = instance_name(p.doc_a.get(), 1);
  }
  return p;
}

std::string single_instance(const Options& o, const c2lab_document* d) {
  return o.which.empty() ? instance_name(d, 0) : o.which;
}

void cmd_encode(const Options& o) {
  auto doc = load(o.builtin, o.input);
  const std::string which = single_instance(o, doc.get());
  const c2lab_encoding enc = o.encoding.empty() ? C2LAB_ENCODING_EQ1 : parse_encoding(o.encoding);
  OwnedString dump;
  check(c2lab_encode(doc.get(), which.c_str(), enc, &dump.p));
  Sink sink(o.out);
  if (o.structured()) {
    json lines = json::array();
    std::istringstream in(dump.str());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    sink.stream() << json{{"instance", which}, {"encoding", o.encoding.empty() ? "eq1" : o.encoding}, {"lines", lines}}.dump()
                  << '\n';
  } else {
    sink.stream() << dump.str();
  }
}

void cmd_eval(const Options& o) {
  const int sources = !o.formula.empty() + !o.formula_file.empty() + o.goal_not_achieved;
  if (sources != 1) throw Failure{kExitInput, "give exactly one of --formula, --formula-file, --goal-not-achieved"};
  auto doc = load(o.builtin, o.input);
  const std::string which = single_instance(o, doc.get());
  std::string text = o.formula;
  if (!o.formula_file.empty()) text = read_file(o.formula_file);
  int value = 0;
  check(c2lab_eval(doc.get(), which.c_str(), o.goal_not_achieved ? nullptr : text.c_str(), &value));
  Sink sink(o.out);
  if (o.structured()) {
    sink.stream() << json{{"instance", which},
                          {"formula", o.goal_not_achieved ? json("goal-not-achieved") : json(text)},
                          {"value", value != 0}}
                         .dump()
                  << '\n';
  } else {
    sink.stream() << (value ? "true" : "false") << '\n';
  }
}

std::string round_text(const json& v) { return v.is_null() ? "-" : std::to_string(v.get<std::size_t>()); }

void print_verdict_table(std::ostream& os, const json& r, const std::string& a, const std::string& b) {
  os << "regime            " << r["regime"].get<std::string>() << '\n'
     << "distinguishable   " << (r["distinguishable"].get<bool>() ? "true" : "false") << '\n'
     << "separating round  " << round_text(r["separating_round"]) << '\n'
     << "stable round      " << round_text(r["stable_round"]) << '\n';
  const auto& ca = r["class_counts_a"];
  const auto& cb = r["class_counts_b"];
  char line[96];
  std::snprintf(line, sizeof line, "%-7s %-12s %-12s\n", "round", ("classes " + a).c_str(), ("classes " + b).c_str());
  os << line;
  for (std::size_t t = 0; t < ca.size(); ++t) {
    std::snprintf(line, sizeof line, "%-7zu %-12zu %-12zu\n", t, ca[t].get<std::size_t>(), cb[t].get<std::size_t>());
    os << line;
  }
}

void cmd_distinguish(const Options& o) {
  const Pair p = load_pair(o);
  const c2lab_encoding ea = parse_encoding(o.encoding);
  const c2lab_encoding eb = o.encoding_b.empty() ? ea : parse_encoding(o.encoding_b);
  std::vector<std::string> regimes;
  if (o.all_regimes) {
    regimes = {"rgnn", "ploi-sparse", "pairtype-c2"};
  } else {
    regimes = {o.regime};
  }
  Sink sink(o.out);
  bool first = true;
  for (const auto& regime : regimes) {
    const c2lab_input a = p.input_a(ea);
    const c2lab_input b = p.input_b(eb);
    OwnedString report;
    check(c2lab_distinguish(&a, &b, regime.c_str(), o.max_rounds, &report.p));
    json r = json::parse(report.str());
    r["a"] = p.a;
    r["b"] = p.b;
    if (o.structured()) {
      sink.stream() << r.dump() << '\n';
    } else {
      if (!first) sink.stream() << '\n';
      print_verdict_table(sink.stream(), r, p.a, p.b);
    }
    first = false;
  }
}

void emit_summary(const Options& o, const json& summary, const std::string& line) {
  if (o.structured()) {
    std::cout << summary.dump() << '\n';
  } else {
    for (const auto& [k, v] : summary.items()) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-14s ", k.c_str());
      std::cout << buf << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    std::cout << line << '\n';
  }
}

std::string number_text(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void cmd_random_test(const Options& o) {
  const Pair p = load_pair(o);
  c2lab_random_config cfg;
  c2lab_random_config_init(&cfg);
  cfg.trials = o.paper_scale ? 100000 : o.trials;
  cfg.epsilon = o.epsilon;
  cfg.shape = o.shape();
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const c2lab_input a = p.input_a(parse_encoding(o.encoding));
  const c2lab_input b = p.input_b(parse_encoding(o.encoding));
  OwnedString csv, summary;
  check(c2lab_random_test(&a, &b, &cfg, o.out.empty() ? nullptr : &csv.p, &summary.p));
  if (!o.out.empty()) Sink(o.out).stream() << csv.str();
  json s = json::parse(summary.str());
  s["a"] = p.a;
  s["b"] = p.b;
  const bool indist = s["verdict"] == "likely-indistinguishable";
  const std::string eps = number_text(cfg.epsilon);
  emit_summary(o, s,
               (indist ? "max rel_diff < " : "max rel_diff > ") + eps + ", " + s["verdict"].get<std::string>());
}

double default_target(const c2lab_document* d, const std::string& which, const Options& o) {
  std::int64_t len = -1;
  check(c2lab_plan_length(d, which.c_str(), o.bound, o.action_cap, &len));
  if (len < 0) {
    throw Failure{kExitInput, "instance '" + which + "' has no plan within " + std::to_string(o.bound) +
                                  " actions; pass its target explicitly"};
  }
  return static_cast<double>(len);
}

void cmd_train_test(const Options& o) {
  const Pair p = load_pair(o);
  c2lab_train_config cfg;
  c2lab_train_config_init(&cfg);
  cfg.steps = o.paper_scale ? 10000 : o.steps;
  cfg.learning_rate = o.lr;
  cfg.shape = o.shape();
  cfg.seed = o.seed;
  const c2lab_encoding enc = parse_encoding(o.encoding);
  const c2lab_document* db = p.doc_b ? p.doc_b.get() : p.doc_a.get();
  const double ta = o.target_a ? *o.target_a : default_target(p.doc_a.get(), p.a, o);
  const double tb = o.target_b ? *o.target_b : default_target(db, p.b, o);
  const c2lab_example examples[2] = {{p.input_a(enc), ta}, {p.input_b(enc), tb}};
  OwnedString csv, summary;
  check(c2lab_train_test(examples, 2, &cfg, o.out.empty() ? nullptr : &csv.p, &summary.p));
  if (!o.out.empty()) Sink(o.out).stream() << csv.str();
  json s = json::parse(summary.str());
  s["a"] = p.a;
  s["b"] = p.b;
  s["target_a"] = ta;
  s["target_b"] = tb;
  const bool floor = s["verdict"] == "floor-reached";
  const double floor_value = s["floor"].get<double>();
  const double slack = s["slack"].get<double>();
  const double threshold = floor_value > slack ? floor_value - slack : slack;
  emit_summary(o, s,
               (floor ? "min loss >= " : "min loss < ") + number_text(threshold) + ", " +
                   s["verdict"].get<std::string>());
}

void cmd_plan_length(const Options& o) {
  auto doc = load(o.builtin, o.input);
  const std::string which = single_instance(o, doc.get());
  std::int64_t len = -1;
  check(c2lab_plan_length(doc.get(), which.c_str(), o.bound, o.action_cap, &len));
  Sink sink(o.out);
  if (o.structured()) {
    sink.stream() << json{{"instance", which}, {"bound", o.bound}, {"length", len < 0 ? json(nullptr) : json(len)}}.dump()
                  << '\n';
  } else {
    sink.stream() << (len < 0 ? std::string("unsolvable") : std::to_string(len)) << '\n';
  }
}

void add_single_input(CLI::App* cmd, Options& o) {
  auto* b = cmd->add_option("--builtin", o.builtin, "Builtin dataset (c2-counterexample)");
  auto* i = cmd->add_option("--input", o.input, "Instance document (JSON)")->check(CLI::ExistingFile);
  b->excludes(i);
  cmd->add_option("--which", o.which, "Instance name inside the document");
}

void add_pair_input(CLI::App* cmd, Options& o) {
  auto* b = cmd->add_option("--builtin", o.builtin, "Builtin dataset (c2-counterexample)");
  auto* i = cmd->add_option("--input", o.input, "Document holding input A (and B unless --input-b)")
                ->check(CLI::ExistingFile);
  b->excludes(i);
  cmd->add_option("--input-b", o.input_b, "Separate document for input B")->check(CLI::ExistingFile);
  cmd->add_option("--a", o.a, "Instance name of input A (default: first instance)");
  cmd->add_option("--b", o.b, "Instance name of input B (default: second instance)");
}

void add_shape(CLI::App* cmd, Options& o) {
  cmd->add_option("--embedding", o.embedding, "Embedding width")->check(CLI::PositiveNumber);
  cmd->add_option("--layers", o.layers, "Message-passing rounds");
  cmd->add_option("--hidden", o.hidden, "Hidden width of the two-layer blocks (0: embedding width)");
  cmd->add_flag("--no-residual", o.no_residual, "Replace embeddings instead of adding the update");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distinguishability laboratory for relational message passing and two-variable counting logic"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Seed for every random choice");
  app.add_option("--out", o.out, "Write the command's data output to this file");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "structured"}));

  auto* encode = app.add_subcommand("encode", "Dump an encoding of an instance's initial state");
  add_single_input(encode, o);
  encode->add_option("--encoding", o.encoding, "eq1, ploi or labeled-graph")
      ->check(CLI::IsMember({"eq1", "ploi", "labeled-graph"}));

  auto* eval = app.add_subcommand("eval", "Evaluate a sentence on the goal-extended initial state");
  add_single_input(eval, o);
  eval->add_option("--formula", o.formula, "Sentence text");
  eval->add_option("--formula-file", o.formula_file, "File holding the sentence")->check(CLI::ExistingFile);
  eval->add_flag("--goal-not-achieved", o.goal_not_achieved, "Use the built-in goal-not-achieved sentence");

  auto* distinguish = app.add_subcommand("distinguish", "Run color refinement on two inputs");
  add_pair_input(distinguish, o);
  auto* regime = distinguish->add_option("--regime", o.regime, "rgnn, ploi-sparse or pairtype-c2")
                     ->check(CLI::IsMember({"rgnn", "ploi-sparse", "pairtype-c2"}));
  distinguish->add_flag("--all-regimes", o.all_regimes, "Report every regime")->excludes(regime);
  distinguish->add_option("--max-rounds", o.max_rounds, "Round limit (0: size of the union)");
  distinguish->add_option("--encoding", o.encoding, "Encoding of both inputs (default: the regime's own)")
      ->check(CLI::IsMember({"eq1", "ploi", "labeled-graph"}));
  distinguish->add_option("--encoding-b", o.encoding_b, "Encoding of input B if it differs")
      ->check(CLI::IsMember({"eq1", "ploi", "labeled-graph"}));

  auto* random = app.add_subcommand("random-test", "Compare network outputs over random initialisations");
  add_pair_input(random, o);
  add_shape(random, o);
  auto* trials = random->add_option("--trials", o.trials, "Number of initialisations")->check(CLI::PositiveNumber);
  random->add_option("--epsilon", o.epsilon, "Relative-difference threshold")->check(CLI::PositiveNumber);
  random->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  random->add_flag("--paper-scale", o.paper_scale, "Run 100000 trials")->excludes(trials);
  random->add_option("--encoding", o.encoding, "eq1 or ploi")->check(CLI::IsMember({"eq1", "ploi"}));

  auto* train = app.add_subcommand("train-test", "Train on two inputs and compare the loss with the floor");
  add_pair_input(train, o);
  add_shape(train, o);
  auto* steps = train->add_option("--steps", o.steps, "Optimiser steps")->check(CLI::PositiveNumber);
  train->add_option("--lr", o.lr, "Learning rate")->check(CLI::PositiveNumber);
  train->add_option("--target-a", o.target_a, "Target for input A (default: its optimal plan length)");
  train->add_option("--target-b", o.target_b, "Target for input B (default: its optimal plan length)");
  train->add_option("--bound", o.bound, "Search bound for default targets");
  train->add_option("--action-cap", o.action_cap, "Ground-action cap for default targets");
  train->add_flag("--paper-scale", o.paper_scale, "Run 10000 steps")->excludes(steps);
  train->add_option("--encoding", o.encoding, "eq1 or ploi")->check(CLI::IsMember({"eq1", "ploi"}));

  auto* plan = app.add_subcommand("plan-length", "Optimal plan length by breadth-first search");
  add_single_input(plan, o);
  plan->add_option("--bound", o.bound, "Maximum plan length searched");
  plan->add_option("--action-cap", o.action_cap, "Maximum number of ground actions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*encode) cmd_encode(o);
    else if (*eval) cmd_eval(o);
    else if (*distinguish) cmd_distinguish(o);
    else if (*random) cmd_random_test(o);
    else if (*train) cmd_train_test(o);
    else if (*plan) cmd_plan_length(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
