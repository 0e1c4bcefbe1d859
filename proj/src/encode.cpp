#include "c2lab/encode.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "c2lab/error.hpp"

namespace c2lab {

const Predicate* RelationalLanguage::find(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t RelationalLanguage::max_arity() const {
  std::size_t m = 0;
  for (const auto& p : predicates) m = std::max(m, p.arity);
  return m;
}

bool operator==(const RelationalLanguage& a, const RelationalLanguage& b) {
  if (a.predicates.size() != b.predicates.size()) return false;
  auto x = a.predicates, y = b.predicates;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

RelationalStructure::RelationalStructure(std::vector<std::string> constants, RelationalLanguage language,
                                         AtomSet atoms)
    : constants_(std::move(constants)), language_(std::move(language)), atoms_(std::move(atoms)) {
  std::unordered_set<std::string> seen;
  for (const auto& c : constants_) {
    if (!seen.insert(c).second) throw Error(ErrorKind::InvalidInput, "duplicate constant '" + c + "'");
  }
  std::unordered_set<std::string> names;
  for (const auto& p : language_.predicates) {
    if (!names.insert(p.name).second) throw Error(ErrorKind::InvalidInput, "duplicate predicate '" + p.name + "'");
  }
  for (const auto& atom : atoms_) {
    const Predicate* p = language_.find(atom.predicate);
    if (!p) throw Error(ErrorKind::UnknownPredicate, "structure atom " + to_string(atom) + " has unknown predicate");
    if (p->arity != atom.args.size()) {
      throw Error(ErrorKind::ArityMismatch, "structure atom " + to_string(atom) + " does not match arity " +
                                                std::to_string(p->arity));
    }
    for (const auto& arg : atom.args) {
      if (!seen.count(arg)) {
        throw Error(ErrorKind::UnknownObject, "structure atom " + to_string(atom) + " uses unknown constant '" +
                                                  arg + "'");
      }
    }
  }
}

std::string goal_name(std::string_view predicate) { return std::string(predicate) + std::string(kGoalSuffix); }

std::string reversed_name(std::string_view predicate) {
  return std::string(kReversedPrefix) + std::string(predicate);
}

namespace {

void check_goal_suffix(const Domain& domain) {
  for (const auto& p : domain.predicates()) {
    if (p.name.size() >= kGoalSuffix.size() &&
        std::string_view(p.name).substr(p.name.size() - kGoalSuffix.size()) == kGoalSuffix) {
      throw Error(ErrorKind::InvalidInput, "predicate '" + p.name + "' collides with the reserved goal suffix");
    }
  }
}

void require_binary_at_most(const RelationalLanguage& language) {
  for (const auto& p : language.predicates) {
    if (p.arity > 2) {
      throw Error(ErrorKind::UnsupportedArity,
                  "predicate '" + p.name + "' has arity " + std::to_string(p.arity) + "; at most 2 is supported");
    }
  }
}

Atom as_goal(const Atom& atom) { return Atom{goal_name(atom.predicate), atom.args}; }

Atom reversed(const Atom& atom) { return Atom{reversed_name(atom.predicate), {atom.args[1], atom.args[0]}}; }

}  // namespace

RelationalLanguage goal_extended_language(const Domain& domain) {
  check_goal_suffix(domain);
  RelationalLanguage language;
  for (const auto& p : domain.predicates()) language.predicates.push_back(p);
  for (const auto& p : domain.predicates()) language.predicates.push_back(Predicate{goal_name(p.name), p.arity});
  return language;
}

RelationalStructure state_structure(const PlanningInstance& instance, const State& state) {
  instance.check_state(state);
  RelationalLanguage language = goal_extended_language(instance.domain());
  AtomSet atoms = state.atoms;
  for (const auto& g : instance.goal()) atoms.insert(as_goal(g));
  return RelationalStructure(instance.objects(), std::move(language), std::move(atoms));
}

RelationalStructure ploi_structure(const PlanningInstance& instance, const State& state) {
  instance.check_state(state);
  RelationalLanguage language = goal_extended_language(instance.domain());
  require_binary_at_most(language);

  std::unordered_set<std::string> existing;
  for (const auto& p : language.predicates) existing.insert(p.name);
  const std::size_t base = language.predicates.size();
  for (std::size_t i = 0; i < base; ++i) {
    const Predicate p = language.predicates[i];
    if (p.arity != 2) continue;
    std::string name = reversed_name(p.name);
    if (existing.count(name)) {
      throw Error(ErrorKind::InvalidInput, "reversed relation '" + name + "' collides with a domain predicate");
    }
    language.predicates.push_back(Predicate{std::move(name), 2});
  }

  AtomSet atoms = state.atoms;
  for (const auto& g : instance.goal()) atoms.insert(as_goal(g));
  AtomSet reversed_atoms;
  for (const auto& atom : atoms) {
    if (atom.args.size() == 2) reversed_atoms.insert(reversed(atom));
  }
  atoms.insert(reversed_atoms.begin(), reversed_atoms.end());
  return RelationalStructure(instance.objects(), std::move(language), std::move(atoms));
}

LabeledGraph to_labeled_graph(const RelationalStructure& structure) {
  require_binary_at_most(structure.language());
  LabeledGraph graph;
  graph.nodes = structure.constants();

  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& p : structure.language().predicates) {
    auto& list = p.arity == 2 ? graph.edge_relations : p.arity == 1 ? graph.feature_relations : graph.flag_relations;
    slot[p.name] = list.size();
    list.push_back(p.name);
  }
  std::unordered_map<std::string, std::size_t> node;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) node[graph.nodes[i]] = i;

  for (const auto& atom : structure.atoms()) {
    const std::size_t s = slot.at(atom.predicate);
    switch (atom.args.size()) {
      case 2: graph.edges.insert({s, node.at(atom.args[0]), node.at(atom.args[1])}); break;
      case 1: graph.features.insert({s, node.at(atom.args[0])}); break;
      default: graph.flags.insert(s); break;
    }
  }
  return graph;
}

RelationalStructure from_labeled_graph(const LabeledGraph& graph) {
  RelationalLanguage language;
  for (const auto& r : graph.edge_relations) language.predicates.push_back({r, 2});
  for (const auto& r : graph.feature_relations) language.predicates.push_back({r, 1});
  for (const auto& r : graph.flag_relations) language.predicates.push_back({r, 0});

  auto node = [&](std::size_t i) -> const std::string& {
    if (i >= graph.nodes.size()) throw Error(ErrorKind::InvalidInput, "graph node index out of range");
    return graph.nodes[i];
  };
  auto relation = [](const std::vector<std::string>& list, std::size_t i) -> const std::string& {
    if (i >= list.size()) throw Error(ErrorKind::InvalidInput, "graph relation index out of range");
    return list[i];
  };

  AtomSet atoms;
  for (const auto& e : graph.edges) {
    atoms.insert(Atom{relation(graph.edge_relations, e.relation), {node(e.source), node(e.target)}});
  }
  for (const auto& f : graph.features) atoms.insert(Atom{relation(graph.feature_relations, f.relation), {node(f.node)}});
  for (auto f : graph.flags) atoms.insert(Atom{relation(graph.flag_relations, f), {}});
  return RelationalStructure(graph.nodes, std::move(language), std::move(atoms));
}

std::string dump_structure(const RelationalStructure& structure) {
  std::vector<std::string> lines;
  lines.reserve(structure.atoms().size());
  for (const auto& atom : structure.atoms()) lines.push_back(to_string(atom));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) out += line + "\n";
  return out;
}

namespace {

void write_list(std::ostringstream& out, const char* header, const std::vector<std::string>& items) {
  out << header;
  for (const auto& item : items) out << ' ' << item;
  out << '\n';
}

}  // namespace

std::string dump_graph(const LabeledGraph& graph) {
  std::ostringstream out;
  write_list(out, "nodes", graph.nodes);
  write_list(out, "edge-relations", graph.edge_relations);
  write_list(out, "feature-relations", graph.feature_relations);
  write_list(out, "flag-relations", graph.flag_relations);

  std::vector<std::string> lines;
  for (const auto& e : graph.edges) {
    lines.push_back("edge " + graph.edge_relations[e.relation] + " " + graph.nodes[e.source] + " " +
                    graph.nodes[e.target]);
  }
  for (const auto& f : graph.features) {
    lines.push_back("feature " + graph.feature_relations[f.relation] + " " + graph.nodes[f.node]);
  }
  for (auto f : graph.flags) lines.push_back("flag " + graph.flag_relations[f]);
  std::sort(lines.begin(), lines.end());
  for (const auto& line : lines) out << line << '\n';
  return out.str();
}

LabeledGraph parse_graph_dump(std::string_view text) {
  LabeledGraph graph;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto index_of = [&](const std::vector<std::string>& list, const std::string& name) {
    auto it = std::find(list.begin(), list.end(), name);
    if (it == list.end()) throw SyntaxError("unknown name '" + name + "'", line_no, 1);
    return static_cast<std::size_t>(it - list.begin());
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string head;
    if (!(words >> head)) continue;
    std::vector<std::string> rest;
    for (std::string w; words >> w;) rest.push_back(w);

    if (head == "nodes") {
      graph.nodes = rest;
    } else if (head == "edge-relations") {
      graph.edge_relations = rest;
    } else if (head == "feature-relations") {
      graph.feature_relations = rest;
    } else if (head == "flag-relations") {
      graph.flag_relations = rest;
    } else if (head == "edge" && rest.size() == 3) {
      graph.edges.insert({index_of(graph.edge_relations, rest[0]), index_of(graph.nodes, rest[1]),
                          index_of(graph.nodes, rest[2])});
    } else if (head == "feature" && rest.size() == 2) {
      graph.features.insert({index_of(graph.feature_relations, rest[0]), index_of(graph.nodes, rest[1])});
    } else if (head == "flag" && rest.size() == 1) {
      graph.flags.insert(index_of(graph.flag_relations, rest[0]));
    } else {
      throw SyntaxError("unrecognised graph line '" + line + "'", line_no, 1);
    }
  }
  return graph;
}

namespace {

const std::string& mapped(const std::map<std::string, std::string>& mapping, const std::string& name) {
  auto it = mapping.find(name);
  if (it == mapping.end()) throw Error(ErrorKind::InvalidInput, "renaming does not cover '" + name + "'");
  return it->second;
}

AtomSet rename_atoms(const AtomSet& atoms, const std::map<std::string, std::string>& mapping) {
  AtomSet out;
  for (const auto& atom : atoms) {
    Atom a{atom.predicate, {}};
    for (const auto& arg : atom.args) a.args.push_back(mapped(mapping, arg));
    out.insert(std::move(a));
  }
  return out;
}

}  // namespace

RelationalStructure rename(const RelationalStructure& structure, const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> constants;
  for (const auto& c : structure.constants()) constants.push_back(mapped(mapping, c));
  return RelationalStructure(std::move(constants), structure.language(), rename_atoms(structure.atoms(), mapping));
}

PlanningInstance rename(const PlanningInstance& instance, const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> objects;
  for (const auto& o : instance.objects()) objects.push_back(mapped(mapping, o));
  return PlanningInstance(instance.domain_ptr(), std::move(objects), rename_atoms(instance.init(), mapping),
                          rename_atoms(instance.goal(), mapping));
}

}  // namespace c2lab
