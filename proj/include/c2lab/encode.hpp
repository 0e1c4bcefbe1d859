#pragma once

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "c2lab/model.hpp"

namespace c2lab {

/// Predicate list. Declaration order fixes slot order in graph views, but two
/// languages compare equal when they hold the same predicates.
struct RelationalLanguage {
  std::vector<Predicate> predicates;

  const Predicate* find(std::string_view name) const;
  std::size_t max_arity() const;

  friend bool operator==(const RelationalLanguage& a, const RelationalLanguage& b);
};

/// (constants, language, ground atoms). Constructor validates the atoms.
class RelationalStructure {
 public:
  RelationalStructure(std::vector<std::string> constants, RelationalLanguage language, AtomSet atoms);

  const std::vector<std::string>& constants() const noexcept { return constants_; }
  const RelationalLanguage& language() const noexcept { return language_; }
  const AtomSet& atoms() const noexcept { return atoms_; }

  friend bool operator==(const RelationalStructure&, const RelationalStructure&) = default;

 private:
  std::vector<std::string> constants_;
  RelationalLanguage language_;
  AtomSet atoms_;
};

std::string goal_name(std::string_view predicate);
std::string reversed_name(std::string_view predicate);

/// Goal-extended language P ∪ P_G in declaration order.
RelationalLanguage goal_extended_language(const Domain& domain);

/// (O, P ∪ P_G, s ∪ s_G).
RelationalStructure state_structure(const PlanningInstance& instance, const State& state);

/// (O, P ∪ P_G ∪ rev(P) ∪ rev(P_G), s ∪ s_G ∪ rev(s) ∪ rev(s_G)); reversed
/// copies exist for binary predicates only. Requires arity ≤ 2.
RelationalStructure ploi_structure(const PlanningInstance& instance, const State& state);

struct LabeledGraph {
  struct Edge {
    std::size_t relation;
    std::size_t source;
    std::size_t target;
    friend auto operator<=>(const Edge&, const Edge&) = default;
  };
  struct Feature {
    std::size_t relation;
    std::size_t node;
    friend auto operator<=>(const Feature&, const Feature&) = default;
  };

  std::vector<std::string> nodes;
  std::vector<std::string> edge_relations;
  std::vector<std::string> feature_relations;
  std::vector<std::string> flag_relations;
  std::set<Edge> edges;
  std::set<Feature> features;
  std::set<std::size_t> flags;  // indices into flag_relations that hold

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

LabeledGraph to_labeled_graph(const RelationalStructure& structure);

/// Inverse of to_labeled_graph (language rebuilt as binary, unary, nullary).
RelationalStructure from_labeled_graph(const LabeledGraph& graph);

/// One atom per line, `pred(a,b)`, lexicographically sorted.
std::string dump_structure(const RelationalStructure& structure);

/// Line-oriented text form of a labeled graph; parse_graph_dump inverts it.
std::string dump_graph(const LabeledGraph& graph);
LabeledGraph parse_graph_dump(std::string_view text);

/// Applies a constant renaming (must be a bijection on the constants).
RelationalStructure rename(const RelationalStructure& structure, const std::map<std::string, std::string>& mapping);
PlanningInstance rename(const PlanningInstance& instance, const std::map<std::string, std::string>& mapping);

}  // namespace c2lab
