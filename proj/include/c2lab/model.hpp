#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace c2lab {

struct Predicate {
  std::string name;
  std::size_t arity = 0;

  friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

/// A predicate applied to arguments. Ground atoms carry object names, schematic
/// atoms carry schema parameter names; both share this representation.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

std::string to_string(const Atom& atom);

using AtomSet = std::set<Atom>;

struct ActionSchema {
  std::string name;
  std::vector<std::string> params;
  AtomSet preconditions;
  AtomSet add_effects;
  AtomSet delete_effects;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

class Domain {
 public:
  /// Validates identifiers, unique names, the reserved goal suffix and every
  /// schema invariant; throws c2lab::Error on violation.
  Domain(std::vector<Predicate> predicates, std::vector<ActionSchema> schemata);

  const std::vector<Predicate>& predicates() const noexcept { return predicates_; }
  const std::vector<ActionSchema>& schemata() const noexcept { return schemata_; }
  const Predicate* find(std::string_view name) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<Predicate> predicates_;
  std::vector<ActionSchema> schemata_;
};

struct State {
  AtomSet atoms;

  friend bool operator==(const State&, const State&) = default;
};

class PlanningInstance {
 public:
  PlanningInstance(std::shared_ptr<const Domain> domain, std::vector<std::string> objects,
                   AtomSet init, AtomSet goal);

  const Domain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const noexcept { return domain_; }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const AtomSet& init() const noexcept { return init_; }
  const AtomSet& goal() const noexcept { return goal_; }
  State initial_state() const { return State{init_}; }

  /// Throws unless every atom of `state` is well-formed over this instance.
  void check_state(const State& state) const;

  friend bool operator==(const PlanningInstance& a, const PlanningInstance& b);

 private:
  std::shared_ptr<const Domain> domain_;
  std::vector<std::string> objects_;
  AtomSet init_;
  AtomSet goal_;
};

struct NamedInstance {
  std::string name;
  PlanningInstance instance;
};

/// One domain plus any number of named instances over it.
struct Document {
  std::shared_ptr<const Domain> domain;
  std::vector<NamedInstance> instances;

  const PlanningInstance& instance(std::string_view name) const;
};

/// Identifier rule shared by objects, predicates, variables and schema names.
bool is_identifier(std::string_view text);

inline constexpr std::string_view kGoalSuffix = "_G";
inline constexpr std::string_view kReversedPrefix = "rev_";

Document parse_document(std::string_view text);
std::string serialize_document(const Document& document);

inline constexpr std::string_view kBuiltinCounterexample = "c2-counterexample";

/// The two-object counterexample: predicate q/2, schema s(x,y) adding q(x,y),
/// instances "I1" and "I2".
Document builtin_counterexample();
Document builtin_document(std::string_view name);

bool is_goal_state(const State& state, const PlanningInstance& instance);

/// Applies a ground STRIPS transition: (state \ del) ∪ add.
AtomSet apply_effects(const AtomSet& state, const AtomSet& del, const AtomSet& add);

struct GroundAction {
  std::string name;
  AtomSet preconditions;
  AtomSet add_effects;
  AtomSet delete_effects;
};

inline constexpr std::uint64_t kDefaultGroundActionCap = 100'000;

/// Instantiates every schema over every parameter assignment. Throws
/// ErrorKind::ResourceCap when the count would exceed `cap`.
std::vector<GroundAction> ground_actions(const PlanningInstance& instance,
                                         std::uint64_t cap = kDefaultGroundActionCap);

/// Breadth-first search from the initial state. nullopt means no goal state is
/// reachable within `bound` actions.
std::optional<std::size_t> optimal_plan_length(const PlanningInstance& instance, std::size_t bound,
                                               std::uint64_t action_cap = kDefaultGroundActionCap);

}  // namespace c2lab
