#include "c2lab/model.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "c2lab/error.hpp"

namespace c2lab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UnknownPredicate: return "unknown-predicate";
    case ErrorKind::ArityMismatch: return "arity-mismatch";
    case ErrorKind::UnknownObject: return "unknown-object";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UnsupportedArity: return "unsupported-arity";
    case ErrorKind::TwoVariableViolation: return "two-variable-violation";
    case ErrorKind::UnboundVariable: return "unbound-variable";
    case ErrorKind::MixedInputs: return "mixed-inputs";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::ResourceCap: return "resource-cap";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
  }
  return "unknown";
}

std::string to_string(const Atom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += atom.args[i];
  }
  out += ')';
  return out;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

namespace {

void require_identifier(std::string_view text, std::string_view what) {
  if (!is_identifier(text)) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + " '" + std::string(text) + "' is not a valid identifier");
  }
}

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
}

// Checks predicate existence and arity; argument membership is delegated.
template <typename ArgCheck>
void check_atom(const Domain& domain, const Atom& atom, ArgCheck&& arg_ok, std::string_view arg_kind,
                std::string_view context) {
  const Predicate* p = domain.find(atom.predicate);
  if (!p) {
    throw Error(ErrorKind::UnknownPredicate,
                std::string(context) + ": unknown predicate '" + atom.predicate + "'");
  }
  if (p->arity != atom.args.size()) {
    throw Error(ErrorKind::ArityMismatch, std::string(context) + ": atom " + to_string(atom) +
                                              " has " + std::to_string(atom.args.size()) +
                                              " arguments but '" + p->name + "' has arity " +
                                              std::to_string(p->arity));
  }
  for (const auto& arg : atom.args) {
    if (!arg_ok(arg)) {
      throw Error(arg_kind == "object" ? ErrorKind::UnknownObject : ErrorKind::InvalidInput,
                  std::string(context) + ": atom " + to_string(atom) + " uses unknown " +
                      std::string(arg_kind) + " '" + arg + "'");
    }
  }
}

}  // namespace

Domain::Domain(std::vector<Predicate> predicates, std::vector<ActionSchema> schemata)
    : predicates_(std::move(predicates)), schemata_(std::move(schemata)) {
  std::unordered_set<std::string> names;
  for (const auto& p : predicates_) {
    require_identifier(p.name, "predicate name");
    if (!names.insert(p.name).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate predicate '" + p.name + "'");
    }
    if (ends_with(p.name, kGoalSuffix)) {
      throw Error(ErrorKind::InvalidInput, "predicate '" + p.name + "' collides with the reserved goal suffix '" +
                                               std::string(kGoalSuffix) + "'");
    }
  }
  std::unordered_set<std::string> schema_names;
  for (const auto& a : schemata_) {
    require_identifier(a.name, "schema name");
    if (!schema_names.insert(a.name).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate action schema '" + a.name + "'");
    }
    std::unordered_set<std::string> params;
    for (const auto& v : a.params) {
      require_identifier(v, "schema parameter");
      if (!params.insert(v).second) {
        throw Error(ErrorKind::InvalidInput, "schema '" + a.name + "' repeats parameter '" + v + "'");
      }
    }
    auto is_param = [&](const std::string& v) { return params.count(v) > 0; };
    const std::string ctx = "schema '" + a.name + "'";
    for (const auto* set : {&a.preconditions, &a.add_effects, &a.delete_effects}) {
      for (const auto& atom : *set) check_atom(*this, atom, is_param, "parameter", ctx);
    }
    for (const auto& atom : a.add_effects) {
      if (a.delete_effects.count(atom)) {
        throw Error(ErrorKind::InvalidInput,
                    ctx + ": " + to_string(atom) + " is both added and deleted");
      }
    }
  }
}

const Predicate* Domain::find(std::string_view name) const {
  for (const auto& p : predicates_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

PlanningInstance::PlanningInstance(std::shared_ptr<const Domain> domain, std::vector<std::string> objects,
                                   AtomSet init, AtomSet goal)
    : domain_(std::move(domain)), objects_(std::move(objects)), init_(std::move(init)), goal_(std::move(goal)) {
  if (!domain_) throw Error(ErrorKind::InvalidInput, "instance has no domain");
  if (objects_.empty()) throw Error(ErrorKind::InvalidInput, "instance has no objects");
  std::unordered_set<std::string> seen;
  for (const auto& o : objects_) {
    require_identifier(o, "object name");
    if (!seen.insert(o).second) throw Error(ErrorKind::InvalidInput, "duplicate object '" + o + "'");
  }
  auto is_object = [&](const std::string& o) { return seen.count(o) > 0; };
  for (const auto& atom : init_) check_atom(*domain_, atom, is_object, "object", "init");
  for (const auto& atom : goal_) check_atom(*domain_, atom, is_object, "object", "goal");
}

void PlanningInstance::check_state(const State& state) const {
  auto is_object = [&](const std::string& o) {
    return std::find(objects_.begin(), objects_.end(), o) != objects_.end();
  };
  for (const auto& atom : state.atoms) check_atom(*domain_, atom, is_object, "object", "state");
}

bool operator==(const PlanningInstance& a, const PlanningInstance& b) {
  return *a.domain_ == *b.domain_ && a.objects_ == b.objects_ && a.init_ == b.init_ && a.goal_ == b.goal_;
}

const PlanningInstance& Document::instance(std::string_view name) const {
  for (const auto& named : instances) {
    if (named.name == name) return named.instance;
  }
  throw Error(ErrorKind::NotFound, "document has no instance named '" + std::string(name) + "'");
}

Document builtin_counterexample() {
  ActionSchema s{"s", {"x", "y"}, {}, {Atom{"q", {"x", "y"}}}, {}};
  auto domain = std::make_shared<const Domain>(std::vector<Predicate>{{"q", 2}}, std::vector<ActionSchema>{s});
  AtomSet goal{Atom{"q", {"a", "b"}}, Atom{"q", {"b", "a"}}};
  PlanningInstance i1(domain, {"a", "b"}, {Atom{"q", {"a", "a"}}, Atom{"q", {"b", "b"}}}, goal);
  PlanningInstance i2(domain, {"a", "b"}, {Atom{"q", {"a", "b"}}, Atom{"q", {"b", "a"}}}, goal);
  return Document{domain, {{"I1", std::move(i1)}, {"I2", std::move(i2)}}};
}

Document builtin_document(std::string_view name) {
  if (name == kBuiltinCounterexample) return builtin_counterexample();
  throw Error(ErrorKind::NotFound, "unknown builtin dataset '" + std::string(name) + "'");
}

bool is_goal_state(const State& state, const PlanningInstance& instance) {
  return std::includes(state.atoms.begin(), state.atoms.end(), instance.goal().begin(), instance.goal().end());
}

AtomSet apply_effects(const AtomSet& state, const AtomSet& del, const AtomSet& add) {
  AtomSet next;
  std::set_difference(state.begin(), state.end(), del.begin(), del.end(), std::inserter(next, next.end()));
  next.insert(add.begin(), add.end());
  return next;
}

namespace {

Atom substitute(const Atom& atom, const std::map<std::string, std::string>& binding) {
  Atom out{atom.predicate, {}};
  out.args.reserve(atom.args.size());
  for (const auto& v : atom.args) out.args.push_back(binding.at(v));
  return out;
}

AtomSet substitute(const AtomSet& atoms, const std::map<std::string, std::string>& binding) {
  AtomSet out;
  for (const auto& atom : atoms) out.insert(substitute(atom, binding));
  return out;
}

}  // namespace

std::vector<GroundAction> ground_actions(const PlanningInstance& instance, std::uint64_t cap) {
  const auto& objects = instance.objects();
  const std::uint64_t n = objects.size();

  std::uint64_t total = 0;
  for (const auto& schema : instance.domain().schemata()) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      if (count > cap / n) {
        count = cap + 1;
        break;
      }
      count *= n;
    }
    total += count;
    if (total > cap) {
      throw Error(ErrorKind::ResourceCap, "grounding exceeds the cap of " + std::to_string(cap) + " actions");
    }
  }

  std::vector<GroundAction> actions;
  actions.reserve(total);
  for (const auto& schema : instance.domain().schemata()) {
    const std::size_t k = schema.params.size();
    std::vector<std::size_t> choice(k, 0);
    while (true) {
      std::map<std::string, std::string> binding;
      std::string name = schema.name + "(";
      for (std::size_t i = 0; i < k; ++i) {
        binding[schema.params[i]] = objects[choice[i]];
        if (i) name += ',';
        name += objects[choice[i]];
      }
      name += ')';
      actions.push_back(GroundAction{std::move(name), substitute(schema.preconditions, binding),
                                     substitute(schema.add_effects, binding),
                                     substitute(schema.delete_effects, binding)});
      // odometer increment over parameter assignments
      std::size_t pos = 0;
      while (pos < k && ++choice[pos] == n) choice[pos++] = 0;
      if (pos == k) break;
    }
  }
  return actions;
}

std::optional<std::size_t> optimal_plan_length(const PlanningInstance& instance, std::size_t bound,
                                               std::uint64_t action_cap) {
  const State init = instance.initial_state();
  if (is_goal_state(init, instance)) return 0;
  const auto actions = ground_actions(instance, action_cap);

  std::set<AtomSet> visited{init.atoms};
  std::vector<AtomSet> frontier{init.atoms};
  for (std::size_t depth = 1; depth <= bound && !frontier.empty(); ++depth) {
    std::vector<AtomSet> next;
    for (const auto& state : frontier) {
      for (const auto& action : actions) {
        if (!std::includes(state.begin(), state.end(), action.preconditions.begin(), action.preconditions.end())) {
          continue;
        }
        AtomSet succ = apply_effects(state, action.delete_effects, action.add_effects);
        if (!visited.insert(succ).second) continue;
        if (is_goal_state(State{succ}, instance)) return depth;
        next.push_back(std::move(succ));
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace c2lab
