#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

#include "c2lab/c2.hpp"
#include "c2lab/error.hpp"

namespace c2lab {

namespace {

// Truth tables of one structure, indexed by constant position.
class StructureIndex {
 public:
  struct Table {
    std::size_t arity = 0;
    std::vector<char> dense;
    std::set<std::vector<int>> sparse;
  };

  explicit StructureIndex(const RelationalStructure& s) : n_(s.constants().size()) {
    for (std::size_t i = 0; i < n_; ++i) position_[s.constants()[i]] = static_cast<int>(i);
    for (const auto& p : s.language().predicates) {
      Table t;
      t.arity = p.arity;
      if (p.arity <= 2) t.dense.assign(p.arity == 0 ? 1 : p.arity == 1 ? n_ : n_ * n_, 0);
      tables_.emplace(p.name, std::move(t));
    }
    for (const auto& atom : s.atoms()) {
      Table& t = tables_.at(atom.predicate);
      std::vector<int> tuple;
      for (const auto& a : atom.args) tuple.push_back(position_.at(a));
      if (t.arity <= 2) {
        t.dense[offset(tuple)] = 1;
      } else {
        t.sparse.insert(std::move(tuple));
      }
    }
  }

  std::size_t size() const { return n_; }

  const Table* table(const std::string& name) const {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
  }

  int position(const std::string& constant) const {
    auto it = position_.find(constant);
    if (it == position_.end()) throw Error(ErrorKind::UnknownObject, "valuation names unknown constant '" + constant + "'");
    return it->second;
  }

  bool holds(const Table& t, const std::vector<int>& tuple) const {
    return t.arity <= 2 ? t.dense[offset(tuple)] != 0 : t.sparse.count(tuple) > 0;
  }

 private:
  std::size_t offset(const std::vector<int>& tuple) const {
    switch (tuple.size()) {
      case 0: return 0;
      case 1: return static_cast<std::size_t>(tuple[0]);
      default: return static_cast<std::size_t>(tuple[0]) * n_ + static_cast<std::size_t>(tuple[1]);
    }
  }

  std::size_t n_;
  std::unordered_map<std::string, int> position_;
  std::unordered_map<std::string, Table> tables_;
};

// Flattened formula with variables mapped to slots 0 and 1.
struct CompiledNode {
  Formula::Kind kind = Formula::Kind::Atom;
  const StructureIndex::Table* table = nullptr;
  std::vector<int> arg_slots;
  int slot = -1;
  std::size_t bound = 0;
  std::vector<std::size_t> children;
  unsigned free_mask = 0;
};

class Compiled {
 public:
  Compiled(const Formula& f, const StructureIndex& index) {
    const auto& vars = f.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) slots_[vars[i]] = static_cast<int>(i);
    root_ = add(f, index);
  }

  const CompiledNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  int slot(const std::string& var) const {
    auto it = slots_.find(var);
    return it == slots_.end() ? -1 : it->second;
  }

 private:
  std::size_t add(const Formula& f, const StructureIndex& index) {
    CompiledNode n;
    n.kind = f.kind();
    switch (f.kind()) {
      case Formula::Kind::Atom:
      case Formula::Kind::Nullary: {
        n.table = index.table(f.predicate());
        if (!n.table) {
          throw Error(ErrorKind::UnknownPredicate, "predicate '" + f.predicate() + "' is not in the structure language");
        }
        if (n.table->arity != f.arguments().size()) {
          throw Error(ErrorKind::ArityMismatch, "predicate '" + f.predicate() + "' has arity " +
                                                    std::to_string(n.table->arity) + " in the structure");
        }
        for (const auto& v : f.arguments()) {
          n.arg_slots.push_back(slots_.at(v));
          n.free_mask |= 1u << slots_.at(v);
        }
        break;
      }
      case Formula::Kind::ExistsAtLeast:
      case Formula::Kind::ForAll:
        n.slot = slots_.at(f.variable());
        n.bound = f.bound();
        n.children.push_back(add(f.child(0), index));
        n.free_mask = nodes_[n.children[0]].free_mask & ~(1u << n.slot);
        break;
      default:
        for (std::size_t i = 0; i < f.child_count(); ++i) {
          n.children.push_back(add(f.child(i), index));
          n.free_mask |= nodes_[n.children.back()].free_mask;
        }
        break;
    }
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::unordered_map<std::string, int> slots_;
  std::vector<CompiledNode> nodes_;
  std::size_t root_ = 0;
};

using Env = std::array<int, 2>;

class Evaluator {
 public:
  Evaluator(const Compiled& c, const StructureIndex& index, EvalStats* stats, bool cached)
      : c_(c), index_(index), stats_(stats), cached_(cached) {
    if (cached_) {
      const std::size_t w = index_.size() + 1;
      memo_.assign(c_.node_count() * w * w, -1);
    }
  }

  bool eval(std::size_t id, Env& env) {
    if (stats_) ++stats_->visits;
    if (!cached_) return compute(id, env);
    const std::size_t key = memo_key(id, env);
    if (memo_[key] < 0) memo_[key] = compute(id, env) ? 1 : 0;
    return memo_[key] == 1;
  }

 private:
  std::size_t memo_key(std::size_t id, const Env& env) const {
    const std::size_t w = index_.size() + 1;
    const unsigned mask = c_.node(id).free_mask;
    const std::size_t a = (mask & 1u) ? static_cast<std::size_t>(env[0] + 1) : 0;
    const std::size_t b = (mask & 2u) ? static_cast<std::size_t>(env[1] + 1) : 0;
    return (id * w + a) * w + b;
  }

  bool compute(std::size_t id, Env& env) {
    const CompiledNode& n = c_.node(id);
    switch (n.kind) {
      case Formula::Kind::Atom:
      case Formula::Kind::Nullary: {
        tuple_.clear();
        for (int s : n.arg_slots) tuple_.push_back(env[s]);
        return index_.holds(*n.table, tuple_);
      }
      case Formula::Kind::Not:
        return !eval(n.children[0], env);
      case Formula::Kind::And:
        return eval(n.children[0], env) && eval(n.children[1], env);
      case Formula::Kind::Or:
        return eval(n.children[0], env) || eval(n.children[1], env);
      case Formula::Kind::ExistsAtLeast: {
        const std::size_t total = index_.size();
        if (n.bound > total) return false;
        const int saved = env[n.slot];
        std::size_t count = 0;
        for (std::size_t c = 0; c < total && count < n.bound; ++c) {
          env[n.slot] = static_cast<int>(c);
          if (eval(n.children[0], env)) ++count;
        }
        env[n.slot] = saved;
        return count >= n.bound;
      }
      case Formula::Kind::ForAll: {
        const int saved = env[n.slot];
        bool all = true;
        for (std::size_t c = 0; c < index_.size() && all; ++c) {
          env[n.slot] = static_cast<int>(c);
          all = eval(n.children[0], env);
        }
        env[n.slot] = saved;
        return all;
      }
    }
    return false;
  }

  const Compiled& c_;
  const StructureIndex& index_;
  EvalStats* stats_;
  bool cached_;
  std::vector<signed char> memo_;
  std::vector<int> tuple_;
};

bool run(const Formula& formula, const RelationalStructure& structure, const Valuation& valuation, EvalStats* stats,
         bool cached) {
  if (valuation.size() > 2) throw Error(ErrorKind::InvalidInput, "a valuation binds at most two variables");
  StructureIndex index(structure);
  Compiled compiled(formula, index);

  Env env{-1, -1};
  for (const auto& [var, constant] : valuation) {
    const int s = compiled.slot(var);
    if (s >= 0) env[s] = index.position(constant);
  }
  for (const auto& v : formula.free_variables()) {
    if (env[compiled.slot(v)] < 0) throw Error(ErrorKind::UnboundVariable, "free variable '" + v + "' is unbound");
  }
  Evaluator evaluator(compiled, index, stats, cached);
  return evaluator.eval(compiled.root(), env);
}

}  // namespace

bool evaluate(const Formula& formula, const RelationalStructure& structure, const Valuation& valuation,
              EvalStats* stats) {
  return run(formula, structure, valuation, stats, false);
}

bool evaluate_cached(const Formula& formula, const RelationalStructure& structure, const Valuation& valuation,
                     EvalStats* stats) {
  return run(formula, structure, valuation, stats, true);
}

}  // namespace c2lab
