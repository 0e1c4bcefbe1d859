#include <algorithm>

#include "c2lab/c2.hpp"
#include "c2lab/error.hpp"

namespace c2lab {

struct Formula::Node {
  Kind kind;
  std::string name;                 // predicate for atoms, variable for quantifiers
  std::vector<std::string> args;    // atom arguments
  std::size_t bound = 0;            // counting bound
  std::vector<Formula> children;
  std::vector<std::string> vars;    // sorted, unique
  std::size_t size = 1;
};

namespace {

std::vector<std::string> merge_vars(std::vector<std::string> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > 2) {
    throw Error(ErrorKind::TwoVariableViolation,
                "formula uses variables " + vars[0] + ", " + vars[1] + " and " + vars[2] +
                    "; at most two distinct variable names are allowed");
  }
  return vars;
}

}  // namespace

Formula Formula::make(Node node) {
  std::vector<std::string> vars = node.args;
  if (node.kind == Kind::ExistsAtLeast || node.kind == Kind::ForAll) vars.push_back(node.name);
  for (const auto& c : node.children) {
    vars.insert(vars.end(), c.node_->vars.begin(), c.node_->vars.end());
    node.size += c.node_->size;
  }
  node.vars = merge_vars(std::move(vars));
  return Formula(std::make_shared<const Node>(std::move(node)));
}

Formula Formula::atom(std::string predicate, std::vector<std::string> variables) {
  if (variables.empty()) return nullary(std::move(predicate));
  return make(Node{Kind::Atom, std::move(predicate), std::move(variables), 0, {}, {}});
}

Formula Formula::nullary(std::string predicate) { return make(Node{Kind::Nullary, std::move(predicate), {}, 0, {}, {}}); }

Formula Formula::negation(Formula body) { return make(Node{Kind::Not, {}, {}, 0, {std::move(body)}, {}}); }

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(Node{Kind::And, {}, {}, 0, {std::move(lhs), std::move(rhs)}, {}});
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make(Node{Kind::Or, {}, {}, 0, {std::move(lhs), std::move(rhs)}, {}});
}

Formula Formula::exists_at_least(std::size_t k, std::string variable, Formula body) {
  if (k == 0) throw Error(ErrorKind::InvalidInput, "counting bound must be at least 1");
  return make(Node{Kind::ExistsAtLeast, std::move(variable), {}, k, {std::move(body)}, {}});
}

Formula Formula::for_all(std::string variable, Formula body) {
  return make(Node{Kind::ForAll, std::move(variable), {}, 0, {std::move(body)}, {}});
}

Formula::Kind Formula::kind() const noexcept { return node_->kind; }
const std::string& Formula::predicate() const noexcept { return node_->name; }
const std::vector<std::string>& Formula::arguments() const noexcept { return node_->args; }
const std::string& Formula::variable() const noexcept { return node_->name; }
std::size_t Formula::bound() const noexcept { return node_->bound; }
std::size_t Formula::child_count() const noexcept { return node_->children.size(); }
const Formula& Formula::child(std::size_t i) const { return node_->children.at(i); }
std::size_t Formula::size() const noexcept { return node_->size; }
const std::vector<std::string>& Formula::variables() const noexcept { return node_->vars; }

std::vector<std::string> Formula::free_variables() const {
  std::vector<std::string> out;
  switch (kind()) {
    case Kind::Atom:
      out = arguments();
      break;
    case Kind::Nullary:
      break;
    case Kind::Not:
    case Kind::And:
    case Kind::Or:
      for (const auto& c : node_->children) {
        auto sub = c.free_variables();
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
    case Kind::ExistsAtLeast:
    case Kind::ForAll:
      out = child(0).free_variables();
      out.erase(std::remove(out.begin(), out.end(), variable()), out.end());
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string Formula::to_string() const {
  switch (kind()) {
    case Kind::Atom: {
      std::string out = predicate() + "(";
      for (std::size_t i = 0; i < arguments().size(); ++i) {
        if (i) out += ",";
        out += arguments()[i];
      }
      return out + ")";
    }
    case Kind::Nullary:
      return predicate() + "()";
    case Kind::Not: {
      const Kind k = child(0).kind();
      const bool bare = k == Kind::Atom || k == Kind::Nullary || k == Kind::Not;
      return bare ? "!" + child(0).to_string() : "!(" + child(0).to_string() + ")";
    }
    case Kind::And:
      return "(" + child(0).to_string() + " & " + child(1).to_string() + ")";
    case Kind::Or:
      return "(" + child(0).to_string() + " | " + child(1).to_string() + ")";
    case Kind::ExistsAtLeast: {
      const std::string q = bound() == 1 ? "exists " : "exists>=" + std::to_string(bound()) + " ";
      return "(" + q + variable() + " . " + child(0).to_string() + ")";
    }
    case Kind::ForAll:
      return "(forall " + variable() + " . " + child(0).to_string() + ")";
  }
  return {};
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.name == y.name && x.args == y.args && x.bound == y.bound && x.children == y.children;
}

Formula expand_exact(std::size_t k, const std::string& variable, const Formula& body) {
  if (k == 0) return Formula::negation(Formula::exists_at_least(1, variable, body));
  return Formula::conjunction(Formula::exists_at_least(k, variable, body),
                              Formula::negation(Formula::exists_at_least(k + 1, variable, body)));
}

Formula goal_not_achieved_formula(const RelationalLanguage& language) {
  std::vector<Formula> binary, unary, nullary;
  for (const auto& p : language.predicates) {
    const Predicate* goal = language.find(goal_name(p.name));
    if (!goal) continue;
    if (p.arity > 2) {
      throw Error(ErrorKind::UnsupportedArity, "predicate '" + p.name + "' has arity " + std::to_string(p.arity));
    }
    if (goal->arity != p.arity) {
      throw Error(ErrorKind::ArityMismatch, "goal predicate '" + goal->name + "' does not match '" + p.name + "'");
    }
    switch (p.arity) {
      case 2:
        binary.push_back(Formula::exists(
            "x", Formula::exists("y", Formula::conjunction(Formula::atom(goal->name, {"x", "y"}),
                                                           Formula::negation(Formula::atom(p.name, {"x", "y"}))))));
        break;
      case 1:
        unary.push_back(Formula::exists("x", Formula::conjunction(Formula::atom(goal->name, {"x"}),
                                                                  Formula::negation(Formula::atom(p.name, {"x"})))));
        break;
      default:
        nullary.push_back(
            Formula::conjunction(Formula::nullary(goal->name), Formula::negation(Formula::nullary(p.name))));
        break;
    }
  }
  std::vector<Formula> all = std::move(binary);
  all.insert(all.end(), unary.begin(), unary.end());
  all.insert(all.end(), nullary.begin(), nullary.end());
  if (all.empty()) {
    throw Error(ErrorKind::InvalidInput, "language has no predicate with a goal duplicate");
  }
  Formula result = all.front();
  for (std::size_t i = 1; i < all.size(); ++i) result = Formula::disjunction(result, all[i]);
  return result;
}

}  // namespace c2lab
