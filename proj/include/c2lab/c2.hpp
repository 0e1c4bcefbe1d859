#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "c2lab/encode.hpp"

namespace c2lab {

/// Immutable formula of two-variable counting logic. Nodes are shared, so
/// copies are cheap. Construction rejects a third distinct variable name.
class Formula {
 public:
  enum class Kind { Atom, Nullary, Not, And, Or, ExistsAtLeast, ForAll };

  static Formula atom(std::string predicate, std::vector<std::string> variables);
  static Formula nullary(std::string predicate);
  static Formula negation(Formula body);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  /// Requires k ≥ 1.
  static Formula exists_at_least(std::size_t k, std::string variable, Formula body);
  static Formula exists(std::string variable, Formula body) { return exists_at_least(1, std::move(variable), std::move(body)); }
  static Formula for_all(std::string variable, Formula body);

  Kind kind() const noexcept;
  const std::string& predicate() const noexcept;
  const std::vector<std::string>& arguments() const noexcept;
  const std::string& variable() const noexcept;
  std::size_t bound() const noexcept;
  std::size_t child_count() const noexcept;
  const Formula& child(std::size_t i) const;

  /// Node count.
  std::size_t size() const noexcept;
  /// Every variable name used anywhere, sorted; at most two.
  const std::vector<std::string>& variables() const noexcept;
  std::vector<std::string> free_variables() const;

  /// Text in the formula grammar; parse_formula(to_string()) rebuilds an equal tree.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Node node);

  std::shared_ptr<const Node> node_;
};

/// Parses the formula grammar (see docs/formula-grammar.md) against a
/// language. Errors: syntax (with position), unknown predicate, arity
/// mismatch, third variable.
Formula parse_formula(std::string_view text, const RelationalLanguage& language);

/// (∃^{=k} v) φ  ≡  ∃^{≥k} v φ ∧ ¬∃^{≥k+1} v φ, and ¬∃ v φ for k = 0
Formula expand_exact(std::size_t k, const std::string& variable, const Formula& body);

/// Disjunction over binary, unary and nullary domain predicates p of
/// "some goal atom p_G is not matched by p". Expects a goal-extended language.
Formula goal_not_achieved_formula(const RelationalLanguage& language);

/// Variable name -> constant name.
using Valuation = std::map<std::string, std::string>;

struct EvalStats {
  std::uint64_t visits = 0;
};

/// Reference semantics by enumeration over constants, no memoisation.
bool evaluate(const Formula& formula, const RelationalStructure& structure, const Valuation& valuation = {},
              EvalStats* stats = nullptr);

/// Same semantics, memoised per (subformula, values of its free variables);
/// O(|C|² · |φ|) node visits.
bool evaluate_cached(const Formula& formula, const RelationalStructure& structure, const Valuation& valuation = {},
                     EvalStats* stats = nullptr);

}  // namespace c2lab
