#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "c2lab/encode.hpp"

namespace c2lab {

enum class Regime { Rgnn, PloiSparse, PairTypeC2 };

const char* to_string(Regime regime);
/// Accepts "rgnn", "ploi-sparse", "pairtype-c2".
Regime parse_regime(std::string_view name);

/// Dense ids for structured signatures. Signatures are compared exactly, so two
/// nodes share a color iff their signatures are identical.
class ColorInterner {
 public:
  using Signature = std::vector<std::int64_t>;
  using Color = std::uint32_t;

  Color intern(const Signature& signature);
  std::size_t size() const noexcept { return ids_.size(); }

 private:
  std::map<Signature, Color> ids_;
};

struct ColorHistory {
  /// rounds[t][node]; round 0 is the initial coloring.
  std::vector<std::vector<ColorInterner::Color>> rounds;
  /// First round whose partition equals the next round's; empty when the
  /// round limit was hit first.
  std::optional<std::size_t> stable_round;

  std::size_t class_count(std::size_t round) const;
};

/// Relational message passing: each atom sends (predicate, position, colors
/// of all arguments) to every argument position; true nullary atoms broadcast
/// one tuple per predicate. max_rounds 0 means "number of constants".
ColorHistory rgnn_refine(const RelationalStructure& structure, std::size_t max_rounds = 0);

/// Edge-wise refinement on a labeled graph: a node sees (edge label, color of
/// target) over its outgoing edges.
ColorHistory ploi_sparse_refine(const LabeledGraph& graph, std::size_t max_rounds = 0);

/// Refinement over atomic pair types: every other constant contributes
/// (pair type, color) whether or not any relation holds. Requires arity ≤ 2.
ColorHistory pairtype_refine(const RelationalStructure& structure, std::size_t max_rounds = 0);

using RefinementInput = std::variant<RelationalStructure, LabeledGraph>;

struct Verdict {
  Regime regime = Regime::Rgnn;
  bool distinguishable = false;
  std::optional<std::size_t> separating_round;
  /// Classes among each input's own nodes, per computed round.
  std::vector<std::size_t> class_counts_a;
  std::vector<std::size_t> class_counts_b;
  std::optional<std::size_t> stable_round;
};

/// Refines the disjoint union of `a` and `b` with one shared interner and
/// reports the first round whose color multisets differ. rgnn and
/// pairtype-c2 take structures, ploi-sparse takes labeled graphs; both inputs
/// must be the same kind over the same relations (ErrorKind::MixedInputs).
/// max_rounds 0 means "size of the union".
Verdict distinguishable(const RefinementInput& a, const RefinementInput& b, Regime regime,
                        std::size_t max_rounds = 0);

}  // namespace c2lab
