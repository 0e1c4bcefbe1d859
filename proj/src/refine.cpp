#include "c2lab/refine.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "c2lab/error.hpp"

namespace c2lab {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Rgnn: return "rgnn";
    case Regime::PloiSparse: return "ploi-sparse";
    case Regime::PairTypeC2: return "pairtype-c2";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  for (Regime r : {Regime::Rgnn, Regime::PloiSparse, Regime::PairTypeC2}) {
    if (name == to_string(r)) return r;
  }
  throw Error(ErrorKind::InvalidInput, "unknown regime '" + std::string(name) + "'");
}

ColorInterner::Color ColorInterner::intern(const Signature& signature) {
  auto [it, inserted] = ids_.try_emplace(signature, static_cast<Color>(ids_.size()));
  return it->second;
}

std::size_t ColorHistory::class_count(std::size_t round) const {
  auto colors = rounds.at(round);
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(std::unique(colors.begin(), colors.end()) - colors.begin());
}

namespace {

using Signature = ColorInterner::Signature;
using Colors = std::vector<ColorInterner::Color>;

// Signature tags keep initial and update signatures apart in a shared table.
constexpr std::int64_t kInitialTag = -1;
constexpr std::int64_t kUpdateTag = -2;
constexpr std::int64_t kSeparator = -3;

std::size_t class_count(Colors colors) {
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(std::unique(colors.begin(), colors.end()) - colors.begin());
}

template <typename Initial, typename Update>
ColorHistory refine_loop(std::size_t n, std::size_t max_rounds, ColorInterner& interner, Initial&& initial,
                         Update&& update) {
  if (max_rounds == 0) max_rounds = n;
  ColorHistory history;
  Colors current(n);
  for (std::size_t u = 0; u < n; ++u) current[u] = interner.intern(initial(u));
  history.rounds.push_back(current);
  std::size_t classes = class_count(current);

  for (std::size_t t = 1; t <= max_rounds; ++t) {
    Colors next(n);
    for (std::size_t u = 0; u < n; ++u) next[u] = interner.intern(update(u, current));
    history.rounds.push_back(next);
    const std::size_t next_classes = class_count(next);
    // signatures embed the previous color, so equal counts mean equal partitions
    if (next_classes == classes) {
      history.stable_round = t - 1;
      break;
    }
    classes = next_classes;
    current = std::move(next);
  }
  return history;
}

void append_sorted(Signature& sig, std::vector<Signature>& items) {
  std::sort(items.begin(), items.end());
  sig.push_back(static_cast<std::int64_t>(items.size()));
  for (const auto& item : items) {
    sig.push_back(static_cast<std::int64_t>(item.size()));
    sig.insert(sig.end(), item.begin(), item.end());
  }
}

// Disjoint union of one or more relational structures over a shared language.
struct RelationalUnion {
  struct IndexedAtom {
    std::size_t predicate;
    std::vector<std::size_t> args;
  };

  std::vector<Predicate> predicates;
  std::vector<std::size_t> offsets;  // first node of each component, plus the total
  std::vector<std::size_t> component_of;
  std::vector<IndexedAtom> atoms;
  std::vector<std::vector<std::size_t>> nullary;  // true nullary predicates per component

  std::size_t size() const { return component_of.size(); }
  std::size_t begin(std::size_t node) const { return offsets[component_of[node]]; }
  std::size_t end(std::size_t node) const { return offsets[component_of[node] + 1]; }
};

RelationalUnion make_union(const std::vector<const RelationalStructure*>& parts) {
  RelationalUnion u;
  const RelationalLanguage& language = parts.front()->language();
  u.predicates = language.predicates;
  std::unordered_map<std::string, std::size_t> pred_index;
  for (std::size_t i = 0; i < u.predicates.size(); ++i) pred_index[u.predicates[i].name] = i;

  for (std::size_t c = 0; c < parts.size(); ++c) {
    const RelationalStructure& s = *parts[c];
    if (!(s.language() == language)) {
      throw Error(ErrorKind::MixedInputs, "refinement inputs are over different relational languages");
    }
    const std::size_t offset = u.component_of.size();
    u.offsets.push_back(offset);
    std::unordered_map<std::string, std::size_t> node;
    for (std::size_t i = 0; i < s.constants().size(); ++i) {
      node[s.constants()[i]] = offset + i;
      u.component_of.push_back(c);
    }
    u.nullary.emplace_back();
    for (const auto& atom : s.atoms()) {
      const std::size_t p = pred_index.at(atom.predicate);
      if (atom.args.empty()) {
        u.nullary.back().push_back(p);
        continue;
      }
      RelationalUnion::IndexedAtom a{p, {}};
      for (const auto& arg : atom.args) a.args.push_back(node.at(arg));
      u.atoms.push_back(std::move(a));
    }
    std::sort(u.nullary.back().begin(), u.nullary.back().end());
  }
  u.offsets.push_back(u.component_of.size());
  return u;
}

ColorHistory rgnn_union(const RelationalUnion& u, std::size_t max_rounds, ColorInterner& interner) {
  // incidence[node] = (atom index, position) pairs
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incidence(u.size());
  for (std::size_t i = 0; i < u.atoms.size(); ++i) {
    for (std::size_t j = 0; j < u.atoms[i].args.size(); ++j) incidence[u.atoms[i].args[j]].emplace_back(i, j);
  }
  auto initial = [](std::size_t) { return Signature{kInitialTag}; };
  auto update = [&](std::size_t node, const Colors& colors) {
    std::vector<Signature> messages;
    for (auto [atom, position] : incidence[node]) {
      const auto& a = u.atoms[atom];
      Signature m{static_cast<std::int64_t>(a.predicate), static_cast<std::int64_t>(position)};
      for (auto arg : a.args) m.push_back(colors[arg]);
      messages.push_back(std::move(m));
    }
    for (auto p : u.nullary[u.component_of[node]]) messages.push_back({static_cast<std::int64_t>(p), -1});
    Signature sig{kUpdateTag, colors[node]};
    append_sorted(sig, messages);
    return sig;
  };
  return refine_loop(u.size(), max_rounds, interner, initial, update);
}

void require_binary_at_most(const std::vector<Predicate>& predicates) {
  for (const auto& p : predicates) {
    if (p.arity > 2) {
      throw Error(ErrorKind::UnsupportedArity, "pair-type refinement needs arity at most 2; '" + p.name +
                                                   "' has arity " + std::to_string(p.arity));
    }
  }
}

ColorHistory pairtype_union(const RelationalUnion& u, std::size_t max_rounds, ColorInterner& interner) {
  require_binary_at_most(u.predicates);
  const std::size_t n = u.size();
  std::vector<std::size_t> binary_slot(u.predicates.size(), 0);
  std::size_t binary_count = 0;
  for (std::size_t i = 0; i < u.predicates.size(); ++i) {
    if (u.predicates[i].arity == 2) binary_slot[i] = binary_count++;
  }

  // holds[(u*n+v)*B + slot] for pairs inside one component
  std::vector<char> holds(n * n * binary_count, 0);
  std::vector<std::vector<std::int64_t>> unary(n);
  for (const auto& a : u.atoms) {
    if (a.args.size() == 2) {
      holds[(a.args[0] * n + a.args[1]) * binary_count + binary_slot[a.predicate]] = 1;
    } else {
      unary[a.args[0]].push_back(static_cast<std::int64_t>(a.predicate));
    }
  }
  for (auto& list : unary) std::sort(list.begin(), list.end());

  // atomic pair type: for each binary predicate, (p(u,v), p(v,u)) as two bits
  auto pair_type = [&](std::size_t x, std::size_t y, Signature& out) {
    std::int64_t word = 0;
    int bits = 0;
    for (std::size_t s = 0; s < binary_count; ++s) {
      const int forward = holds[(x * n + y) * binary_count + s];
      const int backward = holds[(y * n + x) * binary_count + s];
      word = (word << 2) | (forward << 1) | backward;
      bits += 2;
      if (bits == 62) {
        out.push_back(word);
        word = 0;
        bits = 0;
      }
    }
    if (bits > 0 || binary_count == 0) out.push_back(word);
  };

  auto initial = [&](std::size_t x) {
    Signature sig{kInitialTag};
    sig.insert(sig.end(), unary[x].begin(), unary[x].end());
    sig.push_back(kSeparator);
    pair_type(x, x, sig);
    sig.push_back(kSeparator);
    for (auto p : u.nullary[u.component_of[x]]) sig.push_back(static_cast<std::int64_t>(p));
    return sig;
  };
  auto update = [&](std::size_t x, const Colors& colors) {
    std::vector<Signature> others;
    for (std::size_t y = u.begin(x); y < u.end(x); ++y) {
      if (y == x) continue;
      Signature item;
      pair_type(x, y, item);
      item.push_back(colors[y]);
      others.push_back(std::move(item));
    }
    Signature sig{kUpdateTag, colors[x]};
    append_sorted(sig, others);
    return sig;
  };
  return refine_loop(n, max_rounds, interner, initial, update);
}

// Disjoint union of labeled graphs with relation slots aligned by name.
struct GraphUnion {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> component_of;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;  // (label, target)
  std::vector<std::vector<std::int64_t>> features;
  std::vector<std::vector<std::int64_t>> flags;  // per component

  std::size_t size() const { return component_of.size(); }
};

std::vector<std::size_t> align(const std::vector<std::string>& reference, const std::vector<std::string>& names) {
  if (reference.size() != names.size()) {
    throw Error(ErrorKind::MixedInputs, "labeled graphs have different relation sets");
  }
  std::vector<std::size_t> map(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = std::find(reference.begin(), reference.end(), names[i]);
    if (it == reference.end()) throw Error(ErrorKind::MixedInputs, "labeled graphs have different relation sets");
    map[i] = static_cast<std::size_t>(it - reference.begin());
  }
  return map;
}

GraphUnion make_graph_union(const std::vector<const LabeledGraph*>& parts) {
  GraphUnion g;
  const LabeledGraph& ref = *parts.front();
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const LabeledGraph& part = *parts[c];
    const auto edge_map = align(ref.edge_relations, part.edge_relations);
    const auto feature_map = align(ref.feature_relations, part.feature_relations);
    const auto flag_map = align(ref.flag_relations, part.flag_relations);
    const std::size_t offset = g.size();
    g.offsets.push_back(offset);
    for (std::size_t i = 0; i < part.nodes.size(); ++i) g.component_of.push_back(c);
    g.out.resize(g.size());
    g.features.resize(g.size());
    for (const auto& e : part.edges) {
      if (e.source >= part.nodes.size() || e.target >= part.nodes.size() || e.relation >= edge_map.size()) {
        throw Error(ErrorKind::InvalidInput, "labeled graph edge out of range");
      }
      g.out[offset + e.source].emplace_back(edge_map[e.relation], offset + e.target);
    }
    for (const auto& f : part.features) {
      if (f.node >= part.nodes.size() || f.relation >= feature_map.size()) {
        throw Error(ErrorKind::InvalidInput, "labeled graph feature out of range");
      }
      g.features[offset + f.node].push_back(static_cast<std::int64_t>(feature_map[f.relation]));
    }
    g.flags.emplace_back();
    for (auto f : part.flags) {
      if (f >= flag_map.size()) throw Error(ErrorKind::InvalidInput, "labeled graph flag out of range");
      g.flags.back().push_back(static_cast<std::int64_t>(flag_map[f]));
    }
    std::sort(g.flags.back().begin(), g.flags.back().end());
  }
  for (auto& f : g.features) std::sort(f.begin(), f.end());
  g.offsets.push_back(g.size());
  return g;
}

ColorHistory sparse_union(const GraphUnion& g, std::size_t max_rounds, ColorInterner& interner) {
  auto initial = [&](std::size_t u) {
    Signature sig{kInitialTag};
    sig.insert(sig.end(), g.features[u].begin(), g.features[u].end());
    sig.push_back(kSeparator);
    const auto& flags = g.flags[g.component_of[u]];
    sig.insert(sig.end(), flags.begin(), flags.end());
    return sig;
  };
  auto update = [&](std::size_t u, const Colors& colors) {
    std::vector<Signature> messages;
    for (auto [label, target] : g.out[u]) {
      messages.push_back({static_cast<std::int64_t>(label), static_cast<std::int64_t>(colors[target])});
    }
    Signature sig{kUpdateTag, colors[u]};
    append_sorted(sig, messages);
    return sig;
  };
  return refine_loop(g.size(), max_rounds, interner, initial, update);
}

Colors restricted(const Colors& colors, std::size_t begin, std::size_t end) {
  Colors part(colors.begin() + static_cast<std::ptrdiff_t>(begin), colors.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(part.begin(), part.end());
  return part;
}

}  // namespace

ColorHistory rgnn_refine(const RelationalStructure& structure, std::size_t max_rounds) {
  ColorInterner interner;
  return rgnn_union(make_union({&structure}), max_rounds, interner);
}

ColorHistory ploi_sparse_refine(const LabeledGraph& graph, std::size_t max_rounds) {
  ColorInterner interner;
  return sparse_union(make_graph_union({&graph}), max_rounds, interner);
}

ColorHistory pairtype_refine(const RelationalStructure& structure, std::size_t max_rounds) {
  ColorInterner interner;
  return pairtype_union(make_union({&structure}), max_rounds, interner);
}

Verdict distinguishable(const RefinementInput& a, const RefinementInput& b, Regime regime, std::size_t max_rounds) {
  if (a.index() != b.index()) {
    throw Error(ErrorKind::MixedInputs, "cannot compare a relational structure with a labeled graph");
  }
  const bool wants_graph = regime == Regime::PloiSparse;
  if (std::holds_alternative<LabeledGraph>(a) != wants_graph) {
    throw Error(ErrorKind::MixedInputs, std::string("regime ") + to_string(regime) + " expects " +
                                            (wants_graph ? "labeled graphs" : "relational structures"));
  }

  ColorInterner interner;
  ColorHistory history;
  std::size_t split = 0, total = 0;
  if (wants_graph) {
    const auto& ga = std::get<LabeledGraph>(a);
    const auto& gb = std::get<LabeledGraph>(b);
    const GraphUnion g = make_graph_union({&ga, &gb});
    split = g.offsets[1];
    total = g.size();
    history = sparse_union(g, max_rounds, interner);
  } else {
    const auto& sa = std::get<RelationalStructure>(a);
    const auto& sb = std::get<RelationalStructure>(b);
    const RelationalUnion u = make_union({&sa, &sb});
    split = u.offsets[1];
    total = u.size();
    history = regime == Regime::Rgnn ? rgnn_union(u, max_rounds, interner) : pairtype_union(u, max_rounds, interner);
  }

  Verdict verdict;
  verdict.regime = regime;
  verdict.stable_round = history.stable_round;
  for (std::size_t t = 0; t < history.rounds.size(); ++t) {
    const Colors ca = restricted(history.rounds[t], 0, split);
    const Colors cb = restricted(history.rounds[t], split, total);
    verdict.class_counts_a.push_back(class_count(ca));
    verdict.class_counts_b.push_back(class_count(cb));
    if (!verdict.distinguishable && ca != cb) {
      verdict.distinguishable = true;
      verdict.separating_round = t;
    }
  }
  return verdict;
}

}  // namespace c2lab
