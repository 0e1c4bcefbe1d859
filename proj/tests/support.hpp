// Shared generators for the property suites. Everything is driven by a seeded
// mt19937_64 so a failing case can be replayed from its seed.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "c2lab/encode.hpp"
#include "c2lab/model.hpp"

namespace testgen {

using c2lab::Atom;
using c2lab::AtomSet;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::string> object_names(std::size_t n, const std::string& stem = "o") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// Every ground atom of `pred` over `objects`.
inline std::vector<Atom> all_atoms(const c2lab::Predicate& pred, const std::vector<std::string>& objects) {
  std::vector<Atom> out;
  if (objects.empty() && pred.arity > 0) return out;
  std::vector<std::size_t> idx(pred.arity, 0);
  while (true) {
    Atom a{pred.name, {}};
    for (std::size_t i : idx) a.args.push_back(objects[i]);
    out.push_back(a);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == objects.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

inline AtomSet random_atoms(Rng& rng, const std::vector<c2lab::Predicate>& preds,
                            const std::vector<std::string>& objects, double density) {
  AtomSet out;
  for (const auto& p : preds) {
    for (auto& a : all_atoms(p, objects)) {
      if (rng.coin(density)) out.insert(std::move(a));
    }
  }
  return out;
}

// Domain with up to `max_preds` predicates of arity ≤ max_arity and a few
// random STRIPS schemata.
inline std::shared_ptr<const c2lab::Domain> random_domain(Rng& rng, std::size_t max_preds = 3,
                                                          std::size_t max_arity = 2) {
  std::vector<c2lab::Predicate> preds;
  const std::size_t np = 1 + rng.below(max_preds);
  for (std::size_t i = 0; i < np; ++i) preds.push_back({"p" + std::to_string(i), rng.below(max_arity + 1)});

  std::vector<c2lab::ActionSchema> schemata;
  const std::size_t ns = rng.below(3);
  for (std::size_t s = 0; s < ns; ++s) {
    c2lab::ActionSchema a;
    a.name = "act" + std::to_string(s);
    const std::size_t nparams = rng.below(3);
    for (std::size_t i = 0; i < nparams; ++i) a.params.push_back("v" + std::to_string(i));
    for (const auto& p : preds) {
      if (p.arity > 0 && a.params.empty()) continue;
      std::vector<std::string> pool = a.params;
      for (std::size_t tries = 0; tries < 2; ++tries) {
        Atom atom{p.name, {}};
        for (std::size_t k = 0; k < p.arity; ++k) atom.args.push_back(pool[rng.below(pool.size())]);
        const std::size_t where = rng.below(4);
        if (where == 0) a.preconditions.insert(atom);
        else if (where == 1 && !a.delete_effects.count(atom)) a.add_effects.insert(atom);
        else if (where == 2 && !a.add_effects.count(atom)) a.delete_effects.insert(atom);
      }
    }
    schemata.push_back(std::move(a));
  }
  return std::make_shared<const c2lab::Domain>(preds, schemata);
}

inline c2lab::PlanningInstance random_instance(Rng& rng, std::shared_ptr<const c2lab::Domain> domain,
                                               std::size_t max_objects = 3) {
  const auto objects = object_names(1 + rng.below(max_objects));
  AtomSet init = random_atoms(rng, domain->predicates(), objects, 0.4);
  AtomSet goal = random_atoms(rng, domain->predicates(), objects, 0.25);
  return c2lab::PlanningInstance(domain, objects, init, goal);
}

inline c2lab::RelationalLanguage unary_binary_language() {
  return c2lab::RelationalLanguage{{{"u", 1}, {"p", 2}}};
}

// Random structure over the given language with `n` constants named c0..
inline c2lab::RelationalStructure random_structure(Rng& rng, const c2lab::RelationalLanguage& language,
                                                   std::size_t n, double density = 0.35) {
  const auto constants = object_names(n, "c");
  return c2lab::RelationalStructure(constants, language, random_atoms(rng, language.predicates, constants, density));
}

// Random bijection of `names` onto fresh names (shuffled "r" stems).
inline std::map<std::string, std::string> random_renaming(Rng& rng, const std::vector<std::string>& names) {
  std::vector<std::size_t> perm(names.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = "r" + std::to_string(perm[i]);
  return out;
}

}  // namespace testgen
