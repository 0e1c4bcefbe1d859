#include "doctest.h"

#include <functional>

#include "c2_oracle.hpp"
#include "c2lab/c2.hpp"
#include "c2lab/error.hpp"
#include "support.hpp"

using namespace c2lab;
using F = Formula;

namespace {

const RelationalLanguage kGraph{{{"E", 2}}};
const RelationalLanguage kUnaryBinary{{{"u", 1}, {"p", 2}, {"h", 0}}};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

const Document& counterexample() {
  static const Document doc = builtin_counterexample();
  return doc;
}

RelationalStructure counterexample_structure(const char* name) {
  const auto& inst = counterexample().instance(name);
  return state_structure(inst, inst.initial_state());
}

F random_formula(testgen::Rng& rng, int depth, const std::vector<std::string>& vars) {
  auto var = [&] { return vars[rng.below(vars.size())]; };
  if (depth == 0 || rng.below(5) == 0) {
    switch (rng.below(3)) {
      case 0: return F::atom("u", {var()});
      case 1: return F::atom("p", {var(), var()});
      default: return F::nullary("h");
    }
  }
  switch (rng.below(6)) {
    case 0: return F::negation(random_formula(rng, depth - 1, vars));
    case 1: return F::conjunction(random_formula(rng, depth - 1, vars), random_formula(rng, depth - 1, vars));
    case 2: return F::disjunction(random_formula(rng, depth - 1, vars), random_formula(rng, depth - 1, vars));
    case 3: return F::for_all(var(), random_formula(rng, depth - 1, vars));
    default: return F::exists_at_least(1 + rng.below(3), var(), random_formula(rng, depth - 1, vars));
  }
}

// Every valuation of x and y over the structure's constants.
template <typename Body>
void for_each_valuation(const RelationalStructure& s, Body&& body) {
  const auto& c = s.constants();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) body(Valuation{{"x", c[i]}, {"y", c[j]}}, i, j);
  }
}

bool oracle_under(const F& f, const RelationalStructure& s, std::size_t i, std::size_t j) {
  // oracle slots follow the formula's sorted variable list; map x/y onto them
  const auto vars = oracle::slots_of(f);
  const std::size_t vi = vars[0] == "x" ? i : j;
  const std::size_t vj = vars[1] == "y" ? j : i;
  return oracle::holds(f, s, vi, vj);
}

}  // namespace

TEST_CASE("parse the adjacency sentence") {
  const F phi = parse_formula("forall x . exists y . (E(x,y) & exists x . !E(x,y))", kGraph);
  const F expected = F::for_all(
      "x", F::exists("y", F::conjunction(F::atom("E", {"x", "y"}), F::exists("x", F::negation(F::atom("E", {"x", "y"}))))));
  CHECK(phi == expected);
  CHECK(phi.variables() == std::vector<std::string>{"x", "y"});
  CHECK(phi.free_variables().empty());
  CHECK(parse_formula(phi.to_string(), kGraph) == phi);
}

TEST_CASE("parse the counting sentence") {
  const F psi = parse_formula("exists>=17 x . exists>=5 y . E(x,y)", kGraph);
  CHECK(psi == F::exists_at_least(17, "x", F::exists_at_least(5, "y", F::atom("E", {"x", "y"}))));
  CHECK(psi.bound() == 17);
  CHECK(psi.child(0).bound() == 5);
}

TEST_CASE("variable count") {
  const RelationalLanguage l{{{"p", 1}, {"E", 2}}};
  CHECK_NOTHROW(parse_formula("exists z . p(z)", l));
  CHECK(kind_of([&] { parse_formula("exists x . exists y . exists z . (E(x,y) & p(z))", l); }) ==
        ErrorKind::TwoVariableViolation);
  CHECK(kind_of([&] { F::conjunction(F::atom("E", {"x", "y"}), F::atom("p", {"z"})); }) ==
        ErrorKind::TwoVariableViolation);
  // requantification keeps the count at two
  CHECK_NOTHROW(parse_formula("exists x . exists y . (E(x,y) & exists x . (E(y,x) & exists y . E(x,y)))", l));
}

TEST_CASE("parser errors") {
  const RelationalLanguage l{{{"p", 1}, {"E", 2}, {"h", 0}}};
  CHECK(kind_of([&] { parse_formula("r(x)", l); }) == ErrorKind::UnknownPredicate);
  CHECK(kind_of([&] { parse_formula("E(x)", l); }) == ErrorKind::ArityMismatch);
  CHECK(kind_of([&] { parse_formula("h(x)", l); }) == ErrorKind::ArityMismatch);
  CHECK(kind_of([&] { parse_formula("exists>=0 x . p(x)", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("p(x) &", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("(p(x)", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("p(x) p(x)", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("exists x p(x)", l); }) == ErrorKind::Syntax);
  CHECK(kind_of([&] { parse_formula("p(x) $ p(x)", l); }) == ErrorKind::Syntax);
  try {
    parse_formula("p(x) &\n  & p(x)", l);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("precedence and associativity") {
  const RelationalLanguage l{{{"a", 0}, {"b", 0}, {"c", 0}, {"p", 1}}};
  auto P = [&](const char* t) { return parse_formula(t, l); };
  const F a = F::nullary("a"), b = F::nullary("b"), c = F::nullary("c");
  CHECK(P("a & b | c") == F::disjunction(F::conjunction(a, b), c));
  CHECK(P("a | b & c") == F::disjunction(a, F::conjunction(b, c)));
  CHECK(P("!a & b") == F::conjunction(F::negation(a), b));
  CHECK(P("a & b & c") == F::conjunction(F::conjunction(a, b), c));
  CHECK(P("a -> b") == F::disjunction(F::negation(a), b));
  CHECK(P("a -> b -> c") == F::disjunction(F::negation(a), F::disjunction(F::negation(b), c)));
  CHECK(P("a | b -> c") == F::disjunction(F::negation(F::disjunction(a, b)), c));
  CHECK(P("a <-> b") ==
        F::disjunction(F::conjunction(a, b), F::conjunction(F::negation(a), F::negation(b))));
  CHECK(P("a()") == a);
  // quantifier scope runs to the right as far as possible
  CHECK(P("exists x . p(x) & a") == F::exists("x", F::conjunction(F::atom("p", {"x"}), a)));
  CHECK(P("a & exists x . p(x) | b") == F::conjunction(a, F::exists("x", F::disjunction(F::atom("p", {"x"}), b))));
  CHECK(P("(exists x . p(x)) & a") == F::conjunction(F::exists("x", F::atom("p", {"x"})), a));
  CHECK(P("!!a") == F::negation(F::negation(a)));
}

TEST_CASE("printing round-trips") {
  testgen::Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const F f = random_formula(rng, 5, {"x", "y"});
    CAPTURE(f.to_string());
    CHECK(parse_formula(f.to_string(), kUnaryBinary) == f);
  }
}

TEST_CASE("exact-count expansion") {
  const F body = F::atom("u", {"x"});
  const F e = expand_exact(2, "x", body);
  CHECK(e == F::conjunction(F::exists_at_least(2, "x", body), F::negation(F::exists_at_least(3, "x", body))));

  // every unary-only structure with up to 4 constants
  const RelationalLanguage l{{{"u", 1}}};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cs = testgen::object_names(n, "c");
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
      AtomSet atoms;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) atoms.insert({"u", {cs[i]}});
      }
      const RelationalStructure s(cs, l, atoms);
      const std::size_t count = static_cast<std::size_t>(__builtin_popcountll(mask));
      for (std::size_t k = 0; k <= 5; ++k) {
        CHECK(evaluate(expand_exact(k, "x", body), s) == (count == k));
        CHECK(evaluate_cached(expand_exact(k, "x", body), s) == (count == k));
      }
    }
  }
}

TEST_CASE("exact-count edge cases") {
  const RelationalLanguage l{{{"u", 1}}};
  const RelationalStructure s({"a", "b", "c"}, l, {{"u", {"a"}}, {"u", {"b"}}, {"u", {"c"}}});
  const RelationalStructure empty({"a", "b", "c"}, l, {});
  const F u = F::atom("u", {"x"});
  CHECK_FALSE(evaluate(expand_exact(1, "x", u), empty));
  CHECK(evaluate(expand_exact(0, "x", u), empty));
  CHECK(expand_exact(0, "x", u) == F::negation(F::exists("x", u)));
  CHECK(evaluate(expand_exact(3, "x", u), s));
  CHECK(evaluate(expand_exact(3, "x", F::disjunction(u, F::negation(u))), empty));
  CHECK_FALSE(evaluate(F::exists_at_least(4, "x", F::disjunction(u, F::negation(u))), s));
}

TEST_CASE("counterexample sentences") {
  const auto s1 = counterexample_structure("I1");
  const auto s2 = counterexample_structure("I2");
  const F goal = goal_not_achieved_formula(s1.language());
  CHECK(goal == parse_formula("exists x . exists y . (q_G(x,y) & !q(x,y))", s1.language()));
  CHECK(evaluate(goal, s1));
  CHECK_FALSE(evaluate(goal, s2));
  CHECK(evaluate_cached(goal, s1));
  CHECK_FALSE(evaluate_cached(goal, s2));

  const F loop = parse_formula("exists x . q(x,x)", s1.language());
  CHECK(evaluate(loop, s1));
  CHECK_FALSE(evaluate(loop, s2));
  CHECK_FALSE(evaluate(parse_formula("exists>=3 x . q(x,x)", s1.language()), s1));
}

TEST_CASE("goal-not-achieved groups") {
  auto domain = std::make_shared<const Domain>(std::vector<Predicate>{{"on", 2}, {"clear", 1}, {"hand", 0}},
                                               std::vector<ActionSchema>{});
  const auto l = goal_extended_language(*domain);
  const F g = goal_not_achieved_formula(l);
  const F expected = parse_formula(
      "(exists x . exists y . (on_G(x,y) & !on(x,y))) | (exists x . (clear_G(x) & !clear(x))) | (hand_G & !hand)", l);
  CHECK(g == expected);

  PlanningInstance no_goal(domain, {"a"}, {{"clear", {"a"}}}, {});
  CHECK_FALSE(evaluate(g, state_structure(no_goal, no_goal.initial_state())));

  CHECK(kind_of([] { goal_not_achieved_formula(RelationalLanguage{{{"t", 3}, {"t_G", 3}}}); }) ==
        ErrorKind::UnsupportedArity);
}

TEST_CASE("goal-not-achieved agrees with the goal test") {
  testgen::Rng rng(41);
  int unmet = 0;
  for (int i = 0; i < 50; ++i) {
    auto domain = testgen::random_domain(rng, 3, 2);
    const auto inst = testgen::random_instance(rng, domain, 4);
    const auto s = state_structure(inst, inst.initial_state());
    const bool reached = is_goal_state(inst.initial_state(), inst);
    CHECK(evaluate(goal_not_achieved_formula(s.language()), s) == !reached);
    unmet += !reached;
  }
  CHECK(unmet > 5);
  CHECK(unmet < 50);
}

TEST_CASE("free variables") {
  const RelationalStructure s({"a", "b"}, kUnaryBinary, {{"u", {"a"}}, {"p", {"a", "b"}}});
  const F f = F::atom("p", {"x", "y"});
  CHECK(f.free_variables() == std::vector<std::string>{"x", "y"});
  CHECK(kind_of([&] { evaluate(f, s); }) == ErrorKind::UnboundVariable);
  CHECK(kind_of([&] { evaluate_cached(f, s, {{"x", "a"}}); }) == ErrorKind::UnboundVariable);
  CHECK(evaluate(f, s, {{"x", "a"}, {"y", "b"}}));
  CHECK_FALSE(evaluate(f, s, {{"x", "b"}, {"y", "a"}}));
  CHECK(evaluate(F::exists("y", f), s, {{"x", "a"}}));
  CHECK(F::exists("y", f).free_variables() == std::vector<std::string>{"x"});
}

TEST_CASE("reference, cached and table evaluators agree on random inputs") {
  testgen::Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    const auto s = testgen::random_structure(rng, kUnaryBinary, 1 + rng.below(5));
    const F f = random_formula(rng, 4, {"x", "y"});
    CAPTURE(f.to_string());
    CAPTURE(dump_structure(s));
    for_each_valuation(s, [&](const Valuation& v, std::size_t a, std::size_t b) {
      const bool ref = evaluate(f, s, v);
      CHECK(evaluate_cached(f, s, v) == ref);
      CHECK(oracle_under(f, s, a, b) == ref);
    });
  }
}

TEST_CASE("logical identities hold under every valuation") {
  testgen::Rng rng(61);
  for (int i = 0; i < 150; ++i) {
    const auto s = testgen::random_structure(rng, kUnaryBinary, 1 + rng.below(5));
    const F f = random_formula(rng, 3, {"x", "y"});
    const F g = random_formula(rng, 3, {"x", "y"});
    const std::string v = rng.coin() ? "x" : "y";
    for_each_valuation(s, [&](const Valuation& val, std::size_t, std::size_t) {
      const bool ff = evaluate(f, s, val);
      CHECK(evaluate(F::negation(F::negation(f)), s, val) == ff);
      CHECK(evaluate(F::negation(F::conjunction(f, g)), s, val) ==
            evaluate(F::disjunction(F::negation(f), F::negation(g)), s, val));
      CHECK(evaluate(F::negation(F::disjunction(f, g)), s, val) ==
            evaluate(F::conjunction(F::negation(f), F::negation(g)), s, val));
      CHECK(evaluate(F::for_all(v, f), s, val) == evaluate(F::negation(F::exists(v, F::negation(f))), s, val));
      // counting bound is monotone
      bool previous = true;
      for (std::size_t k = 1; k <= s.constants().size() + 1; ++k) {
        const bool now = evaluate(F::exists_at_least(k, v, f), s, val);
        CHECK((!now || previous));
        previous = now;
      }
    });
  }
}

TEST_CASE("evaluation is invariant under renaming") {
  testgen::Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    const auto s = testgen::random_structure(rng, kUnaryBinary, 1 + rng.below(5));
    const F f = random_formula(rng, 4, {"x"});
    const F sentence = F::exists_at_least(1 + rng.below(2), "x", F::for_all("y", F::disjunction(f, F::atom("p", {"x", "y"}))));
    const auto renamed = rename(s, testgen::random_renaming(rng, s.constants()));
    CHECK(evaluate(sentence, renamed) == evaluate(sentence, s));
  }
}

TEST_CASE("cached evaluation stays within the quadratic visit budget") {
  testgen::Rng rng(81);
  const auto s = testgen::random_structure(rng, kUnaryBinary, 50, 0.1);
  const F f = parse_formula(
      "forall x . forall y . ((exists>=50 x . (p(y,x) | !p(y,x))) & (u(x) | !u(x) | exists y . p(x,y)))",
      kUnaryBinary);
  EvalStats cached, plain;
  const bool a = evaluate_cached(f, s, {}, &cached);
  const bool b = evaluate(f, s, {}, &plain);
  CHECK(a == b);
  const std::uint64_t n = s.constants().size();
  const std::uint64_t budget = 2 * (n + 1) * (n + 1) * f.size();
  CHECK(cached.visits <= budget);
  // the reference path is cubic or worse on this nesting
  CHECK(plain.visits > 10 * cached.visits);
  MESSAGE("visits: cached " << cached.visits << ", reference " << plain.visits << ", budget " << budget);
}

TEST_CASE("counting beyond the universe is false") {
  const RelationalStructure s({"a"}, kUnaryBinary, {{"u", {"a"}}});
  CHECK_FALSE(evaluate(F::exists_at_least(2, "x", F::atom("u", {"x"})), s));
  CHECK(evaluate(F::exists_at_least(1, "x", F::atom("u", {"x"})), s));
  CHECK(kind_of([] { F::exists_at_least(0, "x", F::nullary("h")); }) == ErrorKind::InvalidInput);
}

TEST_CASE("structure must know every predicate the formula uses") {
  const RelationalStructure s({"a"}, RelationalLanguage{{{"u", 1}}}, {});
  CHECK(kind_of([&] { evaluate(F::atom("p", {"x", "x"}), s, {{"x", "a"}}); }) == ErrorKind::UnknownPredicate);
}
