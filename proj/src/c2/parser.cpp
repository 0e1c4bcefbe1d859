// Recursive-descent parser for the formula grammar.
//
//   formula     := implication
//   implication := disjunction [ ("->" | "<->") implication ]
//   disjunction := conjunction { "|" conjunction }
//   conjunction := unary { "&" unary }
//   unary       := "!" unary | quantified | primary
//   quantified  := ("forall" | "exists" [">=" INT]) IDENT "." formula
//   primary     := "(" formula ")" | IDENT [ "(" [ IDENT { "," IDENT } ] ")" ]

#include <cctype>
#include <set>

#include "c2lab/c2.hpp"
#include "c2lab/error.hpp"

namespace c2lab {

namespace {

enum class Tok { Ident, Int, Not, And, Or, Implies, Iff, Dot, LParen, RParen, Comma, GreaterEq, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l = line, col = column;
    auto push = [&](Tok t, std::size_t n) {
      tokens.push_back({t, std::string(text.substr(i, n)), l, col});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool digits = true;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        digits = digits && std::isdigit(static_cast<unsigned char>(text[j]));
        ++j;
      }
      push(digits ? Tok::Int : Tok::Ident, j - i);
    } else if (text.substr(i, 3) == "<->") {
      push(Tok::Iff, 3);
    } else if (text.substr(i, 2) == "->") {
      push(Tok::Implies, 2);
    } else if (text.substr(i, 2) == ">=") {
      push(Tok::GreaterEq, 2);
    } else if (c == '!') {
      push(Tok::Not, 1);
    } else if (c == '&') {
      push(Tok::And, 1);
    } else if (c == '|') {
      push(Tok::Or, 1);
    } else if (c == '.') {
      push(Tok::Dot, 1);
    } else if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == ',') {
      push(Tok::Comma, 1);
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", l, col);
    }
  }
  tokens.push_back({Tok::End, "", line, column});
  return tokens;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const RelationalLanguage& language)
      : tokens_(std::move(tokens)), language_(language) {}

  Formula parse() {
    Formula f = implication();
    if (peek().type != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }
  bool accept(Tok t) {
    if (peek().type != t) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(message, peek().line, peek().column);
  }
  const Token& expect(Tok t, const char* what) {
    if (peek().type != t) fail(std::string("expected ") + what);
    return next();
  }
  static bool keyword(const Token& t, std::string_view word) { return t.type == Tok::Ident && t.text == word; }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) {
      Formula rhs = implication();
      return Formula::disjunction(Formula::negation(lhs), rhs);
    }
    if (accept(Tok::Iff)) {
      Formula rhs = implication();
      return Formula::disjunction(Formula::conjunction(lhs, rhs),
                                  Formula::conjunction(Formula::negation(lhs), Formula::negation(rhs)));
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Or)) f = Formula::disjunction(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept(Tok::And)) f = Formula::conjunction(f, unary());
    return f;
  }

  Formula unary() {
    if (accept(Tok::Not)) return Formula::negation(unary());
    if (keyword(peek(), "forall") || keyword(peek(), "exists")) return quantified();
    return primary();
  }

  Formula quantified() {
    const bool universal = next().text == "forall";
    std::size_t k = 1;
    if (!universal && accept(Tok::GreaterEq)) {
      const Token& count = expect(Tok::Int, "a counting bound after '>='");
      try {
        k = std::stoull(count.text);
      } catch (const std::exception&) {
        throw SyntaxError("counting bound out of range", count.line, count.column);
      }
      if (k == 0) throw SyntaxError("counting bound must be at least 1", count.line, count.column);
    }
    std::string var = variable();
    expect(Tok::Dot, "'.' after the quantified variable");
    Formula body = implication();
    return universal ? Formula::for_all(var, body) : Formula::exists_at_least(k, var, body);
  }

  std::string variable() {
    const Token& t = peek();
    if (t.type != Tok::Ident || keyword(t, "forall") || keyword(t, "exists")) fail("expected a variable name");
    next();
    if (variables_.insert(t.text).second && variables_.size() > 2) {
      throw Error(ErrorKind::TwoVariableViolation,
                  "variable '" + t.text + "' at " + std::to_string(t.line) + ":" + std::to_string(t.column) +
                      " is a third variable; at most two distinct variable names are allowed");
    }
    return t.text;
  }

  Formula primary() {
    if (accept(Tok::LParen)) {
      Formula f = implication();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (peek().type != Tok::Ident) fail(peek().type == Tok::End ? "unexpected end of formula" : "unexpected '" + peek().text + "'");
    const Token name = next();
    std::vector<std::string> args;
    bool parens = false;
    if (accept(Tok::LParen)) {
      parens = true;
      if (!accept(Tok::RParen)) {
        do {
          args.push_back(variable());
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')' or ','");
      }
    }
    const Predicate* p = language_.find(name.text);
    if (!p) {
      throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + name.text + "' at " +
                                                   std::to_string(name.line) + ":" + std::to_string(name.column));
    }
    if (p->arity != args.size()) {
      throw Error(ErrorKind::ArityMismatch, "predicate '" + name.text + "' has arity " + std::to_string(p->arity) +
                                                " but is applied to " + std::to_string(args.size()) +
                                                (parens ? " arguments" : " arguments (no parentheses)"));
    }
    return args.empty() ? Formula::nullary(name.text) : Formula::atom(name.text, std::move(args));
  }

  std::vector<Token> tokens_;
  const RelationalLanguage& language_;
  std::size_t pos_ = 0;
  std::set<std::string> variables_;
};

}  // namespace

Formula parse_formula(std::string_view text, const RelationalLanguage& language) {
  return Parser(tokenize(text), language).parse();
}

}  // namespace c2lab
