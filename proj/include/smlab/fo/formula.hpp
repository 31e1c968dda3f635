#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "smlab/fo/structure.hpp"

namespace smlab::fo {

/// The non-logical symbols a formula may use.
struct Signature {
  std::set<std::string> relations;  // binary
  std::set<std::string> marks;      // unary
  std::set<std::string> constants;

  static Signature of(const FiniteStructure& m) {
    Signature s;
    for (const auto& [k, v] : m.relations) s.relations.insert(k);
    for (const auto& [k, v] : m.marks) s.marks.insert(k);
    for (const auto& [k, v] : m.constants) s.constants.insert(k);
    return s;
  }
};

struct Term {
  bool constant = false;
  std::string name;
};

struct Formula {
  enum class Op { truth, falsity, eq, rel, mark, negation, conjunction, disjunction, exists, forall };

  Op op = Op::truth;
  std::string symbol;  // relation / mark name, or the bound variable
  std::vector<Term> terms;
  std::vector<Formula> parts;

  std::set<std::string> free_variables() const {
    std::set<std::string> out;
    collect_free(out, {});
    return out;
  }

  int quantifier_depth() const {
    int d = 0;
    for (const auto& p : parts) d = std::max(d, p.quantifier_depth());
    return d + (op == Op::exists || op == Op::forall ? 1 : 0);
  }

 private:
  void collect_free(std::set<std::string>& out, std::set<std::string> bound) const {
    for (const auto& t : terms)
      if (!t.constant && !bound.count(t.name)) out.insert(t.name);
    if (op == Op::exists || op == Op::forall) bound.insert(symbol);
    for (const auto& p : parts) p.collect_free(out, bound);
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error("at " + std::to_string(position) + ": " + msg), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < s.size();) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), i++});
    } else {
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')') ++j;
      out.push_back({s.substr(i, j - i), i});
      i = j;
    }
  }
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig) : tokens_(tokenize(text)), end_(text.size()), sig_(sig) {}

  Formula parse() {
    Formula f = formula();
    if (i_ != tokens_.size()) throw ParseError("trailing input '" + tokens_[i_].text + "'", tokens_[i_].pos);
    return f;
  }

 private:
  static bool keyword(const std::string& s) {
    static const std::set<std::string> kw{"and", "or", "not", "exists", "forall", "=", "true", "false"};
    return kw.count(s) > 0;
  }

  const Token& peek() const {
    if (i_ >= tokens_.size()) throw ParseError("unexpected end of input", end_);
    return tokens_[i_];
  }

  Token next() {
    Token t = peek();
    ++i_;
    return t;
  }

  void expect(const std::string& s) {
    Token t = next();
    if (t.text != s) throw ParseError("expected '" + s + "' but found '" + t.text + "'", t.pos);
  }

  Term term() {
    Token t = next();
    if (t.text == "(" || t.text == ")" || keyword(t.text)) throw ParseError("expected a term, found '" + t.text + "'", t.pos);
    if (sig_.constants.count(t.text)) return {true, t.text};
    if (sig_.relations.count(t.text) || sig_.marks.count(t.text))
      throw ParseError("relation symbol '" + t.text + "' used as a term", t.pos);
    return {false, t.text};
  }

  std::vector<Term> terms_until_close(std::size_t head_pos, const std::string& head, std::size_t arity) {
    std::vector<Term> out;
    while (peek().text != ")") out.push_back(term());
    if (out.size() != arity)
      throw ParseError("arity mismatch: '" + head + "' takes " + std::to_string(arity) + " argument(s), got " +
                           std::to_string(out.size()),
                       head_pos);
    expect(")");
    return out;
  }

  Formula formula() {
    Token open = next();
    if (open.text != "(") throw ParseError("expected '(' but found '" + open.text + "'", open.pos);
    Token head = next();
    Formula f;
    const auto& h = head.text;
    if (h == "and" || h == "or") {
      f.op = h == "and" ? Formula::Op::conjunction : Formula::Op::disjunction;
      while (peek().text != ")") f.parts.push_back(formula());
      expect(")");
    } else if (h == "not") {
      f.op = Formula::Op::negation;
      f.parts.push_back(formula());
      expect(")");
    } else if (h == "exists" || h == "forall") {
      f.op = h == "exists" ? Formula::Op::exists : Formula::Op::forall;
      Token v = next();
      if (v.text == "(" || v.text == ")" || keyword(v.text) || sig_.constants.count(v.text))
        throw ParseError("cannot bind '" + v.text + "'", v.pos);
      f.symbol = v.text;
      f.parts.push_back(formula());
      expect(")");
    } else if (h == "true" || h == "false") {
      f.op = h == "true" ? Formula::Op::truth : Formula::Op::falsity;
      expect(")");
    } else if (h == "=") {
      f.op = Formula::Op::eq;
      f.terms = terms_until_close(head.pos, h, 2);
    } else if (sig_.relations.count(h)) {
      f.op = Formula::Op::rel;
      f.symbol = h;
      f.terms = terms_until_close(head.pos, h, 2);
    } else if (sig_.marks.count(h)) {
      f.op = Formula::Op::mark;
      f.symbol = h;
      f.terms = terms_until_close(head.pos, h, 1);
    } else {
      throw ParseError("unknown symbol '" + h + "'", head.pos);
    }
    return f;
  }

  std::vector<Token> tokens_;
  std::size_t end_;
  const Signature& sig_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses the prefix grammar: `(and f...)`, `(or f...)`, `(not f)`,
/// `(exists v f)`, `(forall v f)`, `(= t t)`, `(R t t)`, `(P t)`,
/// `(true)`, `(false)`. A term is a constant of the signature or a variable.
/// When `allowed_free` is given, any other free variable is an error.
inline Formula parse_formula(const std::string& text, const Signature& sig,
                             const std::optional<std::set<std::string>>& allowed_free = std::nullopt) {
  Formula f = detail::Parser(text, sig).parse();
  if (allowed_free)
    for (const auto& v : f.free_variables())
      if (!allowed_free->count(v)) {
        auto pos = text.find(v);
        throw ParseError("unbound variable '" + v + "'", pos == std::string::npos ? 0 : pos);
      }
  return f;
}

using Assignment = std::map<std::string, int>;

inline bool evaluate(const FiniteStructure& m, const Formula& f, Assignment& env) {
  auto value = [&](const Term& t) -> int {
    if (t.constant) return m.constants.at(t.name);
    auto it = env.find(t.name);
    if (it == env.end()) throw std::invalid_argument("variable '" + t.name + "' is unassigned");
    return it->second;
  };
  using Op = Formula::Op;
  switch (f.op) {
    case Op::truth: return true;
    case Op::falsity: return false;
    case Op::eq: return value(f.terms[0]) == value(f.terms[1]);
    case Op::rel: return m.holds(f.symbol, value(f.terms[0]), value(f.terms[1]));
    case Op::mark: return m.marked(f.symbol, value(f.terms[0]));
    case Op::negation: return !evaluate(m, f.parts[0], env);
    case Op::conjunction:
      return std::all_of(f.parts.begin(), f.parts.end(), [&](const Formula& p) { return evaluate(m, p, env); });
    case Op::disjunction:
      return std::any_of(f.parts.begin(), f.parts.end(), [&](const Formula& p) { return evaluate(m, p, env); });
    case Op::exists:
    case Op::forall: {
      std::optional<int> saved;
      if (auto it = env.find(f.symbol); it != env.end()) saved = it->second;
      const bool want = f.op == Op::exists;
      bool result = !want;
      for (int a = 0; a < static_cast<int>(m.size); ++a) {
        env[f.symbol] = a;
        if (evaluate(m, f.parts[0], env) == want) {
          result = want;
          break;
        }
      }
      if (saved) env[f.symbol] = *saved;
      else env.erase(f.symbol);
      return result;
    }
  }
  return false;
}

/// The exact solution set of f in the single free variable left unassigned
/// by `params`, in ascending order.
inline std::vector<int> solutions(const FiniteStructure& m, const Formula& f, const Assignment& params) {
  std::vector<std::string> open;
  for (const auto& v : f.free_variables())
    if (!params.count(v)) open.push_back(v);
  if (open.size() != 1)
    throw std::invalid_argument("solutions: expected exactly one unassigned free variable, found " + std::to_string(open.size()));
  Assignment env = params;
  std::vector<int> out;
  for (int a = 0; a < static_cast<int>(m.size); ++a) {
    env[open[0]] = a;
    if (evaluate(m, f, env)) out.push_back(a);
  }
  return out;
}

}  // namespace smlab::fo
