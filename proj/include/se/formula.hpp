#pragma once

// Propositional epistemic formulas over agent-owned variables.
//
// The primitive connectives are atoms p_a, negation, conjunction, and the
// knowledge modality K[a].  Disjunction, implication, equivalence, and the
// dual modality Kh[a] exist only as surface syntax: the parser and the
// convenience constructors desugar them immediately, so every Formula in
// memory is built from the four primitive node kinds.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace se {

using Agent = std::string;

// A propositional variable together with the agent that owns it.
// Printed as name_owner, e.g. Variable{"p","a"} prints as "p_a".
struct Variable {
  std::string name;
  Agent owner;

  friend bool operator==(const Variable& x, const Variable& y) {
    return x.owner == y.owner && x.name == y.name;
  }
  friend bool operator!=(const Variable& x, const Variable& y) { return !(x == y); }
  // Ordered by (owner, name); enumeration order relies on this.
  friend bool operator<(const Variable& x, const Variable& y) {
    if (x.owner != y.owner) return x.owner < y.owner;
    return x.name < y.name;
  }
  std::string str() const { return name + "_" + owner; }
};

enum class Kind : std::uint8_t { Atom, Not, Know, And };

namespace detail {
struct FNode;
}

class Formula {
 public:
  Formula() = default;  // empty handle; only comparisons and bool() are valid

  static Formula atom(Variable v);
  static Formula lnot(Formula f);
  static Formula land(Formula l, Formula r);
  static Formula know(Agent a, Formula f);

  // Surface connectives, desugared on construction.
  static Formula lor(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);
  static Formula iff(Formula l, Formula r);
  static Formula khat(Agent a, Formula f);

  explicit operator bool() const { return node_ != nullptr; }

  Kind kind() const;
  int size() const;
  std::size_t hash() const;

  const Variable& var() const;    // Atom
  const Agent& agent() const;     // Know
  const Formula& child() const;   // Not, Know
  const Formula& left() const;    // And
  const Formula& right() const;   // And

  // Stable identity of the underlying node; distinct structurally-equal
  // formulas may have distinct ids.  Used for evaluator memo tables.
  const void* id() const;

  friend bool operator==(const Formula& x, const Formula& y);
  friend bool operator!=(const Formula& x, const Formula& y) { return !(x == y); }

  // Total order: size, then kind, then components.  Deterministic and
  // consistent with the enumeration order within a size class.
  friend bool operator<(const Formula& x, const Formula& y) { return compare(x, y) < 0; }

  static int compare(const Formula& x, const Formula& y);

 private:
  explicit Formula(std::shared_ptr<const detail::FNode> n) : node_(std::move(n)) {}

  static std::size_t hash_mix(std::size_t a, std::size_t b) {
    a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
    return a;
  }

  std::shared_ptr<const detail::FNode> node_;
};

namespace detail {
struct FNode {
  Kind kind{};
  Variable var;
  Agent agent;
  Formula lhs, rhs;
  int size = 0;
  std::size_t hash = 0;
};
}  // namespace detail

inline Formula Formula::atom(Variable v) {
  auto n = std::make_shared<detail::FNode>();
  n->kind = Kind::Atom;
  n->var = std::move(v);
  n->size = 1;
  n->hash = hash_mix(0x9e3779b97f4a7c15ull, std::hash<std::string>{}(n->var.name) * 31 +
                                                std::hash<std::string>{}(n->var.owner));
  return Formula(std::move(n));
}

inline Formula Formula::lnot(Formula f) {
  auto n = std::make_shared<detail::FNode>();
  n->kind = Kind::Not;
  n->size = 1 + f.size();
  n->hash = hash_mix(0xb492b66fbe98f273ull, f.hash());
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Formula Formula::land(Formula l, Formula r) {
  auto n = std::make_shared<detail::FNode>();
  n->kind = Kind::And;
  n->size = 1 + l.size() + r.size();
  n->hash = hash_mix(0x6a09e667f3bcc909ull, hash_mix(l.hash(), r.hash()));
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return Formula(std::move(n));
}

inline Formula Formula::know(Agent a, Formula f) {
  auto n = std::make_shared<detail::FNode>();
  n->kind = Kind::Know;
  n->agent = std::move(a);
  n->size = 1 + f.size();
  n->hash =
      hash_mix(hash_mix(0x3c6ef372fe94f82bull, std::hash<std::string>{}(n->agent)), f.hash());
  n->lhs = std::move(f);
  return Formula(std::move(n));
}

inline Formula Formula::lor(Formula l, Formula r) {
  return lnot(land(lnot(std::move(l)), lnot(std::move(r))));
}
inline Formula Formula::implies(Formula l, Formula r) {
  return lnot(land(std::move(l), lnot(std::move(r))));
}
inline Formula Formula::iff(Formula l, Formula r) {
  Formula fwd = implies(l, r);  // sequenced before the moves below
  return land(std::move(fwd), implies(std::move(r), std::move(l)));
}
inline Formula Formula::khat(Agent a, Formula f) {
  return lnot(know(std::move(a), lnot(std::move(f))));
}

inline Kind Formula::kind() const { return node_->kind; }
inline int Formula::size() const { return node_->size; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline const Variable& Formula::var() const { return node_->var; }
inline const Agent& Formula::agent() const { return node_->agent; }
inline const Formula& Formula::child() const { return node_->lhs; }
inline const Formula& Formula::left() const { return node_->lhs; }
inline const Formula& Formula::right() const { return node_->rhs; }
inline const void* Formula::id() const { return node_.get(); }

inline bool operator==(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  if (x.hash() != y.hash() || x.size() != y.size() || x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Kind::Atom: return x.var() == y.var();
    case Kind::Not: return x.child() == y.child();
    case Kind::Know: return x.agent() == y.agent() && x.child() == y.child();
    case Kind::And: return x.left() == y.left() && x.right() == y.right();
  }
  return false;
}

inline int Formula::compare(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return 0;
  if (!x.node_) return y.node_ ? -1 : 0;
  if (!y.node_) return 1;
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  if (x.kind() != y.kind())
    return static_cast<int>(x.kind()) < static_cast<int>(y.kind()) ? -1 : 1;
  switch (x.kind()) {
    case Kind::Atom: {
      const Variable &a = x.var(), &b = y.var();
      if (a == b) return 0;
      return a < b ? -1 : 1;
    }
    case Kind::Not:
      return compare(x.child(), y.child());
    case Kind::Know: {
      if (x.agent() != y.agent()) return x.agent() < y.agent() ? -1 : 1;
      return compare(x.child(), y.child());
    }
    case Kind::And: {
      int c = compare(x.left(), y.left());
      if (c != 0) return c;
      return compare(x.right(), y.right());
    }
  }
  return 0;
}

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Queries

inline void agents_of_into(const Formula& f, std::set<Agent>& out) {
  switch (f.kind()) {
    case Kind::Atom: out.insert(f.var().owner); return;
    case Kind::Not: agents_of_into(f.child(), out); return;
    case Kind::Know:
      out.insert(f.agent());
      agents_of_into(f.child(), out);
      return;
    case Kind::And:
      agents_of_into(f.left(), out);
      agents_of_into(f.right(), out);
      return;
  }
}

// Agents occurring in f, as variable owners or as modality subscripts.
inline std::set<Agent> agents_of(const Formula& f) {
  std::set<Agent> out;
  agents_of_into(f, out);
  return out;
}

inline void vars_of_into(const Formula& f, std::set<Variable>& out) {
  switch (f.kind()) {
    case Kind::Atom: out.insert(f.var()); return;
    case Kind::Not: vars_of_into(f.child(), out); return;
    case Kind::Know: vars_of_into(f.child(), out); return;
    case Kind::And:
      vars_of_into(f.left(), out);
      vars_of_into(f.right(), out);
      return;
  }
}

inline std::set<Variable> vars_of(const Formula& f) {
  std::set<Variable> out;
  vars_of_into(f, out);
  return out;
}

inline int modal_depth(const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom: return 0;
    case Kind::Not: return modal_depth(f.child());
    case Kind::Know: return 1 + modal_depth(f.child());
    case Kind::And: return std::max(modal_depth(f.left()), modal_depth(f.right()));
  }
  return 0;
}

// The local truth helper for an agent-owned variable: (p_a | ~p_a), which
// desugars to ~(~p_a & ~~p_a).  Defined exactly where agent a is alive.
inline Formula local_top(const Variable& v) {
  return Formula::lor(Formula::atom(v), Formula::lnot(Formula::atom(v)));
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {
inline void print_into(const Formula& f, bool resugar_khat, std::string& out) {
  if (resugar_khat && f.kind() == Kind::Not && f.child().kind() == Kind::Know &&
      f.child().child().kind() == Kind::Not) {
    out += "Kh[";
    out += f.child().agent();
    out += "] ";
    print_into(f.child().child().child(), resugar_khat, out);
    return;
  }
  switch (f.kind()) {
    case Kind::Atom:
      out += f.var().name;
      out += '_';
      out += f.var().owner;
      return;
    case Kind::Not:
      out += '~';
      print_into(f.child(), resugar_khat, out);
      return;
    case Kind::And:
      out += '(';
      print_into(f.left(), resugar_khat, out);
      out += " & ";
      print_into(f.right(), resugar_khat, out);
      out += ')';
      return;
    case Kind::Know:
      out += "K[";
      out += f.agent();
      out += "] ";
      print_into(f.child(), resugar_khat, out);
      return;
  }
}
}  // namespace detail

inline std::string print(const Formula& f, bool resugar_khat = false) {
  std::string out;
  detail::print_into(f, resugar_khat, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
//   formula := atom | "~" formula | "(" formula binop formula ")"
//            | "K" "[" ident "]" formula | "Kh" "[" ident "]" formula
//   binop   := "&" | "|" | "->" | "<->"
//   atom    := ident "_" ident
//   ident   := [A-Za-z][A-Za-z0-9']*
//
// Whitespace is insignificant between tokens.  Parentheses are mandatory
// around every binary connective.

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const std::set<Agent>* declared_agents)
      : text_(text), declared_(declared_agents) {}

  Formula parse() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after formula");
    return f;
  }

 private:
  Formula formula() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '~') {
      ++pos_;
      return Formula::lnot(formula());
    }
    if (c == '(') {
      ++pos_;
      Formula l = formula();
      skip_ws();
      std::string op = binop();
      Formula r = formula();
      skip_ws();
      expect(')');
      if (op == "&") return Formula::land(std::move(l), std::move(r));
      if (op == "|") return Formula::lor(std::move(l), std::move(r));
      if (op == "->") return Formula::implies(std::move(l), std::move(r));
      return Formula::iff(std::move(l), std::move(r));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t at = pos_;
      std::string id = ident();
      skip_ws();
      if ((id == "K" || id == "Kh") && pos_ < text_.size() && text_[pos_] == '[') {
        ++pos_;
        skip_ws();
        std::string a = ident();
        check_agent(a, at);
        skip_ws();
        expect(']');
        Formula body = formula();
        if (id == "K") return Formula::know(std::move(a), std::move(body));
        return Formula::khat(std::move(a), std::move(body));
      }
      if (pos_ >= text_.size() || text_[pos_] != '_')
        fail("expected '_' after variable name '" + id + "'", at);
      ++pos_;
      skip_ws();
      std::string owner = ident();
      check_agent(owner, at);
      return Formula::atom(Variable{std::move(id), std::move(owner)});
    }
    fail(std::string("unexpected character '") + c + "'");
    return Formula();  // unreachable
  }

  std::string binop() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected binary connective");
    char c = text_[pos_];
    if (c == '&' || c == '|') {
      ++pos_;
      return std::string(1, c);
    }
    if (c == '-') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
        pos_ += 2;
        return "->";
      }
      fail("expected '->'");
    }
    if (c == '<') {
      if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '-' && text_[pos_ + 2] == '>') {
        pos_ += 3;
        return "<->";
      }
      fail("expected '<->'");
    }
    fail(std::string("expected binary connective, got '") + c + "'");
    return {};
  }

  std::string ident() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
      fail("expected identifier");
    std::size_t start = pos_;
    ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'')
        ++pos_;
      else
        break;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void check_agent(const std::string& a, std::size_t at) const {
    if (declared_ && !declared_->count(a))
      throw ParseError("unknown agent '" + a + "'", at);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  std::string_view text_;
  const std::set<Agent>* declared_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(std::string_view text) {
  return detail::Parser(text, nullptr).parse();
}

// Parse and validate that every agent mentioned (as owner or modality) is in
// the declared set.
inline Formula parse(std::string_view text, const std::set<Agent>& declared_agents) {
  return detail::Parser(text, &declared_agents).parse();
}

// ---------------------------------------------------------------------------
// Enumeration
//
// Yields every primitive formula over the signature with at most max_size AST
// nodes, exactly once, smaller sizes first.  Within one size class the order
// is: negations (by child order), then K[a] per agent (agents in sorted
// order, then child order), then conjunctions ordered by left size, left
// index, right index.  Atoms are ordered by (owner, name).

inline std::vector<Formula> enumerate_formulas(const std::set<Agent>& agents,
                                               const std::set<Variable>& vars,
                                               int max_size) {
  if (agents.empty() || vars.empty())
    throw std::invalid_argument("enumerate_formulas: empty signature");
  for (const Variable& v : vars)
    if (!agents.count(v.owner))
      throw std::invalid_argument("enumerate_formulas: variable " + v.str() +
                                  " owned by undeclared agent");
  std::vector<std::vector<Formula>> by_size(static_cast<size_t>(std::max(max_size, 0)) + 1);
  if (max_size >= 1)
    for (const Variable& v : vars) by_size[1].push_back(Formula::atom(v));
  for (int n = 2; n <= max_size; ++n) {
    auto& out = by_size[static_cast<size_t>(n)];
    for (const Formula& g : by_size[static_cast<size_t>(n - 1)]) out.push_back(Formula::lnot(g));
    for (const Agent& a : agents)
      for (const Formula& g : by_size[static_cast<size_t>(n - 1)])
        out.push_back(Formula::know(a, g));
    for (int i = 1; i <= n - 2; ++i)
      for (const Formula& l : by_size[static_cast<size_t>(i)])
        for (const Formula& r : by_size[static_cast<size_t>(n - 1 - i)])
          out.push_back(Formula::land(l, r));
  }
  std::vector<Formula> all;
  for (int n = 1; n <= max_size; ++n)
    all.insert(all.end(), by_size[static_cast<size_t>(n)].begin(),
               by_size[static_cast<size_t>(n)].end());
  return all;
}

}  // namespace se
