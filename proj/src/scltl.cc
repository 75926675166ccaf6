// Copyright 2026 The sarplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sarplan/scltl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace sarplan::scltl {
namespace {

FormulaPtr node(Op op, FormulaPtr lhs = nullptr, FormulaPtr rhs = nullptr,
                std::string atom = {}) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  f->atom = std::move(atom);
  return f;
}

enum class Tok { kTrue, kIdent, kNot, kAnd, kOr, kNext, kUntil, kEventually,
                 kImplies, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const int l = line, cc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                              s[j] == '_')) {
        ++j;
      }
      std::string word(s.substr(i, j - i));
      Tok kind = Tok::kIdent;
      if (word == "T") kind = Tok::kTrue;
      else if (word == "X") kind = Tok::kNext;
      else if (word == "U") kind = Tok::kUntil;
      else if (word == "F") kind = Tok::kEventually;
      out.push_back({kind, word, l, cc});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::kImplies, "->", l, cc});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '!': kind = Tok::kNot; break;
      case '&': kind = Tok::kAnd; break;
      case '|': kind = Tok::kOr; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", l, cc);
    }
    out.push_back({kind, std::string(1, c), l, cc});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

// Raw tree before normalization; kNot / kImplies exist only here.
struct Raw {
  enum Kind { kTrue, kAtom, kNot, kAnd, kOr, kNext, kUntil, kEventually,
              kImplies } kind;
  std::string atom;
  std::unique_ptr<Raw> a, b;
  int line, column;
};
using RawPtr = std::unique_ptr<Raw>;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RawPtr parse_all() {
    RawPtr r = implication();
    if (peek().kind != Tok::kEnd) {
      if (peek().kind == Tok::kRParen) fail("unbalanced parentheses");
      fail("unexpected token '" + peek().text + "'");
    }
    return r;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().column);
  }

  RawPtr make(Raw::Kind k, const Token& at, RawPtr a = nullptr,
              RawPtr b = nullptr) {
    auto r = std::make_unique<Raw>();
    r->kind = k;
    r->a = std::move(a);
    r->b = std::move(b);
    r->line = at.line;
    r->column = at.column;
    return r;
  }

  RawPtr implication() {
    RawPtr lhs = disjunction();
    if (peek().kind == Tok::kImplies) {
      const Token& t = take();
      return make(Raw::kImplies, t, std::move(lhs), implication());
    }
    return lhs;
  }
  RawPtr disjunction() {
    RawPtr lhs = conjunction();
    while (peek().kind == Tok::kOr) {
      const Token& t = take();
      lhs = make(Raw::kOr, t, std::move(lhs), conjunction());
    }
    return lhs;
  }
  RawPtr conjunction() {
    RawPtr lhs = until();
    while (peek().kind == Tok::kAnd) {
      const Token& t = take();
      lhs = make(Raw::kAnd, t, std::move(lhs), until());
    }
    return lhs;
  }
  RawPtr until() {
    RawPtr lhs = unary();
    if (peek().kind == Tok::kUntil) {
      const Token& t = take();
      return make(Raw::kUntil, t, std::move(lhs), until());
    }
    return lhs;
  }
  RawPtr unary() {
    switch (peek().kind) {
      case Tok::kNot: {
        const Token& t = take();
        return make(Raw::kNot, t, unary());
      }
      case Tok::kNext: {
        const Token& t = take();
        return make(Raw::kNext, t, unary());
      }
      case Tok::kEventually: {
        const Token& t = take();
        return make(Raw::kEventually, t, unary());
      }
      default:
        return primary();
    }
  }
  RawPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kTrue:
        take();
        return make(Raw::kTrue, t);
      case Tok::kIdent: {
        take();
        RawPtr r = make(Raw::kAtom, t);
        r->atom = t.text;
        return r;
      }
      case Tok::kLParen: {
        take();
        RawPtr inner = implication();
        if (peek().kind != Tok::kRParen) fail("unbalanced parentheses");
        take();
        return inner;
      }
      case Tok::kEnd:
        fail("unexpected end of input");
      default:
        fail("unexpected token '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Builds the normal form of `r`, or of its negation when `negate` is set.
// Negation is pushed through & and | only when it comes from an implication
// antecedent; a user-written ! must sit directly on an atom or T.
FormulaPtr normalize(const Raw& r, bool negate) {
  switch (r.kind) {
    case Raw::kTrue:
      return negate ? make_false() : make_true();
    case Raw::kAtom:
      return negate ? make_not_atom(r.atom) : make_atom(r.atom);
    case Raw::kNot:
      if (r.a->kind != Raw::kAtom && r.a->kind != Raw::kTrue) {
        throw SyntaxError("negation restricted to observations", r.line,
                          r.column);
      }
      return normalize(*r.a, !negate);
    case Raw::kAnd: {
      FormulaPtr a = normalize(*r.a, negate), b = normalize(*r.b, negate);
      return negate ? make_or(a, b) : make_and(a, b);
    }
    case Raw::kOr: {
      FormulaPtr a = normalize(*r.a, negate), b = normalize(*r.b, negate);
      return negate ? make_and(a, b) : make_or(a, b);
    }
    case Raw::kImplies:
      if (negate) {
        return make_and(normalize(*r.a, false), normalize(*r.b, true));
      }
      return make_or(normalize(*r.a, true), normalize(*r.b, false));
    case Raw::kNext:
    case Raw::kUntil:
    case Raw::kEventually:
      if (negate) {
        throw SyntaxError("negation restricted to observations", r.line,
                          r.column);
      }
      if (r.kind == Raw::kNext) return make_next(normalize(*r.a, false));
      if (r.kind == Raw::kEventually) {
        return make_eventually(normalize(*r.a, false));
      }
      return make_until(normalize(*r.a, false), normalize(*r.b, false));
  }
  throw SyntaxError("internal: unknown node", r.line, r.column);
}

void collect(const Formula& f, std::set<std::string>& out) {
  if (f.op == Op::kAtom || f.op == Op::kNotAtom) out.insert(f.atom);
  if (f.lhs) collect(*f.lhs, out);
  if (f.rhs) collect(*f.rhs, out);
}

}  // namespace

FormulaPtr make_true() { return node(Op::kTrue); }
FormulaPtr make_false() { return node(Op::kFalse); }
FormulaPtr make_atom(std::string name) {
  return node(Op::kAtom, nullptr, nullptr, std::move(name));
}
FormulaPtr make_not_atom(std::string name) {
  return node(Op::kNotAtom, nullptr, nullptr, std::move(name));
}
FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return node(Op::kAnd, std::move(a), std::move(b));
}
FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  return node(Op::kOr, std::move(a), std::move(b));
}
FormulaPtr make_next(FormulaPtr a) { return node(Op::kNext, std::move(a)); }
FormulaPtr make_until(FormulaPtr a, FormulaPtr b) {
  return node(Op::kUntil, std::move(a), std::move(b));
}
FormulaPtr make_eventually(FormulaPtr a) {
  return node(Op::kEventually, std::move(a));
}

FormulaPtr parse(std::string_view text) {
  Parser p(tokenize(text));
  RawPtr raw = p.parse_all();
  return normalize(*raw, false);
}

std::string to_string(const Formula& f) {
  switch (f.op) {
    case Op::kTrue: return "T";
    case Op::kFalse: return "!T";
    case Op::kAtom: return f.atom;
    case Op::kNotAtom: return "!" + f.atom;
    case Op::kAnd: return "(" + to_string(*f.lhs) + " & " + to_string(*f.rhs) + ")";
    case Op::kOr: return "(" + to_string(*f.lhs) + " | " + to_string(*f.rhs) + ")";
    case Op::kNext: return "(X " + to_string(*f.lhs) + ")";
    case Op::kUntil: return "(" + to_string(*f.lhs) + " U " + to_string(*f.rhs) + ")";
    case Op::kEventually: return "(F " + to_string(*f.lhs) + ")";
  }
  return "";
}

bool equal(const Formula& a, const Formula& b) {
  if (a.op != b.op || a.atom != b.atom) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::vector<std::string> atoms(const Formula& f) {
  std::set<std::string> s;
  collect(f, s);
  return {s.begin(), s.end()};
}

bool holds(const Formula& f, const std::vector<std::string>& alphabet,
           const Trace& trace, std::size_t i) {
  const std::size_t k = trace.size();
  auto truth = [&](const std::string& name) {
    const auto it = std::find(alphabet.begin(), alphabet.end(), name);
    if (it == alphabet.end()) throw InputError("holds: atom not in alphabet: " + name);
    return ((trace[i] >> (it - alphabet.begin())) & 1u) != 0;
  };
  switch (f.op) {
    case Op::kTrue: return true;
    case Op::kFalse: return false;
    case Op::kAtom: return i < k && truth(f.atom);
    case Op::kNotAtom: return i < k && !truth(f.atom);
    case Op::kAnd:
      return holds(*f.lhs, alphabet, trace, i) && holds(*f.rhs, alphabet, trace, i);
    case Op::kOr:
      return holds(*f.lhs, alphabet, trace, i) || holds(*f.rhs, alphabet, trace, i);
    case Op::kNext: return i < k && holds(*f.lhs, alphabet, trace, i + 1);
    case Op::kUntil:
      for (std::size_t j = i; j <= k; ++j) {
        if (holds(*f.rhs, alphabet, trace, j)) return true;
        if (!holds(*f.lhs, alphabet, trace, j)) return false;
      }
      return false;
    case Op::kEventually:
      for (std::size_t j = i; j <= k; ++j) {
        if (holds(*f.lhs, alphabet, trace, j)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace sarplan::scltl
