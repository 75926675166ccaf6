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

#ifndef SARPLAN_SCLTL_HPP_
#define SARPLAN_SCLTL_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sarplan/common.hpp"

namespace sarplan::scltl {

enum class Op {
  kTrue,
  kFalse,
  kAtom,
  kNotAtom,
  kAnd,
  kOr,
  kNext,
  kUntil,
  kEventually,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Syntactically co-safe formula in negation normal form. Implications never
// appear: the parser rewrites them, so negation only ever wraps an atom.
struct Formula {
  Op op = Op::kTrue;
  std::string atom;  // kAtom / kNotAtom only
  FormulaPtr lhs;    // unary operand, or left operand
  FormulaPtr rhs;    // right operand of kAnd / kOr / kUntil
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr make_atom(std::string name);
FormulaPtr make_not_atom(std::string name);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_next(FormulaPtr a);
FormulaPtr make_until(FormulaPtr a, FormulaPtr b);
FormulaPtr make_eventually(FormulaPtr a);

// Concrete syntax:
//   T, identifiers ([A-Za-z_][A-Za-z0-9_]*, except T X U F), ! & | X U F ->
//   and parentheses. Precedence from tightest: unary (! X F), U, &, |, ->.
//   U and -> associate to the right, & and | to the left.
// Throws SyntaxError on malformed input, on negation of anything but an atom
// or T, and on a temporal operator inside an implication antecedent.
FormulaPtr parse(std::string_view text);

// Fully parenthesized text that parses back to an identical tree. False is
// written as "!T".
std::string to_string(const Formula& f);

bool equal(const Formula& a, const Formula& b);

// Sorted, de-duplicated atom names.
std::vector<std::string> atoms(const Formula& f);

// A finite trace; bit k of an entry is the truth of atoms[k].
using Trace = std::vector<std::uint32_t>;

// Finite-trace semantics at position i of a trace of length k. Literals and
// X need i < k; an until witness may sit at position k, where only formulas
// true on the empty suffix (T and combinations of it) hold.
bool holds(const Formula& f, const std::vector<std::string>& alphabet,
           const Trace& trace, std::size_t i = 0);

}  // namespace sarplan::scltl

#endif  // SARPLAN_SCLTL_HPP_
