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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sarplan/scltl.hpp"
#include "scltl_corpus.hpp"

namespace sarplan::scltl {
namespace {

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_EQ(to_string(*parse("a | b & c")), "(a | (b & c))");
  EXPECT_EQ(to_string(*parse("a & b & c")), "((a & b) & c)");
  EXPECT_EQ(to_string(*parse("a U b U c")), "(a U (b U c))");
  EXPECT_EQ(to_string(*parse("a U b & c")), "((a U b) & c)");
  EXPECT_EQ(to_string(*parse("X F a")), "(X (F a))");
  EXPECT_EQ(to_string(*parse("F a U b")), "((F a) U b)");
}

TEST(Parse, ImplicationBecomesDisjunction) {
  EXPECT_EQ(to_string(*parse("a -> b")), "(!a | b)");
  EXPECT_EQ(to_string(*parse("(a & !b) -> X c")), "((!a | b) | (X c))");
  EXPECT_EQ(to_string(*parse("a -> b -> c")), "(!a | (!b | c))");
  EXPECT_EQ(to_string(*parse("!T")), "!T");
  EXPECT_EQ(parse("!T")->op, Op::kFalse);
}

TEST(Parse, NegationOnlyOnAtoms) {
  EXPECT_THROW(parse("!(a & b)"), SyntaxError);
  EXPECT_THROW(parse("!X a"), SyntaxError);
  EXPECT_THROW(parse("F a -> b"), SyntaxError);
  EXPECT_THROW(parse("!!a"), SyntaxError);
  EXPECT_NO_THROW(parse("!a & !T"));
}

TEST(Parse, ReportsPosition) {
  try {
    parse("a &\n  (b U )");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 8);
  }
  try {
    parse("a # b");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 3);
  }
  EXPECT_THROW(parse(""), SyntaxError);
  EXPECT_THROW(parse("a U"), SyntaxError);
  EXPECT_THROW(parse("(a"), SyntaxError);
  EXPECT_THROW(parse("a b"), SyntaxError);
}

TEST(Parse, RoundTripsTheCorpus) {
  for (const std::string& text : testing::scltl_corpus()) {
    const FormulaPtr f = parse(text);
    const FormulaPtr g = parse(to_string(*f));
    EXPECT_TRUE(equal(*f, *g)) << text;
    EXPECT_EQ(to_string(*f), to_string(*g));
  }
}

TEST(Atoms, SortedAndUnique) {
  EXPECT_EQ(atoms(*parse("c U (b & !c) | X a")),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(atoms(*parse("T")).empty());
}

TEST(Holds, FiniteTraceSemantics) {
  const std::vector<std::string> ab = {"a", "b"};
  const std::uint32_t A = 1, B = 2;
  EXPECT_TRUE(holds(*parse("F b"), ab, {A, A, B}));
  EXPECT_FALSE(holds(*parse("F b"), ab, {A, A}));
  EXPECT_TRUE(holds(*parse("a U b"), ab, {A, A, B}));
  EXPECT_FALSE(holds(*parse("a U b"), ab, {A, 0, B}));
  EXPECT_FALSE(holds(*parse("X a"), ab, {A}));
  EXPECT_TRUE(holds(*parse("X a"), ab, {0, A}));
  EXPECT_FALSE(holds(*parse("!a"), ab, {}));
  EXPECT_TRUE(holds(*parse("a U T"), ab, {}));
  EXPECT_TRUE(holds(*parse("F T"), ab, {}));
  EXPECT_FALSE(holds(*parse("!T"), ab, {A, B}));
  EXPECT_THROW(holds(*parse("c"), ab, {A}), InputError);
}

TEST(Holds, PrefixMonotone) {
  // Co-safe formulas stay satisfied once a good prefix has been seen.
  for (const std::string& text : testing::scltl_corpus()) {
    const FormulaPtr f = parse(text);
    const std::vector<std::string> al = atoms(*f);
    for (const Trace& t : testing::all_traces(al.size(), 3)) {
      if (!holds(*f, al, t)) continue;
      for (std::uint32_t s = 0; s < (1u << al.size()); ++s) {
        Trace e = t;
        e.push_back(s);
        EXPECT_TRUE(holds(*f, al, e)) << text;
      }
    }
  }
}

}  // namespace
}  // namespace sarplan::scltl
