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

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include "json.hpp"

#include "sarplan/allocation.hpp"
#include "sarplan/fsa.hpp"
#include "sarplan/scltl.hpp"
#include "scltl_corpus.hpp"

namespace sarplan {
namespace {

Fsa build(const std::string& text) {
  return Fsa::from_formula(*scltl::parse(text));
}

TEST(Fsa, EventuallyHasTwoStates) {
  const Fsa f = build("F a");
  EXPECT_EQ(f.num_states(), 2u);
  EXPECT_FALSE(f.accepting(f.initial()));
  EXPECT_EQ(f.distance_to_accept(f.initial()), 1);
  EXPECT_EQ(f.alphabet(), std::vector<std::string>{"a"});
}

TEST(Fsa, AcceptanceMatchesSemanticsOnCorpus) {
  ASSERT_EQ(testing::scltl_corpus().size(), 25u);
  std::vector<testing::CorpusMismatch> bad;
  const std::size_t checked = testing::check_corpus(4, &bad);
  EXPECT_GT(checked, 0u);
  for (const auto& m : bad) {
    std::string t;
    for (auto s : m.trace) t += std::to_string(s) + " ";
    ADD_FAILURE() << m.formula << " on trace " << t;
  }
}

TEST(Fsa, AcceptingStatesAbsorbAndAreMinimal) {
  for (const std::string& text : testing::scltl_corpus()) {
    const Fsa f = build(text);
    std::size_t accepting = 0;
    for (std::size_t s = 0; s < f.num_states(); ++s) {
      if (!f.accepting(static_cast<int>(s))) continue;
      ++accepting;
      for (std::uint32_t sym = 0; sym < f.num_symbols(); ++sym) {
        EXPECT_TRUE(f.accepting(f.next(static_cast<int>(s), sym))) << text;
      }
    }
    EXPECT_LE(accepting, 1u) << text;
  }
}

TEST(Fsa, DeadStatesAndDistances) {
  const Fsa f = build("a U b");
  const int s = f.next(f.initial(), 0);  // neither a nor b
  EXPECT_TRUE(f.dead(s));
  EXPECT_EQ(f.distance_to_accept(s), -1);
  EXPECT_EQ(f.distance_to_accept(f.initial()), 1);
  const Fsa g = build("X X a");
  EXPECT_EQ(g.distance_to_accept(g.initial()), 3);
  const Fsa never = build("!T");
  EXPECT_TRUE(never.dead(never.initial()));
}

TEST(Fsa, QuadOrBipedMission) {
  Fsa f = build(instantiate_spec(kQuadOrBipedSpec, 1));
  f.advance(std::set<std::string>{"found1"});
  EXPECT_FALSE(f.is_accepting());
  f.advance(std::set<std::string>{"quadres1"});
  EXPECT_TRUE(f.is_accepting());

  Fsa w = build(instantiate_spec(kQuadOrBipedSpec, 1));
  w.advance(std::set<std::string>{"found1", "wind1"});
  w.advance(std::set<std::string>{"quadres1", "wind1"});
  EXPECT_FALSE(w.is_accepting());
  EXPECT_TRUE(w.is_dead());

  Fsa b = build(instantiate_spec(kQuadOrBipedSpec, 1));
  b.advance(std::set<std::string>{"found1", "wind1"});
  b.advance(std::set<std::string>{"bipres1"});
  EXPECT_TRUE(b.is_accepting());
  b.reset();
  EXPECT_EQ(b.current(), b.initial());
}

TEST(Fsa, BipedOnlyMissionFailsOnUntraversable) {
  Fsa f = build(instantiate_spec(kBipedOnlySpec, 2));
  f.advance(std::set<std::string>{"found2", "untrav2"});
  EXPECT_TRUE(f.is_dead());
}

TEST(Fsa, EncodeRejectsUnknownAtoms) {
  const Fsa f = build("a U b");
  EXPECT_EQ(f.encode({"b"}), 2u);
  EXPECT_EQ(f.encode({}), 0u);
  EXPECT_THROW(f.encode({"c"}), InputError);
}

TEST(Fsa, StateCapIsEnforced) {
  EXPECT_THROW(Fsa::from_formula(*scltl::parse("F (a & F (b & F c))"), 2),
               ResourceError);
  std::string wide = "a0";
  for (int i = 1; i <= 16; ++i) wide += " | a" + std::to_string(i);
  EXPECT_THROW(build(wide), InputError);
}

TEST(Fsa, TextAndJsonOutput) {
  const Fsa f = build("F a");
  const std::string text = f.describe();
  EXPECT_EQ(text.rfind("fsa states=2 initial=0 alphabet=a\n", 0), 0u);
  const nlohmann::json j = nlohmann::json::parse(f.to_json());
  EXPECT_EQ(j["initial"], 0);
  EXPECT_EQ(j["alphabet"], nlohmann::json::array({"a"}));
  EXPECT_EQ(j["states"].size(), 2u);
}

}  // namespace
}  // namespace sarplan
