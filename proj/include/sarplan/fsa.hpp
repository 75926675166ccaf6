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

#ifndef SARPLAN_FSA_HPP_
#define SARPLAN_FSA_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sarplan/scltl.hpp"

namespace sarplan {

// Deterministic, minimal, complete automaton recognizing the good prefixes of
// a co-safe formula. Symbols are valuations over alphabet() encoded as bit
// masks. Accepting states are absorbing.
class Fsa {
 public:
  static constexpr std::size_t kDefaultStateCap = 10000;
  static constexpr std::size_t kMaxAtoms = 16;

  // Tableau expansion, subset construction, then partition refinement.
  // Throws ResourceError when the subset construction exceeds state_cap,
  // InputError when the formula has more than kMaxAtoms atoms.
  static Fsa from_formula(const scltl::Formula& formula,
                          std::size_t state_cap = kDefaultStateCap);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return accepting_.size(); }
  std::size_t num_symbols() const { return std::size_t{1} << alphabet_.size(); }
  int initial() const { return 0; }
  bool accepting(int state) const { return accepting_.at(state); }
  int next(int state, std::uint32_t symbol) const;

  // Acceptance can no longer be reached from `state`.
  bool dead(int state) const { return dead_.at(state); }
  // Fewest symbols needed to reach acceptance; -1 when dead.
  int distance_to_accept(int state) const { return distance_.at(state); }

  // Throws InputError on atoms outside the alphabet.
  std::uint32_t encode(const std::set<std::string>& true_atoms) const;

  bool accepts(const scltl::Trace& trace) const;

  int current() const { return current_; }
  void advance(std::uint32_t symbol) { current_ = next(current_, symbol); }
  void advance(const std::set<std::string>& true_atoms) {
    advance(encode(true_atoms));
  }
  bool is_accepting() const { return accepting(current_); }
  bool is_dead() const { return dead(current_); }
  void reset() { current_ = 0; }

  // Plain text: header line, one "state" line per state, then one
  // "edge <from> <to> <symbol-list>" line per distinct target.
  std::string describe() const;
  std::string to_json() const;

 private:
  std::vector<std::string> alphabet_;
  std::vector<int> delta_;  // state * num_symbols + symbol
  std::vector<bool> accepting_;
  std::vector<bool> dead_;
  std::vector<int> distance_;
  int current_ = 0;
};

}  // namespace sarplan

#endif  // SARPLAN_FSA_HPP_
