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

#include "sarplan/fsa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace sarplan {
namespace {

using scltl::Formula;
using scltl::FormulaPtr;
using scltl::Op;

// One disjunct of a formula's one-step expansion: literal constraints on the
// current symbol plus the obligations left for the rest of the trace.
struct Term {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
  std::vector<int> next;  // sorted obligation ids
};

std::vector<int> merge(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Term> product(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out;
  for (const Term& x : a) {
    for (const Term& y : b) {
      Term t{x.pos | y.pos, x.neg | y.neg, merge(x.next, y.next)};
      if ((t.pos & t.neg) == 0) out.push_back(std::move(t));
    }
  }
  return out;
}

class Tableau {
 public:
  explicit Tableau(const std::vector<std::string>& alphabet) : alphabet_(alphabet) {}

  int intern(const FormulaPtr& f) {
    const std::string key = scltl::to_string(*f);
    const auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(formulas_.size());
    ids_.emplace(key, id);
    formulas_.push_back(f);
    return id;
  }

  const std::vector<Term>& expand(int id) {
    if (const auto it = expansions_.find(id); it != expansions_.end()) {
      return it->second;
    }
    const FormulaPtr f = formulas_[id];
    std::vector<Term> out;
    switch (f->op) {
      case Op::kTrue:
        out.push_back({});
        break;
      case Op::kFalse:
        break;
      case Op::kAtom:
        out.push_back({bit(f->atom), 0, {}});
        break;
      case Op::kNotAtom:
        out.push_back({0, bit(f->atom), {}});
        break;
      case Op::kAnd:
        out = product(expand(intern(f->lhs)), expand(intern(f->rhs)));
        break;
      case Op::kOr: {
        out = expand(intern(f->lhs));
        const auto& r = expand(intern(f->rhs));
        out.insert(out.end(), r.begin(), r.end());
        break;
      }
      case Op::kNext:
        out.push_back({0, 0, {intern(f->lhs)}});
        break;
      case Op::kUntil: {
        out = expand(intern(f->rhs));
        const std::vector<Term> stay =
            product(expand(intern(f->lhs)), {Term{0, 0, {id}}});
        out.insert(out.end(), stay.begin(), stay.end());
        break;
      }
      case Op::kEventually:
        out = expand(intern(f->lhs));
        out.push_back({0, 0, {id}});
        break;
    }
    return expansions_.emplace(id, std::move(out)).first->second;
  }

  // Truth on the empty suffix.
  bool eps(int id) {
    const Formula& f = *formulas_[id];
    switch (f.op) {
      case Op::kTrue: return true;
      case Op::kAnd: return eps(intern(f.lhs)) && eps(intern(f.rhs));
      case Op::kOr: return eps(intern(f.lhs)) || eps(intern(f.rhs));
      case Op::kUntil: return eps(intern(f.rhs));
      case Op::kEventually: return eps(intern(f.lhs));
      default: return false;
    }
  }

 private:
  std::uint32_t bit(const std::string& atom) const {
    const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), atom);
    return std::uint32_t{1} << (it - alphabet_.begin());
  }

  const std::vector<std::string>& alphabet_;
  std::unordered_map<std::string, int> ids_;
  std::vector<FormulaPtr> formulas_;
  std::unordered_map<int, std::vector<Term>> expansions_;
};

std::string symbol_text(std::uint32_t sym, const std::vector<std::string>& alphabet) {
  std::string s = "{";
  bool first = true;
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    if ((sym >> k) & 1u) {
      if (!first) s += ",";
      s += alphabet[k];
      first = false;
    }
  }
  return s + "}";
}

}  // namespace

Fsa Fsa::from_formula(const Formula& formula, std::size_t state_cap) {
  Fsa fsa;
  fsa.alphabet_ = scltl::atoms(formula);
  if (fsa.alphabet_.size() > kMaxAtoms) {
    throw InputError("fsa: too many atoms (" +
                     std::to_string(fsa.alphabet_.size()) + ")");
  }
  const std::uint32_t nsym = std::uint32_t{1} << fsa.alphabet_.size();
  Tableau tab(fsa.alphabet_);

  // NFA states are obligation sets; their one-step terms are cached.
  std::map<std::vector<int>, int> nfa_ids;
  std::vector<std::vector<Term>> nfa_terms;
  std::vector<bool> nfa_eps;
  auto nfa_state = [&](const std::vector<int>& obligations) {
    if (const auto it = nfa_ids.find(obligations); it != nfa_ids.end()) {
      return it->second;
    }
    std::vector<Term> terms{Term{}};
    bool e = true;
    for (int o : obligations) {
      terms = product(terms, tab.expand(o));
      e = e && tab.eps(o);
    }
    const int id = static_cast<int>(nfa_terms.size());
    nfa_ids.emplace(obligations, id);
    nfa_terms.push_back(std::move(terms));
    nfa_eps.push_back(e);
    return id;
  };

  // Subset construction.
  std::map<std::vector<int>, int> dfa_ids;
  std::vector<std::vector<int>> dfa_sets;
  std::vector<int> delta;
  std::vector<bool> acc;
  auto dfa_state = [&](std::vector<int> set) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (const auto it = dfa_ids.find(set); it != dfa_ids.end()) return it->second;
    if (dfa_sets.size() >= state_cap) {
      throw ResourceError("fsa: subset construction exceeded " +
                          std::to_string(state_cap) + " states");
    }
    const int id = static_cast<int>(dfa_sets.size());
    bool a = false;
    for (int n : set) a = a || nfa_eps[n];
    dfa_ids.emplace(set, id);
    dfa_sets.push_back(std::move(set));
    acc.push_back(a);
    return id;
  };
  dfa_state({nfa_state({tab.intern(std::make_shared<Formula>(formula))})});
  for (std::size_t s = 0; s < dfa_sets.size(); ++s) {
    delta.resize((s + 1) * nsym);
    for (std::uint32_t sym = 0; sym < nsym; ++sym) {
      if (acc[s]) {
        delta[s * nsym + sym] = static_cast<int>(s);
        continue;
      }
      std::vector<int> succ;
      const std::vector<int> members = dfa_sets[s];
      for (int n : members) {
        const std::vector<Term> terms = nfa_terms[n];
        for (const Term& t : terms) {
          if ((t.pos & ~sym) == 0 && (t.neg & sym) == 0) {
            succ.push_back(nfa_state(t.next));
          }
        }
      }
      const int target = dfa_state(std::move(succ));
      delta[s * nsym + sym] = target;
    }
  }

  // Moore partition refinement.
  const std::size_t n = dfa_sets.size();
  std::vector<int> cls(n);
  for (std::size_t s = 0; s < n; ++s) cls[s] = acc[s] ? 1 : 0;
  std::size_t nclasses = 0;
  while (true) {
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next_cls(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (std::uint32_t sym = 0; sym < nsym; ++sym) {
        sig.push_back(cls[delta[s * nsym + sym]]);
      }
      const auto [it, inserted] =
          sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size()));
      next_cls[s] = it->second;
    }
    cls = std::move(next_cls);
    if (sig_ids.size() == nclasses) break;
    nclasses = sig_ids.size();
  }

  // Renumber classes in breadth-first order from the initial state.
  std::vector<int> rep(nclasses, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (rep[cls[s]] < 0) rep[cls[s]] = static_cast<int>(s);
  }
  std::vector<int> order(nclasses, -1);
  std::deque<int> queue{cls[0]};
  order[cls[0]] = 0;
  int count = 1;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (std::uint32_t sym = 0; sym < nsym; ++sym) {
      const int d = cls[delta[rep[c] * nsym + sym]];
      if (order[d] < 0) {
        order[d] = count++;
        queue.push_back(d);
      }
    }
  }
  fsa.delta_.assign(static_cast<std::size_t>(count) * nsym, 0);
  fsa.accepting_.assign(count, false);
  for (std::size_t c = 0; c < nclasses; ++c) {
    if (order[c] < 0) continue;
    const int s = order[c];
    fsa.accepting_[s] = acc[rep[c]];
    for (std::uint32_t sym = 0; sym < nsym; ++sym) {
      fsa.delta_[s * nsym + sym] = order[cls[delta[rep[c] * nsym + sym]]];
    }
  }

  // Backward breadth-first search from accepting states.
  fsa.distance_.assign(count, -1);
  std::vector<std::vector<int>> preds(count);
  for (int s = 0; s < count; ++s) {
    for (std::uint32_t sym = 0; sym < nsym; ++sym) {
      preds[fsa.delta_[s * nsym + sym]].push_back(s);
    }
  }
  std::deque<int> bfs;
  for (int s = 0; s < count; ++s) {
    if (fsa.accepting_[s]) {
      fsa.distance_[s] = 0;
      bfs.push_back(s);
    }
  }
  while (!bfs.empty()) {
    const int s = bfs.front();
    bfs.pop_front();
    for (int p : preds[s]) {
      if (fsa.distance_[p] < 0) {
        fsa.distance_[p] = fsa.distance_[s] + 1;
        bfs.push_back(p);
      }
    }
  }
  fsa.dead_.resize(count);
  for (int s = 0; s < count; ++s) fsa.dead_[s] = fsa.distance_[s] < 0;
  return fsa;
}

int Fsa::next(int state, std::uint32_t symbol) const {
  if (state < 0 || static_cast<std::size_t>(state) >= num_states() ||
      symbol >= num_symbols()) {
    throw InputError("fsa: state or symbol out of range");
  }
  return delta_[static_cast<std::size_t>(state) * num_symbols() + symbol];
}

std::uint32_t Fsa::encode(const std::set<std::string>& true_atoms) const {
  std::uint32_t sym = 0;
  for (const std::string& a : true_atoms) {
    const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), a);
    if (it == alphabet_.end() || *it != a) {
      throw InputError("fsa: atom not in alphabet: " + a);
    }
    sym |= std::uint32_t{1} << (it - alphabet_.begin());
  }
  return sym;
}

bool Fsa::accepts(const scltl::Trace& trace) const {
  int s = initial();
  for (std::uint32_t sym : trace) s = next(s, sym);
  return accepting(s);
}

std::string Fsa::describe() const {
  std::ostringstream os;
  os << "fsa states=" << num_states() << " initial=" << initial()
     << " alphabet=";
  for (std::size_t k = 0; k < alphabet_.size(); ++k) {
    os << (k ? "," : "") << alphabet_[k];
  }
  os << "\n";
  for (std::size_t s = 0; s < num_states(); ++s) {
    os << "state " << s << " accepting=" << (accepting_[s] ? 1 : 0)
       << " dead=" << (dead_[s] ? 1 : 0) << "\n";
  }
  for (std::size_t s = 0; s < num_states(); ++s) {
    std::map<int, std::vector<std::uint32_t>> by_target;
    for (std::uint32_t sym = 0; sym < num_symbols(); ++sym) {
      by_target[delta_[s * num_symbols() + sym]].push_back(sym);
    }
    for (const auto& [to, syms] : by_target) {
      os << "edge " << s << " " << to;
      for (std::uint32_t sym : syms) os << " " << symbol_text(sym, alphabet_);
      os << "\n";
    }
  }
  return os.str();
}

std::string Fsa::to_json() const {
  nlohmann::json j;
  j["alphabet"] = alphabet_;
  j["initial"] = initial();
  j["states"] = nlohmann::json::array();
  for (std::size_t s = 0; s < num_states(); ++s) {
    j["states"].push_back({{"id", s},
                           {"accepting", static_cast<bool>(accepting_[s])},
                           {"dead", static_cast<bool>(dead_[s])}});
  }
  j["transitions"] = nlohmann::json::array();
  for (std::size_t s = 0; s < num_states(); ++s) {
    std::map<int, nlohmann::json> by_target;
    for (std::uint32_t sym = 0; sym < num_symbols(); ++sym) {
      nlohmann::json atoms = nlohmann::json::array();
      for (std::size_t k = 0; k < alphabet_.size(); ++k) {
        if ((sym >> k) & 1u) atoms.push_back(alphabet_[k]);
      }
      by_target[delta_[s * num_symbols() + sym]].push_back(atoms);
    }
    for (auto& [to, syms] : by_target) {
      j["transitions"].push_back({{"from", s}, {"to", to}, {"symbols", syms}});
    }
  }
  return j.dump(2);
}

}  // namespace sarplan
