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

#include "sarplan/allocation.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace sarplan {
namespace {

const std::array<TaskTemplate, 4>& templates() {
  static const std::array<TaskTemplate, 4> kTemplates = {{
      {1, 1, std::nullopt, TaskName::kSearch,
       {RobotKind::kQuadrotor, RobotKind::kBipedal}},
      {2, 1, 1, TaskName::kRescue, {RobotKind::kQuadrotor}},
      {3, 2, 2, TaskName::kRescue, {RobotKind::kBipedal}},
      {4, 1, 1, TaskName::kMapping, {RobotKind::kQuadrotor}},
  }};
  return kTemplates;
}

constexpr std::array<ObservationKind, 3> kRobotKinds = {
    ObservationKind::kFound, ObservationKind::kQuadRescued,
    ObservationKind::kBipedRescued};

bool in_alphabet(const Fsa& fsa, const std::string& atom) {
  const auto& a = fsa.alphabet();
  return std::binary_search(a.begin(), a.end(), atom);
}

std::set<std::string> valuation(const SubjectStatus& s, ObservationKind robot) {
  std::set<std::string> v;
  const std::string r = atom_name({robot, s.subject});
  if (in_alphabet(s.fsa, r)) v.insert(r);
  if (s.env.wind) {
    const std::string w = atom_name({ObservationKind::kWind, s.subject});
    if (in_alphabet(s.fsa, w)) v.insert(w);
  }
  if (s.env.untraversable) {
    const std::string u = atom_name({ObservationKind::kUntraversable, s.subject});
    if (in_alphabet(s.fsa, u)) v.insert(u);
  }
  return v;
}

std::string join(const std::set<std::string>& v) {
  std::string out = "{";
  for (const auto& a : v) out += (out.size() > 1 ? "," : "") + a;
  return out + "}";
}

}  // namespace

const TaskTemplate& task_template(int id) {
  if (id < 1 || id > 4) throw InputError("task_template: id must be 1..4");
  return templates()[id - 1];
}

std::string task_label(int id) {
  static const char* kNames[] = {"SEARCH", "RESCUE", "MAPPING"};
  const TaskTemplate& t = task_template(id);
  return "G" + std::to_string(id) + " " + kNames[static_cast<int>(t.name)];
}

bool robot_centric(ObservationKind kind) {
  return kind == ObservationKind::kFound ||
         kind == ObservationKind::kQuadRescued ||
         kind == ObservationKind::kBipedRescued;
}

std::string atom_name(const Observation& o) {
  if (o.subject < 1) throw InputError("observation: subject id must be >= 1");
  static const char* kPrefix[] = {"found", "quadres", "bipres", "wind", "untrav"};
  return kPrefix[static_cast<int>(o.kind)] + std::to_string(o.subject);
}

std::vector<TaskTemplate> map_observation(const Observation& o) {
  switch (o.kind) {
    case ObservationKind::kFound: return {task_template(1)};
    case ObservationKind::kQuadRescued: return {task_template(2)};
    case ObservationKind::kBipedRescued:
      return {task_template(3), task_template(4)};
    default:
      throw InputError("map_observation: environment-centric observation");
  }
}

std::string instantiate_spec(const std::string& pattern, int subject) {
  std::string out = pattern;
  const std::string id = std::to_string(subject);
  for (std::size_t pos = out.find("{n}"); pos != std::string::npos;
       pos = out.find("{n}", pos + id.size())) {
    out.replace(pos, 3, id);
  }
  return out;
}

Mission::Mission(const std::vector<std::string>& subject_formulas,
                 int num_bipeds, int num_quads)
    : tasks_(static_cast<std::size_t>(num_bipeds + num_quads)),
      num_bipeds_(num_bipeds),
      num_quads_(num_quads) {
  if (num_bipeds < 0 || num_quads < 0) throw InputError("mission: negative fleet");
  for (std::size_t i = 0; i < subject_formulas.size(); ++i) {
    SubjectStatus s;
    s.subject = static_cast<int>(i) + 1;
    s.fsa = Fsa::from_formula(*scltl::parse(subject_formulas[i]));
    update_pending(s);
    subjects_.push_back(std::move(s));
  }
}

const SubjectStatus& Mission::subject(int id) const {
  if (id < 1 || id > static_cast<int>(subjects_.size())) {
    throw InputError("mission: unknown subject " + std::to_string(id));
  }
  return subjects_[id - 1];
}

std::string Mission::robot_name(int robot) const {
  return robot < num_bipeds_ ? "biped" + std::to_string(robot + 1)
                             : "quad" + std::to_string(robot - num_bipeds_ + 1);
}

bool Mission::all_accepted() const {
  return std::all_of(subjects_.begin(), subjects_.end(), [](const auto& s) {
    return s.phase == SubjectPhase::kAccepted;
  });
}

bool Mission::finished() const {
  return std::all_of(subjects_.begin(), subjects_.end(), [](const auto& s) {
    return s.phase == SubjectPhase::kAccepted || s.phase == SubjectPhase::kFailed;
  });
}

// The pending observation is the robot-centric atom whose valuation (with
// the frozen environment atoms) moves closest to acceptance.
void Mission::update_pending(SubjectStatus& s) {
  s.pending.reset();
  if (s.fsa.is_accepting() || s.fsa.is_dead()) return;
  int best = std::numeric_limits<int>::max();
  for (ObservationKind k : kRobotKinds) {
    if (!in_alphabet(s.fsa, atom_name({k, s.subject}))) continue;
    const int next = s.fsa.next(s.fsa.current(), s.fsa.encode(valuation(s, k)));
    const int d = s.fsa.distance_to_accept(next);
    if (d >= 0 && d < best) {
      best = d;
      s.pending = k;
    }
  }
}

void Mission::release(int subject) {
  for (RobotTask& t : tasks_) {
    if (t.subject == subject) t = RobotTask{};
  }
  std::erase_if(queue_, [&](const TaskEmission& e) { return e.subject == subject; });
}

PlanStepResult Mission::plan_step(int step, std::span<const MissionEvent> events,
                                  std::span<const Vec2> robot_positions,
                                  std::span<const Vec2> subject_positions) {
  if (robot_positions.size() != tasks_.size()) {
    throw InputError("plan_step: robot position count mismatch");
  }
  if (subject_positions.size() != subjects_.size()) {
    throw InputError("plan_step: subject position count mismatch");
  }
  PlanStepResult out;
  for (const MissionEvent& e : events) {
    if (!robot_centric(e.kind)) {
      throw InputError("plan_step: events must be robot-centric");
    }
    if (e.subject < 1 || e.subject > static_cast<int>(subjects_.size())) {
      throw InputError("plan_step: unknown subject " + std::to_string(e.subject));
    }
    SubjectStatus& s = subjects_[e.subject - 1];
    if (s.phase == SubjectPhase::kAccepted || s.phase == SubjectPhase::kFailed ||
        (e.kind == ObservationKind::kFound && s.phase != SubjectPhase::kUnfound)) {
      log_.push_back({step, s.subject, atom_name({e.kind, s.subject}), "ignored"});
      continue;
    }
    if (e.kind == ObservationKind::kFound) s.env = e.env;
    const std::set<std::string> v = valuation(s, e.kind);
    s.fsa.advance(v);
    out.reassign = true;
    if (s.fsa.is_accepting()) {
      s.phase = SubjectPhase::kAccepted;
      s.pending.reset();
      release(s.subject);
      out.accepted_subjects.push_back(s.subject);
      log_.push_back({step, s.subject, join(v), "accepted"});
      continue;
    }
    if (s.fsa.is_dead()) {
      s.phase = SubjectPhase::kFailed;
      s.pending.reset();
      release(s.subject);
      out.failed_subjects.push_back(s.subject);
      log_.push_back({step, s.subject, join(v), "failed"});
      continue;
    }
    if (e.kind == ObservationKind::kFound) s.phase = SubjectPhase::kAwaitingRescue;
    update_pending(s);
    log_.push_back({step, s.subject, join(v), "progress"});
    if (s.pending && *s.pending != ObservationKind::kFound) {
      release(s.subject);
      for (const TaskTemplate& t : map_observation({*s.pending, s.subject})) {
        const TaskEmission em{step, s.subject, t.id};
        out.emissions.push_back(em);
        emissions_.push_back(em);
        queue_.push_back(em);
      }
    }
  }
  staff(robot_positions, subject_positions);
  check_invariants();
  return out;
}

void Mission::staff(std::span<const Vec2> robots, std::span<const Vec2> subjects) {
  std::vector<TaskEmission> waiting;
  for (const TaskEmission& em : queue_) {
    const TaskTemplate& t = task_template(em.gamma);
    const Vec2& target = subjects[em.subject - 1];
    std::vector<std::pair<double, int>> free;
    for (int r = 0; r < static_cast<int>(tasks_.size()); ++r) {
      if (tasks_[r].gamma != 1) continue;
      if (std::find(t.eligible.begin(), t.eligible.end(), kind(r)) ==
          t.eligible.end()) {
        continue;
      }
      free.push_back({(robots[r] - target).norm(), r});
    }
    if (static_cast<int>(free.size()) < t.min_agents) {
      waiting.push_back(em);
      continue;
    }
    std::sort(free.begin(), free.end());
    const int count = t.max_agents ? *t.max_agents : static_cast<int>(free.size());
    for (int k = 0; k < count; ++k) tasks_[free[k].second] = {em.gamma, em.subject};
  }
  queue_ = std::move(waiting);
}

void Mission::check_invariants() const {
  std::vector<std::vector<int>> holders(5 * (subjects_.size() + 1));
  for (int r = 0; r < static_cast<int>(tasks_.size()); ++r) {
    const RobotTask& t = tasks_[r];
    const TaskTemplate& tt = task_template(t.gamma);
    if (std::find(tt.eligible.begin(), tt.eligible.end(), kind(r)) ==
        tt.eligible.end()) {
      throw std::logic_error("mission: " + robot_name(r) + " ineligible for " +
                             task_label(t.gamma));
    }
    if (t.gamma != 1 && t.subject == 0) {
      throw std::logic_error("mission: subject-less rescue/mapping task");
    }
    holders[t.subject * 5 + t.gamma].push_back(r);
  }
  for (std::size_t s = 1; s <= subjects_.size(); ++s) {
    for (int g = 2; g <= 4; ++g) {
      const auto& h = holders[s * 5 + g];
      if (h.empty()) continue;
      const TaskTemplate& tt = task_template(g);
      const int n = static_cast<int>(h.size());
      if (n < tt.min_agents || (tt.max_agents && n > *tt.max_agents)) {
        throw std::logic_error("mission: " + task_label(g) + " for subject " +
                               std::to_string(s) + " held by " +
                               std::to_string(n) + " robots");
      }
    }
  }
}

}  // namespace sarplan
