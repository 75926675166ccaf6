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

#ifndef SARPLAN_ALLOCATION_HPP_
#define SARPLAN_ALLOCATION_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarplan/common.hpp"
#include "sarplan/fsa.hpp"

namespace sarplan {

enum class RobotKind { kQuadrotor, kBipedal };
enum class TaskName { kSearch, kRescue, kMapping };

// Robot task Gamma_i = (min agents, max agents, name, eligible kinds).
struct TaskTemplate {
  int id = 1;
  int min_agents = 1;
  std::optional<int> max_agents;  // empty: unbounded
  TaskName name = TaskName::kSearch;
  std::vector<RobotKind> eligible;
};

// Gamma_1 .. Gamma_4; throws InputError for other ids.
const TaskTemplate& task_template(int id);
std::string task_label(int id);  // "G1 SEARCH", ...

enum class ObservationKind {
  kFound,          // O_R1
  kQuadRescued,    // O_R2
  kBipedRescued,   // O_R3
  kWind,           // O_E1
  kUntraversable,  // O_E2
};

struct Observation {
  ObservationKind kind = ObservationKind::kFound;
  int subject = 1;  // 1-based
};

bool robot_centric(ObservationKind kind);
// Atom name used in subject formulas, e.g. "found1", "quadres2", "wind1".
std::string atom_name(const Observation& o);

// O_R1 -> {G1}, O_R2 -> {G2}, O_R3 -> {G3, G4}. Environment-centric
// observations throw InputError.
std::vector<TaskTemplate> map_observation(const Observation& o);

// Formula templates; "{n}" is replaced by the subject id.
inline constexpr const char* kQuadOrBipedSpec =
    "F found{n} & ((found{n} & !wind{n}) -> X quadres{n}) & "
    "((found{n} & wind{n}) -> (!untrav{n} & X bipres{n}))";
inline constexpr const char* kBipedOnlySpec =
    "F found{n} & (found{n} -> (!untrav{n} & X bipres{n}))";

std::string instantiate_spec(const std::string& pattern, int subject);

struct EnvironmentAtoms {
  bool wind = false;
  bool untraversable = false;
};

// A robot-centric observation as reported by sensing. For kFound, `env`
// carries the environment atoms at the subject's true location; they are
// frozen for the rest of that subject's mission.
struct MissionEvent {
  ObservationKind kind = ObservationKind::kFound;
  int subject = 1;
  EnvironmentAtoms env;
};

struct RobotTask {
  int gamma = 1;
  int subject = 0;  // 0 when not tied to a subject
};

enum class SubjectPhase { kUnfound, kAwaitingRescue, kAccepted, kFailed };

struct SubjectStatus {
  int subject = 1;
  Fsa fsa;
  SubjectPhase phase = SubjectPhase::kUnfound;
  EnvironmentAtoms env;
  std::optional<ObservationKind> pending;  // next robot observation needed
};

struct TaskEmission {
  int step = 0;
  int subject = 0;
  int gamma = 0;
};

struct LoggedEvent {
  int step = 0;
  int subject = 0;
  std::string atoms;    // valuation fed to the automaton
  std::string outcome;  // "progress", "accepted", "failed", "ignored"
};

struct PlanStepResult {
  std::vector<TaskEmission> emissions;
  std::vector<int> failed_subjects;
  std::vector<int> accepted_subjects;
  bool reassign = false;
};

// Per-subject automata plus the robot-to-task binding. Robots are indexed
// bipeds first, then quadrotors.
class Mission {
 public:
  Mission(const std::vector<std::string>& subject_formulas, int num_bipeds,
          int num_quads);

  // Advances automata for every event, emits the mapped tasks of each
  // subject's pending observation and binds free robots to them, nearest to
  // the subject first. Positions are indexed like robots (bipeds first) and
  // subjects (subject id - 1). Tasks that cannot be staffed stay queued.
  PlanStepResult plan_step(int step, std::span<const MissionEvent> events,
                           std::span<const Vec2> robot_positions,
                           std::span<const Vec2> subject_positions);

  const std::vector<SubjectStatus>& subjects() const { return subjects_; }
  const SubjectStatus& subject(int id) const;
  const std::vector<RobotTask>& robot_tasks() const { return tasks_; }
  const std::vector<LoggedEvent>& event_log() const { return log_; }
  const std::vector<TaskEmission>& emissions() const { return emissions_; }

  int num_bipeds() const { return num_bipeds_; }
  int num_quads() const { return num_quads_; }
  RobotKind kind(int robot) const {
    return robot < num_bipeds_ ? RobotKind::kBipedal : RobotKind::kQuadrotor;
  }
  std::string robot_name(int robot) const;

  bool all_accepted() const;
  bool finished() const;  // every subject accepted or failed

  // Throws std::logic_error when a cardinality invariant is broken.
  void check_invariants() const;

 private:
  void update_pending(SubjectStatus& s);
  void release(int subject);
  void staff(std::span<const Vec2> robots, std::span<const Vec2> subjects);

  std::vector<SubjectStatus> subjects_;
  std::vector<RobotTask> tasks_;
  std::vector<TaskEmission> queue_;  // emitted but not yet staffed
  std::vector<TaskEmission> emissions_;
  std::vector<LoggedEvent> log_;
  int num_bipeds_;
  int num_quads_;
};

}  // namespace sarplan

#endif  // SARPLAN_ALLOCATION_HPP_
