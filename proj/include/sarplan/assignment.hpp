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

#ifndef SARPLAN_ASSIGNMENT_HPP_
#define SARPLAN_ASSIGNMENT_HPP_

#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "sarplan/allocation.hpp"
#include "sarplan/belief.hpp"
#include "sarplan/common.hpp"
#include "sarplan/terrain.hpp"

namespace sarplan {

struct ScoreWeights {
  double belief = 3.0;          // w_b
  double traversability = 1.0;  // w_t
  double time = 1.0;            // w_d
  double alpha_b = 3.0;
  double alpha_t = 1.0;
  double v_max = 0.4;
  int ellipse_samples = 15;  // M

  void validate() const;
};

ScoreWeights default_biped_weights();
ScoreWeights default_quad_weights();

struct ScoreComponents {
  double belief = 0.0;
  double traversability = 0.0;
  double time = 0.0;
};

double total_score(const ScoreWeights& w, const ScoreComponents& s);

std::vector<Vec2> candidate_targets(const Bounds& bounds, int count,
                                    std::mt19937_64& rng);

double belief_score(const BeliefField& belief, const Vec2& t, double alpha_b);

// Uniform samples inside the ellipse with foci p0 and t. The semi-minor axis
// is max(0.5, 0.25 * |t - p0|).
std::vector<Vec2> ellipse_samples(const Vec2& p0, const Vec2& t, int count,
                                  std::mt19937_64& rng);

// -(mean + alpha_t * std) of |grad mu| over the ellipse samples; evaluated
// at p0 alone when t == p0.
double traversability_score(const TerrainField& terrain, const Vec2& p0,
                            const Vec2& t, double alpha_t, int samples,
                            std::mt19937_64& rng);

double time_score(const Vec2& p0, const Vec2& t, double v_max);

struct SearchRobot {
  int robot = 0;  // mission robot index
  Vec2 position{0.0, 0.0};
  ScoreWeights weights;
};

// scores[i][k]: robot i against target k.
using ScoreTable = std::vector<std::vector<ScoreComponents>>;

// The traversability term is skipped (left 0) for robots with w_t = 0.
ScoreTable score_targets(std::span<const SearchRobot> robots,
                         std::span<const Vec2> targets,
                         const BeliefField& belief, const TerrainField& terrain,
                         std::mt19937_64& rng);

struct Assignment {
  int robot = 0;
  int target_index = 0;
  Vec2 target{0.0, 0.0};
  double total = 0.0;
  ScoreComponents parts;
};

// Each robot takes its argmax target; ties go to the lower index.
std::vector<Assignment> auction(std::span<const SearchRobot> robots,
                                std::span<const Vec2> targets,
                                const ScoreTable& scores);

// Closed-segment intersection by orientation tests. Touching endpoints and
// collinear overlap both count.
bool segments_conflict(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                       const Vec2& b1);

struct ConflictReport {
  std::vector<Assignment> assignments;
  int sweeps = 0;
  int unresolved_pairs = 0;  // pairs left conflicting (no conflict-free pair)
};

// Pairwise sweeps in robot-index order. Each conflicting pair is replaced by
// the non-conflicting target pair with the highest summed score (ties to the
// lexicographically lowest index pair). Stops when a sweep finds no conflict
// or after max_sweeps.
ConflictReport resolve_conflicts(const std::vector<Assignment>& assignments,
                                 std::span<const SearchRobot> robots,
                                 std::span<const Vec2> targets,
                                 const ScoreTable& scores, int max_sweeps = 10);

enum class OrbitMode {
  kFixedRate,  // angle 2 s / pi
  kPeriodic,   // angle 2 pi s / period
};

Vec2 orbit_target(const Vec2& biped, int step, double radius,
                  OrbitMode mode = OrbitMode::kFixedRate, int period = 20);

struct RescueContext {
  Vec2 rescue_point{19.0, 19.0};
  double pair_spacing = 1.45;  // biped offset across the carry formation
  double orbit_radius = 3.0;
  OrbitMode orbit_mode = OrbitMode::kFixedRate;
  int orbit_period = 20;
  Bounds bounds;
};

struct RescuePlan {
  // Targets for robots bound to rescue or mapping tasks; empty otherwise.
  std::vector<std::optional<Vec2>> targets;
  // Biped pair that must hold the distance band (carry phase of G3).
  std::optional<std::pair<std::size_t, std::size_t>> distance_pair;
};

// G2: the bound quadrotor flies to the subject, then to R once carrying.
// G3: the two bound bipeds flank the subject (then R) along their current
// pair axis, pair_spacing apart. G4: the bound quadrotor orbits the first
// G3 biped of the same subject.
RescuePlan rescue_targets(const Mission& mission,
                          std::span<const Vec2> robot_positions,
                          std::span<const Vec2> subject_positions,
                          const std::vector<bool>& subject_carried, int step,
                          const RescueContext& ctx);

}  // namespace sarplan

#endif  // SARPLAN_ASSIGNMENT_HPP_
