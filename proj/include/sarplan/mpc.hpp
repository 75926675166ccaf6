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

#ifndef SARPLAN_MPC_HPP_
#define SARPLAN_MPC_HPP_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sarplan/common.hpp"
#include "sarplan/dynamics.hpp"
#include "sarplan/terrain.hpp"

namespace sarplan {

// Cost per robot, summed over predicted states q = 1..N:
//   biped: w |p_xy - target|^2 + slope_weight * lateral_slope(p, heading)^2
//          + state_penalty * (max(0, |v| - v_max)^2 + out-of-bounds^2)
//   quad:  w |p - target|^2 + state_penalty * sum_axis max(0, |v| - v_max)^2
// plus input_weight * |u - u_hover|^2 per input, plus the pairwise distance
// penalty rho * (max(0, d_l - eps - d)^2 + max(0, d - d_u - eps)^2) when a
// biped pair is coupled.
struct MpcConfig {
  int horizon = 10;
  double slope_weight = 400.0;
  double input_weight = 1e-3;
  double state_penalty = 1e3;
  double biped_max_speed = 0.4;
  double quad_max_speed = 1.5;
  double distance_lower = 0.9;
  double distance_upper = 2.0;
  double distance_slack = 0.2;
  double distance_residual_tol = 1e-3;
  double initial_distance_penalty = 100.0;
  double max_distance_penalty = 1e8;
  int max_iters = 200;
  // Projected-gradient stop, relative to max(1, |merit|).
  double convergence_tol = 1e-4;
  // Successive accepted merits within this relative change count as stalled;
  // three stalled iterations in a row end the descent as converged.
  double stall_tol = 1e-7;
  Bounds bounds;
  LipParams lip;
  QuadParams quad;

  void validate() const;
};

struct BipedAgent {
  LipState state;
  Vec2 target{0.0, 0.0};
  double tracking_weight = 1.0;
};

struct QuadAgent {
  QuadState state;
  Vec3 target{0.0, 0.0, 0.0};
  double tracking_weight = 1.0;
};

struct MpcProblem {
  std::vector<BipedAgent> bipeds;
  std::vector<QuadAgent> quads;
  const TerrainField* terrain = nullptr;
  // Indices into `bipeds` of a pair held within the distance band.
  std::optional<std::pair<std::size_t, std::size_t>> distance_pair;
};

struct CostBreakdown {
  double tracking = 0.0;
  double slope = 0.0;
  double input = 0.0;
  double state_penalty = 0.0;
  double distance_penalty = 0.0;

  double total() const {
    return tracking + slope + input + state_penalty + distance_penalty;
  }
};

struct BipedPlan {
  std::vector<LipInput> inputs;  // N
  std::vector<LipState> states;  // N + 1, states[0] is the initial state
};

struct QuadPlan {
  std::vector<QuadInput> inputs;
  std::vector<QuadState> states;
};

struct MpcSolution {
  std::vector<BipedPlan> bipeds;
  std::vector<QuadPlan> quads;
  CostBreakdown cost;
  bool converged = true;
  int iterations = 0;
  // Largest violation of the distance band over q = 1..N (0 when inactive).
  double distance_residual = 0.0;
  // The initial pair distance was already outside the relaxed band by more
  // than distance_residual_tol.
  bool penalty_only = false;
  // Accepted merit values of every inner descent run, in solve order.
  std::vector<std::vector<double>> merit_traces;
};

// Previous-step input sequences, shifted by one step.
struct MpcWarmStart {
  std::vector<std::vector<LipInput>> bipeds;
  std::vector<std::vector<QuadInput>> quads;
};

MpcSolution solve(const MpcProblem& problem, const MpcConfig& config,
                  const MpcWarmStart* warm = nullptr);

// Shift each input sequence by one step, repeating the last input.
MpcWarmStart shift_solution(const MpcSolution& solution);

// Cost of a given biped input sequence under the objective above (no
// coupling terms). Useful for checking solutions.
CostBreakdown biped_sequence_cost(const BipedAgent& agent,
                                  const std::vector<LipInput>& inputs,
                                  const TerrainField& terrain,
                                  const MpcConfig& config);

// Solver merit for one biped, or a distance-coupled pair when two agents are
// given, over stacked inputs z = (foot_offset, heading_change) per step,
// agent-major. Writes the adjoint gradient when `grad` is non-null.
double biped_merit(const std::vector<BipedAgent>& agents,
                   const std::vector<double>& z, const TerrainField& terrain,
                   const MpcConfig& config, double distance_penalty,
                   std::vector<double>* grad);

// Solver merit for one quadrotor over z = (pitch, roll, thrust) per step.
double quad_merit(const QuadAgent& agent, const std::vector<double>& z,
                  const MpcConfig& config, std::vector<double>* grad);

// Rollout with the same sagittal slope source the solver uses.
std::vector<LipState> rollout_biped(const LipState& initial,
                                    const std::vector<LipInput>& inputs,
                                    const TerrainField& terrain,
                                    const LipParams& params);
std::vector<QuadState> rollout_quad(const QuadState& initial,
                                    const std::vector<QuadInput>& inputs,
                                    const QuadParams& params);

struct Fleet {
  std::vector<LipState> bipeds;
  std::vector<QuadState> quads;
};

struct FleetTargets {
  std::vector<Vec2> bipeds;
  std::vector<Vec3> quads;
  std::optional<std::pair<std::size_t, std::size_t>> distance_pair;
};

struct RecedingStepResult {
  MpcSolution solution;
  std::vector<LipInput> biped_inputs;
  std::vector<QuadInput> quad_inputs;
  // GP lateral slope at each biped's new pose.
  std::vector<double> biped_lateral_slopes;
  bool quad_envelope_clamped = false;
};

// Receding-horizon wrapper: solves, applies the first input of every robot
// through the dynamics and keeps the shifted solution as the next warm start.
class RecedingHorizonController {
 public:
  explicit RecedingHorizonController(MpcConfig config);

  RecedingStepResult step(Fleet& fleet, const FleetTargets& targets,
                          const TerrainField& terrain);

  const MpcConfig& config() const { return config_; }
  MpcConfig& mutable_config() { return config_; }
  void reset_warm_start() { warm_.reset(); }

 private:
  MpcConfig config_;
  std::optional<MpcWarmStart> warm_;
};

}  // namespace sarplan

#endif  // SARPLAN_MPC_HPP_
