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

#ifndef SARPLAN_DYNAMICS_HPP_
#define SARPLAN_DYNAMICS_HPP_

#include "sarplan/common.hpp"

namespace sarplan {

// Step-to-step sagittal linear inverted pendulum. Each step lasts D seconds.
struct LipParams {
  double step_duration = 0.4;  // D, s
  double com_height = 0.9;     // z_h, m
  double gravity = 9.81;
  double max_foot_offset = 0.3;      // |u^f| bound, m
  double max_heading_change = 0.4;   // |u^dtheta| bound, rad

  double beta() const { return std::sqrt(gravity / com_height); }
  void validate() const;
};

struct LipState {
  Vec3 position{0.0, 0.0, 0.0};
  double velocity = 0.0;  // sagittal, m/s
  double heading = 0.0;   // rad, (-pi, pi]
};

struct LipInput {
  double foot_offset = 0.0;     // sagittal foot position relative to the CoM
  double heading_change = 0.0;
};

// Coefficients of the linear step map for a fixed (D, z_h, g):
//   travel = travel_foot * u^f + travel_velocity * v
//   v'     = velocity_velocity * v + velocity_foot * u^f
struct LipCoefficients {
  double travel_foot;
  double travel_velocity;
  double velocity_velocity;
  double velocity_foot;

  explicit LipCoefficients(const LipParams& p);
};

// Sagittal CoM travel over one step for velocity v and foot offset u.
double lip_travel(double velocity, double foot_offset, const LipParams& params);

// One walking step. The vertical update uses the sagittal terrain slope at
// the pre-step position and heading. Throws InputError if the input violates
// its bounds.
LipState lip_step(const LipState& state, const LipInput& input,
                  double sagittal_slope, const LipParams& params);

// As above with precomputed coefficients; no bounds check.
LipState lip_step(const LipState& state, const LipInput& input,
                  double sagittal_slope, const LipCoefficients& c);

// Near-hover quadrotor: first-order attitude lag toward the commanded
// pitch/roll, horizontal acceleration g * attitude, vertical acceleration
// thrust - g. Discretized exactly over D.
struct QuadParams {
  double step_duration = 0.4;
  double gravity = 9.81;
  double attitude_time_constant = 0.15;  // tau, s
  double max_attitude = 0.3;             // rad
  double min_thrust = 9.81 - 3.0;
  double max_thrust = 9.81 + 3.0;

  void validate() const;
};

struct QuadState {
  Vec3 position{0.0, 0.0, 0.0};
  Vec3 velocity{0.0, 0.0, 0.0};
  Vec2 attitude{0.0, 0.0};       // pitch (drives +x), roll (drives +y)
  Vec2 attitude_rate{0.0, 0.0};
};

struct QuadInput {
  double desired_pitch = 0.0;
  double desired_roll = 0.0;
  double vertical_thrust = 9.81;  // m/s^2
};

// Per-axis coefficients of the exact discrete map:
//   att'  = att_att * att + att_cmd * cmd
//   vel'  = vel + vel_att * att + vel_cmd * cmd
//   pos'  = pos + D * vel + pos_att * att + pos_cmd * cmd
// (vel_* and pos_* already include g).
struct QuadCoefficients {
  double att_att, att_cmd;
  double vel_att, vel_cmd;
  double pos_att, pos_cmd;
  double step;
  double gravity;
  double inv_tau;

  explicit QuadCoefficients(const QuadParams& p);
};

struct QuadStepResult {
  QuadState state;
  bool envelope_clamped = false;
};

// Throws InputError when the input leaves its box.
QuadStepResult quad_step(const QuadState& state, const QuadInput& input,
                         const QuadParams& params);
QuadState quad_step(const QuadState& state, const QuadInput& input,
                    const QuadCoefficients& c);

}  // namespace sarplan

#endif  // SARPLAN_DYNAMICS_HPP_
