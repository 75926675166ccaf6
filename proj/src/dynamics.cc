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

#include "sarplan/dynamics.hpp"

#include <cmath>

namespace sarplan {
namespace {

constexpr double kBoundSlack = 1e-12;

}  // namespace

void LipParams::validate() const {
  if (!(step_duration > 0.0)) throw InputError("lip: step_duration must be > 0");
  if (!(com_height > 0.0)) throw InputError("lip: com_height must be > 0");
  if (!(gravity > 0.0)) throw InputError("lip: gravity must be > 0");
  if (!(max_foot_offset > 0.0) || !(max_heading_change > 0.0)) {
    throw InputError("lip: input bounds must be > 0");
  }
}

LipCoefficients::LipCoefficients(const LipParams& p) {
  const double beta = p.beta();
  const double bd = beta * p.step_duration;
  const double ch = std::cosh(bd);
  const double sh = std::sinh(bd);
  travel_foot = 1.0 - ch;
  travel_velocity = sh / beta;
  velocity_velocity = ch;
  velocity_foot = -beta * sh;
}

double lip_travel(double velocity, double foot_offset,
                  const LipParams& params) {
  const LipCoefficients c(params);
  return c.travel_foot * foot_offset + c.travel_velocity * velocity;
}

LipState lip_step(const LipState& state, const LipInput& input,
                  double sagittal_slope, const LipCoefficients& c) {
  const double travel =
      c.travel_foot * input.foot_offset + c.travel_velocity * state.velocity;
  LipState next;
  next.position.x() = state.position.x() + travel * std::cos(state.heading);
  next.position.y() = state.position.y() + travel * std::sin(state.heading);
  next.position.z() = state.position.z() + sagittal_slope * travel;
  next.velocity = c.velocity_velocity * state.velocity +
                  c.velocity_foot * input.foot_offset;
  next.heading = wrap_angle(state.heading + input.heading_change);
  return next;
}

LipState lip_step(const LipState& state, const LipInput& input,
                  double sagittal_slope, const LipParams& params) {
  params.validate();
  if (!std::isfinite(input.foot_offset) ||
      std::abs(input.foot_offset) > params.max_foot_offset + kBoundSlack) {
    throw InputError("lip_step: foot offset outside bounds");
  }
  if (!std::isfinite(input.heading_change) ||
      std::abs(input.heading_change) >
          params.max_heading_change + kBoundSlack) {
    throw InputError("lip_step: heading change outside bounds");
  }
  return lip_step(state, input, sagittal_slope, LipCoefficients(params));
}

void QuadParams::validate() const {
  if (!(step_duration > 0.0)) throw InputError("quad: step_duration must be > 0");
  if (!(attitude_time_constant > 0.0)) {
    throw InputError("quad: attitude_time_constant must be > 0");
  }
  if (!(max_attitude > 0.0)) throw InputError("quad: max_attitude must be > 0");
  if (!(min_thrust <= max_thrust)) throw InputError("quad: thrust box empty");
}

QuadCoefficients::QuadCoefficients(const QuadParams& p) {
  const double a = 1.0 / p.attitude_time_constant;
  const double h = p.step_duration;
  const double e = std::exp(-a * h);
  const double g = p.gravity;
  att_att = e;
  att_cmd = 1.0 - e;
  vel_att = g * (1.0 - e) / a;
  vel_cmd = g * (h - (1.0 - e) / a);
  pos_att = g * (h / a - (1.0 - e) / (a * a));
  pos_cmd = g * (0.5 * h * h - h / a + (1.0 - e) / (a * a));
  step = h;
  gravity = g;
  inv_tau = a;
}

QuadState quad_step(const QuadState& s, const QuadInput& u,
                    const QuadCoefficients& c) {
  QuadState n;
  const double cmd[2] = {u.desired_pitch, u.desired_roll};
  for (int axis = 0; axis < 2; ++axis) {
    const double att = s.attitude[axis];
    n.attitude[axis] = c.att_att * att + c.att_cmd * cmd[axis];
    n.velocity[axis] = s.velocity[axis] + c.vel_att * att + c.vel_cmd * cmd[axis];
    n.position[axis] = s.position[axis] + c.step * s.velocity[axis] +
                       c.pos_att * att + c.pos_cmd * cmd[axis];
    n.attitude_rate[axis] = (cmd[axis] - n.attitude[axis]) * c.inv_tau;
  }
  const double az = u.vertical_thrust - c.gravity;
  n.velocity.z() = s.velocity.z() + az * c.step;
  n.position.z() = s.position.z() + s.velocity.z() * c.step +
                   0.5 * az * c.step * c.step;
  return n;
}

QuadStepResult quad_step(const QuadState& state, const QuadInput& input,
                         const QuadParams& params) {
  params.validate();
  if (std::abs(input.desired_pitch) > params.max_attitude + kBoundSlack ||
      std::abs(input.desired_roll) > params.max_attitude + kBoundSlack) {
    throw InputError("quad_step: desired attitude outside bounds");
  }
  if (input.vertical_thrust < params.min_thrust - kBoundSlack ||
      input.vertical_thrust > params.max_thrust + kBoundSlack) {
    throw InputError("quad_step: thrust outside bounds");
  }
  QuadStepResult out{quad_step(state, input, QuadCoefficients(params)), false};
  for (int axis = 0; axis < 2; ++axis) {
    double& att = out.state.attitude[axis];
    if (std::abs(att) > params.max_attitude) {
      att = std::copysign(params.max_attitude, att);
      out.envelope_clamped = true;
    }
  }
  return out;
}

}  // namespace sarplan
