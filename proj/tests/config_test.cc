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

#include <filesystem>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "sarplan/config.hpp"

namespace sarplan {
namespace {

const std::filesystem::path kConfigDir = SARPLAN_CONFIG_DIR;

void expect_same_scenario(const SimConfig& a, const SimConfig& b) {
  EXPECT_EQ(a.bounds.max_x, b.bounds.max_x);
  EXPECT_EQ(a.bounds.max_y, b.bounds.max_y);
  EXPECT_EQ(a.rescue_point, b.rescue_point);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.stop_when_finished, b.stop_when_finished);
  EXPECT_EQ(a.terrain.plane, b.terrain.plane);
  ASSERT_EQ(a.terrain.hills.size(), b.terrain.hills.size());
  for (std::size_t i = 0; i < a.terrain.hills.size(); ++i) {
    EXPECT_EQ(a.terrain.hills[i].center, b.terrain.hills[i].center);
    EXPECT_EQ(a.terrain.hills[i].amplitude, b.terrain.hills[i].amplitude);
    EXPECT_EQ(a.terrain.hills[i].sigma, b.terrain.hills[i].sigma);
  }
  EXPECT_EQ(a.initial_samples, b.initial_samples);
  EXPECT_EQ(a.terrain_field.kernel.lengthscale, b.terrain_field.kernel.lengthscale);
  EXPECT_EQ(a.terrain_field.min_admit_stddev, b.terrain_field.min_admit_stddev);
  EXPECT_EQ(a.terrain_field.cap, b.terrain_field.cap);
  ASSERT_EQ(a.prior.points.size(), b.prior.points.size());
  for (std::size_t i = 0; i < a.prior.points.size(); ++i) {
    EXPECT_EQ(a.prior.points[i].position, b.prior.points[i].position);
    EXPECT_EQ(a.prior.points[i].confidence, b.prior.points[i].confidence);
  }
  EXPECT_EQ(a.prior.samples_per_point, b.prior.samples_per_point);
  EXPECT_EQ(a.belief_field.kernel.lengthscale, b.belief_field.kernel.lengthscale);
  ASSERT_EQ(a.subjects.size(), b.subjects.size());
  for (std::size_t i = 0; i < a.subjects.size(); ++i) {
    EXPECT_EQ(a.subjects[i].spec, b.subjects[i].spec);
    EXPECT_EQ(a.subjects[i].position, b.subjects[i].position);
  }
  EXPECT_EQ(a.wind_zones.size(), b.wind_zones.size());
  EXPECT_EQ(a.biped_starts, b.biped_starts);
  EXPECT_EQ(a.biped_headings, b.biped_headings);
  EXPECT_EQ(a.quad_starts, b.quad_starts);
  EXPECT_EQ(a.quad_altitude, b.quad_altitude);
  EXPECT_EQ(a.biped_sensor_radius, b.biped_sensor_radius);
  EXPECT_EQ(a.quad_sensor_radius, b.quad_sensor_radius);
  EXPECT_EQ(a.pickup_radius, b.pickup_radius);
  EXPECT_EQ(a.untraversable_slope, b.untraversable_slope);
  EXPECT_EQ(a.mpc.horizon, b.mpc.horizon);
  EXPECT_EQ(a.mpc.slope_weight, b.mpc.slope_weight);
  EXPECT_EQ(a.mpc.input_weight, b.mpc.input_weight);
  EXPECT_EQ(a.mpc.stall_tol, b.mpc.stall_tol);
  EXPECT_EQ(a.mpc.lip.step_duration, b.mpc.lip.step_duration);
  EXPECT_EQ(a.mpc.quad.max_thrust, b.mpc.quad.max_thrust);
  EXPECT_EQ(a.mpc.biped_max_speed, b.mpc.biped_max_speed);
  EXPECT_EQ(a.mpc.quad_max_speed, b.mpc.quad_max_speed);
  EXPECT_EQ(a.biped_weights.belief, b.biped_weights.belief);
  EXPECT_EQ(a.biped_weights.traversability, b.biped_weights.traversability);
  EXPECT_EQ(a.biped_weights.time, b.biped_weights.time);
  EXPECT_EQ(a.quad_weights.time, b.quad_weights.time);
  EXPECT_EQ(a.candidate_count, b.candidate_count);
  EXPECT_EQ(a.rescue.orbit_radius, b.rescue.orbit_radius);
  EXPECT_EQ(a.rescue.orbit_mode, b.rescue.orbit_mode);
  EXPECT_EQ(a.conflict_resolution, b.conflict_resolution);
}

TEST(Config, DefaultFileReproducesBuiltInScenario) {
  expect_same_scenario(load_config(kConfigDir / "default.ini"), default_sim_config());
}

TEST(Config, EmptyTextKeepsDefaults) {
  expect_same_scenario(parse_config(""), default_sim_config());
}

TEST(Config, TableOneValues) {
  const SimConfig c = load_config(kConfigDir / "default.ini");
  EXPECT_EQ(c.bounds.width(), 20.0);
  EXPECT_EQ(c.bounds.height(), 20.0);
  EXPECT_EQ(c.rescue_point, Vec2(19, 19));
  EXPECT_EQ(c.mpc.horizon, 10);
  EXPECT_EQ(c.mpc.lip.step_duration, 0.4);
  EXPECT_EQ(c.mpc.distance_lower, 0.9);
  EXPECT_EQ(c.mpc.distance_upper, 2.0);
  EXPECT_EQ(c.mpc.distance_slack, 0.2);
  EXPECT_EQ(c.biped_weights.alpha_b, 3.0);
  EXPECT_EQ(c.candidate_count, 100);
  EXPECT_EQ(c.biped_weights.ellipse_samples, 15);
  EXPECT_EQ(c.biped_weights.alpha_t, 1.0);
  EXPECT_EQ(c.biped_weights.belief, 3.0);
  EXPECT_EQ(c.quad_weights.belief, 3.0);
  EXPECT_EQ(c.quad_weights.time, 0.5);
  EXPECT_EQ(c.biped_weights.time, 1.0);
  EXPECT_EQ(c.biped_weights.traversability, 1.0);
  EXPECT_EQ(c.quad_weights.v_max, 1.5);
  EXPECT_EQ(c.biped_weights.v_max, 0.4);
  EXPECT_EQ(c.rescue.orbit_radius, 3.0);
}

TEST(Config, PresetsDifferOnlyWhereDocumented) {
  const SimConfig wind = load_config(kConfigDir / "wind.ini");
  ASSERT_EQ(wind.wind_zones.size(), 1u);
  EXPECT_TRUE(wind.wind_zones[0].contains(Vec2(10, 10)));
  const SimConfig search = load_config(kConfigDir / "search.ini");
  EXPECT_TRUE(search.subjects.empty());
  EXPECT_FALSE(search.stop_when_finished);
  EXPECT_EQ(search.steps, 150);
}

TEST(Config, OverridesAndDerivedValues) {
  const SimConfig c = parse_config(
      "[mpc]\nstep_duration = 0.5\nquad_thrust_margin = 2\n"
      "[assignment]\nbiped_v_max = 0.3\norbit_mode = periodic\n"
      "[subjects]\ncount = 1\nsubject1_position = 4,5\nsubject1_spec = biped_only\n");
  EXPECT_EQ(c.mpc.lip.step_duration, 0.5);
  EXPECT_EQ(c.mpc.quad.step_duration, 0.5);
  EXPECT_NEAR(c.mpc.quad.max_thrust, 9.81 + 2.0, 1e-12);
  EXPECT_EQ(c.mpc.biped_max_speed, 0.3);
  EXPECT_EQ(c.rescue.orbit_mode, OrbitMode::kPeriodic);
  ASSERT_EQ(c.subjects.size(), 1u);
  EXPECT_EQ(*c.subjects[0].position, Vec2(4, 5));
  EXPECT_EQ(c.subjects[0].spec, kBipedOnlySpec);
}

void expect_config_error(const std::string& text, const std::string& field) {
  try {
    parse_config(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos)
        << e.what() << " does not name " << field;
  }
}

TEST(Config, ErrorsNameTheField) {
  expect_config_error("[world]\nwidth = 20\nfrobnicate = 1\n", "world.frobnicate");
  expect_config_error("[mpc]\nhorizon = ten\n", "mpc.horizon");
  expect_config_error("[mpc]\nslope_weight = 1e400\n", "mpc.slope_weight");
  expect_config_error("[sim]\nstop_when_finished = maybe\n", "sim.stop_when_finished");
  expect_config_error("[subjects]\ncount = 9\n", "subjects.count");
  expect_config_error("[subjects]\ncount = 1\nsubject2_spec = biped_only\n",
                      "subjects.subject2_spec");
  expect_config_error("[fleet]\nbiped_starts = 1,1; 30,1\nbiped_headings = 0;0\n",
                      "fleet.biped_starts");
  expect_config_error("[belief]\nprior = 1,2\n", "belief.prior");
  expect_config_error("[wind]\nzones = 5,5,1,1\n", "wind.zones");
  expect_config_error("[assignment]\norbit_mode = spiral\n", "assignment.orbit_mode");
  expect_config_error("[mpc]\ndistance_lower = 3\n", "mpc");
  expect_config_error("[subjects]\nsubject1_spec = F (a\n", "subjects.subject1_spec");
  EXPECT_THROW(load_config(kConfigDir / "no_such_file.ini"), ConfigError);
}

TEST(Config, ZeroSubjectsAllowed) {
  const SimConfig c = parse_config("[subjects]\ncount = 0\n");
  EXPECT_TRUE(c.subjects.empty());
}

}  // namespace
}  // namespace sarplan
