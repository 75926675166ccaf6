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
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sarplan/sim.hpp"

namespace sarplan {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sarplan_sim_test_" + name);
  fs::remove_all(d);
  return d;
}

TEST(World, SensingUsesNinePointsAndDropsOutside) {
  SimConfig c = default_sim_config();
  c.quad_starts = {Vec2(0, 0), Vec2(10, 10)};
  const World w(c);
  const auto batches = w.sense();
  ASSERT_EQ(batches.size(), 4u);
  EXPECT_EQ(batches[3].samples.size(), 9u);
  // Corner quad: center, +x, +y and the diagonal inside the square.
  EXPECT_EQ(batches[2].samples.size(), 4u);
  for (const TerrainSample& s : batches[2].samples) {
    EXPECT_TRUE(c.bounds.contains(s.position));
    EXPECT_DOUBLE_EQ(s.elevation, ground_truth_elevation(c.terrain, s.position));
  }
  EXPECT_GT(c.quad_sensor_radius, c.biped_sensor_radius);
}

TEST(World, DetectsSubjectsWithinRange) {
  SimConfig c = default_sim_config();
  c.subjects[0].position = Vec2(1.0, 1.0) + Vec2(1.4, 0.0).normalized() * 1.4;
  c.subjects[1].position = Vec2(15, 15);
  const World w(c);
  const auto events = w.detect();
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].subject, 1);
  EXPECT_EQ(events[0].kind, ObservationKind::kFound);
}

TEST(World, StartStateAndStepZeroMetrics) {
  const World w(default_sim_config());
  EXPECT_EQ(w.step_index(), 0);
  ASSERT_EQ(w.metrics().size(), 1u);
  EXPECT_EQ(w.metrics()[0].step, 0);
  EXPECT_EQ(w.metric_grid().size(), 21u * 21u);
  EXPECT_GT(w.metrics()[0].avg_belief, 0.0);
  for (const auto& s : w.subjects()) EXPECT_TRUE(w.config().bounds.contains(s.position));
}

TEST(World, ShortRunsAreByteIdentical) {
  SimConfig c = default_sim_config();
  c.steps = 25;
  c.seed = 3;
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  World wa(c), wb(c);
  wa.run();
  wb.run();
  wa.write_traces(a);
  wb.write_traces(b);
  for (const char* f : {"metrics.csv", "tasks.csv", "paths.csv", "assignments.csv",
                        "events.csv"}) {
    const std::string sa = slurp(a / f);
    EXPECT_FALSE(sa.empty()) << f;
    EXPECT_EQ(sa, slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "metrics.csv").rfind("step,avg_belief,avg_terrain_std,slope_biped1,", 0),
            0u);
}

TEST(World, BeliefAndTerrainStdNeverIncrease) {
  SimConfig c = default_sim_config();
  c.steps = 40;
  World w(c);
  w.run();
  const auto& m = w.metrics();
  ASSERT_EQ(m.size(), 41u);
  for (std::size_t i = 1; i < m.size(); ++i) {
    EXPECT_LE(m[i].avg_belief, m[i - 1].avg_belief + 1e-6) << i;
    EXPECT_LE(m[i].avg_terrain_std, m[i - 1].avg_terrain_std + 1e-9) << i;
  }
  EXPECT_THROW(w.step(), std::logic_error);
}

TEST(World, UnreachableSubjectFailsOtherSucceeds) {
  SimConfig c = default_sim_config();
  // Subject 1 sits on a steep cone inside a wind zone; subject 2 is calm and
  // next to the quadrotors.
  c.terrain.hills.push_back({Vec2(3.5, 3.5), 3.0, 1.0});
  c.wind_zones = {{2.8, 2.8, 4.5, 4.5}};
  c.subjects[0] = {Vec2(3.5, 3.5), kQuadOrBipedSpec};
  c.subjects[1] = {Vec2(2.0, 1.8), kQuadOrBipedSpec};
  c.steps = 250;
  World w(c);
  const RunReport rep = w.run();
  EXPECT_FALSE(rep.success);
  EXPECT_EQ(rep.failed_subjects, std::vector<int>{1});
  EXPECT_EQ(w.mission().subject(2).phase, SubjectPhase::kAccepted);
  EXPECT_TRUE(w.subjects()[1].delivered);
  EXPECT_LT(rep.steps, 250);
}

TEST(World, InvalidConfigNamesTheField) {
  SimConfig c = default_sim_config();
  c.biped_headings = {0.0};
  try {
    World w(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fleet.biped_headings"), std::string::npos);
  }
}

}  // namespace
}  // namespace sarplan
