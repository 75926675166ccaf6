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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sarplan/spatial_bins.hpp"
#include "sarplan/terrain.hpp"

namespace sarplan {
namespace {

TerrainScenario bumpy() {
  TerrainScenario s;
  s.plane = Vec2(0.05, -0.02);
  s.hills = {{Vec2(5, 5), 1.2, 2.0}, {Vec2(14, 8), -0.8, 1.5}};
  s.ridges = {{Vec2(10, 10), 0.6, 0.5, 1.2}};
  return s;
}

TEST(SpatialBins, NewestValueWinsAndPositionIsAnchored) {
  SpatialBins bins(Bounds{}, 0.5, 10);
  EXPECT_EQ(bins.insert(Vec2(1.1, 1.1), 3.0), SpatialBins::Outcome::kAdded);
  EXPECT_EQ(bins.insert(Vec2(1.4, 1.2), 3.0), SpatialBins::Outcome::kUnchanged);
  EXPECT_EQ(bins.insert(Vec2(1.3, 1.4), 4.0), SpatialBins::Outcome::kReplaced);
  ASSERT_EQ(bins.size(), 1u);
  const auto& e = bins.entries().begin()->second;
  EXPECT_EQ(e.position, Vec2(1.1, 1.1));
  EXPECT_EQ(e.value, 4.0);
}

TEST(SpatialBins, CapRejectsNewBinsOnly) {
  SpatialBins bins(Bounds{}, 1.0, 2);
  bins.insert(Vec2(0.5, 0.5), 1.0);
  bins.insert(Vec2(1.5, 0.5), 1.0);
  EXPECT_EQ(bins.insert(Vec2(2.5, 0.5), 1.0), SpatialBins::Outcome::kRejectedCap);
  EXPECT_EQ(bins.insert(Vec2(0.7, 0.7), 2.0), SpatialBins::Outcome::kReplaced);
  EXPECT_THROW(SpatialBins(Bounds{}, 0.0, 2), InputError);
  EXPECT_THROW(SpatialBins(Bounds{}, 1.0, 0), InputError);
}

TEST(Scenario, GradientMatchesFiniteDifferences) {
  const TerrainScenario s = bumpy();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 19.5);
  const double h = 1e-6;
  for (int t = 0; t < 200; ++t) {
    const Vec2 p(u(rng), u(rng));
    const Vec2 g = s.gradient(p);
    const double gx = (s.elevation_unchecked(p + Vec2(h, 0)) -
                       s.elevation_unchecked(p - Vec2(h, 0))) / (2 * h);
    const double gy = (s.elevation_unchecked(p + Vec2(0, h)) -
                       s.elevation_unchecked(p - Vec2(0, h))) / (2 * h);
    EXPECT_NEAR(g.x(), gx, 1e-7);
    EXPECT_NEAR(g.y(), gy, 1e-7);
  }
}

TEST(Scenario, BoundsAndSlopeProbe) {
  const TerrainScenario s = bumpy();
  EXPECT_THROW(ground_truth_elevation(s, Vec2(-0.1, 3)), InputError);
  EXPECT_DOUBLE_EQ(ground_truth_elevation(s, Vec2(3, 3)),
                   s.elevation_unchecked(Vec2(3, 3)));
  TerrainScenario flat;
  flat.plane = Vec2(0.3, 0.4);
  EXPECT_NEAR(max_slope_within(flat, Vec2(10, 10), 2.0), 0.5, 1e-12);
  EXPECT_GE(max_slope_within(s, Vec2(5, 5), 3.0), s.gradient(Vec2(5, 5)).norm());
}

TEST(Scenario, RandomTerrainIsSeeded) {
  const TerrainScenario a = random_terrain(Bounds{}, 5, 1.0, 9);
  const TerrainScenario b = random_terrain(Bounds{}, 5, 1.0, 9);
  ASSERT_EQ(a.hills.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.hills[i].center, b.hills[i].center);
    EXPECT_EQ(a.hills[i].amplitude, b.hills[i].amplitude);
    EXPECT_TRUE(Bounds{}.contains(a.hills[i].center));
  }
}

TEST(RotateToLocal, ComponentsAlongAndLeftOfHeading) {
  const Vec2 g(0.3, -0.1);
  const LocalSlopes east = rotate_to_local(g, 0.0);
  EXPECT_DOUBLE_EQ(east.sagittal, 0.3);
  EXPECT_DOUBLE_EQ(east.lateral, -0.1);
  const LocalSlopes north = rotate_to_local(g, std::numbers::pi / 2);
  EXPECT_NEAR(north.sagittal, -0.1, 1e-15);
  EXPECT_NEAR(north.lateral, -0.3, 1e-15);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-4.0, 4.0);
  for (int t = 0; t < 50; ++t) {
    const LocalSlopes l = rotate_to_local(g, a(rng));
    EXPECT_NEAR(std::hypot(l.sagittal, l.lateral), g.norm(), 1e-14);
  }
}

TEST(TerrainField, EmptyFieldIsNotConfident) {
  const TerrainField f;
  EXPECT_FALSE(f.slope_world(Vec2(3, 3)).confident);
  EXPECT_EQ(f.lateral_slope(Vec2(3, 3), 0.4), 0.0);
  EXPECT_DOUBLE_EQ(f.predict(Vec2(1, 1)).variance, 1.0);
}

TEST(TerrainField, IngestCountsOutcomes) {
  TerrainField f;
  const std::vector<TerrainSample> s = {
      {Vec2(1, 1), 0.5}, {Vec2(1.1, 1.1), 0.5}, {Vec2(1.2, 1.2), 0.7},
      {Vec2(-1, 2), 0.0}, {Vec2(4, 4), std::nan("")}, {Vec2(6, 6), 0.1}};
  const IngestStats st = f.ingest(s);
  EXPECT_EQ(st.added, 2u);
  EXPECT_EQ(st.unchanged, 1u);
  EXPECT_EQ(st.replaced, 1u);
  EXPECT_EQ(st.dropped_out_of_bounds, 2u);
  EXPECT_TRUE(st.refit);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.version(), 1u);
  const IngestStats again = f.ingest(std::vector<TerrainSample>{{Vec2(6, 6), 0.1}});
  EXPECT_FALSE(again.refit);
  EXPECT_EQ(f.version(), 1u);
}

TEST(TerrainField, AdmissionGateRejectsWellKnownCells) {
  TerrainFieldOptions o;
  o.min_admit_stddev = 0.1;
  TerrainField f(o);
  f.ingest(std::vector<TerrainSample>{{Vec2(5, 5), 1.0}});
  const IngestStats st =
      f.ingest(std::vector<TerrainSample>{{Vec2(4.9, 5.0), 1.0}, {Vec2(15, 15), 0.0}});
  EXPECT_EQ(st.rejected_low_variance, 1u);
  EXPECT_EQ(st.added, 1u);
}

TEST(TerrainField, LearnsGroundTruthSlopes) {
  TerrainScenario s;
  s.plane = Vec2(0.2, -0.1);
  TerrainField f;
  std::vector<TerrainSample> samples;
  for (const Vec2& p : make_grid(Bounds{}, 21, 21)) {
    samples.push_back({p, ground_truth_elevation(s, p)});
  }
  f.ingest(samples);
  const SlopeQuery q = f.slope_world(Vec2(9.3, 10.6));
  EXPECT_TRUE(q.confident);
  EXPECT_NEAR(q.gradient.x(), 0.2, 1e-3);
  EXPECT_NEAR(q.gradient.y(), -0.1, 1e-3);
  EXPECT_NEAR(f.lateral_slope(Vec2(9.3, 10.6), 0.0), -0.1, 1e-3);
}

TEST(TerrainField, AverageStddevNeverIncreases) {
  const TerrainScenario s = bumpy();
  TerrainField f;
  const std::vector<Vec2> grid = make_grid(Bounds{}, 11, 11);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  double last = f.average_stddev(grid);
  for (int round = 0; round < 30; ++round) {
    std::vector<TerrainSample> batch;
    for (int k = 0; k < 6; ++k) {
      const Vec2 p(u(rng), u(rng));
      batch.push_back({p, s.elevation_unchecked(p) + noise(rng)});
    }
    f.ingest(batch);
    const double now = f.average_stddev(grid);
    EXPECT_LE(now, last + 1e-12) << round;
    last = now;
  }
  EXPECT_THROW(f.average_stddev({}), InputError);
}

TEST(MakeGrid, SpansBoundsInclusively) {
  const auto g = make_grid(Bounds{0, 0, 20, 10}, 5, 3);
  ASSERT_EQ(g.size(), 15u);
  EXPECT_EQ(g.front(), Vec2(0, 0));
  EXPECT_EQ(g[1], Vec2(5, 0));
  EXPECT_EQ(g.back(), Vec2(20, 10));
  EXPECT_THROW(make_grid(Bounds{}, 1, 3), InputError);
}

TEST(TerrainGridCsv, FixedSixDigits) {
  TerrainField f;
  const std::vector<Vec2> grid = {Vec2(1, 2)};
  EXPECT_EQ(terrain_grid_csv(f, grid),
            "x,y,mean,std\n1.000000,2.000000,0.000000,1.000000\n");
}

}  // namespace
}  // namespace sarplan
