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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sarplan/belief.hpp"
#include "sarplan/terrain.hpp"

namespace sarplan {
namespace {

BeliefPrior three_points() {
  BeliefPrior prior;
  prior.points = {{Vec2(15, 6), 2.0}, {Vec2(6, 15), 2.0}, {Vec2(14, 14), 2.0}};
  return prior;
}

TEST(Belief, EmptyPriorIsZeroEverywhere) {
  const BeliefField f = BeliefField::build_prior(BeliefPrior{}, {}, 1);
  const auto grid = make_grid(Bounds{}, 11, 11);
  for (const Vec2& p : grid) EXPECT_EQ(f.mean(p), 0.0);
  EXPECT_EQ(f.average_belief(grid), 0.0);
}

TEST(Belief, SinglePointPeaksAtItsCenter) {
  BeliefFieldOptions o;
  o.bounds = Bounds{0, 0, 40, 40};
  BeliefPrior prior;
  prior.points = {{Vec2(10, 10), 1.0}};
  prior.samples_per_point = 5;
  const BeliefField f = BeliefField::build_prior(prior, o, 3);
  EXPECT_EQ(f.prior_samples().size(), 5u);
  const double far = 10.0 * o.kernel.lengthscale;
  EXPECT_GT(f.mean(Vec2(10, 10)), f.mean(Vec2(10 + far, 10)));
  EXPECT_GT(f.mean(Vec2(10, 10)), 0.3);
}

TEST(Belief, SeedDeterminism) {
  const BeliefField a = BeliefField::build_prior(three_points(), {}, 17);
  const BeliefField b = BeliefField::build_prior(three_points(), {}, 17);
  const BeliefField c = BeliefField::build_prior(three_points(), {}, 18);
  EXPECT_EQ(a.prior_samples(), b.prior_samples());
  EXPECT_NE(a.prior_samples(), c.prior_samples());
  for (const Vec2& p : a.prior_samples()) EXPECT_TRUE(Bounds{}.contains(p));
}

TEST(Belief, PriorValidation) {
  BeliefPrior p = three_points();
  p.samples_per_point = 0;
  EXPECT_THROW(BeliefField::build_prior(p, {}, 1), InputError);
  p = three_points();
  p.points[0].confidence = 0.0;
  EXPECT_THROW(BeliefField::build_prior(p, {}, 1), InputError);
  p = three_points();
  p.points[0].position = Vec2(25, 3);
  EXPECT_THROW(BeliefField::build_prior(p, {}, 1), InputError);
}

TEST(Belief, UcbProperties) {
  const BeliefField f = BeliefField::build_prior(three_points(), {}, 2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int t = 0; t < 100; ++t) {
    const Vec2 p(u(rng), u(rng));
    EXPECT_DOUBLE_EQ(f.ucb(p, 0.0), f.predict(p).mean);
    EXPECT_GE(f.ucb(p, 3.0), f.ucb(p, 1.0));
    EXPECT_GE(f.ucb(p, 1.0), f.mean(p));
  }
  // Nothing searched and nothing believed near the origin corner.
  const double sf = std::sqrt(BeliefFieldOptions{}.kernel.signal_variance);
  EXPECT_NEAR(f.ucb(Vec2(0, 0), 3.0), 3.0 * sf, 0.05);
}

TEST(Belief, MarkLowersLocalValueAndVariance) {
  BeliefField f = BeliefField::build_prior(three_points(), {}, 5);
  const Vec2 p(15, 6);
  const GpPrediction before = f.predict(p);
  f.mark_searched(p, 1.5);
  const GpPrediction after = f.predict(p);
  EXPECT_LT(after.mean, before.mean);
  EXPECT_LT(after.variance, before.variance);
  EXPECT_EQ(f.marks().size(), 1u);
  EXPECT_THROW(f.mark_searched(p, 0.0), InputError);
}

TEST(Belief, MarkInEmptyFieldStaysZero) {
  BeliefField f = BeliefField::build_prior(BeliefPrior{}, {}, 1);
  f.mark_searched(Vec2(5, 5), 2.0);
  for (const Vec2& p : make_grid(Bounds{}, 6, 6)) EXPECT_NEAR(f.mean(p), 0.0, 1e-12);
}

TEST(Belief, LatticeWeightsAreNonNegative) {
  const BeliefField f = BeliefField::build_prior(three_points(), {}, 6);
  const Eigen::VectorXd w = f.lattice_weights();
  EXPECT_EQ(w.size(), static_cast<Eigen::Index>(f.lattice().size()));
  EXPECT_GE(w.minCoeff(), 0.0);
}

TEST(Belief, RandomMarksNeverRaiseTheAverage) {
  const auto grid = make_grid(Bounds{}, 21, 21);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 21.0);
  std::uniform_real_distribution<double> r(0.5, 3.0);
  for (int trial = 0; trial < 4; ++trial) {
    BeliefField f = BeliefField::build_prior(three_points(), {}, 100 + trial);
    double last = f.average_belief(grid);
    for (int k = 0; k < 40; ++k) {
      f.mark_searched(Vec2(u(rng), u(rng)), r(rng));
      const double now = f.average_belief(grid);
      EXPECT_LE(now, last + 1e-6) << "trial " << trial << " mark " << k;
      last = now;
    }
  }
}

TEST(Belief, SearchingEverywhereDecaysBelief) {
  const auto grid = make_grid(Bounds{}, 21, 21);
  BeliefField f = BeliefField::build_prior(three_points(), {}, 8);
  const double initial = f.average_belief(grid);
  ASSERT_GT(initial, 0.0);
  std::vector<SearchMark> marks;
  for (const Vec2& p : grid) marks.push_back({p, 0.75});
  f.mark_searched(marks);
  EXPECT_LT(f.average_belief(grid), 0.1 * initial);
}

TEST(Belief, BatchMarksMatchSequentialMarks) {
  BeliefField a = BeliefField::build_prior(three_points(), {}, 9);
  BeliefField b = a;
  const std::vector<SearchMark> marks = {{Vec2(14, 14), 2.0}, {Vec2(6, 15), 1.0}};
  a.mark_searched(marks);
  for (const SearchMark& m : marks) b.mark_searched(m.position, m.radius);
  for (const Vec2& p : make_grid(Bounds{}, 7, 7)) {
    EXPECT_NEAR(a.mean(p), b.mean(p), 1e-12);
    EXPECT_NEAR(a.predict(p).variance, b.predict(p).variance, 1e-12);
  }
}

TEST(Belief, AverageAndCsv) {
  const BeliefField f = BeliefField::build_prior(BeliefPrior{}, {}, 1);
  EXPECT_THROW(f.average_belief({}), InputError);
  const std::vector<Vec2> g = {Vec2(0.5, 2)};
  EXPECT_EQ(belief_grid_csv(f, g), "x,y,mean\n0.500000,2.000000,0.000000\n");
}

}  // namespace
}  // namespace sarplan
