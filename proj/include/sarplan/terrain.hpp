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

#ifndef SARPLAN_TERRAIN_HPP_
#define SARPLAN_TERRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sarplan/common.hpp"
#include "sarplan/gp.hpp"
#include "sarplan/spatial_bins.hpp"

namespace sarplan {

// Isotropic Gaussian bump; negative amplitude makes a basin.
struct Hill {
  Vec2 center{0.0, 0.0};
  double amplitude = 0.0;
  double sigma = 1.0;
};

// Gaussian cross-section ridge along the infinite line through `point` with
// direction `angle`.
struct Ridge {
  Vec2 point{0.0, 0.0};
  double angle = 0.0;
  double amplitude = 0.0;
  double width = 1.0;
};

// Analytic ground-truth surface: planar trend plus hills and ridges, all
// relative to elevation 0.
struct TerrainScenario {
  Bounds bounds;
  Vec2 plane{0.0, 0.0};  // elevation += plane.dot(p)
  std::vector<Hill> hills;
  std::vector<Ridge> ridges;

  // No bounds check.
  double elevation_unchecked(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
};

// Throws InputError outside the scenario bounds.
double ground_truth_elevation(const TerrainScenario& scenario, const Vec2& p);

// Largest ground-truth slope magnitude on a polar sample pattern within
// `radius` of `center` (points outside the bounds are skipped).
double max_slope_within(const TerrainScenario& scenario, const Vec2& center,
                        double radius);

// Seeded random hills scattered inside the bounds.
TerrainScenario random_terrain(const Bounds& bounds, std::size_t hill_count,
                               double max_amplitude, std::uint64_t seed);

struct TerrainSample {
  Vec2 position;
  double elevation = 0.0;
};

struct LocalSlopes {
  double sagittal = 0.0;
  double lateral = 0.0;
};

struct SlopeQuery {
  Vec2 gradient{0.0, 0.0};
  bool confident = false;  // false when the field has no data
};

struct IngestStats {
  std::size_t added = 0;
  std::size_t replaced = 0;
  std::size_t unchanged = 0;
  std::size_t dropped_out_of_bounds = 0;
  std::size_t rejected_cap = 0;
  std::size_t rejected_low_variance = 0;
  bool refit = false;
};

// World-to-local rotation: sagittal along the heading, lateral to its left.
LocalSlopes rotate_to_local(const Vec2& world_gradient, double heading);

struct TerrainFieldOptions {
  Bounds bounds;
  KernelParams kernel{1.0, 1.5, 1e-4};
  double bin_size = 0.5;
  std::size_t cap = 400;
  // A sample opening a new bin is admitted only where the current predictive
  // standard deviation exceeds this; 0 admits everything.
  double min_admit_stddev = 0.0;
};

// Terrain elevation GP fed from binned sensor samples.
class TerrainField {
 public:
  explicit TerrainField(TerrainFieldOptions options = {});

  // Deduplicates by bin and refits at most once per call.
  IngestStats ingest(std::span<const TerrainSample> samples);

  GpPrediction predict(const Vec2& p) const { return model_.predict(p); }
  double elevation(const Vec2& p) const { return model_.predict_mean(p); }
  SlopeQuery slope_world(const Vec2& p) const;
  LocalSlopes slope_local(const Vec2& p, double heading) const;
  double lateral_slope(const Vec2& p, double heading) const;

  // Mean predictive standard deviation over `grid`.
  double average_stddev(std::span<const Vec2> grid) const;

  const GpModel& model() const { return model_; }
  const SpatialBins& dataset() const { return bins_; }
  std::size_t size() const { return bins_.size(); }
  std::uint64_t version() const { return version_; }
  const TerrainFieldOptions& options() const { return options_; }

 private:
  void refit();

  TerrainFieldOptions options_;
  SpatialBins bins_;
  GpModel model_;
  std::uint64_t version_ = 0;
};

// Regular grid with `nx` x `ny` points spanning the bounds inclusively.
std::vector<Vec2> make_grid(const Bounds& bounds, std::size_t nx,
                            std::size_t ny);

// CSV rows "x,y,mean,std" with six fractional digits.
std::string terrain_grid_csv(const TerrainField& field,
                             std::span<const Vec2> grid);

}  // namespace sarplan

#endif  // SARPLAN_TERRAIN_HPP_
