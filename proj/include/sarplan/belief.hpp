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

#ifndef SARPLAN_BELIEF_HPP_
#define SARPLAN_BELIEF_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sarplan/common.hpp"
#include "sarplan/gp.hpp"
#include "sarplan/spatial_bins.hpp"

namespace sarplan {

struct BeliefPoint {
  Vec2 position;
  double confidence = 1.0;  // standard deviation of the sample spread, m
};

struct BeliefPrior {
  std::vector<BeliefPoint> points;
  std::size_t samples_per_point = 10;
};

struct BeliefFieldOptions {
  Bounds bounds;
  KernelParams kernel{1.0, 2.0, 1e-4};
  double bin_size = 1.0;   // searched-mark bins
  std::size_t cap = 400;   // searched-mark bins retained
  // Belief lattice, corner-inclusive over `bounds`. The simulator sets this
  // to its metric grid so that the reported average sits on the nodes.
  std::size_t lattice_nx = 21;
  std::size_t lattice_ny = 21;
};

struct SearchMark {
  Vec2 position;
  double radius = 1.0;
};

// Target-belief GP.
//
// Sampled prior positions (value 1) are fitted first; that prior mean,
// clipped at zero, seeds observations on a fixed lattice. The belief mean is
// a GP over the lattice. A searched mark zeroes every lattice observation
// within its radius, so inputs never change and the grid-average mean over
// the lattice nodes can only fall (see lattice_weights()).
//
// The predictive variance is the posterior variance given the searched-mark
// bins: sigma_f^2 far from anything searched, small where robots have been.
class BeliefField {
 public:
  explicit BeliefField(BeliefFieldOptions options = {});

  // Draws samples_per_point positions from N(p, c^2 I) per prior point
  // (clamped to the bounds) and fits. An empty prior gives a zero field.
  static BeliefField build_prior(const BeliefPrior& prior,
                                 const BeliefFieldOptions& options,
                                 std::uint64_t seed);

  double mean(const Vec2& p) const { return model_.predict_mean(p); }
  // Mean from the lattice GP, variance from the searched-mark GP.
  GpPrediction predict(const Vec2& p) const;
  // mean + alpha * stddev
  double ucb(const Vec2& p, double alpha) const;

  void mark_searched(const Vec2& p, double radius);
  // Applies all marks, refitting once.
  void mark_searched(std::span<const SearchMark> marks);

  double average_belief(std::span<const Vec2> grid) const;

  const GpModel& model() const { return model_; }
  const GpModel& coverage_model() const { return coverage_; }
  const std::vector<Vec2>& prior_samples() const { return prior_samples_; }
  const std::vector<Vec2>& lattice() const { return lattice_; }
  const Eigen::VectorXd& lattice_values() const { return values_; }
  const SpatialBins& marks() const { return marks_; }

  // Posterior mean at each lattice node for all-ones observations. The
  // lattice-average mean is w . y / n, so non-negative w makes every mark
  // non-increasing for that average.
  Eigen::VectorXd lattice_weights() const;
  std::uint64_t version() const { return version_; }

 private:
  void seed_lattice(const GpModel& prior_model);
  void refit_coverage();

  BeliefFieldOptions options_;
  std::vector<Vec2> prior_samples_;
  std::vector<Vec2> lattice_;
  Eigen::VectorXd values_;
  SpatialBins marks_;
  GpModel model_;
  GpModel coverage_;
  std::uint64_t version_ = 0;
};

// CSV rows "x,y,mean" with six fractional digits.
std::string belief_grid_csv(const BeliefField& field,
                            std::span<const Vec2> grid);

}  // namespace sarplan

#endif  // SARPLAN_BELIEF_HPP_
