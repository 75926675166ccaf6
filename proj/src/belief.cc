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

#include "sarplan/belief.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "sarplan/terrain.hpp"

namespace sarplan {

namespace {

Eigen::MatrixXd rows_of(const std::vector<Vec2>& points) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  return m;
}

}  // namespace

BeliefField::BeliefField(BeliefFieldOptions options)
    : options_(options),
      marks_(options.bounds, options.bin_size, options.cap),
      model_(2, options.kernel),
      coverage_(2, options.kernel) {
  lattice_ = make_grid(options_.bounds, options_.lattice_nx, options_.lattice_ny);
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lattice_.size()));
  model_ = GpModel::fit(rows_of(lattice_), values_, options_.kernel);
}

BeliefField BeliefField::build_prior(const BeliefPrior& prior,
                                     const BeliefFieldOptions& options,
                                     std::uint64_t seed) {
  if (prior.samples_per_point < 1) {
    throw InputError("belief prior: samples_per_point must be >= 1");
  }
  BeliefField field(options);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const BeliefPoint& bp : prior.points) {
    if (!(bp.confidence > 0.0)) {
      throw InputError("belief prior: confidence must be > 0");
    }
    if (!options.bounds.contains(bp.position)) {
      throw InputError("belief prior: point outside world bounds");
    }
    for (std::size_t i = 0; i < prior.samples_per_point; ++i) {
      const double dx = normal(rng);
      const double dy = normal(rng);
      field.prior_samples_.push_back(options.bounds.clamp(
          bp.position + bp.confidence * Vec2(dx, dy)));
    }
  }
  if (!field.prior_samples_.empty()) {
    const Eigen::MatrixXd inputs = rows_of(field.prior_samples_);
    field.seed_lattice(GpModel::fit(
        inputs, Eigen::VectorXd::Ones(inputs.rows()), options.kernel));
  }
  return field;
}

void BeliefField::seed_lattice(const GpModel& prior_model) {
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    values_(static_cast<Eigen::Index>(i)) =
        std::max(0.0, prior_model.predict_mean(lattice_[i]));
  }
  model_ = model_.with_observations(values_);
  ++version_;
}

GpPrediction BeliefField::predict(const Vec2& p) const {
  return {model_.predict_mean(p), coverage_.predict(p).variance};
}

double BeliefField::ucb(const Vec2& p, double alpha) const {
  const GpPrediction pr = predict(p);
  return pr.mean + alpha * pr.stddev();
}

void BeliefField::mark_searched(const Vec2& p, double radius) {
  const SearchMark mark{p, radius};
  mark_searched(std::span<const SearchMark>(&mark, 1));
}

void BeliefField::mark_searched(std::span<const SearchMark> marks) {
  bool values_changed = false;
  bool marks_changed = false;
  for (const SearchMark& mark : marks) {
    if (!(mark.radius > 0.0)) throw InputError("mark_searched: radius <= 0");
    const double r2 = mark.radius * mark.radius;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      if (values_(k) != 0.0 && (lattice_[i] - mark.position).squaredNorm() <= r2) {
        values_(k) = 0.0;
        values_changed = true;
      }
    }
    if (options_.bounds.contains(mark.position)) {
      const auto outcome = marks_.insert(mark.position, 0.0);
      marks_changed |= outcome == SpatialBins::Outcome::kAdded;
    }
  }
  if (values_changed) model_ = model_.with_observations(values_);
  if (marks_changed) refit_coverage();
  if (values_changed || marks_changed) ++version_;
}

void BeliefField::refit_coverage() {
  const auto m = static_cast<Eigen::Index>(marks_.size());
  Eigen::MatrixXd inputs(m, 2);
  Eigen::VectorXd values(m);
  marks_.export_rows(inputs, values, 0);
  coverage_ = GpModel::fit(inputs, values, options_.kernel);
}

Eigen::VectorXd BeliefField::lattice_weights() const {
  const GpModel ones =
      model_.with_observations(Eigen::VectorXd::Ones(values_.size()));
  Eigen::VectorXd w(values_.size());
  for (std::size_t i = 0; i < lattice_.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = ones.predict_mean(lattice_[i]);
  }
  return w;
}

double BeliefField::average_belief(std::span<const Vec2> grid) const {
  if (grid.empty()) throw InputError("average_belief: empty grid");
  double sum = 0.0;
  for (const Vec2& p : grid) sum += model_.predict_mean(p);
  return sum / static_cast<double>(grid.size());
}

std::string belief_grid_csv(const BeliefField& field,
                            std::span<const Vec2> grid) {
  std::string out = "x,y,mean\n";
  char line[96];
  for (const Vec2& p : grid) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", p.x(), p.y(),
                  field.mean(p));
    out += line;
  }
  return out;
}

}  // namespace sarplan
