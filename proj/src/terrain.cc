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

#include "sarplan/terrain.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace sarplan {

SpatialBins::SpatialBins(Bounds bounds, double bin_size, std::size_t cap)
    : bounds_(bounds), bin_size_(bin_size), cap_(cap) {
  if (!(bin_size > 0.0)) throw InputError("spatial bins: bin_size must be > 0");
  if (cap == 0) throw InputError("spatial bins: cap must be >= 1");
}

SpatialBins::Key SpatialBins::key_of(const Vec2& p) const {
  return {static_cast<std::int64_t>(
              std::floor((p.x() - bounds_.min_x) / bin_size_)),
          static_cast<std::int64_t>(
              std::floor((p.y() - bounds_.min_y) / bin_size_))};
}

SpatialBins::Outcome SpatialBins::insert(const Vec2& p, double value) {
  const Key key = key_of(p);
  auto it = bins_.find(key);
  if (it != bins_.end()) {
    if (it->second.value == value) return Outcome::kUnchanged;
    it->second.value = value;
    it->second.sequence = ++counter_;
    return Outcome::kReplaced;
  }
  if (bins_.size() >= cap_) return Outcome::kRejectedCap;
  bins_.emplace(key, Entry{p, value, ++counter_});
  return Outcome::kAdded;
}

void SpatialBins::export_rows(Eigen::MatrixXd& inputs, Eigen::VectorXd& values,
                              Eigen::Index offset) const {
  Eigen::Index row = offset;
  for (const auto& [key, entry] : bins_) {
    inputs(row, 0) = entry.position.x();
    inputs(row, 1) = entry.position.y();
    values(row) = entry.value;
    ++row;
  }
}

double TerrainScenario::elevation_unchecked(const Vec2& p) const {
  double e = plane.dot(p);
  for (const Hill& h : hills) {
    const double r2 = (p - h.center).squaredNorm();
    e += h.amplitude * std::exp(-r2 / (2.0 * h.sigma * h.sigma));
  }
  for (const Ridge& r : ridges) {
    const Vec2 normal(-std::sin(r.angle), std::cos(r.angle));
    const double d = normal.dot(p - r.point);
    e += r.amplitude * std::exp(-d * d / (2.0 * r.width * r.width));
  }
  return e;
}

Vec2 TerrainScenario::gradient(const Vec2& p) const {
  Vec2 g = plane;
  for (const Hill& h : hills) {
    const Vec2 diff = p - h.center;
    const double s2 = h.sigma * h.sigma;
    g += -h.amplitude * std::exp(-diff.squaredNorm() / (2.0 * s2)) / s2 * diff;
  }
  for (const Ridge& r : ridges) {
    const Vec2 normal(-std::sin(r.angle), std::cos(r.angle));
    const double d = normal.dot(p - r.point);
    const double w2 = r.width * r.width;
    g += -r.amplitude * std::exp(-d * d / (2.0 * w2)) * d / w2 * normal;
  }
  return g;
}

double ground_truth_elevation(const TerrainScenario& scenario, const Vec2& p) {
  if (!scenario.bounds.contains(p)) {
    throw InputError("ground_truth_elevation: point outside world bounds");
  }
  return scenario.elevation_unchecked(p);
}

double max_slope_within(const TerrainScenario& scenario, const Vec2& center,
                        double radius) {
  constexpr int kRings = 4;
  constexpr int kSpokes = 16;
  double best = 0.0;
  for (int ring = 0; ring < kRings; ++ring) {
    const double r = radius * ring / (kRings - 1);
    const int spokes = ring == 0 ? 1 : kSpokes;
    for (int s = 0; s < spokes; ++s) {
      const double a = 2.0 * std::numbers::pi * s / kSpokes;
      const Vec2 p = center + r * Vec2(std::cos(a), std::sin(a));
      if (!scenario.bounds.contains(p)) continue;
      best = std::max(best, scenario.gradient(p).norm());
    }
  }
  return best;
}

TerrainScenario random_terrain(const Bounds& bounds, std::size_t hill_count,
                               double max_amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bounds.min_x, bounds.max_x);
  std::uniform_real_distribution<double> uy(bounds.min_y, bounds.max_y);
  std::uniform_real_distribution<double> amp(-max_amplitude, max_amplitude);
  std::uniform_real_distribution<double> sig(1.5, 3.0);
  TerrainScenario out;
  out.bounds = bounds;
  for (std::size_t i = 0; i < hill_count; ++i) {
    Hill h;
    h.center = Vec2(ux(rng), uy(rng));
    h.amplitude = amp(rng);
    h.sigma = sig(rng);
    out.hills.push_back(h);
  }
  return out;
}

LocalSlopes rotate_to_local(const Vec2& g, double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {c * g.x() + s * g.y(), -s * g.x() + c * g.y()};
}

TerrainField::TerrainField(TerrainFieldOptions options)
    : options_(options),
      bins_(options.bounds, options.bin_size, options.cap),
      model_(2, options.kernel) {}

IngestStats TerrainField::ingest(std::span<const TerrainSample> samples) {
  IngestStats stats;
  for (const TerrainSample& s : samples) {
    if (!options_.bounds.contains(s.position) ||
        !std::isfinite(s.elevation)) {
      ++stats.dropped_out_of_bounds;
      continue;
    }
    if (options_.min_admit_stddev > 0.0 && !bins_.contains(s.position) &&
        model_.predict(s.position).stddev() < options_.min_admit_stddev) {
      ++stats.rejected_low_variance;
      continue;
    }
    switch (bins_.insert(s.position, s.elevation)) {
      case SpatialBins::Outcome::kAdded: ++stats.added; break;
      case SpatialBins::Outcome::kReplaced: ++stats.replaced; break;
      case SpatialBins::Outcome::kUnchanged: ++stats.unchanged; break;
      case SpatialBins::Outcome::kRejectedCap: ++stats.rejected_cap; break;
    }
  }
  if (stats.added + stats.replaced > 0) {
    refit();
    stats.refit = true;
  }
  return stats;
}

void TerrainField::refit() {
  const auto m = static_cast<Eigen::Index>(bins_.size());
  Eigen::MatrixXd inputs(m, 2);
  Eigen::VectorXd values(m);
  bins_.export_rows(inputs, values, 0);
  model_ = GpModel::fit(inputs, values, options_.kernel);
  ++version_;
}

SlopeQuery TerrainField::slope_world(const Vec2& p) const {
  if (model_.empty()) return {Vec2::Zero(), false};
  return {model_.predict_mean_gradient(p), true};
}

LocalSlopes TerrainField::slope_local(const Vec2& p, double heading) const {
  return rotate_to_local(slope_world(p).gradient, heading);
}

double TerrainField::lateral_slope(const Vec2& p, double heading) const {
  return slope_local(p, heading).lateral;
}

double TerrainField::average_stddev(std::span<const Vec2> grid) const {
  if (grid.empty()) throw InputError("average_stddev: empty grid");
  double sum = 0.0;
  for (const Vec2& p : grid) sum += model_.predict(p).stddev();
  return sum / static_cast<double>(grid.size());
}

std::vector<Vec2> make_grid(const Bounds& bounds, std::size_t nx,
                            std::size_t ny) {
  if (nx < 2 || ny < 2) throw InputError("make_grid: need at least 2x2");
  std::vector<Vec2> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      out.emplace_back(
          bounds.min_x + bounds.width() * static_cast<double>(i) / (nx - 1),
          bounds.min_y + bounds.height() * static_cast<double>(j) / (ny - 1));
    }
  }
  return out;
}

std::string terrain_grid_csv(const TerrainField& field,
                             std::span<const Vec2> grid) {
  std::string out = "x,y,mean,std\n";
  char line[128];
  for (const Vec2& p : grid) {
    const GpPrediction pr = field.predict(p);
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f\n", p.x(), p.y(),
                  pr.mean, pr.stddev());
    out += line;
  }
  return out;
}

}  // namespace sarplan
