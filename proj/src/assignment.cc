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

#include "sarplan/assignment.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sarplan {
namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int orientation(const Vec2& o, const Vec2& a, const Vec2& b) {
  const double c = cross(o, a, b);
  return (c > 0.0) - (c < 0.0);
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x(), r.x()) <= q.x() && q.x() <= std::max(p.x(), r.x()) &&
         std::min(p.y(), r.y()) <= q.y() && q.y() <= std::max(p.y(), r.y());
}

}  // namespace

void ScoreWeights::validate() const {
  if (belief < 0.0 || traversability < 0.0 || time < 0.0) {
    throw InputError("score weights must be >= 0");
  }
  if (!(v_max > 0.0)) throw InputError("v_max must be > 0");
  if (ellipse_samples < 1) throw InputError("ellipse_samples must be >= 1");
}

ScoreWeights default_biped_weights() { return {}; }

ScoreWeights default_quad_weights() {
  ScoreWeights w;
  w.traversability = 0.0;
  w.time = 0.5;
  w.v_max = 1.5;
  return w;
}

double total_score(const ScoreWeights& w, const ScoreComponents& s) {
  return w.belief * s.belief + w.traversability * s.traversability +
         w.time * s.time;
}

std::vector<Vec2> candidate_targets(const Bounds& bounds, int count,
                                    std::mt19937_64& rng) {
  if (count < 1) throw InputError("candidate_targets: count must be >= 1");
  std::uniform_real_distribution<double> ux(bounds.min_x, bounds.max_x);
  std::uniform_real_distribution<double> uy(bounds.min_y, bounds.max_y);
  std::vector<Vec2> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x = ux(rng);
    out.emplace_back(x, uy(rng));
  }
  return out;
}

double belief_score(const BeliefField& belief, const Vec2& t, double alpha_b) {
  return belief.ucb(t, alpha_b);
}

std::vector<Vec2> ellipse_samples(const Vec2& p0, const Vec2& t, int count,
                                  std::mt19937_64& rng) {
  if (count < 1) throw InputError("ellipse_samples: count must be >= 1");
  const Vec2 d = t - p0;
  const double dist = d.norm();
  if (dist == 0.0) return {p0};
  const double b = std::max(0.5, 0.25 * dist);
  const double a = std::hypot(b, 0.5 * dist);
  const Vec2 e1 = d / dist;
  const Vec2 e2(-e1.y(), e1.x());
  const Vec2 center = 0.5 * (p0 + t);
  std::uniform_real_distribution<double> uu(-a, a);
  std::uniform_real_distribution<double> uv(-b, b);
  std::vector<Vec2> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    const double u = uu(rng);
    const double v = uv(rng);
    if ((u / a) * (u / a) + (v / b) * (v / b) <= 1.0) {
      out.push_back(center + u * e1 + v * e2);
    }
  }
  return out;
}

double traversability_score(const TerrainField& terrain, const Vec2& p0,
                            const Vec2& t, double alpha_t, int samples,
                            std::mt19937_64& rng) {
  const std::vector<Vec2> pts = ellipse_samples(p0, t, samples, rng);
  if (terrain.model().empty()) return 0.0;
  std::vector<double> mags;
  mags.reserve(pts.size());
  for (const Vec2& p : pts) {
    mags.push_back(terrain.model().predict_mean_gradient(p).norm());
  }
  double mean = 0.0;
  for (double m : mags) mean += m;
  mean /= static_cast<double>(mags.size());
  double var = 0.0;
  for (double m : mags) var += (m - mean) * (m - mean);
  var /= static_cast<double>(mags.size());
  return -mean - alpha_t * std::sqrt(var);
}

double time_score(const Vec2& p0, const Vec2& t, double v_max) {
  if (!(v_max > 0.0)) throw InputError("time_score: v_max must be > 0");
  return -(t - p0).norm() / v_max;
}

ScoreTable score_targets(std::span<const SearchRobot> robots,
                         std::span<const Vec2> targets,
                         const BeliefField& belief, const TerrainField& terrain,
                         std::mt19937_64& rng) {
  ScoreTable table(robots.size(), std::vector<ScoreComponents>(targets.size()));
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const SearchRobot& r = robots[i];
    for (std::size_t k = 0; k < targets.size(); ++k) {
      ScoreComponents& s = table[i][k];
      s.belief = belief_score(belief, targets[k], r.weights.alpha_b);
      if (r.weights.traversability > 0.0) {
        s.traversability =
            traversability_score(terrain, r.position, targets[k],
                                 r.weights.alpha_t, r.weights.ellipse_samples, rng);
      }
      s.time = time_score(r.position, targets[k], r.weights.v_max);
    }
  }
  return table;
}

std::vector<Assignment> auction(std::span<const SearchRobot> robots,
                                std::span<const Vec2> targets,
                                const ScoreTable& scores) {
  if (targets.empty()) throw InputError("auction: no targets");
  std::vector<Assignment> out;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    int best = 0;
    double best_total = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const double v = total_score(robots[i].weights, scores[i][k]);
      if (v > best_total) {
        best_total = v;
        best = static_cast<int>(k);
      }
    }
    out.push_back({robots[i].robot, best, targets[best], best_total,
                   scores[i][best]});
  }
  return out;
}

bool segments_conflict(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                       const Vec2& b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, b0, a1)) return true;
  if (o2 == 0 && on_segment(a0, b1, a1)) return true;
  if (o3 == 0 && on_segment(b0, a0, b1)) return true;
  if (o4 == 0 && on_segment(b0, a1, b1)) return true;
  return false;
}

ConflictReport resolve_conflicts(const std::vector<Assignment>& assignments,
                                 std::span<const SearchRobot> robots,
                                 std::span<const Vec2> targets,
                                 const ScoreTable& scores, int max_sweeps) {
  if (assignments.size() != robots.size()) {
    throw InputError("resolve_conflicts: assignment/robot count mismatch");
  }
  ConflictReport rep;
  rep.assignments = assignments;
  auto& as = rep.assignments;
  const std::size_t n = robots.size();
  const int nt = static_cast<int>(targets.size());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool any = false;
    rep.unresolved_pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2& pi = robots[i].position;
        const Vec2& pj = robots[j].position;
        if (!segments_conflict(pi, as[i].target, pj, as[j].target)) continue;
        any = true;
        double best = -std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int ti = 0; ti < nt; ++ti) {
          const double si = total_score(robots[i].weights, scores[i][ti]);
          for (int tj = 0; tj < nt; ++tj) {
            const double sum = si + total_score(robots[j].weights, scores[j][tj]);
            if (sum <= best) continue;
            if (segments_conflict(pi, targets[ti], pj, targets[tj])) continue;
            best = sum;
            bi = ti;
            bj = tj;
          }
        }
        if (bi < 0) {
          ++rep.unresolved_pairs;
          continue;
        }
        as[i] = {robots[i].robot, bi, targets[bi],
                 total_score(robots[i].weights, scores[i][bi]), scores[i][bi]};
        as[j] = {robots[j].robot, bj, targets[bj],
                 total_score(robots[j].weights, scores[j][bj]), scores[j][bj]};
      }
    }
    if (!any) break;
    ++rep.sweeps;
  }
  return rep;
}

Vec2 orbit_target(const Vec2& biped, int step, double radius, OrbitMode mode,
                  int period) {
  if (!(radius > 0.0)) throw InputError("orbit_target: radius must be > 0");
  double angle = 0.0;
  if (mode == OrbitMode::kFixedRate) {
    angle = 2.0 * step / std::numbers::pi;
  } else {
    if (period < 1) throw InputError("orbit_target: period must be >= 1");
    angle = 2.0 * std::numbers::pi * step / period;
  }
  return biped + radius * Vec2(std::cos(angle), std::sin(angle));
}

RescuePlan rescue_targets(const Mission& mission,
                          std::span<const Vec2> robot_positions,
                          std::span<const Vec2> subject_positions,
                          const std::vector<bool>& subject_carried, int step,
                          const RescueContext& ctx) {
  const auto& tasks = mission.robot_tasks();
  if (robot_positions.size() != tasks.size() ||
      subject_positions.size() != mission.subjects().size() ||
      subject_carried.size() != mission.subjects().size()) {
    throw InputError("rescue_targets: size mismatch");
  }
  RescuePlan plan;
  plan.targets.resize(tasks.size());
  for (std::size_t s = 1; s <= mission.subjects().size(); ++s) {
    const bool carried = subject_carried[s - 1];
    const Vec2 goal = carried ? ctx.rescue_point : subject_positions[s - 1];
    std::vector<std::size_t> pair;
    for (std::size_t r = 0; r < tasks.size(); ++r) {
      if (tasks[r].subject != static_cast<int>(s)) continue;
      if (tasks[r].gamma == 2) plan.targets[r] = ctx.bounds.clamp(goal);
      if (tasks[r].gamma == 3) pair.push_back(r);
    }
    if (pair.size() == 2) {
      Vec2 axis = robot_positions[pair[1]] - robot_positions[pair[0]];
      axis = axis.norm() > 1e-9 ? Vec2(axis.normalized()) : Vec2(1.0, 0.0);
      const Vec2 half = 0.5 * ctx.pair_spacing * axis;
      plan.targets[pair[0]] = ctx.bounds.clamp(goal - half);
      plan.targets[pair[1]] = ctx.bounds.clamp(goal + half);
      if (carried) plan.distance_pair = {pair[0], pair[1]};
      for (std::size_t r = 0; r < tasks.size(); ++r) {
        if (tasks[r].subject == static_cast<int>(s) && tasks[r].gamma == 4) {
          plan.targets[r] = ctx.bounds.clamp(
              orbit_target(robot_positions[pair[0]], step, ctx.orbit_radius,
                           ctx.orbit_mode, ctx.orbit_period));
        }
      }
    }
  }
  return plan;
}

}  // namespace sarplan
