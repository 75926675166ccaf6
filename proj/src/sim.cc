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

#include "sarplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sarplan {
namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

enum Stream : std::uint64_t { kPriorStream = 1, kSubjectStream = 2, kPlanStream = 3 };

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

BeliefField make_belief(const SimConfig& c) {
  BeliefFieldOptions options = c.belief_field;
  options.bounds = c.bounds;
  options.lattice_nx = static_cast<std::size_t>(c.metric_grid);
  options.lattice_ny = static_cast<std::size_t>(c.metric_grid);
  return BeliefField::build_prior(c.prior, options,
                                  derive_seed(c.seed, kPriorStream));
}

std::vector<std::string> subject_formulas(const SimConfig& c) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c.subjects.size(); ++i) {
    out.push_back(instantiate_spec(c.subjects[i].spec, static_cast<int>(i) + 1));
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  require(bounds.max_x > bounds.min_x && bounds.max_y > bounds.min_y,
          "world.size", "must be positive");
  require(bounds.contains(rescue_point), "world.rescue_point", "outside bounds");
  require(steps >= 0, "sim.steps", "must be >= 0");
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const std::string f = "subjects.subject" + std::to_string(i + 1);
    if (subjects[i].position) {
      require(bounds.contains(*subjects[i].position), f + "_position",
              "outside bounds");
    }
    try {
      scltl::parse(instantiate_spec(subjects[i].spec, static_cast<int>(i) + 1));
    } catch (const SyntaxError& e) {
      throw ConfigError(f + "_spec: " + e.what());
    }
  }
  require(!prior.points.empty() ||
              std::all_of(subjects.begin(), subjects.end(),
                          [](const SubjectConfig& s) { return s.position.has_value(); }),
          "belief.prior", "needed to draw subject positions");
  for (std::size_t i = 0; i < prior.points.size(); ++i) {
    require(bounds.contains(prior.points[i].position), "belief.prior",
            "point " + std::to_string(i + 1) + " outside bounds");
    require(prior.points[i].confidence > 0.0, "belief.prior",
            "confidence must be > 0");
  }
  require(prior.samples_per_point >= 1, "belief.samples_per_point", "must be >= 1");
  for (const Vec2& p : biped_starts) {
    require(bounds.contains(p), "fleet.biped_starts", "outside bounds");
  }
  for (const Vec2& p : quad_starts) {
    require(bounds.contains(p), "fleet.quad_starts", "outside bounds");
  }
  require(biped_headings.empty() || biped_headings.size() == biped_starts.size(),
          "fleet.biped_headings", "count must match fleet.biped_starts");
  require(!biped_starts.empty() || !quad_starts.empty(), "fleet",
          "need at least one robot");
  for (std::size_t i = 0; i < initial_samples.size(); ++i) {
    require(bounds.contains(initial_samples[i]), "terrain.initial_samples",
            "sample " + std::to_string(i + 1) + " outside bounds");
  }
  for (const auto& [name, v] :
       {std::pair{"sensing.biped_sensor_radius", biped_sensor_radius},
        {"sensing.quad_sensor_radius", quad_sensor_radius},
        {"sensing.biped_detection_radius", biped_detection_radius},
        {"sensing.quad_detection_radius", quad_detection_radius},
        {"rescue.pickup_radius", pickup_radius},
        {"rescue.delivery_tolerance", delivery_tolerance},
        {"allocation.untraversable_radius", untraversable_radius},
        {"assignment.orbit_radius", rescue.orbit_radius}}) {
    require(v > 0.0, name, "must be > 0");
  }
  require(candidate_count >= 1, "assignment.candidates", "must be >= 1");
  require(epoch_steps >= 1, "assignment.epoch_steps", "must be >= 1");
  require(metric_grid >= 2, "sim.metric_grid", "must be >= 2");
  require(grid_every >= 0, "sim.grid_every", "must be >= 0");
  try {
    mpc.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("mpc: ") + e.what());
  }
  try {
    biped_weights.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("assignment.biped: ") + e.what());
  }
  try {
    quad_weights.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("assignment.quad: ") + e.what());
  }
}

SimConfig default_sim_config() {
  SimConfig c;
  c.terrain.bounds = c.bounds;
  c.terrain.plane = Vec2(0.01, 0.005);
  c.terrain.hills = {
      {Vec2(6.0, 5.0), 1.0, 2.5},   {Vec2(12.0, 9.0), -0.9, 2.2},
      {Vec2(5.0, 13.0), 1.1, 2.6},  {Vec2(15.0, 15.0), 0.9, 2.4},
      {Vec2(16.0, 4.0), 0.8, 2.0},  {Vec2(10.0, 17.0), -0.7, 2.0},
  };
  for (int ix = 0; ix < 10; ++ix) {
    for (int iy = 0; iy < 5; ++iy) {
      c.initial_samples.emplace_back(1.0 + 2.0 * ix, 2.0 + 4.0 * iy);
    }
  }
  c.terrain_field.bounds = c.bounds;
  c.terrain_field.min_admit_stddev = 0.1;
  c.belief_field.bounds = c.bounds;
  c.prior.points = {{Vec2(15.0, 6.0), 2.0}, {Vec2(6.0, 15.0), 2.0},
                    {Vec2(14.0, 14.0), 2.0}};
  c.subjects = {SubjectConfig{std::nullopt, kQuadOrBipedSpec},
                SubjectConfig{std::nullopt, kBipedOnlySpec}};
  c.biped_starts = {Vec2(1.0, 1.0), Vec2(2.2, 1.0)};
  c.biped_headings = {std::numbers::pi / 4.0, std::numbers::pi / 4.0};
  c.quad_starts = {Vec2(1.0, 2.5), Vec2(2.5, 2.5)};
  c.mpc.bounds = c.bounds;
  c.rescue.bounds = c.bounds;
  c.rescue.rescue_point = c.rescue_point;
  return c;
}

World::World(SimConfig config)
    : config_(std::move(config)),
      terrain_((config_.validate(), config_.terrain_field)),
      belief_(make_belief(config_)),
      mission_(subject_formulas(config_),
               static_cast<int>(config_.biped_starts.size()),
               static_cast<int>(config_.quad_starts.size())),
      controller_(config_.mpc),
      rng_(derive_seed(config_.seed, kPlanStream)) {
  const Bounds& b = config_.bounds;
  grid_ = make_grid(b, config_.metric_grid, config_.metric_grid);

  std::vector<TerrainSample> initial;
  for (const Vec2& p : config_.initial_samples) {
    initial.push_back({p, ground_truth_elevation(config_.terrain, p)});
  }
  if (!initial.empty()) terrain_.ingest(initial);

  std::mt19937_64 subject_rng(derive_seed(config_.seed, kSubjectStream));
  std::normal_distribution<double> normal(0.0, 1.0);
  const Bounds inner{b.min_x + 0.5, b.min_y + 0.5, b.max_x - 0.5, b.max_y - 0.5};
  for (const SubjectConfig& s : config_.subjects) {
    SubjectState st;
    if (s.position) {
      st.position = *s.position;
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, config_.prior.points.size() - 1);
      const BeliefPoint& bp = config_.prior.points[pick(subject_rng)];
      const double dx = normal(subject_rng);
      const double dy = normal(subject_rng);
      st.position = inner.clamp(bp.position + bp.confidence * Vec2(dx, dy));
    }
    subjects_.push_back(st);
  }

  for (std::size_t i = 0; i < config_.biped_starts.size(); ++i) {
    const Vec2& p = config_.biped_starts[i];
    LipState s;
    s.position = Vec3(p.x(), p.y(),
                      ground_truth_elevation(config_.terrain, p) +
                          config_.mpc.lip.com_height);
    s.heading = config_.biped_headings.empty() ? 0.0 : config_.biped_headings[i];
    fleet_.bipeds.push_back(s);
  }
  for (const Vec2& p : config_.quad_starts) {
    QuadState s;
    s.position = Vec3(p.x(), p.y(), config_.quad_altitude);
    fleet_.quads.push_back(s);
  }
  const std::size_t n = fleet_.bipeds.size() + fleet_.quads.size();
  search_targets_.assign(n, std::nullopt);
  search_since_.assign(n, 0);
  record(nullptr);
}

std::vector<Vec2> World::robot_positions() const {
  std::vector<Vec2> out;
  for (const LipState& s : fleet_.bipeds) out.push_back(s.position.head<2>());
  for (const QuadState& s : fleet_.quads) out.push_back(s.position.head<2>());
  return out;
}

EnvironmentAtoms World::environment_at(const Vec2& p) const {
  EnvironmentAtoms env;
  env.wind = std::any_of(config_.wind_zones.begin(), config_.wind_zones.end(),
                         [&](const WindZone& z) { return z.contains(p); });
  env.untraversable = max_slope_within(config_.terrain, p,
                                       config_.untraversable_radius) >
                      config_.untraversable_slope;
  return env;
}

std::vector<SensorBatch> World::sense() const {
  std::vector<SensorBatch> out;
  const std::vector<Vec2> pos = robot_positions();
  for (std::size_t r = 0; r < pos.size(); ++r) {
    const bool biped = r < fleet_.bipeds.size();
    const double radius =
        biped ? config_.biped_sensor_radius : config_.quad_sensor_radius;
    SensorBatch batch;
    batch.robot = static_cast<int>(r);
    std::vector<Vec2> pts{pos[r]};
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::numbers::pi / 4.0;
      pts.push_back(pos[r] + radius * Vec2(std::cos(a), std::sin(a)));
    }
    for (const Vec2& p : pts) {
      if (!config_.bounds.contains(p)) continue;
      batch.samples.push_back({p, ground_truth_elevation(config_.terrain, p)});
    }
    out.push_back(std::move(batch));
  }
  return out;
}

std::vector<MissionEvent> World::detect() const {
  std::vector<MissionEvent> events;
  const std::vector<Vec2> pos = robot_positions();
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    if (mission_.subjects()[s].phase != SubjectPhase::kUnfound) continue;
    for (std::size_t r = 0; r < pos.size(); ++r) {
      const double radius = r < fleet_.bipeds.size()
                                ? config_.biped_detection_radius
                                : config_.quad_detection_radius;
      if ((pos[r] - subjects_[s].position).norm() <= radius) {
        events.push_back({ObservationKind::kFound, static_cast<int>(s) + 1,
                          environment_at(subjects_[s].position)});
        break;
      }
    }
  }
  return events;
}

std::vector<MissionEvent> World::handle_carry() {
  std::vector<MissionEvent> events;
  const std::vector<Vec2> pos = robot_positions();
  const auto& tasks = mission_.robot_tasks();
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    SubjectState& st = subjects_[s];
    const int id = static_cast<int>(s) + 1;
    if (mission_.subjects()[s].phase != SubjectPhase::kAwaitingRescue) {
      st.carried = false;
      st.carrier = -1;
      continue;
    }
    int quad = -1;
    std::vector<int> pair;
    for (std::size_t r = 0; r < tasks.size(); ++r) {
      if (tasks[r].subject != id) continue;
      if (tasks[r].gamma == 2) quad = static_cast<int>(r);
      if (tasks[r].gamma == 3) pair.push_back(static_cast<int>(r));
    }
    std::optional<Vec2> carrier_pos;
    ObservationKind kind = ObservationKind::kQuadRescued;
    if (quad >= 0) {
      carrier_pos = pos[quad];
    } else if (pair.size() == 2) {
      carrier_pos = 0.5 * (pos[pair[0]] + pos[pair[1]]);
      kind = ObservationKind::kBipedRescued;
    }
    if (!carrier_pos) {
      st.carried = false;
      st.carrier = -1;
      continue;
    }
    if (!st.carried && (*carrier_pos - st.position).norm() <= config_.pickup_radius) {
      st.carried = true;
      st.carrier = quad >= 0 ? quad : pair[0];
      log_.push_back("step " + std::to_string(step_) + " pickup subject " +
                     std::to_string(id));
    }
    if (st.carried) {
      st.position = *carrier_pos;
      if ((st.position - config_.rescue_point).norm() <= config_.delivery_tolerance) {
        st.carried = false;
        st.carrier = -1;
        st.delivered = true;
        events.push_back({kind, id, {}});
        log_.push_back("step " + std::to_string(step_) + " delivered subject " +
                       std::to_string(id));
      }
    }
  }
  return events;
}

void World::reassign_search(bool force) {
  const auto& tasks = mission_.robot_tasks();
  const std::vector<Vec2> pos = robot_positions();
  bool epoch = force || step_ % config_.epoch_steps == 0;
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    if (tasks[r].gamma != 1) {
      search_targets_[r].reset();
      continue;
    }
    if (!search_targets_[r] ||
        (pos[r] - *search_targets_[r]).norm() <= config_.target_reached) {
      epoch = true;
    }
  }
  if (!epoch) return;

  std::vector<SearchRobot> robots;
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    if (tasks[r].gamma != 1) continue;
    const bool biped = r < fleet_.bipeds.size();
    robots.push_back({static_cast<int>(r), pos[r],
                      biped ? config_.biped_weights : config_.quad_weights});
  }
  if (robots.empty()) return;
  const std::vector<Vec2> targets =
      candidate_targets(config_.bounds, config_.candidate_count, rng_);
  const ScoreTable scores = score_targets(robots, targets, belief_, terrain_, rng_);
  std::vector<Assignment> as = auction(robots, targets, scores);
  if (config_.conflict_resolution) {
    ConflictReport rep = resolve_conflicts(as, robots, targets, scores);
    if (rep.unresolved_pairs > 0) {
      log_.push_back("step " + std::to_string(step_) + " warning: " +
                     std::to_string(rep.unresolved_pairs) +
                     " conflicting pair(s) without a conflict-free alternative");
    }
    as = std::move(rep.assignments);
  }
  for (const Assignment& a : as) {
    search_targets_[a.robot] = a.target;
    assignment_rows_.push_back(
        {step_, mission_.robot_name(a.robot), a.target, a.total, a.parts});
  }
}

void World::step() {
  if (step_ >= config_.steps) throw std::logic_error("step budget exhausted");

  // Sense: terrain samples, subject detection, searched marks, carrying.
  std::vector<TerrainSample> samples;
  for (const SensorBatch& b : sense()) {
    samples.insert(samples.end(), b.samples.begin(), b.samples.end());
  }
  terrain_.ingest(samples);
  std::vector<MissionEvent> events = detect();
  std::vector<SearchMark> marks;
  const std::vector<Vec2> pos = robot_positions();
  for (std::size_t r = 0; r < pos.size(); ++r) {
    marks.push_back({pos[r], r < fleet_.bipeds.size()
                                 ? config_.biped_detection_radius
                                 : config_.quad_detection_radius});
  }
  belief_.mark_searched(marks);
  const std::vector<MissionEvent> carry = handle_carry();
  events.insert(events.end(), carry.begin(), carry.end());

  // Allocation.
  std::vector<Vec2> subject_pos;
  for (const SubjectState& s : subjects_) subject_pos.push_back(s.position);
  const PlanStepResult plan = mission_.plan_step(step_, events, pos, subject_pos);
  for (const TaskEmission& e : plan.emissions) {
    log_.push_back("step " + std::to_string(step_) + " emit " +
                   task_label(e.gamma) + " subject " + std::to_string(e.subject));
  }
  for (int s : plan.failed_subjects) {
    log_.push_back("step " + std::to_string(step_) + " mission failure subject " +
                   std::to_string(s));
  }

  // Assignment.
  reassign_search(plan.reassign);
  std::vector<bool> carried;
  for (const SubjectState& s : subjects_) carried.push_back(s.carried);
  const RescuePlan rescue =
      rescue_targets(mission_, pos, subject_pos, carried, step_, config_.rescue);

  FleetTargets targets;
  const std::size_t nb = fleet_.bipeds.size();
  for (std::size_t r = 0; r < pos.size(); ++r) {
    Vec2 t = pos[r];
    if (rescue.targets[r]) {
      t = *rescue.targets[r];
    } else if (search_targets_[r]) {
      t = *search_targets_[r];
    }
    if (r < nb) {
      targets.bipeds.push_back(t);
    } else {
      targets.quads.emplace_back(t.x(), t.y(), config_.quad_altitude);
    }
  }
  targets.distance_pair = rescue.distance_pair;

  // Control.
  const RecedingStepResult result = controller_.step(fleet_, targets, terrain_);
  if (!result.solution.converged) ++mpc_nonconverged_;
  ++step_;

  // Carried subjects follow their carriers.
  const std::vector<Vec2> moved = robot_positions();
  const auto& tasks = mission_.robot_tasks();
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    SubjectState& st = subjects_[s];
    if (!st.carried) continue;
    const int r = st.carrier;
    if (tasks[r].gamma == 3) {
      std::vector<Vec2> pair;
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (tasks[k].gamma == 3 && tasks[k].subject == static_cast<int>(s) + 1) {
          pair.push_back(moved[k]);
        }
      }
      if (pair.size() == 2) st.position = 0.5 * (pair[0] + pair[1]);
    } else {
      st.position = moved[r];
    }
  }
  record(&result);
}

void World::record(const RecedingStepResult*) {
  MetricsRow m;
  m.step = step_;
  m.avg_belief = belief_.average_belief(grid_);
  m.avg_terrain_std = terrain_.average_stddev(grid_);
  for (const LipState& s : fleet_.bipeds) {
    const Vec2 p = s.position.head<2>();
    m.biped_slopes.push_back(
        std::abs(rotate_to_local(config_.terrain.gradient(p), s.heading).lateral));
  }
  metrics_.push_back(std::move(m));

  const auto& tasks = mission_.robot_tasks();
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    task_rows_.push_back({step_, mission_.robot_name(static_cast<int>(r)),
                          tasks[r].gamma, tasks[r].subject});
  }
  for (std::size_t i = 0; i < fleet_.bipeds.size(); ++i) {
    const LipState& s = fleet_.bipeds[i];
    path_rows_.push_back({step_, mission_.robot_name(static_cast<int>(i)),
                          s.position.x(), s.position.y(), s.position.z(),
                          s.heading});
  }
  for (std::size_t i = 0; i < fleet_.quads.size(); ++i) {
    const QuadState& s = fleet_.quads[i];
    const double heading = s.velocity.head<2>().norm() > 1e-9
                               ? std::atan2(s.velocity.y(), s.velocity.x())
                               : 0.0;
    path_rows_.push_back(
        {step_, mission_.robot_name(static_cast<int>(fleet_.bipeds.size() + i)),
         s.position.x(), s.position.y(), s.position.z(), heading});
  }
  if (config_.grid_every > 0 && step_ % config_.grid_every == 0) snapshot_grids();
}

void World::snapshot_grids() {
  grid_snapshots_.push_back({step_, terrain_grid_csv(terrain_, grid_),
                             belief_grid_csv(belief_, grid_)});
}

bool World::done() const {
  return step_ >= config_.steps ||
         (config_.stop_when_finished && mission_.finished());
}

RunReport World::run() {
  while (!done()) step();
  RunReport rep;
  rep.steps = step_;
  rep.final_metrics = metrics_.back();
  bool delivered = true;
  for (std::size_t s = 0; s < subjects_.size(); ++s) {
    if (mission_.subjects()[s].phase == SubjectPhase::kFailed) {
      rep.failed_subjects.push_back(static_cast<int>(s) + 1);
    }
    delivered = delivered && subjects_[s].delivered;
  }
  rep.success = mission_.all_accepted() && delivered;
  return rep;
}

}  // namespace sarplan
