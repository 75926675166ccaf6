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

#ifndef SARPLAN_SIM_HPP_
#define SARPLAN_SIM_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sarplan/allocation.hpp"
#include "sarplan/assignment.hpp"
#include "sarplan/belief.hpp"
#include "sarplan/common.hpp"
#include "sarplan/mpc.hpp"
#include "sarplan/terrain.hpp"

namespace sarplan {

struct WindZone {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(const Vec2& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }
};

struct SubjectConfig {
  std::optional<Vec2> position;  // drawn from the belief prior when empty
  std::string spec = kQuadOrBipedSpec;  // "{n}" becomes the subject id
};

struct SimConfig {
  Bounds bounds;
  Vec2 rescue_point{19.0, 19.0};
  std::uint64_t seed = 1;
  int steps = 700;
  bool stop_when_finished = true;

  TerrainScenario terrain;
  std::vector<Vec2> initial_samples;  // ground-truth elevations known at start
  TerrainFieldOptions terrain_field;

  BeliefPrior prior;
  BeliefFieldOptions belief_field;

  std::vector<WindZone> wind_zones;
  std::vector<SubjectConfig> subjects;

  std::vector<Vec2> biped_starts;
  std::vector<double> biped_headings;
  std::vector<Vec2> quad_starts;
  double quad_altitude = 3.0;

  double biped_sensor_radius = 1.5;
  double quad_sensor_radius = 3.0;
  double biped_detection_radius = 1.5;
  double quad_detection_radius = 3.0;
  double pickup_radius = 0.5;
  double delivery_tolerance = 0.5;
  double untraversable_slope = 0.45;
  double untraversable_radius = 1.0;

  MpcConfig mpc;
  ScoreWeights biped_weights = default_biped_weights();
  ScoreWeights quad_weights = default_quad_weights();
  int candidate_count = 100;  // T
  int epoch_steps = 10;       // periodic reassignment
  double target_reached = 0.5;
  bool conflict_resolution = true;
  RescueContext rescue;

  int metric_grid = 21;  // points per axis
  int grid_every = 50;   // 0 disables grid snapshots

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Built-in 20 x 20 m scenario with two bipeds, two quadrotors and two
// subjects.
SimConfig default_sim_config();

struct MetricsRow {
  int step = 0;
  double avg_belief = 0.0;
  double avg_terrain_std = 0.0;
  std::vector<double> biped_slopes;  // |true lateral slope| per biped
};

struct TaskRow {
  int step = 0;
  std::string robot;
  int gamma = 1;
  int subject = 0;
};

struct PathRow {
  int step = 0;
  std::string robot;
  double x = 0.0, y = 0.0, z = 0.0, heading = 0.0;
};

struct AssignmentRow {
  int step = 0;
  std::string robot;
  Vec2 target{0.0, 0.0};
  double total = 0.0;
  ScoreComponents parts;
};

struct SubjectState {
  Vec2 position{0.0, 0.0};
  bool carried = false;
  bool delivered = false;
  int carrier = -1;  // robot index, or -1
};

struct SensorBatch {
  int robot = 0;
  std::vector<TerrainSample> samples;
};

struct RunReport {
  bool success = false;
  int steps = 0;
  std::vector<int> failed_subjects;
  MetricsRow final_metrics;
};

class World {
 public:
  explicit World(SimConfig config);

  // Ground-truth elevation samples at the fixed nine-point pattern of every
  // robot (out-of-bounds points dropped), plus found events.
  std::vector<SensorBatch> sense() const;
  std::vector<MissionEvent> detect() const;

  // One full planning and control cycle. Throws std::logic_error when the
  // step budget is already spent.
  void step();
  bool done() const;
  RunReport run();

  const SimConfig& config() const { return config_; }
  int step_index() const { return step_; }
  const Fleet& fleet() const { return fleet_; }
  const TerrainField& terrain() const { return terrain_; }
  const BeliefField& belief() const { return belief_; }
  const Mission& mission() const { return mission_; }
  const std::vector<SubjectState>& subjects() const { return subjects_; }
  const std::vector<Vec2>& metric_grid() const { return grid_; }

  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  const std::vector<TaskRow>& task_rows() const { return task_rows_; }
  const std::vector<PathRow>& path_rows() const { return path_rows_; }
  const std::vector<AssignmentRow>& assignment_rows() const {
    return assignment_rows_;
  }
  const std::vector<std::string>& log() const { return log_; }
  int mpc_nonconverged() const { return mpc_nonconverged_; }

  // Writes metrics.csv, tasks.csv, paths.csv, assignments.csv, events.csv
  // and grid snapshots into `dir` (created if missing).
  void write_traces(const std::filesystem::path& dir) const;

 private:
  std::vector<Vec2> robot_positions() const;
  EnvironmentAtoms environment_at(const Vec2& p) const;
  std::vector<MissionEvent> handle_carry();
  void reassign_search(bool force);
  void record(const RecedingStepResult* result);
  void snapshot_grids();

  SimConfig config_;
  int step_ = 0;
  Fleet fleet_;
  TerrainField terrain_;
  BeliefField belief_;
  Mission mission_;
  std::vector<SubjectState> subjects_;
  RecedingHorizonController controller_;
  std::mt19937_64 rng_;
  std::vector<Vec2> grid_;
  std::vector<std::optional<Vec2>> search_targets_;
  std::vector<int> search_since_;

  std::vector<MetricsRow> metrics_;
  std::vector<TaskRow> task_rows_;
  std::vector<PathRow> path_rows_;
  std::vector<AssignmentRow> assignment_rows_;
  struct GridSnapshot {
    int step;
    std::string terrain_csv;
    std::string belief_csv;
  };
  std::vector<GridSnapshot> grid_snapshots_;
  std::vector<std::string> log_;
  int mpc_nonconverged_ = 0;
};

}  // namespace sarplan

#endif  // SARPLAN_SIM_HPP_
